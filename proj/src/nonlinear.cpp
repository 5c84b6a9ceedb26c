#include "schrctl/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace schrctl {

namespace {

void check_basis_matches(const SpectralBasis& b, const PotentialField& alpha) {
    const DiscreteOperator op = assemble_operator(b.grid(), alpha);
    const WaveField v = b.mode_field(0);
    const double q = op.quadratic_form(v);
    if (std::abs(q - b.lambda(0)) > 1e-6 * std::max(1.0, b.lambda(0)))
        throw std::invalid_argument("nonlinear: basis does not match the propagation potential");
}

double w1_norm(const SpectralBasis& b, const std::vector<Complex>& c) {
    double s = 0.0;
    for (int k = 0; k < b.n_modes(); ++k) s += b.lambda(k) * std::norm(c[k]);
    return std::sqrt(s);
}

double w1_distance_sup(const SpectralTrajectory& a, const SpectralTrajectory& b) {
    const SpectralBasis& basis = *a.basis;
    const int m = basis.n_modes();
    double worst = 0.0;
    for (size_t j = 0; j < a.coeffs.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            s += basis.lambda(k) * std::norm(a.coeffs[j][k] - b.coeffs[j][k]);
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double w1_norm_sup(const SpectralTrajectory& a) {
    const SpectralBasis& basis = *a.basis;
    double worst = 0.0;
    for (const auto& c : a.coeffs) worst = std::max(worst, w1_norm(basis, c));
    return worst;
}

}  // namespace

SpectralTrajectory nonlinear_term(const SpectralTrajectory& v, const KernelSpec& kernel,
                                  const PotentialField& alpha) {
    if (v.basis == nullptr) throw std::invalid_argument("nonlinear_term: basis missing");
    const SpectralBasis& b = *v.basis;
    check_basis_matches(b, alpha);
    if (kernel.grid.n_points != b.grid().n_points)
        throw std::invalid_argument("nonlinear_term: kernel grid mismatch");
    const int m = b.n_modes();
    const int M = v.steps();
    if (M < 1) throw std::invalid_argument("nonlinear_term: empty trajectory");

    // forcing m(v(t))v(t), sampled on the same mesh, as mode coefficients
    std::vector<std::vector<Complex>> fhat(M + 1);
    for (int j = 0; j <= M; ++j) {
        const WaveField vg = b.synthesize(v.coeffs[j]);
        fhat[j] = b.project(apply_nonlinear(vg, kernel));
    }

    // zero-data forced CN, diagonal in the basis (Duhamel form of N)
    SpectralTrajectory out;
    out.basis = v.basis;
    out.dt = v.dt;
    out.coeffs.assign(M + 1, std::vector<Complex>(m, Complex(0.0)));
    const Complex ih(0.0, 0.5 * v.dt);
    for (int j = 1; j <= M; ++j)
        for (int k = 0; k < m; ++k) {
            const double z = 0.5 * v.dt * b.lambda(k);
            out.coeffs[j][k] = (Complex(1.0, -z) * out.coeffs[j - 1][k] -
                                ih * (fhat[j - 1][k] + fhat[j][k])) /
                               Complex(1.0, z);
        }
    return out;
}

GammaResult gamma_map(const SpectralTrajectory& v, const LinearControlProblem& base,
                      const KernelSpec& kernel) {
    const SpectralBasis& b = *base.basis;
    if (v.basis != base.basis) throw std::invalid_argument("gamma_map: basis mismatch");
    const SpectralTrajectory tail = nonlinear_term(v, kernel, base.alpha);
    const int M = tail.steps();

    LinearControlProblem shifted = base;
    const WaveField tail_end = b.synthesize(tail.coeffs[M]);
    for (size_t i = 0; i < shifted.uT.size(); ++i) shifted.uT[i] -= tail_end[i];

    GammaResult out;
    out.lin = solve_control(shifted);
    out.h = out.lin.h;
    out.traj = out.lin.u;
    for (int j = 0; j <= M; ++j)
        for (int k = 0; k < b.n_modes(); ++k) out.traj.coeffs[j][k] += tail.coeffs[j][k];
    return out;
}

NonlinearControlRun fixed_point_solve(NonlinearControlRun run) {
    run.linear.validate();
    if (run.tol <= 0.0 || run.max_iter < 1)
        throw std::invalid_argument("fixed_point_solve: bad tolerance settings");
    const SpectralBasis& b = *run.linear.basis;

    // v0 = linear controlled trajectory; it interpolates the data already
    const ControlSolution lin = solve_control(run.linear);
    SpectralTrajectory v = lin.u;
    run.h = lin.h;
    run.cost = lin.cost;

    const double data_size =
        w1_norm(b, b.project(run.linear.u0)) + w1_norm(b, b.project(run.linear.uT));
    run.measured_a = data_size > 0.0 ? w1_norm_sup(v) / data_size : 0.0;

    run.distances.clear();
    run.ratios.clear();
    run.converged = false;
    int non_contracting = 0;
    for (int k = 1; k <= run.max_iter; ++k) {
        GammaResult g = gamma_map(v, run.linear, run.kernel);
        const double d = w1_distance_sup(g.traj, v);
        run.iterations = k;
        run.distances.push_back(d);
        if (k >= 2) {
            const double prev = run.distances[k - 2];
            const double r = prev > 0.0 ? d / prev : 0.0;
            run.ratios.push_back(r);
            // ignore ratio jitter once d sits at the solver noise floor
            non_contracting = (r >= 1.0 && d > 10.0 * run.tol) ? non_contracting + 1 : 0;
            if (non_contracting >= 3)
                throw std::runtime_error(
                    "fixed_point_solve: iteration is not contracting; the data lie "
                    "outside the small ball where the map contracts — shrink u0/uT");
        }
        v = std::move(g.traj);
        run.h = std::move(g.h);
        run.cost = g.lin.cost;
        if (d < run.tol) {
            run.converged = true;
            break;
        }
    }

    const double delta = w1_norm_sup(v);
    const SpectralTrajectory tail = nonlinear_term(v, run.kernel, run.linear.alpha);
    const double vsup = std::max(delta, 1e-300);
    run.measured_b = w1_norm_sup(tail) / (vsup * vsup * vsup);
    run.measured_c = (!run.ratios.empty() && delta > 0.0)
                         ? run.ratios.back() / (delta * delta)
                         : 0.0;

    run.u = std::move(v);
    const int M = run.u.steps();
    const auto uTc = b.project(run.linear.uT);
    double gap = 0.0;
    for (int k = 0; k < b.n_modes(); ++k)
        gap += b.lambda(k) * std::norm(run.u.coeffs[M][k] - uTc[k]);
    run.endpoint_gap = std::sqrt(gap);

    // independent verification: grid CN for the full nonlinear equation
    const Trajectory check = nonlinear_forward(run.linear.u0, run.linear.T, run.linear.dt,
                                               run.linear.alpha, run.kernel,
                                               run.linear.psi, run.h);
    const auto uc = b.project(check.fields.back());
    double err = 0.0;
    for (int k = 0; k < b.n_modes(); ++k)
        err += b.lambda(k) * std::norm(uc[k] - uTc[k]);
    run.target_error = std::sqrt(err);
    return run;
}

Trajectory nonlinear_forward(const WaveField& u0, double T, double dt,
                             const PotentialField& alpha, const KernelSpec& kernel,
                             const CutoffField& psi, const SpectralTrajectory& h) {
    const GridSpec& grid = alpha.grid;
    const int n = grid.n_points;
    const int M = static_cast<int>(std::lround(T / dt));
    if (M < 1 || std::abs(M * dt - T) > 1e-9)
        throw std::invalid_argument("nonlinear_forward: T not a multiple of dt");
    if (static_cast<int>(u0.size()) != n || psi.grid.n_points != n ||
        kernel.grid.n_points != n)
        throw std::invalid_argument("nonlinear_forward: grid mismatch");
    const bool forced = h.basis != nullptr;
    if (forced && (h.steps() != M || std::abs(h.dt - dt) > 1e-12))
        throw std::invalid_argument("nonlinear_forward: control mesh mismatch");

    const DiscreteOperator op = assemble_operator(grid, alpha);
    const Complex half(0.0, 0.5 * dt);

    auto forcing_at = [&](int j) {
        WaveField f(n, Complex(0.0));
        if (forced) {
            f = h.basis->synthesize(h.coeffs[j]);
            for (int i = 0; i < n; ++i) f[i] *= psi.values[i];
        }
        return f;
    };

    Trajectory traj;
    traj.grid = grid;
    traj.dt = dt;
    traj.fields.reserve(M + 1);
    traj.fields.push_back(u0);
    WaveField u = u0;
    WaveField flo = forcing_at(0);
    for (int j = 1; j <= M; ++j) {
        const WaveField fhi = forcing_at(j);
        const WaveField au = op.apply(u);
        const WaveField mu_u = apply_nonlinear(u, kernel);
        WaveField base(n);
        for (int i = 0; i < n; ++i)
            base[i] = u[i] - half * (au[i] + mu_u[i] + flo[i] + fhi[i]);
        WaveField next = u;  // inner fixed point on the implicit Hartree term
        for (int sweep = 0; sweep < 2; ++sweep) {
            const WaveField mn = apply_nonlinear(next, kernel);
            WaveField rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = base[i] - half * mn[i];
            next = op.solve_shifted(rhs, half);
        }
        u = std::move(next);
        traj.fields.push_back(u);
        flo = fhi;
    }
    return traj;
}

}  // namespace schrctl
