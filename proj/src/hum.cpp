#include "schrctl/hum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace schrctl {

Trajectory SpectralTrajectory::to_grid() const {
    Trajectory t;
    t.grid = basis->grid();
    t.dt = dt;
    t.fields.reserve(coeffs.size());
    for (const auto& c : coeffs) t.fields.push_back(basis->synthesize(c));
    return t;
}

void LinearControlProblem::validate() const {
    if (basis == nullptr) throw std::invalid_argument("control: basis missing");
    const GridSpec& g = basis->grid();
    if (static_cast<int>(u0.size()) != g.n_points || static_cast<int>(uT.size()) != g.n_points)
        throw std::invalid_argument("control: data size mismatch");
    if (psi.grid.n_points != g.n_points || alpha.grid.n_points != g.n_points)
        throw std::invalid_argument("control: cutoff/potential grid mismatch");
    if (T <= 0.0 || dt <= 0.0) throw std::invalid_argument("control: T, dt must be positive");
    const int M = static_cast<int>(std::lround(T / dt));
    if (M < 1 || std::abs(M * dt - T) > 1e-9) throw std::invalid_argument("control: T not a multiple of dt");
    if (cg_tol <= 0.0 || cg_max_iter < 1) throw std::invalid_argument("control: bad CG settings");
}

namespace {

// sanity: the basis diagonalizes the operator assembled from alpha
void check_basis_matches(const SpectralBasis& b, const PotentialField& alpha) {
    const DiscreteOperator op = assemble_operator(b.grid(), alpha);
    const WaveField v = b.mode_field(0);
    const double q = op.quadratic_form(v);
    if (std::abs(q - b.lambda(0)) > 1e-6 * std::max(1.0, b.lambda(0)))
        throw std::invalid_argument("control: basis does not match the propagation potential");
}

std::vector<Complex> project_modes(const SpectralBasis& b, const WaveField& u) {
    return b.project(u);
}

}  // namespace

SOperator::SOperator(const LinearControlProblem& problem) : prob_(&problem) {
    problem.validate();
    const SpectralBasis& b = *problem.basis;
    check_basis_matches(b, problem.alpha);
    m_ = b.n_modes();
    steps_ = static_cast<int>(std::lround(problem.T / problem.dt));
    z_.resize(m_);
    r_.resize(m_);
    for (int k = 0; k < m_; ++k) {
        z_[k] = 0.5 * problem.dt * b.lambda(k);
        r_[k] = Complex(1.0, -z_[k]) / Complex(1.0, z_[k]);
    }

    // Psi_ab = dx * sum_i phi_a psi phi_b, symmetric
    const GridSpec& g = b.grid();
    const int n = g.n_points;
    const double dx = g.dx();
    std::vector<RealField> weighted(m_, RealField(n));
    for (int a = 0; a < m_; ++a)
        for (int i = 0; i < n; ++i) weighted[a][i] = b.mode(a)[i] * problem.psi.values[i];
    psi_mat_.assign(m_, RealField(m_, 0.0));
    for (int a = 0; a < m_; ++a)
        for (int c = a; c < m_; ++c) {
            double s = 0.0;
            const RealField& wa = weighted[a];
            const RealField& mc = b.mode(c);
            for (int i = 0; i < n; ++i) s += wa[i] * mc[i];
            psi_mat_[a][c] = psi_mat_[c][a] = dx * s;
        }

    // B = Psi Lambda^{-1} Psi, symmetric PSD
    b_mat_.assign(m_, RealField(m_, 0.0));
    for (int a = 0; a < m_; ++a)
        for (int c = a; c < m_; ++c) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k)
                s += psi_mat_[a][k] * psi_mat_[k][c] / b.lambda(k);
            b_mat_[a][c] = b_mat_[c][a] = s;
        }

    // closed form: S_ab = dt * B_ab * G_ab / (conj(c_a) c_b),
    // c_k = 1 + i z_k, G_ab = sum_{j<M} (r_b/r_a)^j
    s_mat_.assign(m_, std::vector<Complex>(m_));
    for (int a = 0; a < m_; ++a) {
        const Complex ca_bar = Complex(1.0, -z_[a]);
        for (int c = 0; c < m_; ++c) {
            const Complex cc = Complex(1.0, z_[c]);
            const Complex rho = r_[c] / r_[a];
            Complex geo;
            if (std::abs(rho - 1.0) < 1e-14)
                geo = static_cast<double>(steps_);
            else
                geo = (std::pow(rho, steps_) - 1.0) / (rho - 1.0);
            s_mat_[a][c] = problem.dt * b_mat_[a][c] * geo / (ca_bar * cc);
        }
    }
}

const std::vector<double>& SOperator::lambda() const { return prob_->basis->eigenvalues(); }

std::vector<std::vector<Complex>> SOperator::adjoint_flow(const std::vector<Complex>& v0) const {
    ++forward_solves_;
    std::vector<std::vector<Complex>> out(steps_ + 1, std::vector<Complex>(m_));
    out[0] = v0;
    for (int j = 1; j <= steps_; ++j)
        for (int k = 0; k < m_; ++k) out[j][k] = r_[k] * out[j - 1][k];
    return out;
}

std::vector<Complex> SOperator::apply(const std::vector<Complex>& v0) const {
    ++backward_solves_;
    // v^j = r^j v0 walked downward; f^j = B v^j; backward forced CN from w^M=0
    std::vector<Complex> v(m_), w(m_, Complex(0.0)), fhi(m_), flo(m_);
    for (int k = 0; k < m_; ++k) v[k] = std::pow(r_[k], steps_) * v0[k];
    auto bmul = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
        for (int a = 0; a < m_; ++a) {
            Complex s = 0.0;
            for (int c = 0; c < m_; ++c) s += b_mat_[a][c] * x[c];
            y[a] = s;
        }
    };
    bmul(v, fhi);
    const Complex ih(0.0, 0.5 * prob_->dt);
    for (int j = steps_ - 1; j >= 0; --j) {
        for (int k = 0; k < m_; ++k) v[k] *= std::conj(r_[k]);  // r^{-1} on the unit circle
        bmul(v, flo);
        for (int k = 0; k < m_; ++k)
            w[k] = (Complex(1.0, z_[k]) * w[k] + ih * (flo[k] + fhi[k])) / Complex(1.0, -z_[k]);
        std::swap(flo, fhi);
    }
    for (int k = 0; k < m_; ++k) w[k] *= Complex(0.0, -1.0);  // S(v0) = -i w2(0)
    return w;
}

std::vector<Complex> SOperator::apply_assembled(const std::vector<Complex>& v0) const {
    std::vector<Complex> out(m_);
    for (int a = 0; a < m_; ++a) {
        Complex s = 0.0;
        for (int c = 0; c < m_; ++c) s += s_mat_[a][c] * v0[c];
        out[a] = s;
    }
    return out;
}

SpectralTrajectory adjoint_solve(const WkVector& v0, double T, double dt,
                                 const PotentialField& alpha) {
    if (v0.basis == nullptr) throw std::invalid_argument("adjoint_solve: basis missing");
    check_basis_matches(*v0.basis, alpha);
    const int m = v0.basis->n_modes();
    const int M = static_cast<int>(std::lround(T / dt));
    if (M < 1 || std::abs(M * dt - T) > 1e-9)
        throw std::invalid_argument("adjoint_solve: T not a multiple of dt");
    SpectralTrajectory traj;
    traj.basis = v0.basis;
    traj.dt = dt;
    traj.coeffs.assign(M + 1, std::vector<Complex>(m));
    traj.coeffs[0] = v0.coeffs;
    for (int j = 1; j <= M; ++j)
        for (int k = 0; k < m; ++k) {
            const double z = 0.5 * dt * v0.basis->lambda(k);
            traj.coeffs[j][k] =
                Complex(1.0, -z) / Complex(1.0, z) * traj.coeffs[j - 1][k];
        }
    return traj;
}

SpectralTrajectory control_from_adjoint(const SpectralTrajectory& v, const CutoffField& psi) {
    const SpectralBasis& b = *v.basis;
    SpectralTrajectory h;
    h.basis = v.basis;
    h.dt = v.dt;
    h.coeffs.reserve(v.coeffs.size());
    for (const auto& c : v.coeffs) {
        WaveField vg = b.synthesize(c);
        for (int i = 0; i < b.grid().n_points; ++i) vg[i] *= psi.values[i];
        auto hc = b.project(vg);
        for (int k = 0; k < b.n_modes(); ++k) hc[k] /= b.lambda(k);
        h.coeffs.push_back(std::move(hc));
    }
    return h;
}

WaveField apply_S(const LinearControlProblem& problem, const WkVector& v0) {
    SOperator S(problem);
    return problem.basis->synthesize(S.apply(v0.coeffs));
}

namespace {

// conjugate gradient on the symmetrized system T y = b,
// T = Lambda^{1/2} S Lambda^{1/2}; the l2 residual equals the W1 residual
// of the untransformed equation.
struct CgResult {
    std::vector<Complex> y;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

CgResult cg_solve(const std::vector<std::vector<Complex>>& t_mat,
                  const std::vector<Complex>& b, double tol, int max_iter) {
    const int m = static_cast<int>(b.size());
    CgResult out;
    out.y.assign(m, Complex(0.0));
    double bnorm = 0.0;
    for (const Complex& v : b) bnorm += std::norm(v);
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    std::vector<Complex> r = b, p = b, tp(m);
    double rr = bnorm * bnorm;
    for (int it = 0; it < max_iter; ++it) {
        for (int a = 0; a < m; ++a) {
            Complex s = 0.0;
            for (int c = 0; c < m; ++c) s += t_mat[a][c] * p[c];
            tp[a] = s;
        }
        double ptp = 0.0;
        for (int a = 0; a < m; ++a) ptp += std::real(std::conj(p[a]) * tp[a]);
        if (ptp <= 0.0) break;  // lost positivity: stop with the best iterate
        const double alpha = rr / ptp;
        for (int a = 0; a < m; ++a) {
            out.y[a] += alpha * p[a];
            r[a] -= alpha * tp[a];
        }
        double rr_new = 0.0;
        for (const Complex& v : r) rr_new += std::norm(v);
        out.iterations = it + 1;
        out.rel_residual = std::sqrt(rr_new) / bnorm;
        if (out.rel_residual <= tol) {
            out.converged = true;
            return out;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int a = 0; a < m; ++a) p[a] = r[a] + beta * p[a];
    }
    return out;
}

}  // namespace

ControlSolution solve_control(const LinearControlProblem& problem) {
    SOperator S(problem);
    const SpectralBasis& b = *problem.basis;
    const int m = S.n_modes();
    const int M = S.time_steps();
    const auto r = S.cayley();

    const auto u0c = project_modes(b, problem.u0);
    const auto uTc = project_modes(b, problem.uT);

    // w1(0): backward homogeneous flow of the target
    std::vector<Complex> rhs(m);
    for (int k = 0; k < m; ++k) {
        const Complex w10 = uTc[k] / std::pow(r[k], M);
        rhs[k] = Complex(0.0, -1.0) * u0c[k] + Complex(0.0, 1.0) * w10;
    }

    // symmetrize with Lambda^{1/2}
    std::vector<double> sq(m);
    for (int k = 0; k < m; ++k) sq[k] = std::sqrt(b.lambda(k));
    std::vector<std::vector<Complex>> t_mat(m, std::vector<Complex>(m));
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) t_mat[a][c] = sq[a] * S.matrix()[a][c] * sq[c];
    std::vector<Complex> bt(m);
    for (int k = 0; k < m; ++k) bt[k] = sq[k] * rhs[k];

    const CgResult cg = cg_solve(t_mat, bt, problem.cg_tol, problem.cg_max_iter);

    ControlSolution sol;
    sol.v0_opt = WkVector::zero(b, -1);
    for (int k = 0; k < m; ++k) sol.v0_opt.coeffs[k] = sq[k] * cg.y[k];
    sol.cg_iterations = cg.iterations;
    sol.residual = cg.rel_residual;
    sol.converged = cg.converged;

    // reconstruct: adjoint flow, control, forced forward trajectory
    SpectralTrajectory v;
    v.basis = &b;
    v.dt = problem.dt;
    v.coeffs = S.adjoint_flow(sol.v0_opt.coeffs);
    sol.h = control_from_adjoint(v, problem.psi);

    sol.u.basis = &b;
    sol.u.dt = problem.dt;
    sol.u.coeffs.assign(M + 1, std::vector<Complex>(m));
    sol.u.coeffs[0] = u0c;
    const Complex ih(0.0, 0.5 * problem.dt);
    std::vector<Complex> flo(m), fhi(m);
    auto forcing = [&](int j, std::vector<Complex>& f) {
        // psi * h = Psi Lambda^{-1} Psi v = B v; equivalently Psi h-coeffs
        for (int a = 0; a < m; ++a) {
            Complex s = 0.0;
            for (int c = 0; c < m; ++c) s += S.psi_matrix()[a][c] * sol.h.coeffs[j][c];
            f[a] = s;
        }
    };
    forcing(0, flo);
    for (int j = 1; j <= M; ++j) {
        forcing(j, fhi);
        for (int k = 0; k < m; ++k) {
            const double z = 0.5 * problem.dt * b.lambda(k);
            sol.u.coeffs[j][k] = (Complex(1.0, -z) * sol.u.coeffs[j - 1][k] -
                                  ih * (flo[k] + fhi[k])) /
                                 Complex(1.0, z);
        }
        std::swap(flo, fhi);
    }

    // cost ||h||_{L2(0,T,W1)} by trapezoid; target error in W1
    double cost_sq = 0.0;
    for (int j = 0; j <= M; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += b.lambda(k) * std::norm(sol.h.coeffs[j][k]);
        cost_sq += ((j == 0 || j == M) ? 0.5 : 1.0) * problem.dt * s;
    }
    sol.cost = std::sqrt(cost_sq);
    double te = 0.0;
    for (int k = 0; k < m; ++k)
        te += b.lambda(k) * std::norm(sol.u.coeffs[M][k] - uTc[k]);
    sol.target_error = std::sqrt(te);

    if (!sol.converged)
        throw CgFailure("solve_control: CG did not converge (observability too weak)",
                        std::move(sol));
    return sol;
}

double estimate_observability(const LinearControlProblem& problem, int n_probe,
                              unsigned long long seed) {
    SOperator S(problem);
    const SpectralBasis& b = *problem.basis;
    const int m = S.n_modes();
    n_probe = std::min(std::max(n_probe, 2), m);

    std::vector<double> sq(m);
    for (int k = 0; k < m; ++k) sq[k] = std::sqrt(b.lambda(k));
    auto tmul = [&](const std::vector<Complex>& x) {
        std::vector<Complex> sx(m), out(m);
        for (int k = 0; k < m; ++k) sx[k] = sq[k] * x[k];
        const auto s = S.apply_assembled(sx);
        for (int k = 0; k < m; ++k) out[k] = sq[k] * s[k];
        return out;
    };

    // Lanczos with full reorthogonalization on the Hermitian PSD operator
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::vector<Complex>> q;
    std::vector<double> a_diag, b_off;
    std::vector<Complex> v(m);
    for (auto& z : v) z = Complex(g(rng), g(rng));
    double nv = 0.0;
    for (const Complex& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    for (auto& z : v) z /= nv;
    q.push_back(v);
    for (int it = 0; it < n_probe; ++it) {
        std::vector<Complex> w = tmul(q.back());
        double alpha = 0.0;
        for (int k = 0; k < m; ++k) alpha += std::real(std::conj(q.back()[k]) * w[k]);
        a_diag.push_back(alpha);
        // full reorthogonalization (twice) against all previous vectors
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qq : q) {
                Complex proj = 0.0;
                for (int k = 0; k < m; ++k) proj += std::conj(qq[k]) * w[k];
                for (int k = 0; k < m; ++k) w[k] -= proj * qq[k];
            }
        double beta = 0.0;
        for (const Complex& z : w) beta += std::norm(z);
        beta = std::sqrt(beta);
        if (beta < 1e-13 || static_cast<int>(q.size()) >= m) break;
        b_off.push_back(beta);
        for (auto& z : w) z /= beta;
        q.push_back(std::move(w));
    }

    const int t = static_cast<int>(a_diag.size());
    std::vector<double> d(a_diag), e(b_off.begin(), b_off.begin() + (t - 1));
    std::vector<double> wev(t), zev(t);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_ROW_MAJOR, 'N', 'I', t, d.data(), e.data(), 0.0, 0.0, 1, 1,
                       0.0, &found, wev.data(), zev.data(), 1, isuppz.data());
    if (info != 0 || found < 1)
        throw std::runtime_error("estimate_observability: tridiagonal solve failed");
    return std::max(0.0, wev[0]);
}

Trajectory evolve_with_P(const WaveField& w0, double T, double dt,
                         const PotentialField& alpha) {
    const GridSpec& grid = alpha.grid;
    const int n = grid.n_points;
    const int M = static_cast<int>(std::lround(T / dt));
    if (M < 1 || std::abs(M * dt - T) > 1e-9)
        throw std::invalid_argument("evolve_with_P: T not a multiple of dt");
    const DiscreteOperator op_a = assemble_operator(grid, alpha);
    const WeightField mu = build_weight_mu(grid);
    auto mu_pot = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    const DiscreteOperator op_mu = assemble_operator(grid, mu_pot);
    RealField nu(n);
    for (int i = 0; i < n; ++i) nu[i] = alpha.values[i] - mu.values[i];

    auto apply_p = [&](const WaveField& w) {
        const WaveField lw = op_mu.apply(w);
        WaveField nw(n), comm(n);
        for (int i = 0; i < n; ++i) nw[i] = nu[i] * w[i];
        const WaveField lnw = op_mu.apply(nw);
        for (int i = 0; i < n; ++i) comm[i] = nu[i] * lw[i] - lnw[i];
        return op_mu.solve(comm);
    };

    Trajectory traj;
    traj.grid = grid;
    traj.dt = dt;
    traj.fields.reserve(M + 1);
    traj.fields.push_back(w0);
    const Complex half(0.0, 0.5 * dt);
    WaveField w = w0;
    for (int j = 1; j <= M; ++j) {
        const WaveField aw = op_a.apply(w);
        const WaveField pw = apply_p(w);
        WaveField base(n);
        for (int i = 0; i < n; ++i) base[i] = w[i] - half * aw[i] - half * pw[i];
        WaveField next = w;  // inner fixed point on the implicit P term
        for (int sweep = 0; sweep < 3; ++sweep) {
            const WaveField pn = apply_p(next);
            WaveField rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = base[i] - half * pn[i];
            next = op_a.solve_shifted(rhs, half);
        }
        w = std::move(next);
        traj.fields.push_back(w);
    }
    return traj;
}

double multiplier_identity_check(const Trajectory& w, const CutoffField& q,
                                 const PotentialField& alpha) {
    const GridSpec& grid = w.grid;
    const int n = grid.n_points;
    const double dx = grid.dx();
    const WeightField mu = build_weight_mu(grid);
    auto mu_pot = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    const DiscreteOperator op_mu = assemble_operator(grid, mu_pot);
    RealField nu(n), qx(n), qxx(n);
    for (int i = 0; i < n; ++i) nu[i] = alpha.values[i] - mu.values[i];
    for (int i = 1; i + 1 < n; ++i) {
        qx[i] = (q.values[i + 1] - q.values[i - 1]) / (2.0 * dx);
        qxx[i] = (q.values[i + 1] - 2.0 * q.values[i] + q.values[i - 1]) / (dx * dx);
    }

    auto apply_p = [&](const WaveField& f) {
        const WaveField lw = op_mu.apply(f);
        WaveField nw(n), comm(n);
        for (int i = 0; i < n; ++i) nw[i] = nu[i] * f[i];
        const WaveField lnw = op_mu.apply(nw);
        for (int i = 0; i < n; ++i) comm[i] = nu[i] * lw[i] - lnw[i];
        return op_mu.solve(comm);
    };

    // multiplier M(t) = Im int q conj(w) w_x; its time derivative integrates
    // to 2 int qx |w_x|^2 + Re int qxx conj(w) w_x + 2 Re int q conj(F) w_x
    // + Re int qx conj(w) F with F = alpha w + P(w)
    const int M = w.steps();
    std::vector<double> mult(M + 1), integrand(M + 1);
    for (int j = 0; j <= M; ++j) {
        const WaveField& wf = w.fields[j];
        const WaveField wx = gradient(wf, dx);
        const WaveField pw = apply_p(wf);
        double mval = 0.0, ival = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const Complex F = alpha.values[i] * wf[i] + pw[i];
            mval += q.values[i] * std::imag(std::conj(wf[i]) * wx[i]);
            ival += 2.0 * qx[i] * std::norm(wx[i]) +
                    std::real(qxx[i] * std::conj(wf[i]) * wx[i]) +
                    2.0 * q.values[i] * std::real(std::conj(F) * wx[i]) +
                    qx[i] * std::real(std::conj(wf[i]) * F);
        }
        mult[j] = dx * mval;
        integrand[j] = dx * ival;
    }
    const double lhs = mult[M] - mult[0];
    double rhs = 0.0, scale = 0.0;
    for (int j = 0; j <= M; ++j) {
        const double tw = (j == 0 || j == M) ? 0.5 : 1.0;
        rhs += tw * w.dt * integrand[j];
        scale += tw * w.dt * std::abs(integrand[j]);
    }
    scale = std::max({scale, std::abs(mult[0]), std::abs(mult[M]), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

double verify_control_forward(const LinearControlProblem& problem,
                              const ControlSolution& sol) {
    const SpectralBasis& b = *problem.basis;
    const GridSpec& grid = b.grid();
    const int n = grid.n_points;
    const int M = sol.h.steps();
    const DiscreteOperator op = assemble_operator(grid, problem.alpha);
    const Complex half(0.0, 0.5 * problem.dt);
    const Complex ih(0.0, 0.5 * problem.dt);

    auto forcing_at = [&](int j) {
        WaveField f = b.synthesize(sol.h.coeffs[j]);
        for (int i = 0; i < n; ++i) f[i] *= problem.psi.values[i];
        return f;
    };

    WaveField u = problem.u0;
    WaveField flo = forcing_at(0);
    for (int j = 1; j <= M; ++j) {
        WaveField fhi = forcing_at(j);
        const WaveField au = op.apply(u);
        WaveField rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = u[i] - half * au[i] - ih * (flo[i] + fhi[i]);
        u = op.solve_shifted(rhs, half);
        flo = std::move(fhi);
    }
    const auto uc = b.project(u);
    const auto uTc = b.project(problem.uT);
    double err = 0.0;
    for (int k = 0; k < b.n_modes(); ++k)
        err += b.lambda(k) * std::norm(uc[k] - uTc[k]);
    return std::sqrt(err);
}

}  // namespace schrctl
