#include "schrctl/propagator.hpp"

#include <fftw3.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace schrctl {

void PropagatorSpec::validate() const {
    if (dt <= 0.0) throw std::invalid_argument("propagator: dt must be positive");
    if (scheme == Scheme::AvronHerbst && potential.kind != PotentialKind::LinearField)
        throw std::invalid_argument("propagator: avron_herbst needs a linear-field potential");
}

namespace {

int step_count(double T, double dt) {
    const int M = static_cast<int>(std::lround(T / dt));
    if (M < 1 || std::abs(M * dt - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("propagator: T must be a positive multiple of dt");
    return M;
}

// in-place unitary FFT helpers (FFTW is unnormalized; forward/backward pair
// divided by n)
void fft(WaveField& u, int sign) {
    const int n = static_cast<int>(u.size());
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(u.data()),
                                      reinterpret_cast<fftw_complex*>(u.data()), sign,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

double fourier_mode(int m, int n, double period) {
    const int mm = (m <= n / 2) ? m : m - n;
    return 2.0 * M_PI * mm / period;
}

void check_edge_mass(const WaveField& u, const GridSpec& grid, const char* where,
                     double edge_tol = 1e-12) {
    const double edge = 0.9 * grid.half_width;
    double total = 0.0, outer = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double m = std::norm(u[i]);
        total += m;
        if (std::abs(grid.x(i)) >= edge) outer += m;
    }
    if (total > 0.0 && outer > edge_tol * total)
        throw std::runtime_error(std::string("avron_herbst: support reached the box edge (") +
                                 where + ")");
}

}  // namespace

Trajectory evolve(const WaveField& u0, double T, const PropagatorSpec& spec) {
    spec.validate();
    const GridSpec& grid = spec.potential.grid;
    if (static_cast<int>(u0.size()) != grid.n_points)
        throw std::invalid_argument("evolve: field size mismatch");
    const int M = step_count(T, spec.dt);

    Trajectory traj;
    traj.grid = grid;
    traj.dt = spec.dt;
    traj.fields.reserve(M + 1);
    traj.fields.push_back(u0);

    if (spec.scheme == Scheme::AvronHerbst) {
        for (int j = 1; j <= M; ++j)
            traj.fields.push_back(avron_herbst_apply(u0, j * spec.dt, grid));
        return traj;
    }

    if (spec.scheme == Scheme::SplitStep) {
        const int n = grid.n_points;
        const double period = n * grid.dx();
        std::vector<Complex> vphase(n), kphase(n);
        for (int i = 0; i < n; ++i)
            vphase[i] = std::exp(Complex(0.0, -0.5 * spec.dt * spec.potential.values[i]));
        for (int m = 0; m < n; ++m) {
            const double k = fourier_mode(m, n, period);
            kphase[m] = std::exp(Complex(0.0, -spec.dt * k * k));
        }
        WaveField u = u0;
        for (int j = 1; j <= M; ++j) {
            for (int i = 0; i < n; ++i) u[i] *= vphase[i];
            fft(u, FFTW_FORWARD);
            for (int m = 0; m < n; ++m) u[m] *= kphase[m];
            fft(u, FFTW_BACKWARD);
            const double inv = 1.0 / n;
            for (int i = 0; i < n; ++i) u[i] *= inv * vphase[i];
            traj.fields.push_back(u);
        }
        return traj;
    }

    // Crank-Nicolson: (I + i dt/2 A) u' = (I - i dt/2 A) u
    const DiscreteOperator op = assemble_operator(grid, spec.potential);
    const Complex half(0.0, 0.5 * spec.dt);
    WaveField u = u0;
    for (int j = 1; j <= M; ++j) {
        const WaveField au = op.apply(u);
        WaveField rhs(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i) rhs[i] = u[i] - half * au[i];
        u = op.solve_shifted(rhs, half);
        traj.fields.push_back(u);
    }
    return traj;
}

Trajectory evolve_inhomogeneous(const WaveField& u0, double T, const Trajectory& forcing,
                                const PropagatorSpec& spec) {
    spec.validate();
    if (spec.scheme != Scheme::CrankNicolson)
        throw std::invalid_argument("evolve_inhomogeneous: only crank_nicolson supported");
    const GridSpec& grid = spec.potential.grid;
    const int M = step_count(T, spec.dt);
    if (forcing.steps() != M || std::abs(forcing.dt - spec.dt) > 1e-12 ||
        forcing.grid.n_points != grid.n_points)
        throw std::invalid_argument("evolve_inhomogeneous: forcing mesh mismatch");

    const DiscreteOperator op = assemble_operator(grid, spec.potential);
    const Complex half(0.0, 0.5 * spec.dt);
    const Complex ihalf_dt(0.0, 0.5 * spec.dt);
    Trajectory traj;
    traj.grid = grid;
    traj.dt = spec.dt;
    traj.fields.reserve(M + 1);
    traj.fields.push_back(u0);
    WaveField u = u0;
    for (int j = 1; j <= M; ++j) {
        const WaveField au = op.apply(u);
        WaveField rhs(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i)
            rhs[i] = u[i] - half * au[i] -
                     ihalf_dt * (forcing.fields[j - 1][i] + forcing.fields[j][i]);
        u = op.solve_shifted(rhs, half);
        traj.fields.push_back(u);
    }
    return traj;
}

WaveField avron_herbst_apply(const WaveField& u, double t, const GridSpec& grid,
                             double edge_tol) {
    if (static_cast<int>(u.size()) != grid.n_points)
        throw std::invalid_argument("avron_herbst_apply: field size mismatch");
    if (t == 0.0) return u;
    check_edge_mass(u, grid, "input", edge_tol);
    const int n = grid.n_points;
    const double period = n * grid.dx();
    WaveField w = u;
    fft(w, FFTW_FORWARD);
    for (int m = 0; m < n; ++m) {
        const double k = fourier_mode(m, n, period);
        w[m] *= std::exp(Complex(0.0, -(k * k * t + t * t * k)));
    }
    fft(w, FFTW_BACKWARD);
    const double inv = 1.0 / n;
    // constant phase t^3/3: the generator check d/dt U = -i(-d2-x)U forces
    // a'(t) = t^2, and only this phase closes the group property
    const double t3 = t * t * t / 3.0;
    for (int i = 0; i < n; ++i)
        w[i] *= inv * std::exp(Complex(0.0, t * grid.x(i) - t3));
    check_edge_mass(w, grid, "output", edge_tol);
    return w;
}

WaveField spectral_derivative(const WaveField& u, const GridSpec& grid, int order) {
    const int n = grid.n_points;
    const double period = n * grid.dx();
    WaveField w = u;
    fft(w, FFTW_FORWARD);
    for (int m = 0; m < n; ++m) {
        const double k = fourier_mode(m, n, period);
        Complex f(1.0, 0.0);
        for (int p = 0; p < order; ++p) f *= Complex(0.0, k);
        w[m] *= f;
    }
    fft(w, FFTW_BACKWARD);
    const double inv = 1.0 / n;
    for (auto& z : w) z *= inv;
    return w;
}

namespace {

WaveField random_bump_field(const GridSpec& grid, std::mt19937_64& rng) {
    // random smooth field: a few Gaussian wavepackets well inside the box
    std::uniform_real_distribution<double> ctr(-0.3 * grid.half_width, 0.3 * grid.half_width);
    std::uniform_real_distribution<double> mom(-2.0, 2.0);
    std::uniform_real_distribution<double> amp(0.3, 1.0);
    WaveField u(grid.n_points, Complex(0.0));
    const int packets = 3;
    for (int p = 0; p < packets; ++p) {
        const double c = ctr(rng), k = mom(rng), a = amp(rng);
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.x(i);
            u[i] += a * std::exp(-0.5 * (x - c) * (x - c)) *
                    std::exp(Complex(0.0, k * x));
        }
    }
    u.front() = u.back() = 0.0;
    return u;
}

double grad_norm(const DiscreteOperator& op_free, const WaveField& u) {
    return std::sqrt(std::max(0.0, op_free.quadratic_form(u)));
}

}  // namespace

EvolutionBoundsReport verify_evolution_bounds(const GridSpec& grid,
                                              const PotentialField& alpha, int n_samples,
                                              const std::vector<double>& t_grid,
                                              unsigned long long seed) {
    EvolutionBoundsReport rep;
    std::mt19937_64 rng(seed);

    const WeightField mu = build_weight_mu(grid);
    auto zero_pot = build_potential(grid, {PotentialKind::LinearField, 0.0, {}});
    const DiscreteOperator op_free = assemble_operator(grid, zero_pot);
    auto mu_pot = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    const DiscreteOperator op_mu = assemble_operator(grid, mu_pot);
    const double dx = grid.dx();

    // sup-norms of the derivatives entering the group estimates
    const WaveField ga = gradient(
        [&] {
            WaveField a(grid.n_points);
            for (int i = 0; i < grid.n_points; ++i) a[i] = alpha.values[i];
            return a;
        }(),
        dx);
    double ax_inf = 0.0, diff_inf = 0.0;
    {
        WaveField gm = gradient(
            [&] {
                WaveField m(grid.n_points);
                for (int i = 0; i < grid.n_points; ++i) m[i] = mu.values[i];
                return m;
            }(),
            dx);
        // drop the one-sided end stencils; the fields are linear there anyway
        for (int i = 1; i + 1 < grid.n_points; ++i) {
            ax_inf = std::max(ax_inf, std::abs(ga[i]));
            diff_inf = std::max(diff_inf, std::abs(gm[i] - ga[i]));
        }
    }

    const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
    const double dt = 2e-3;
    bool all_pass = true;

    for (int s = 0; s < n_samples; ++s) {
        const WaveField phi = random_bump_field(grid, rng);
        const double p_l2 = l2_norm(phi, dx);
        const double p_grad = grad_norm(op_free, phi);
        const double p_mu = std::sqrt(l2mu_norm_sq(phi, mu.values, dx));
        const double p_h = std::sqrt(std::max(0.0, op_mu.quadratic_form(phi)));

        PropagatorSpec spec{Scheme::CrankNicolson, dt, alpha};
        const Trajectory traj = evolve(phi, tmax, spec);
        for (double t : t_grid) {
            const int j = static_cast<int>(std::lround(t / dt));
            const WaveField& u = traj.fields[j];
            const double tol = 1e-8;

            GroupBoundRow g;
            g.sample = s;
            g.t = t;
            g.lhs = grad_norm(op_free, u);
            g.rhs = p_grad + t * ax_inf * p_l2;
            g.pass = g.lhs <= g.rhs * (1.0 + tol);
            rep.grad_bound.push_back(g);
            all_pass = all_pass && g.pass;

            GroupBoundRow m;
            m.sample = s;
            m.t = t;
            m.lhs = std::sqrt(l2mu_norm_sq(u, mu.values, dx));
            m.rhs = p_mu + std::sqrt(2.0 * t) * std::sqrt(p_l2 * p_grad) +
                    t * ax_inf * p_l2;
            m.pass = m.lhs <= m.rhs * (1.0 + tol);
            rep.l2mu_bound.push_back(m);
            all_pass = all_pass && m.pass;

            GroupBoundRow h;
            h.sample = s;
            h.t = t;
            h.lhs = std::sqrt(std::max(0.0, op_mu.quadratic_form(u)));
            h.rhs = p_h * (1.0 + t * diff_inf);
            h.pass = h.lhs <= h.rhs * (1.0 + tol);
            rep.h_bound.push_back(h);
            all_pass = all_pass && h.pass;
        }
    }

    // forced problem: i u_t = L u + psi h, bounds in terms of ||h||_{L2(0,T,H)}
    {
        const CutoffField psi = build_cutoff(grid, CutoffKind::Exterior, 2.0);
        double psi_inf = 0.0;
        for (double v : psi.values) psi_inf = std::max(psi_inf, std::abs(v));
        const double T = 1.0;
        const int M = static_cast<int>(std::lround(T / dt));
        const int nf = std::min(n_samples, 12);
        for (int s = 0; s < nf; ++s) {
            const WaveField u0 = random_bump_field(grid, rng);
            const WaveField gprof = random_bump_field(grid, rng);
            std::uniform_real_distribution<double> coef(-1.0, 1.0);
            const double a = coef(rng), b = coef(rng);
            Trajectory forcing;
            forcing.grid = grid;
            forcing.dt = dt;
            forcing.fields.resize(M + 1);
            double h_l2h_sq = 0.0;  // trapezoid integral of ||h(t)||_H^2
            for (int j = 0; j <= M; ++j) {
                const double t = j * dt;
                WaveField h(grid.n_points);
                for (int i = 0; i < grid.n_points; ++i) h[i] = (a + b * t) * gprof[i];
                const double hh = std::max(0.0, op_mu.quadratic_form(h));
                h_l2h_sq += ((j == 0 || j == M) ? 0.5 : 1.0) * dt * hh;
                WaveField ph(grid.n_points);
                for (int i = 0; i < grid.n_points; ++i) ph[i] = psi.values[i] * h[i];
                forcing.fields[j] = std::move(ph);
            }
            const double h_l2h = std::sqrt(h_l2h_sq);

            PropagatorSpec spec{Scheme::CrankNicolson, dt, alpha};
            const Trajectory traj = evolve_inhomogeneous(u0, T, forcing, spec);
            double sup_l2 = 0.0, sup_grad = 0.0, sup_mu = 0.0, sup_h = 0.0;
            for (const auto& u : traj.fields) {
                sup_l2 = std::max(sup_l2, l2_norm(u, dx));
                sup_grad = std::max(sup_grad, grad_norm(op_free, u));
                sup_mu = std::max(sup_mu, std::sqrt(l2mu_norm_sq(u, mu.values, dx)));
                sup_h = std::max(sup_h, std::sqrt(std::max(0.0, op_mu.quadratic_form(u))));
            }
            const double t32 = std::pow(T, 1.5);
            ForcedBoundRow r0{s, sup_l2, l2_norm(u0, dx) + std::sqrt(T) * psi_inf * h_l2h,
                              0.0, false};
            r0.pass = r0.lhs <= r0.rhs_fixed * (1.0 + 1e-8);
            rep.forced_l2.push_back(r0);
            all_pass = all_pass && r0.pass;

            auto measured = [&](double lhs, double first) {
                return std::max(0.0, (lhs - first) / std::max(1e-300, h_l2h * t32));
            };
            rep.forced_grad.push_back(
                {s, sup_grad, grad_norm(op_free, u0), measured(sup_grad, grad_norm(op_free, u0)),
                 true});
            const double u0mu = std::sqrt(l2mu_norm_sq(u0, mu.values, dx));
            rep.forced_l2mu.push_back({s, sup_mu, u0mu, measured(sup_mu, u0mu), true});
            const double u0h = std::sqrt(std::max(0.0, op_mu.quadratic_form(u0)));
            rep.forced_h.push_back({s, sup_h, u0h, measured(sup_h, u0h), true});
        }
    }

    // dispersive decay of the electric group, Gaussian data on a padded grid
    {
        GridSpec big(256.0, 8193);
        WaveField phi(big.n_points);
        for (int i = 0; i < big.n_points; ++i) {
            const double x = big.x(i);
            phi[i] = std::exp(-0.5 * x * x);
        }
        const double phi_l1 = l1_norm(phi, big.dx());
        for (int t = 1; t <= 10; ++t) {
            const WaveField ut = avron_herbst_apply(phi, t, big);
            GroupBoundRow d;
            d.sample = 0;
            d.t = t;
            d.lhs = linf_norm(ut) * std::sqrt(static_cast<double>(t)) / phi_l1;
            d.rhs = 0.29;
            d.pass = d.lhs <= d.rhs;
            rep.dispersive.push_back(d);
            all_pass = all_pass && d.pass;
        }
    }

    // commutator of d/dx with the electric group on a C-infinity bump;
    // wide box: the free flight inside U_e spreads polynomial tails
    {
        GridSpec big(128.0, 16385);
        WaveField phi(big.n_points, Complex(0.0));
        for (int i = 0; i < big.n_points; ++i) {
            const double x = big.x(i) / 3.0;
            if (std::abs(x) < 1.0) phi[i] = std::exp(-1.0 / (1.0 - x * x));
        }
        const double r = 0.5;
        const WaveField dphi = spectral_derivative(phi, big, 1);
        const WaveField uphi = avron_herbst_apply(phi, r, big);
        const WaveField udphi = avron_herbst_apply(dphi, r, big);
        const WaveField duphi = spectral_derivative(uphi, big, 1);
        const double nphi = l2_norm(phi, big.dx());
        double res = 0.0, res_lit = 0.0;
        for (int i = 0; i < big.n_points; ++i) {
            res += std::norm(duphi[i] - udphi[i] - Complex(0.0, r) * uphi[i]);
            res_lit += std::norm(duphi[i] - udphi[i] - r * uphi[i]);
        }
        rep.commutator_residual = std::sqrt(big.dx() * res) / nphi;
        rep.commutator_residual_literal = std::sqrt(big.dx() * res_lit) / nphi;
        all_pass = all_pass && rep.commutator_residual <= 1e-6;
    }

    rep.all_asserted_pass = all_pass;
    return rep;
}

}  // namespace schrctl
