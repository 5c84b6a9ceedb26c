#include "schrctl/hartree.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "schrctl/spectral.hpp"

namespace schrctl {

namespace {

// trapezoid weight for node i
double tw(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

void check_poisson_kernel(const GridSpec& grid, const RealField& mu) {
    const int n = grid.n_points;
    const double dx = grid.dx();
    for (int i = 0; i < n; ++i) {
        const double xi = grid.x(i);
        for (int j = 0; j < n; ++j) {
            const double rho = std::abs(xi - grid.x(j)) - mu[i];
            if (std::abs(rho) > mu[j] + 1e-12)
                throw std::runtime_error("kernel: |rho(x,y)| <= mu(y) violated");
        }
    }
    // |d rho/dx| = |sgn(x-y) - mu'(x)| <= 2 checked by finite differences in x
    for (int j = 0; j < n; ++j) {
        const double yj = grid.x(j);
        for (int i = 0; i + 1 < n; ++i) {
            const double r0 = std::abs(grid.x(i) - yj) - mu[i];
            const double r1 = std::abs(grid.x(i + 1) - yj) - mu[i + 1];
            if (std::abs(r1 - r0) / dx > 2.0 + 1e-9)
                throw std::runtime_error("kernel: |d rho/dx| <= 2 violated");
        }
    }
}

}  // namespace

KernelSpec KernelSpec::poisson_split(const GridSpec& grid) {
    KernelSpec k;
    k.kind = KernelKind::PoissonSplit;
    k.grid = grid;
    k.mu = build_weight_mu(grid).values;
    check_poisson_kernel(grid, k.mu);
    return k;
}

KernelSpec KernelSpec::zero(const GridSpec& grid) {
    KernelSpec k;
    k.kind = KernelKind::Zero;
    k.grid = grid;
    return k;
}

KernelSpec KernelSpec::custom(const GridSpec& grid, std::vector<RealField> rho) {
    if (static_cast<int>(rho.size()) != grid.n_points)
        throw std::invalid_argument("kernel: custom matrix has wrong row count");
    for (const auto& row : rho)
        if (static_cast<int>(row.size()) != grid.n_points)
            throw std::invalid_argument("kernel: custom matrix has wrong column count");
    KernelSpec k;
    k.kind = KernelKind::CustomMatrix;
    k.grid = grid;
    k.matrix = std::move(rho);
    return k;
}

RealField m_of(const WaveField& phi, const KernelSpec& kernel) {
    const int n = kernel.grid.n_points;
    if (static_cast<int>(phi.size()) != n)
        throw std::invalid_argument("m_of: field size mismatch");
    const double dx = kernel.grid.dx();
    RealField m(n, 0.0);
    if (kernel.kind == KernelKind::Zero) return m;
    if (kernel.kind == KernelKind::CustomMatrix) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += tw(j, n) * kernel.matrix[i][j] * std::norm(phi[j]);
            m[i] = dx * s;
        }
        return m;
    }
    // poisson_split: prefix sums of the weighted density and its first moment
    RealField rho(n), xrho(n);
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < n; ++j) {
        rho[j] = tw(j, n) * std::norm(phi[j]);
        xrho[j] = kernel.grid.x(j) * rho[j];
        s0 += rho[j];
        s1 += xrho[j];
    }
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
        a += rho[i];
        b += xrho[i];
        const double conv = kernel.grid.x(i) * (2.0 * a - s0) - (2.0 * b - s1);
        m[i] = dx * (conv - kernel.mu[i] * s0);
    }
    return m;
}

RealField m_of_direct(const WaveField& phi, const KernelSpec& kernel) {
    const int n = kernel.grid.n_points;
    if (static_cast<int>(phi.size()) != n)
        throw std::invalid_argument("m_of_direct: field size mismatch");
    if (kernel.kind != KernelKind::PoissonSplit) return m_of(phi, kernel);
    const double dx = kernel.grid.dx();
    RealField m(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double xi = kernel.grid.x(i);
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s += tw(j, n) * (std::abs(xi - kernel.grid.x(j)) - kernel.mu[i]) *
                 std::norm(phi[j]);
        m[i] = dx * s;
    }
    return m;
}

WaveField apply_nonlinear(const WaveField& phi, const KernelSpec& kernel) {
    const RealField m = m_of(phi, kernel);
    WaveField out(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) out[i] = m[i] * phi[i];
    return out;
}

HartreeBoundsReport verify_hartree_bounds(const KernelSpec& kernel, int n_pairs,
                                          unsigned long long seed) {
    const GridSpec& grid = kernel.grid;
    const int n = grid.n_points;
    const double dx = grid.dx();
    const WeightField mu = build_weight_mu(grid);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ctr(-0.3 * grid.half_width, 0.3 * grid.half_width);
    std::uniform_real_distribution<double> mom(-2.0, 2.0);
    std::uniform_real_distribution<double> amp(0.1, 1.0);

    auto random_field = [&] {
        WaveField u(n, Complex(0.0));
        for (int p = 0; p < 3; ++p) {
            const double c = ctr(rng), k = mom(rng), a = amp(rng);
            for (int i = 0; i < n; ++i) {
                const double x = grid.x(i);
                u[i] += a * std::exp(-0.5 * (x - c) * (x - c)) * std::exp(Complex(0.0, k * x));
            }
        }
        u.front() = u.back() = 0.0;
        return u;
    };

    HartreeBoundsReport rep;
    bool all = true;
    for (int s = 0; s < n_pairs; ++s) {
        const WaveField phi = random_field();
        const WaveField phi1 = random_field();

        HartreeBoundRow sup;
        const RealField m = m_of(phi, kernel);
        for (double v : m) sup.lhs = std::max(sup.lhs, std::abs(v));
        sup.rhs = l2mu_norm_sq(phi, mu.values, dx);
        sup.ratio = sup.lhs / sup.rhs;
        sup.pass = sup.lhs <= sup.rhs * (1.0 + 1e-12);
        rep.sup_bound.push_back(sup);
        all = all && sup.pass;

        HartreeBoundRow lip;
        const WaveField a = apply_nonlinear(phi, kernel);
        const WaveField b = apply_nonlinear(phi1, kernel);
        WaveField diff(n), dphi(n);
        for (int i = 0; i < n; ++i) {
            diff[i] = a[i] - b[i];
            dphi[i] = phi[i] - phi1[i];
        }
        const double hphi = h_norm_direct(phi, mu);
        const double hphi1 = h_norm_direct(phi1, mu);
        lip.lhs = h_norm_direct(diff, mu);
        lip.rhs = 1.5 * (hphi * hphi + hphi * hphi1 + hphi1 * hphi1) *
                  h_norm_direct(dphi, mu);
        lip.ratio = (lip.rhs > 0.0) ? lip.lhs / lip.rhs : 0.0;
        lip.pass = lip.lhs <= lip.rhs * (1.0 + 1e-12);
        rep.lipschitz_bound.push_back(lip);
        all = all && lip.pass;
    }
    rep.all_pass = all;
    return rep;
}

}  // namespace schrctl
