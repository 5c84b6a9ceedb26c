#include "schrctl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace schrctl {

double weight_mu_at(double x) {
    const double a = std::abs(x);
    if (a >= 2.0) return a;
    const double x2 = a * a;
    // Even bridge matching value, slope and curvature of |x| at x = 2.
    return 1.0 + (3.0 / 16.0) * x2 + (1.0 / 32.0) * x2 * x2 - (1.0 / 256.0) * x2 * x2 * x2;
}

WeightField build_weight_mu(const GridSpec& grid) {
    grid.validate();
    WeightField w{grid, RealField(grid.n_points)};
    for (int i = 0; i < grid.n_points; ++i) w.values[i] = weight_mu_at(grid.x(i));
    return w;
}

double smoothstep_quintic(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

CutoffField CutoffField::uniform(const GridSpec& grid) {
    CutoffField f{grid, CutoffKind::Exterior, 0.0, RealField(grid.n_points, 1.0)};
    return f;
}

CutoffField build_cutoff(const GridSpec& grid, CutoffKind kind, double R) {
    grid.validate();
    if (R <= 0.0) throw std::invalid_argument("cutoff: R must be positive");
    if (grid.half_width < R + 4.0)
        throw std::invalid_argument("cutoff: box too small, need X >= R+4");
    CutoffField f{grid, kind, R, RealField(grid.n_points)};
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        const double a = std::abs(x);
        double v = 0.0;
        switch (kind) {
            case CutoffKind::Exterior:
                v = (a <= R) ? 0.0 : (a >= R + 1.0 ? 1.0 : smoothstep_quintic(a - R));
                break;
            case CutoffKind::Interior:
                v = (a <= R + 1.0) ? 1.0
                                   : (a >= R + 2.0 ? 0.0 : 1.0 - smoothstep_quintic(a - (R + 1.0)));
                break;
            case CutoffKind::MultiplierQ:
                if (a <= R + 2.0) v = x;
                else if (a >= R + 3.0) v = 0.0;
                else v = x * (1.0 - smoothstep_quintic(a - (R + 2.0)));
                break;
        }
        f.values[i] = v;
    }
    return f;
}

PotentialField build_potential(const GridSpec& grid, const PotentialSpec& spec) {
    grid.validate();
    PotentialField p{grid, spec.kind, RealField(grid.n_points), 0.0, 0.0};
    switch (spec.kind) {
        case PotentialKind::WeightMu: {
            p.values = build_weight_mu(grid).values;
            break;
        }
        case PotentialKind::LinearField:
            for (int i = 0; i < grid.n_points; ++i) p.values[i] = spec.slope * grid.x(i);
            break;
        case PotentialKind::AbsValue:
            for (int i = 0; i < grid.n_points; ++i) p.values[i] = std::abs(grid.x(i));
            break;
        case PotentialKind::Custom: {
            if (static_cast<int>(spec.custom_values.size()) != grid.n_points)
                throw std::invalid_argument("potential: custom values size mismatch");
            p.values = spec.custom_values;
            const double dx = grid.dx();
            double max_d1 = 0.0, max_d2 = 0.0;
            for (int i = 1; i + 1 < grid.n_points; ++i) {
                max_d1 = std::max(max_d1, std::abs(p.values[i + 1] - p.values[i - 1]) / (2 * dx));
                max_d2 = std::max(max_d2, std::abs(p.values[i + 1] - 2 * p.values[i] + p.values[i - 1]) / (dx * dx));
            }
            constexpr double kDerivBound = 1e3;
            if (max_d1 > kDerivBound || max_d2 > kDerivBound)
                throw std::invalid_argument("potential: custom alpha has unbounded discrete derivatives");
            break;
        }
    }
    const double muX = weight_mu_at(grid.half_width);
    p.c_plus = p.values.back() / muX;
    p.c_minus = p.values.front() / muX;
    return p;
}

double l2_norm(const WaveField& u, double dx) {
    double s = 0.0;
    for (const auto& z : u) s += std::norm(z);
    return std::sqrt(dx * s);
}

double l2_inner_re(const WaveField& u, const WaveField& v, double dx) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += std::real(std::conj(u[i]) * v[i]);
    return dx * s;
}

Complex l2_inner(const WaveField& u, const WaveField& v, double dx) {
    Complex s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return dx * s;
}

double linf_norm(const WaveField& u) {
    double m = 0.0;
    for (const auto& z : u) m = std::max(m, std::abs(z));
    return m;
}

double l1_norm(const WaveField& u, double dx) {
    double s = 0.0;
    for (const auto& z : u) s += std::abs(z);
    return dx * s;
}

double l2mu_norm_sq(const WaveField& u, const RealField& mu, double dx) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += mu[i] * std::norm(u[i]);
    return dx * s;
}

WaveField gradient(const WaveField& u, double dx) {
    const size_t n = u.size();
    WaveField g(n);
    if (n < 2) return g;
    g[0] = (u[1] - u[0]) / dx;
    g[n - 1] = (u[n - 1] - u[n - 2]) / dx;
    for (size_t i = 1; i + 1 < n; ++i) g[i] = (u[i + 1] - u[i - 1]) / (2.0 * dx);
    return g;
}

}  // namespace schrctl
