#include "schrctl/airy.hpp"

#include <cmath>
#include <stdexcept>

namespace schrctl {

namespace airy_detail {

namespace {
const double kAi0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
const double kAip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
constexpr double kSeriesCut = 6.7;
constexpr int kMaxAsympTerms = 28;

// u_k of the standard Airy asymptotic expansions; v_k = (6k+1)/(1-6k) u_k.
void poly_coeffs(int nmax, std::vector<double>& u, std::vector<double>& v) {
    u.assign(nmax + 1, 0.0);
    v.assign(nmax + 1, 0.0);
    u[0] = v[0] = 1.0;
    for (int k = 1; k <= nmax; ++k) {
        u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
               ((2.0 * k - 1.0) * 216.0 * k);
        v[k] = u[k] * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    }
}
}  // namespace

AiryValue airy_series(double x) {
    // Ai = Ai(0) F - |Ai'(0)| G with F'' = xF, G'' = xG, F(0)=1, G(0)=0, G'(0)=1.
    const double x3 = x * x * x;
    double tf = 1.0, f = tf;
    double tg = x, g = tg;
    double tfp = 0.5 * x * x, fp = tfp;
    double tgp = 1.0, gp = tgp;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        tgp *= x3 / ((3.0 * k - 2.0) * (3.0 * k));
        tfp *= x3 / ((3.0 * k) * (3.0 * k + 2.0));
        f += tf;
        g += tg;
        gp += tgp;
        fp += tfp;
        if (std::abs(tf) < 1e-18 && std::abs(tg) < 1e-18 && std::abs(tfp) < 1e-18 &&
            std::abs(tgp) < 1e-18)
            break;
    }
    return {kAi0 * f + kAip0 * g, kAi0 * fp + kAip0 * gp};
}

AiryValue airy_asymptotic_positive(double x) {
    const double zeta = (2.0 / 3.0) * std::pow(x, 1.5);
    std::vector<double> u, v;
    poly_coeffs(kMaxAsympTerms, u, v);
    double su = 0.0, sv = 0.0, prev = 1e300;
    double zk = 1.0;
    for (int k = 0; k <= kMaxAsympTerms; ++k) {
        const double tu = u[k] / zk;
        if (std::abs(tu) > prev) break;  // divergent tail: stop at smallest term
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        su += sgn * tu;
        sv += sgn * v[k] / zk;
        prev = std::abs(tu);
        zk *= zeta;
    }
    const double pre = std::exp(-zeta) / (2.0 * std::sqrt(M_PI));
    return {pre * su / std::pow(x, 0.25), -pre * sv * std::pow(x, 0.25)};
}

AiryValue airy_asymptotic_negative(double x) {
    const double t = -x;
    const double zeta = (2.0 / 3.0) * std::pow(t, 1.5);
    std::vector<double> u, v;
    poly_coeffs(kMaxAsympTerms, u, v);
    // Even and odd u/v sub-sums with alternating signs.
    double ue = 0.0, uo = 0.0, ve = 0.0, vo = 0.0;
    double z2 = zeta * zeta;
    double zk = 1.0, prev = 1e300;
    for (int k = 0; 2 * k + 1 <= kMaxAsympTerms; ++k) {
        const double te = u[2 * k] / zk;
        if (std::abs(te) > prev) break;
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        ue += sgn * te;
        uo += sgn * u[2 * k + 1] / (zk * zeta);
        ve += sgn * v[2 * k] / zk;
        vo += sgn * v[2 * k + 1] / (zk * zeta);
        prev = std::abs(te);
        zk *= z2;
    }
    const double c = std::cos(zeta - M_PI / 4.0), s = std::sin(zeta - M_PI / 4.0);
    const double pre = 1.0 / std::sqrt(M_PI);
    const double ai = pre / std::pow(t, 0.25) * (c * ue + s * uo);
    const double aip = pre * std::pow(t, 0.25) * (s * ve - c * vo);
    return {ai, aip};
}

}  // namespace airy_detail

AiryValue airy_eval(double x) {
    if (std::abs(x) > 120.0) throw std::invalid_argument("airy_eval: |x| > 120");
    using namespace airy_detail;
    if (std::abs(x) <= kSeriesCut) return airy_series(x);
    return (x > 0) ? airy_asymptotic_positive(x) : airy_asymptotic_negative(x);
}

namespace {

double zero_objective(AiryZeroKind kind, double x) {
    const AiryValue v = airy_eval(-x);
    return (kind == AiryZeroKind::Ai) ? v.ai : v.ai_prime;
}

double zero_slope(AiryZeroKind kind, double x) {
    const AiryValue v = airy_eval(-x);
    // d/dx Ai(-x) = -Ai'(-x);  d/dx Ai'(-x) = -Ai''(-x) = x*Ai(-x).
    return (kind == AiryZeroKind::Ai) ? -v.ai_prime : x * v.ai;
}

double zero_seed(AiryZeroKind kind, int n) {
    const double t = (kind == AiryZeroKind::Ai) ? 3.0 * M_PI * (4.0 * n + 3.0) / 8.0
                                                : 3.0 * M_PI * (4.0 * n + 1.0) / 8.0;
    const double corr = (kind == AiryZeroKind::Ai) ? 5.0 / 48.0 : -7.0 / 48.0;
    return std::pow(t, 2.0 / 3.0) * (1.0 + corr / (t * t));
}

}  // namespace

double airy_zero(AiryZeroKind kind, int n) {
    if (n < 0) throw std::invalid_argument("airy_zero: n must be >= 0");
    const double seed = zero_seed(kind, n);
    // Bracket around the seed by a sign change, widening if needed.
    double half = 0.25;
    double lo = seed - half, hi = seed + half;
    for (int tries = 0; tries < 12; ++tries) {
        if (lo < 0.05) lo = 0.05;
        if (zero_objective(kind, lo) * zero_objective(kind, hi) < 0.0) break;
        half *= 1.6;
        lo = seed - half;
        hi = seed + half;
        if (tries == 11) throw std::runtime_error("airy_zero: failed to bracket");
    }
    double x = seed;
    double flo = zero_objective(kind, lo);
    for (int it = 0; it < 100; ++it) {
        const double fx = zero_objective(kind, x);
        if (fx * flo <= 0.0) hi = x; else { lo = x; flo = fx; }
        const double dfx = zero_slope(kind, x);
        double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);  // bisection fallback
        if (std::abs(next - x) < 1e-13 * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

double airy_eigenvalue(int N) {
    if (N < 0) throw std::invalid_argument("airy_eigenvalue: N must be >= 0");
    return (N % 2 == 0) ? airy_zero(AiryZeroKind::AiPrime, N / 2)
                        : airy_zero(AiryZeroKind::Ai, N / 2);
}

std::pair<AiryEigenpair, WaveField> airy_eigenpair(int N, const GridSpec& grid) {
    grid.validate();
    const double lambda = airy_eigenvalue(N);
    if (grid.dx() > 0.25 / std::sqrt(lambda))
        throw std::invalid_argument("airy_eigenpair: grid does not resolve mode");
    const Parity parity = (N % 2 == 0) ? Parity::Even : Parity::Odd;
    const int n = grid.n_points;
    WaveField phi(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double base = airy_eval(std::abs(x) - lambda).ai;
        const double sgn = (x > 0) - (x < 0);
        phi[i] = (parity == Parity::Even) ? base : sgn * base;
    }
    // Trapezoid normalization on the working grid.
    const double dx = grid.dx();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        s += w * std::norm(phi[i]);
    }
    const double c = 1.0 / std::sqrt(dx * s);
    for (auto& z : phi) z *= c;
    return {AiryEigenpair{N, lambda, parity, c}, phi};
}

std::vector<RadiationRow> radiation_bound_check(int n_max, double omega_lo, double omega_hi,
                                                const GridSpec& grid) {
    if (omega_lo < -grid.half_width || omega_hi > grid.half_width || omega_lo >= omega_hi)
        throw std::invalid_argument("radiation_bound_check: Omega outside grid box");
    std::vector<RadiationRow> rows;
    double running = 0.0;
    const double dx = grid.dx();
    for (int N = 0; N <= n_max; ++N) {
        auto [pair, phi] = airy_eigenpair(N, grid);
        const WaveField g = gradient(phi, dx);
        double integral = 0.0;
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.x(i);
            if (x >= omega_lo && x <= omega_hi) integral += std::norm(g[i]);
        }
        integral *= dx;
        const double q = std::pow(pair.lambda, -0.25) * integral;
        running = std::max(running, q);
        rows.push_back({N, pair.lambda, q, running});
    }
    return rows;
}

}  // namespace schrctl
