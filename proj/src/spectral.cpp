#include "schrctl/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace schrctl {

WaveField DiscreteOperator::apply(const WaveField& u) const {
    const int n = grid.n_points;
    WaveField out(n, Complex(0.0));
    for (int i = 1; i + 1 < n; ++i)
        out[i] = offdiag * u[i - 1] + diag[i - 1] * u[i] + offdiag * u[i + 1];
    // Dirichlet: contributions from the (zero) boundary values drop out.
    out[1] = diag[0] * u[1] + offdiag * u[2];
    out[n - 2] = offdiag * u[n - 3] + diag[n - 3] * u[n - 2];
    return out;
}

WaveField DiscreteOperator::solve(const WaveField& f) const {
    return solve_shifted(f, Complex(0.0));
}

WaveField DiscreteOperator::solve_shifted(const WaveField& f, Complex c) const {
    // Thomas elimination for the interior block of I*c0 + c*A, where the
    // caller passes the assembled diagonal through c: here we solve
    // (I + c A) u = f when c != 0, and A u = f when c == 0.
    const int n = grid.n_points;
    const int m = n - 2;
    std::vector<Complex> d(m), rhs(m);
    Complex off;
    if (c == Complex(0.0)) {
        for (int i = 0; i < m; ++i) d[i] = diag[i];
        off = offdiag;
    } else {
        for (int i = 0; i < m; ++i) d[i] = 1.0 + c * diag[i];
        off = c * offdiag;
    }
    for (int i = 0; i < m; ++i) rhs[i] = f[i + 1];
    for (int i = 1; i < m; ++i) {
        const Complex w = off / d[i - 1];
        d[i] -= w * off;
        rhs[i] -= w * rhs[i - 1];
    }
    WaveField u(n, Complex(0.0));
    u[m] = rhs[m - 1] / d[m - 1];
    for (int i = m - 2; i >= 0; --i) u[i + 1] = (rhs[i] - off * u[i + 2]) / d[i];
    return u;
}

double DiscreteOperator::quadratic_form(const WaveField& u) const {
    const WaveField au = apply(u);
    return grid.dx() * [&] {
        double s = 0.0;
        for (size_t i = 0; i < u.size(); ++i) s += std::real(std::conj(u[i]) * au[i]);
        return s;
    }();
}

DiscreteOperator assemble_operator(const GridSpec& grid, const PotentialField& V) {
    grid.validate();
    if (static_cast<int>(V.values.size()) != grid.n_points)
        throw std::invalid_argument("assemble_operator: potential size mismatch");
    DiscreteOperator op;
    op.grid = grid;
    op.potential = V.values;
    const double dx = grid.dx();
    op.offdiag = -1.0 / (dx * dx);
    op.diag.resize(grid.n_points - 2);
    for (int i = 0; i < grid.n_points - 2; ++i) op.diag[i] = 2.0 / (dx * dx) + V.values[i + 1];
    return op;
}

WaveField SpectralBasis::mode_field(int k) const {
    WaveField f(grid_.n_points);
    for (int i = 0; i < grid_.n_points; ++i) f[i] = modes_[k][i];
    return f;
}

std::vector<Complex> SpectralBasis::project(const WaveField& u) const {
    const double dx = grid_.dx();
    std::vector<Complex> c(n_modes());
    for (int k = 0; k < n_modes(); ++k) {
        Complex s = 0.0;
        const RealField& m = modes_[k];
        for (int i = 0; i < grid_.n_points; ++i) s += m[i] * u[i];
        c[k] = dx * s;
    }
    return c;
}

WaveField SpectralBasis::synthesize(const std::vector<Complex>& coeffs) const {
    WaveField u(grid_.n_points, Complex(0.0));
    for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
        const RealField& m = modes_[k];
        const Complex c = coeffs[k];
        if (c == Complex(0.0)) continue;
        for (int i = 0; i < grid_.n_points; ++i) u[i] += c * m[i];
    }
    return u;
}

SpectralBasis decompose(const DiscreteOperator& op, int n_modes) {
    const int n = op.grid.n_points;
    const int m = n - 2;
    if (n_modes < 1 || n_modes > m)
        throw std::invalid_argument("decompose: n_modes must be in [1, n_points-2]");

    std::vector<double> d(op.diag), e(m - 1, op.offdiag);
    std::vector<double> w(m), z(static_cast<size_t>(m) * n_modes);
    std::vector<lapack_int> isuppz(2 * n_modes);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_ROW_MAJOR, 'V', 'I', m, d.data(), e.data(), 0.0, 0.0, 1, n_modes, 0.0, &found,
        w.data(), z.data(), n_modes, isuppz.data());
    if (info != 0 || found != n_modes)
        throw std::runtime_error("decompose: tridiagonal eigensolver failed");

    SpectralBasis b;
    b.grid_ = op.grid;
    b.eigenvalues_.assign(w.begin(), w.begin() + n_modes);
    const double dx = op.grid.dx();
    const double scale = 1.0 / std::sqrt(dx);
    b.modes_.assign(n_modes, RealField(n, 0.0));
    for (int k = 0; k < n_modes; ++k) {
        // deterministic sign: first entry of significant magnitude positive
        double sgn = 0.0;
        for (int i = 0; i < m; ++i) {
            const double v = z[static_cast<size_t>(i) * n_modes + k];
            if (std::abs(v) > 1e-8) { sgn = (v > 0) ? 1.0 : -1.0; break; }
        }
        if (sgn == 0.0) sgn = 1.0;
        for (int i = 0; i < m; ++i)
            b.modes_[k][i + 1] = sgn * scale * z[static_cast<size_t>(i) * n_modes + k];
    }

    // orthogonality and residual post-checks
    double ortho = 0.0;
    for (int a = 0; a < std::min(n_modes, 24); ++a)
        for (int bdx = a; bdx < std::min(n_modes, 24); ++bdx) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += b.modes_[a][i] * b.modes_[bdx][i];
            s *= dx;
            ortho = std::max(ortho, std::abs(s - (a == bdx ? 1.0 : 0.0)));
        }
    b.max_ortho_defect_ = ortho;
    double resid = 0.0;
    const double anorm = 2.0 / (dx * dx) +
                         *std::max_element(op.potential.begin(), op.potential.end());
    for (int k = 0; k < n_modes; k += std::max(1, n_modes / 8)) {
        WaveField v = b.mode_field(k);
        WaveField av = op.apply(v);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::norm(av[i] - b.eigenvalues_[k] * v[i]);
        resid = std::max(resid, std::sqrt(dx * s) / anorm);
    }
    b.max_residual_ = resid;
    if (b.max_ortho_defect_ > 1e-9 || b.max_residual_ > 1e-8)
        throw std::runtime_error("decompose: eigenbasis failed post-checks");
    return b;
}

std::pair<DiscreteOperator, SpectralBasis> assemble_and_decompose(const GridSpec& grid,
                                                                  const PotentialField& V,
                                                                  int n_modes) {
    DiscreteOperator op = assemble_operator(grid, V);
    SpectralBasis basis = decompose(op, n_modes);
    return {std::move(op), std::move(basis)};
}

WkVector WkVector::from_field(const SpectralBasis& b, const WaveField& u, int order) {
    return WkVector{&b, order, b.project(u)};
}

WkVector WkVector::zero(const SpectralBasis& b, int order) {
    return WkVector{&b, order, std::vector<Complex>(b.n_modes(), Complex(0.0))};
}

namespace {
void check_same_basis(const WkVector& u, const WkVector& v) {
    if (u.basis == nullptr || u.basis != v.basis)
        throw std::invalid_argument("wk: vectors from different bases");
}
}  // namespace

Complex wk_inner(const WkVector& u, const WkVector& v, int k) {
    check_same_basis(u, v);
    Complex s = 0.0;
    for (size_t i = 0; i < u.coeffs.size(); ++i)
        s += std::pow(u.basis->lambda(static_cast<int>(i)), k) * std::conj(u.coeffs[i]) *
             v.coeffs[i];
    return s;
}

double wk_norm(const WkVector& u, int k) {
    double s = 0.0;
    for (size_t i = 0; i < u.coeffs.size(); ++i)
        s += std::pow(u.basis->lambda(static_cast<int>(i)), k) * std::norm(u.coeffs[i]);
    return std::sqrt(s);
}

WkVector riesz_power(const WkVector& u, double s) {
    WkVector out = u;
    for (size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] *= std::pow(u.basis->lambda(static_cast<int>(i)), s);
    out.order = u.order - static_cast<int>(std::lround(2.0 * s));
    return out;
}

WkVector apply_P(const WkVector& w, const PotentialField& alpha, const WeightField& mu,
                 const DiscreteOperator& op_mu) {
    if (w.order != 0 && w.order != 1)
        throw std::invalid_argument("apply_P: order must be 0 or 1");
    const SpectralBasis& b = *w.basis;
    const int n = b.grid().n_points;
    WaveField wg = b.synthesize(w.coeffs);
    RealField nu(n);
    for (int i = 0; i < n; ++i) nu[i] = alpha.values[i] - mu.values[i];
    const WaveField lw = op_mu.apply(wg);
    WaveField nuw(n), comm(n);
    for (int i = 0; i < n; ++i) nuw[i] = nu[i] * wg[i];
    const WaveField lnw = op_mu.apply(nuw);
    for (int i = 0; i < n; ++i) comm[i] = nu[i] * lw[i] - lnw[i];
    const WaveField pg = op_mu.solve(comm);
    WkVector out = WkVector::from_field(b, pg, w.order);
    return out;
}

double h_norm_direct(const WaveField& u, const WeightField& mu) {
    const double dx = mu.grid.dx();
    const WaveField g = gradient(u, dx);
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += std::norm(g[i]) + mu.values[i] * std::norm(u[i]);
    return std::sqrt(dx * s);
}

}  // namespace schrctl
