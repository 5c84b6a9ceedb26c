#pragma once

#include <memory>
#include <vector>

#include "schrctl/grid.hpp"

namespace schrctl {

/// Second-order central-difference discretization of -d2/dx2 + V with
/// Dirichlet conditions at the box ends. Acts on the interior nodes;
/// full-grid fields keep zero endpoints.
struct DiscreteOperator {
    GridSpec grid;
    RealField potential;   // V on the full grid
    RealField diag;        // interior diagonal: 2/dx^2 + V_i
    double offdiag = 0.0;  // -1/dx^2

    /// (A u)_i on the full grid (endpoints mapped to 0).
    WaveField apply(const WaveField& u) const;
    /// Solve A u = f (real symmetric tridiagonal, interior unknowns).
    WaveField solve(const WaveField& f) const;
    /// Solve (I + c A) u = f for complex c (Crank-Nicolson half-steps).
    WaveField solve_shifted(const WaveField& f, Complex c) const;
    /// Quadratic form <u, A u> (real for Hermitian A).
    double quadratic_form(const WaveField& u) const;
};

DiscreteOperator assemble_operator(const GridSpec& grid, const PotentialField& V);

/// Lowest eigenpairs of a DiscreteOperator, orthonormal in the discrete L2
/// inner product dx * sum(conj(u) v).
class SpectralBasis {
public:
    SpectralBasis() = default;

    int n_modes() const { return static_cast<int>(eigenvalues_.size()); }
    double lambda(int k) const { return eigenvalues_[k]; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    const GridSpec& grid() const { return grid_; }
    /// k-th eigenvector as a full-grid real field (endpoints zero).
    const RealField& mode(int k) const { return modes_[k]; }
    WaveField mode_field(int k) const;

    std::vector<Complex> project(const WaveField& u) const;
    WaveField synthesize(const std::vector<Complex>& coeffs) const;

    double max_ortho_defect() const { return max_ortho_defect_; }
    double max_residual() const { return max_residual_; }

    friend SpectralBasis decompose(const DiscreteOperator& op, int n_modes);

private:
    GridSpec grid_;
    std::vector<double> eigenvalues_;
    std::vector<RealField> modes_;
    double max_ortho_defect_ = 0.0;
    double max_residual_ = 0.0;
};

SpectralBasis decompose(const DiscreteOperator& op, int n_modes);

std::pair<DiscreteOperator, SpectralBasis> assemble_and_decompose(const GridSpec& grid,
                                                                  const PotentialField& V,
                                                                  int n_modes);

/// Coefficient vector in a SpectralBasis, tagged with the Sobolev order k of
/// the weighted norm  sum lambda^k |c|^2.
struct WkVector {
    const SpectralBasis* basis = nullptr;
    int order = 0;  // k in {-3..2}
    std::vector<Complex> coeffs;

    static WkVector from_field(const SpectralBasis& b, const WaveField& u, int order);
    static WkVector zero(const SpectralBasis& b, int order);
};

Complex wk_inner(const WkVector& u, const WkVector& v, int k);
double wk_norm(const WkVector& u, int k);
inline double wk_norm(const WkVector& u) { return wk_norm(u, u.order); }

/// Multiply coefficients by lambda^s and shift the order tag by 2s.
/// s = 1 realizes the Riesz map Lambda : W^1 -> W^-1, s = -1 its inverse.
WkVector riesz_power(const WkVector& u, double s);

/// P(w) = L_mu^{-1} [nu, L_mu] w with nu = alpha - mu, computed in grid
/// space against the L_mu discretization and re-expanded; order preserved.
WkVector apply_P(const WkVector& w, const PotentialField& alpha, const WeightField& mu,
                 const DiscreteOperator& op_mu);

/// Direct H-norm: sqrt(||u_x||^2 + ||u||^2_{L2_mu}) with central differences.
double h_norm_direct(const WaveField& u, const WeightField& mu);

}  // namespace schrctl
