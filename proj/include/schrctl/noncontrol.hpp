#pragma once

#include <vector>

#include "schrctl/hum.hpp"

namespace schrctl {

/// Control-cost scan over eigenmode targets: u0 = 0, uT = the N-th
/// eigenfunction of -d2 + |x|, flow potential mu. With an interior cutoff
/// the duality operator is near-singular, CG failures are recorded as data
/// (best iterate), and the cost blows up in N while the pairing bound
/// quantity lambda^{-1}(||u0||_H + lambda^{1/2})(1 + lambda^{1/4}) decays.
struct CostScanParams {
    GridSpec grid{15.0, 601};
    int n_modes = 64;          // flow basis size (potential mu)
    int target_modes = 16;     // eigenpairs of -d2 + |x| to make available
    double T = 1.0;
    double dt = 1e-3;
    double R = 2.0;
    CutoffKind cutoff = CutoffKind::Interior;
    double cg_tol = 1e-10;
    int cg_max_iter = 200;
    std::vector<int> targets{2, 4, 8};  // 1-based eigenmode indices N
    unsigned long long seed = 1;
};

struct CostScanRow {
    int N = 0;
    double lambda = 0.0;          // eigenvalue of -d2 + |x| for mode N
    double cost = 0.0;            // ||h||_{L2(0,T,W1)} (best iterate on failure)
    int cg_iterations = 0;
    bool converged = false;
    double target_error = 0.0;
    double bound_quantity = 0.0;  // lambda^{-1}(||u0||_H + lambda^{1/2})(1 + lambda^{1/4})
    double pairing = 0.0;         // int_0^T |<psi h + b u, phi_N>| dt, b = mu - |x|
};

struct CostScanResult {
    std::vector<CostScanRow> rows;     // sorted by N
    double observability = 0.0;        // smallest Rayleigh quotient, shared by rows
    double loglog_slope = 0.0;         // d log(cost) / d log(lambda)
};

CostScanResult discrete_cost_scan(const CostScanParams& params);

/// The scaled-bump family Psi_eps = eps^{-1} Psi(x/eps) with Psi the
/// normalized C-infinity bump on [-1,1], and phi_eps = U_e(2T) Psi_eps.
struct ScalingRow {
    double eps = 0.0;
    double l1 = 0.0, l2 = 0.0, l2mu = 0.0;    // norms of Psi_eps
    double grad_l1 = 0.0, grad_l2 = 0.0;      // norms of (Psi_eps)_x
    double eps3_quad = 0.0;   // eps^3 <phi_eps, L+ phi_eps>
    double deviation = 0.0;   // |eps3_quad - ||Psi_x||^2|
};

struct ScalingScanResult {
    std::vector<ScalingRow> rows;  // sorted by eps descending
    double psi_l2 = 0.0, psi_x_l1 = 0.0, psi_x_l2 = 0.0;  // reference norms of Psi
    double loglog_slope = 0.0;     // d log(deviation) / d log(eps), expect ~1
};

ScalingScanResult scaling_family_check(const std::vector<double>& eps_list, double T);

/// Normalized bump and its derivative (int Psi = 1, support [-1,1]).
double bump_value(double x);
double bump_derivative(double x);

/// Residual of the conjugation identity
/// U_e(r)(-d2)U_e(s) phi = U_e(r+s)(s^2 - 2is d/dx - d2) phi,
/// max-relative in L2, evaluated with spectral derivatives on a padded grid.
double avron_identity_check(double r, double s, const GridSpec& grid, const WaveField& phi);

}  // namespace schrctl
