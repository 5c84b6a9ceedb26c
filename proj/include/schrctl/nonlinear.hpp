#pragma once

#include <vector>

#include "schrctl/hartree.hpp"
#include "schrctl/hum.hpp"

namespace schrctl {

/// Duhamel tail N(v,0,t) = -i int_0^t e^{iL(s-t)} m(v(s))v(s) ds, computed
/// as the zero-data inhomogeneous solve with forcing m(v)v.
SpectralTrajectory nonlinear_term(const SpectralTrajectory& v, const KernelSpec& kernel,
                                  const PotentialField& alpha);

struct GammaResult {
    SpectralTrajectory traj;  // Gamma(v) = wtilde + N(v,0,.)
    SpectralTrajectory h;     // the linear control h^lin used by wtilde
    ControlSolution lin;
};

/// One application of the fixed-point map: linear control toward
/// uT - N(v,0,T), then add the Duhamel tail back.
GammaResult gamma_map(const SpectralTrajectory& v, const LinearControlProblem& base,
                      const KernelSpec& kernel);

struct NonlinearControlRun {
    LinearControlProblem linear;  // data, horizon, cutoff, basis, CG settings
    KernelSpec kernel;
    double tol = 1e-10;
    int max_iter = 25;

    // filled by fixed_point_solve
    std::vector<double> distances;  // d_k = sup_t ||v^{k+1}(t) - v^k(t)||_{W1}
    std::vector<double> ratios;     // r_k = d_k / d_{k-1}
    SpectralTrajectory h, u;
    int iterations = 0;
    bool converged = false;
    double cost = 0.0;          // ||h||_{L2(0,T,W1)}
    double endpoint_gap = 0.0;  // ||u(T) - uT||_{W1} of the iterate itself
    double target_error = 0.0;  // from the independent nonlinear forward solver
    // measured constants of the contraction estimate, logged per run:
    // sup||v0|| <= A (||u0|| + ||uT||), ||N(v)|| <= B sup||v||^3, r ~ C delta^2
    double measured_a = 0.0, measured_b = 0.0, measured_c = 0.0;
};

/// Picard iteration v^{k+1} = Gamma(v^k) from the linear controlled
/// trajectory. Throws on three consecutive non-contracting steps.
NonlinearControlRun fixed_point_solve(NonlinearControlRun run);

/// Independent verifier: grid-space CN for i u_t = A u + m(u)u + psi h with
/// a short inner sweep on the implicit Hartree term.
Trajectory nonlinear_forward(const WaveField& u0, double T, double dt,
                             const PotentialField& alpha, const KernelSpec& kernel,
                             const CutoffField& psi, const SpectralTrajectory& h);

}  // namespace schrctl
