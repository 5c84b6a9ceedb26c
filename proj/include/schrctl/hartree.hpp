#pragma once

#include <vector>

#include "schrctl/grid.hpp"

namespace schrctl {

enum class KernelKind { PoissonSplit, Zero, CustomMatrix };

/// Nonlocal interaction kernel. For poisson_split,
/// rho(x,y) = |x - y| - mu(x), so m(phi)(x) = int |x-y||phi(y)|^2 dy
/// - mu(x) ||phi||^2. Build-time checks: |rho(x,y)| <= mu(y) and
/// |d rho/dx| <= 2 at every grid pair.
struct KernelSpec {
    KernelKind kind = KernelKind::PoissonSplit;
    GridSpec grid;
    RealField mu;                     // weight values for poisson_split
    std::vector<RealField> matrix;    // rho(x_i, y_j) for custom_matrix

    static KernelSpec poisson_split(const GridSpec& grid);
    static KernelSpec zero(const GridSpec& grid);
    static KernelSpec custom(const GridSpec& grid, std::vector<RealField> rho);
};

/// m(phi)(x) = int rho(x,y)|phi(y)|^2 dy, trapezoid weights; O(n) prefix
/// sums for poisson_split.
RealField m_of(const WaveField& phi, const KernelSpec& kernel);

/// Reference O(n^2) quadrature of the same integral (oracle).
RealField m_of_direct(const WaveField& phi, const KernelSpec& kernel);

/// m(phi) * phi pointwise.
WaveField apply_nonlinear(const WaveField& phi, const KernelSpec& kernel);

struct HartreeBoundRow {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

struct HartreeBoundsReport {
    std::vector<HartreeBoundRow> sup_bound;       // ||m(phi)||_inf vs ||phi||^2_{L2mu}
    std::vector<HartreeBoundRow> lipschitz_bound; // Lemma-style 3/2 polynomial bound
    bool all_pass = false;
};

HartreeBoundsReport verify_hartree_bounds(const KernelSpec& kernel, int n_pairs,
                                          unsigned long long seed);

}  // namespace schrctl
