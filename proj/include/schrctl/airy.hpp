#pragma once

#include <utility>
#include <vector>

#include "schrctl/grid.hpp"

namespace schrctl {

enum class Parity { Even, Odd };

/// Analytic eigenpair of -d2/dx2 + |x| built from Airy zeros.
struct AiryEigenpair {
    int index = 0;           // 0-based mode number
    double lambda = 0.0;     // eigenvalue
    Parity parity = Parity::Even;
    double normalization = 0.0;  // trapezoid-rule constant c_N on the working grid
};

struct AiryValue {
    double ai;
    double ai_prime;
};

/// Ai and Ai' for |x| <= 60, absolute error below 1e-10. Power series near
/// the origin, asymptotic expansions for large |x|.
AiryValue airy_eval(double x);

enum class AiryZeroKind { Ai, AiPrime };

/// (n+1)-th positive zero of Ai(-x) or Ai'(-x); n is 0-based.
double airy_zero(AiryZeroKind kind, int n);

/// Eigenvalue ladder: lambda_{2N} = z_N (zeros of Ai'(-x)),
/// lambda_{2N+1} = w_N (zeros of Ai(-x)).
double airy_eigenvalue(int N);

/// Analytic eigenfunction sampled on the grid, normalized to unit discrete
/// L2 norm by the trapezoid rule.
std::pair<AiryEigenpair, WaveField> airy_eigenpair(int N, const GridSpec& grid);

struct RadiationRow {
    int index;
    double lambda;
    double quantity;      // lambda^{-1/4} * int_Omega |phi_N'|^2
    double running_max;
};

/// Boundedness table for the localized-derivative quantity on Omega = [a, b].
std::vector<RadiationRow> radiation_bound_check(int n_max, double omega_lo, double omega_hi,
                                                const GridSpec& grid);

namespace airy_detail {
// Individual branches, exposed for the overlap cross-check.
AiryValue airy_series(double x);
AiryValue airy_asymptotic_positive(double x);
AiryValue airy_asymptotic_negative(double x);
}  // namespace airy_detail

}  // namespace schrctl
