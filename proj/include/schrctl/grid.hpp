#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace schrctl {

using Complex = std::complex<double>;
using WaveField = std::vector<Complex>;
using RealField = std::vector<double>;

/// Uniform symmetric grid on [-X, X]. n_points is odd so x = 0 is a node.
struct GridSpec {
    double half_width = 30.0;
    int n_points = 6001;

    GridSpec() = default;
    GridSpec(double X, int n) : half_width(X), n_points(n) { validate(); }

    double dx() const { return 2.0 * half_width / (n_points - 1); }
    double x(int i) const { return -half_width + i * dx(); }
    int size() const { return n_points; }

    void validate() const {
        if (half_width <= 0.0) throw std::invalid_argument("grid: half_width must be positive");
        if (n_points < 31) throw std::invalid_argument("grid: n_points must be >= 31");
        if (n_points % 2 == 0) throw std::invalid_argument("grid: n_points must be odd");
    }
};

/// The confining weight: mu(x) = |x| for |x| >= 2, with an even C^2
/// polynomial bridge on [-2, 2] keeping mu >= 1.
struct WeightField {
    GridSpec grid;
    RealField values;
};

double weight_mu_at(double x);

WeightField build_weight_mu(const GridSpec& grid);

enum class CutoffKind { Exterior, Interior, MultiplierQ };

/// Exterior: 0 on |x|<=R, 1 on |x|>=R+1.  Interior: 1 on |x|<=R+1, 0 on
/// |x|>=R+2.  Multiplier: q(x)=x on |x|<=R+2, 0 on |x|>=R+3.  Transitions
/// use the quintic smoothstep, so all fields are C^2.
struct CutoffField {
    GridSpec grid;
    CutoffKind kind = CutoffKind::Exterior;
    double radius = 2.0;
    RealField values;

    /// psi == 1 everywhere (degenerate control region covering the box).
    static CutoffField uniform(const GridSpec& grid);
};

double smoothstep_quintic(double t);

CutoffField build_cutoff(const GridSpec& grid, CutoffKind kind, double R);

enum class PotentialKind { WeightMu, LinearField, AbsValue, Custom };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::WeightMu;
    double slope = 0.0;           // for LinearField: alpha(x) = slope * x
    RealField custom_values;      // for Custom
};

struct PotentialField {
    GridSpec grid;
    PotentialKind kind = PotentialKind::WeightMu;
    RealField values;
    double c_plus = 0.0;   // measured alpha(X)/mu(X)
    double c_minus = 0.0;  // measured alpha(-X)/mu(-X)
};

PotentialField build_potential(const GridSpec& grid, const PotentialSpec& spec);

// Discrete norms and helpers used everywhere.
double l2_norm(const WaveField& u, double dx);
double l2_inner_re(const WaveField& u, const WaveField& v, double dx);
Complex l2_inner(const WaveField& u, const WaveField& v, double dx);
double linf_norm(const WaveField& u);
double l1_norm(const WaveField& u, double dx);
double l2mu_norm_sq(const WaveField& u, const RealField& mu, double dx);

/// Central-difference gradient, one-sided at the ends.
WaveField gradient(const WaveField& u, double dx);

}  // namespace schrctl
