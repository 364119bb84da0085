#pragma once

#include <array>
#include <string>
#include <variant>

#include "spectral_games/numerics.hpp"

namespace spectral_games::shapes {

using numerics::Complex;

/// Real interval [mu, L], 0 < mu <= L.
class Segment {
 public:
  Segment(double mu, double L);
  double mu() const { return mu_; }
  double L() const { return L_; }

 private:
  double mu_;
  double L_;
};

/// Closed disc of center c and radius r, 0 < r < c.
class Disc {
 public:
  Disc(double c, double r);
  double c() const { return c_; }
  double r() const { return r_; }

 private:
  double c_;
  double r_;
};

/// Filled ellipse ((Re z - c)/a)^2 + (Im z / b)^2 <= 1 with the 0/0 = 0
/// convention, so b = 0 is the segment [c - a, c + a] and a = 0 the vertical
/// segment c + i[-b, b]. Requires a, b >= 0, (a, b) != (0, 0) and c > a.
class Ellipse {
 public:
  Ellipse(double a, double b, double c);
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

 private:
  double a_;
  double b_;
  double c_;
};

/// The two imaginary segments i[a, b] and -i[a, b], 0 < a < b.
class ImagCross {
 public:
  ImagCross(double a, double b);
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

using SpectralShape = std::variant<Segment, Disc, Ellipse, ImagCross>;

std::string describe(const SpectralShape& shape);

/// Heavy-ball parameters: step size alpha > 0, momentum beta in (-1, 1].
struct MomentumParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Set of eigenvalues on which momentum with (alpha, beta) contracts at rate rho.
class ConvergenceRegion {
 public:
  ConvergenceRegion(double alpha, double beta, double rho);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double rho() const { return rho_; }
  MomentumParams params() const { return {alpha_, beta_}; }

 private:
  double alpha_;
  double beta_;
  double rho_;
};

/// Cover constructions shrink the smaller real end point by this factor.
inline constexpr double kCoverShrink = 2.0;

bool membership(const SpectralShape& shape, Complex lambda);

/// Largest |lambda| over the shape.
double max_modulus(const SpectralShape& shape);

/// Asymptotic convergence factor of the shape, in [0, 1).
double acf(const SpectralShape& shape);

/// Closed form for E(a, b, c) without shape validation; shared by every
/// variant that reduces to an ellipse.
double ellipse_rate(double a, double b, double c);

/// Relative margin added to sqrt(beta) for segments (b = 0).
inline constexpr double kDoubleRootMargin = 1e-11;

/// alpha = 2/(c + s), beta = (c - s)/(c + s) with s = sqrt(c^2 + b^2 - a^2).
/// For b = 0 sqrt(beta) is raised by kDoubleRootMargin so the tuned double
/// roots at the end points survive rounding in the spectrum.
MomentumParams ellipse_momentum(double a, double b, double c);

MomentumParams optimal_momentum(const SpectralShape& shape);

/// Largest root modulus of z^2 - (1 - alpha*lambda + beta) z + beta.
double momentum_root_radius(Complex lambda, MomentumParams p);

bool region_membership(Complex lambda, const ConvergenceRegion& region);

ConvergenceRegion ellipse_as_region(const Ellipse& e);

/// Thin ellipse around [mu, L] with imaginary semi-axis eps.
Ellipse perturbed_ellipse(double mu, double L, double eps);

/// Leading-order factor of perturbed_ellipse(mu, L, L*(mu/L)^theta) as mu/L -> 0.
double perturbed_acf_asymptotic(double mu, double L, double theta);

struct EgCover {
  double eta;
  double mu_bar;
  double L_bar;
  Ellipse ellipse;
};

/// Step size eta and an ellipse containing {i s + eta s^2 : s in +-[a, b]},
/// the spectrum of the extragradient field of a bilinear game.
EgCover eg_cover_ellipse(double a, double b);

struct ConsensusCover {
  double mu_bar;
  double L_bar;
  double q;    // bound on |Im| / Re of the consensus spectrum
  Ellipse ellipse;
};

/// True when tau*gamma^2 >= mu and gamma/(mu + tau gamma^2) <=
/// sqrt(3/2) sqrt((mu + tau gamma^2)/(L + tau L^2)).
bool consensus_tau_admissible(double gamma, double mu, double L, double tau);

/// Corners (1 +- i q)(mu + tau gamma^2) and (1 +- i q)(L + tau L^2) of the
/// trapezoid holding the consensus spectrum.
std::array<Complex, 4> consensus_trapezoid(double gamma, double mu, double L, double tau);

/// Ellipse containing the consensus trapezoid; throws InadmissibleTau when
/// consensus_tau_admissible fails.
ConsensusCover consensus_cover_ellipse(double gamma, double mu, double L, double tau);

/// Same construction without the admissibility gate (only needs
/// tau*gamma^2 >= mu). Containment of the trapezoid still holds.
ConsensusCover consensus_cover_ellipse_unchecked(double gamma, double mu, double L, double tau);

}  // namespace spectral_games::shapes
