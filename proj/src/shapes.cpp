#include "spectral_games/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spectral_games/error.hpp"

namespace spectral_games::shapes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidShape, msg); }

// (x/s)^2 with 0/0 = 0 and a tolerance band for the degenerate axis.
double normalized_square(double x, double semi_axis, double slack) {
  if (semi_axis > 0.0) return (x / semi_axis) * (x / semi_axis);
  return std::abs(x) <= slack ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

Segment::Segment(double mu, double L) : mu_(mu), L_(L) {
  if (!finite_all({mu, L}) || !(mu > 0.0) || !(mu <= L)) invalid("segment needs 0 < mu <= L");
}

Disc::Disc(double c, double r) : c_(c), r_(r) {
  if (!finite_all({c, r}) || !(r > 0.0) || !(r < c)) invalid("disc needs 0 < r < c");
}

Ellipse::Ellipse(double a, double b, double c) : a_(a), b_(b), c_(c) {
  if (!finite_all({a, b, c}) || a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0) || !(c > a)) {
    invalid("ellipse needs a, b >= 0, (a, b) != 0 and c > a");
  }
}

ImagCross::ImagCross(double a, double b) : a_(a), b_(b) {
  if (!finite_all({a, b}) || !(a > 0.0) || !(a < b)) invalid("imaginary cross needs 0 < a < b");
}

std::string describe(const SpectralShape& shape) {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const Segment& s) { out << "segment{mu=" << s.mu() << ",L=" << s.L() << "}"; },
                 [&](const Disc& d) { out << "disc{c=" << d.c() << ",r=" << d.r() << "}"; },
                 [&](const Ellipse& e) {
                   out << "ellipse{a=" << e.a() << ",b=" << e.b() << ",c=" << e.c() << "}";
                 },
                 [&](const ImagCross& x) { out << "imagcross{a=" << x.a() << ",b=" << x.b() << "}"; },
             },
             shape);
  return out.str();
}

ConvergenceRegion::ConvergenceRegion(double alpha, double beta, double rho)
    : alpha_(alpha), beta_(beta), rho_(rho) {
  if (!finite_all({alpha, beta, rho}) || !(rho > 0.0) || !(rho < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "convergence region needs rho in (0, 1)");
  }
  // The segment case sits exactly on |beta| = rho^2; allow rounding there.
  if (std::abs(beta) > rho * rho * (1.0 + 4.0 * kDoubleRootMargin)) {
    throw Error(ErrorCode::InvalidArgument, "convergence region is empty when |beta| > rho^2");
  }
}

double max_modulus(const SpectralShape& shape) {
  return std::visit(overloaded{
                        [](const Segment& s) { return s.L(); },
                        [](const Disc& d) { return d.c() + d.r(); },
                        [](const ImagCross& x) { return x.b(); },
                        [](const Ellipse& e) {
                          // |c + a cos t + i b sin t|^2 is a quadratic in x = cos t.
                          const double a = e.a(), b = e.b(), c = e.c();
                          auto g = [&](double x) {
                            return c * c + b * b + 2.0 * a * c * x + (a * a - b * b) * x * x;
                          };
                          double best = std::max(g(1.0), g(-1.0));
                          if (b > a) {
                            const double vertex = a * c / (b * b - a * a);
                            if (vertex <= 1.0) best = std::max(best, g(vertex));
                          }
                          return std::sqrt(best);
                        },
                    },
                    shape);
}

bool membership(const SpectralShape& shape, Complex lambda) {
  const double slack = numerics::kTol.boundary * (1.0 + max_modulus(shape));
  const double re = lambda.real();
  const double im = lambda.imag();
  return std::visit(
      overloaded{
          [&](const Segment& s) {
            return std::abs(im) <= slack && re >= s.mu() - slack && re <= s.L() + slack;
          },
          [&](const Disc& d) { return std::abs(lambda - Complex{d.c(), 0.0}) <= d.r() + slack; },
          [&](const Ellipse& e) {
            const double q = normalized_square(re - e.c(), e.a(), slack) +
                             normalized_square(im, e.b(), slack);
            return q <= 1.0 + numerics::kTol.boundary;
          },
          [&](const ImagCross& x) {
            const double m = std::abs(im);
            return std::abs(re) <= slack && m >= x.a() - slack && m <= x.b() + slack;
          },
      },
      shape);
}

double ellipse_rate(double a, double b, double c) {
  if (a * a > b * b + c * c) {
    throw Error(ErrorCode::UnrepresentableEllipse, "requires a^2 <= b^2 + c^2");
  }
  // (c - s)/(a - b) rewritten as (a + b)/(c + s): no cancellation, and the
  // a == b case (a/c) needs no branch.
  const double s = std::sqrt(c * c + b * b - a * a);
  const double rho = (a + b) / (c + s);
  if (!(rho < 1.0)) throw Error(ErrorCode::NotConvergent, "ellipse factor is not below 1");
  return rho;
}

MomentumParams ellipse_momentum(double a, double b, double c) {
  ellipse_rate(a, b, c);
  const double s = std::sqrt(c * c + b * b - a * a);
  // beta = 2c(c - s)/(a^2 - b^2) - 1 and alpha = (1 + beta)/c, simplified
  // with a^2 - b^2 = c^2 - s^2.
  const double alpha = 2.0 / (c + s);
  if (b > 0.0) return {alpha, (c - s) / (c + s)};
  // On a segment both end points are double roots of the characteristic
  // polynomial, so an O(eps) perturbation of alpha or of an eigenvalue splits
  // them into a real pair and lifts the rate by O(sqrt(eps)). Take sqrt(beta)
  // slightly above the value needed at both end points so they keep complex
  // roots of modulus sqrt(beta).
  const double root = std::max(1.0 - std::sqrt(alpha * (c - a)), std::sqrt(alpha * (c + a)) - 1.0) *
                      (1.0 + kDoubleRootMargin);
  return {alpha, root * root};
}

double acf(const SpectralShape& shape) {
  return std::visit(overloaded{
                        [](const Segment& s) {
                          return ellipse_rate(0.5 * (s.L() - s.mu()), 0.0, 0.5 * (s.L() + s.mu()));
                        },
                        [](const Disc& d) { return ellipse_rate(d.r(), d.r(), d.c()); },
                        [](const Ellipse& e) { return ellipse_rate(e.a(), e.b(), e.c()); },
                        [](const ImagCross& x) {
                          return std::sqrt((x.b() - x.a()) / (x.b() + x.a()));
                        },
                    },
                    shape);
}

MomentumParams optimal_momentum(const SpectralShape& shape) {
  return std::visit(
      overloaded{
          [](const Segment& s) {
            return ellipse_momentum(0.5 * (s.L() - s.mu()), 0.0, 0.5 * (s.L() + s.mu()));
          },
          [](const Disc& d) { return ellipse_momentum(d.r(), d.r(), d.c()); },
          [](const Ellipse& e) { return ellipse_momentum(e.a(), e.b(), e.c()); },
          [](const ImagCross&) -> MomentumParams {
            throw Error(ErrorCode::UnsupportedShape,
                        "imaginary cross has no momentum parameters; transform the field first");
          },
      },
      shape);
}

double momentum_root_radius(Complex lambda, MomentumParams p) {
  if (lambda.imag() == 0.0) {
    // Real coefficients: a non-positive discriminant means a conjugate pair
    // (or double root) of modulus sqrt(beta) exactly.
    const double b = 1.0 - p.alpha * lambda.real() + p.beta;
    if (p.beta >= 0.0) {
      const double s = std::sqrt(p.beta);
      const double disc = (b - 2.0 * s) * (b + 2.0 * s);
      if (disc <= 0.0) return s;
      return 0.5 * (std::abs(b) + std::sqrt(disc));
    }
    return 0.5 * (std::abs(b) + std::sqrt(b * b - 4.0 * p.beta));
  }
  const auto [z1, z2] =
      numerics::quadratic_roots(-(1.0 - p.alpha * lambda + p.beta), Complex{p.beta, 0.0});
  return std::max(std::abs(z1), std::abs(z2));
}

bool region_membership(Complex lambda, const ConvergenceRegion& region) {
  return momentum_root_radius(lambda, region.params()) <= region.rho() + numerics::kTol.boundary;
}

ConvergenceRegion ellipse_as_region(const Ellipse& e) {
  const MomentumParams p = optimal_momentum(e);
  return ConvergenceRegion(p.alpha, p.beta, acf(e));
}

Ellipse perturbed_ellipse(double mu, double L, double eps) {
  if (!finite_all({mu, L, eps}) || !(mu > 0.0) || !(mu < L) || eps < 0.0 ||
      !(eps < 0.5 * (L - mu))) {
    throw Error(ErrorCode::InvalidPerturbation, "needs 0 < mu < L and 0 <= eps < (L - mu)/2");
  }
  return Ellipse(0.5 * (L - mu), eps, 0.5 * (L + mu));
}

double perturbed_acf_asymptotic(double mu, double L, double theta) {
  if (!(mu > 0.0) || !(mu < L) || !(theta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "needs 0 < mu < L and theta > 0");
  }
  const double t = mu / L;
  if (std::abs(theta - 0.5) <= 1e-12) return 1.0 - 2.0 * (std::sqrt(2.0) - 1.0) * std::sqrt(t);
  if (theta > 0.5) return 1.0 - 2.0 * std::sqrt(t);
  return 1.0 - std::pow(t, 1.0 - theta);
}

EgCover eg_cover_ellipse(double a, double b) {
  if (!finite_all({a, b}) || !(a > 0.0) || !(a < b)) {
    throw Error(ErrorCode::DegenerateInput, "extragradient cover needs 0 < a < b");
  }
  const double m = kCoverShrink;
  const double eta = b / (a * std::sqrt(2.0 * b * b - a * a / m));
  const double mu_bar = eta * a * a / m;
  const double L_bar = 2.0 * eta * b * b - mu_bar;
  return {eta, mu_bar, L_bar, Ellipse(0.5 * (L_bar - mu_bar), b, 0.5 * (mu_bar + L_bar))};
}

bool consensus_tau_admissible(double gamma, double mu, double L, double tau) {
  if (!(gamma > 0.0) || !(gamma <= L) || mu < 0.0 || tau < 0.0) return false;
  const double low = mu + tau * gamma * gamma;
  const double high = L + tau * L * L;
  if (!(tau * gamma * gamma >= mu) || !(low > 0.0)) return false;
  return gamma / low <= std::sqrt(1.5) * std::sqrt(low / high);
}

std::array<Complex, 4> consensus_trapezoid(double gamma, double mu, double L, double tau) {
  const double low = mu + tau * gamma * gamma;
  const double high = L + tau * L * L;
  const double q = gamma / low;
  return {Complex{low, q * low}, Complex{low, -q * low}, Complex{high, q * high},
          Complex{high, -q * high}};
}

ConsensusCover consensus_cover_ellipse_unchecked(double gamma, double mu, double L, double tau) {
  if (!finite_all({gamma, mu, L, tau}) || !(gamma > 0.0) || !(gamma <= L) || mu < 0.0 ||
      tau < 0.0 || !(tau * gamma * gamma >= mu) || !(mu + tau * gamma * gamma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "consensus cover needs 0 < gamma <= L, mu >= 0, tau*gamma^2 >= mu");
  }
  const double low = mu + tau * gamma * gamma;
  const double high = L + tau * L * L;
  const double q = gamma / low;
  const double mu_bar = low / kCoverShrink;
  const double L_bar = 2.0 * high - mu_bar;
  // sqrt(mu_bar L_bar) alone can leave the top corner q*high outside.
  const double eps = std::max(std::sqrt(mu_bar * L_bar), q * high);
  return {mu_bar, L_bar, q, Ellipse(0.5 * (L_bar - mu_bar), eps, 0.5 * (mu_bar + L_bar))};
}

ConsensusCover consensus_cover_ellipse(double gamma, double mu, double L, double tau) {
  if (!consensus_tau_admissible(gamma, mu, L, tau)) {
    throw Error(ErrorCode::InadmissibleTau,
                "gamma/(mu + tau gamma^2) exceeds sqrt(3/2) sqrt((mu + tau gamma^2)/(L + tau L^2))");
  }
  return consensus_cover_ellipse_unchecked(gamma, mu, L, tau);
}

}  // namespace spectral_games::shapes
