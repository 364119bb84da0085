#include "spectral_games/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectral_games/error.hpp"

namespace spectral_games::methods {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using games::DenseMatrix;

constexpr double kNegMomentumBeta = -0.5;

// Largest |lambda| any shape in `bounds` admits; baseline step sizes scale with it.
double modulus_bound(const Bounds& bounds) {
  return std::visit(overloaded{
                        [](const ConsensusBounds& c) { return c.L; },
                        [](const auto& s) { return shapes::max_modulus(shapes::SpectralShape(s)); },
                    },
                    bounds);
}

shapes::SpectralShape as_shape(const Bounds& bounds, Family family) {
  return std::visit(overloaded{
                        [family](const ConsensusBounds&) -> shapes::SpectralShape {
                          throw Error(ErrorCode::UnsupportedShape,
                                      std::string(family_name(family)) +
                                          " takes a spectral shape, not consensus bounds");
                        },
                        [](const auto& s) -> shapes::SpectralShape { return s; },
                    },
                    bounds);
}

const shapes::ImagCross& imag_cross(const Bounds& bounds, Family family) {
  if (const auto* x = std::get_if<shapes::ImagCross>(&bounds)) return *x;
  throw Error(ErrorCode::UnsupportedShape,
              std::string(family_name(family)) + " needs ImagCross bounds (a, b)");
}

ConsensusBounds consensus_bounds(const Bounds& bounds, Family family) {
  if (const auto* c = std::get_if<ConsensusBounds>(&bounds)) return *c;
  if (const auto* x = std::get_if<shapes::ImagCross>(&bounds)) return {x->a(), 0.0, x->b()};
  throw Error(ErrorCode::UnsupportedShape,
              std::string(family_name(family)) + " needs consensus bounds (gamma, mu, L)");
}

shapes::ConsensusCover consensus_cover(const ConsensusBounds& c, TauCheck check, double& tau) {
  if (!(c.gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  tau = c.L / (c.gamma * c.gamma);
  if (check == TauCheck::Skip) return shapes::consensus_cover_ellipse_unchecked(c.gamma, c.mu, c.L, tau);
  return shapes::consensus_cover_ellipse(c.gamma, c.mu, c.L, tau);
}

double distance(const Vector& w, const Vector& star) { return (w - star).norm(); }

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Gradient: return "gradient";
    case Family::Momentum: return "momentum";
    case Family::Extragradient: return "extragradient";
    case Family::EGMomentum: return "eg_momentum";
    case Family::BilinearAccel: return "bilinear_accel";
    case Family::Consensus: return "consensus";
    case Family::ConsensusMomentum: return "consensus_momentum";
    case Family::NegMomentumAlt: return "neg_momentum_alt";
    case Family::OMD: return "omd";
    case Family::HGD: return "hgd";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

int f_evals_per_iter(Family f) {
  switch (f) {
    case Family::Gradient:
    case Family::Momentum:
    case Family::NegMomentumAlt:
    case Family::OMD:
      return 1;
    default:
      return 2;
  }
}

std::vector<std::string> hyper_keys(Family f) {
  switch (f) {
    case Family::Gradient:
    case Family::Extragradient:
    case Family::OMD:
    case Family::HGD:
      return {"eta"};
    case Family::Momentum:
      return {"alpha", "beta"};
    case Family::EGMomentum:
    case Family::BilinearAccel:
      return {"alpha", "beta", "eta"};
    case Family::Consensus:
      return {"alpha", "tau"};
    case Family::ConsensusMomentum:
      return {"alpha", "beta", "tau"};
    case Family::NegMomentumAlt:
      return {"beta", "eta"};
  }
  return {};
}

MethodSpec::MethodSpec(Family f, std::map<std::string, double> h)
    : family(f), hyper(std::move(h)), f_evals(f_evals_per_iter(f)) {
  for (const auto& key : hyper_keys(f)) {
    auto it = hyper.find(key);
    if (it == hyper.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(family_name(f)) + " needs hyperparameter '" + key + "'");
    }
    if (!std::isfinite(it->second)) {
      throw Error(ErrorCode::InvalidArgument, "hyperparameter '" + key + "' is not finite");
    }
  }
}

double MethodSpec::get(const std::string& key) const {
  auto it = hyper.find(key);
  if (it == hyper.end()) throw Error(ErrorCode::InvalidArgument, "missing hyperparameter '" + key + "'");
  return it->second;
}

MethodSpec derive_params(Family family, const Bounds& bounds, TauCheck tau_check) {
  switch (family) {
    case Family::Gradient: {
      const auto shape = as_shape(bounds, family);
      const double eta = std::visit(
          overloaded{
              [](const shapes::Segment& s) { return 2.0 / (s.mu() + s.L()); },
              [](const shapes::Disc& d) { return 1.0 / d.c(); },
              [](const shapes::Ellipse& e) { return 1.0 / e.c(); },
              [](const shapes::ImagCross&) -> double {
                throw Error(ErrorCode::UnsupportedShape,
                            "gradient does not converge on a purely imaginary spectrum");
              },
          },
          shape);
      return MethodSpec(family, {{"eta", eta}});
    }
    case Family::Momentum: {
      const auto p = shapes::optimal_momentum(as_shape(bounds, family));
      return MethodSpec(family, {{"alpha", p.alpha}, {"beta", p.beta}});
    }
    case Family::Extragradient:
      return MethodSpec(family, {{"eta", 1.0 / (2.0 * modulus_bound(bounds))}});
    case Family::OMD:
      return MethodSpec(family, {{"eta", 1.0 / (4.0 * modulus_bound(bounds))}});
    case Family::HGD: {
      const double l = modulus_bound(bounds);
      return MethodSpec(family, {{"eta", 1.0 / (l * l)}});
    }
    case Family::NegMomentumAlt:
      return MethodSpec(family, {{"eta", 1.0 / (2.0 * modulus_bound(bounds))}, {"beta", kNegMomentumBeta}});
    case Family::EGMomentum: {
      const auto& x = imag_cross(bounds, family);
      const auto cover = shapes::eg_cover_ellipse(x.a(), x.b());
      const auto& e = cover.ellipse;
      const auto p = shapes::ellipse_momentum(e.a(), e.b(), e.c());
      return MethodSpec(family, {{"eta", cover.eta}, {"alpha", p.alpha}, {"beta", p.beta}});
    }
    case Family::BilinearAccel: {
      // -J^2 has spectrum in [a^2, b^2]: sqrt(alpha) = 2/(a+b), sqrt(beta) = (b-a)/(b+a).
      const auto& x = imag_cross(bounds, family);
      const auto p = shapes::optimal_momentum(shapes::Segment(x.a() * x.a(), x.b() * x.b()));
      return MethodSpec(family, {{"alpha", p.alpha}, {"beta", p.beta}, {"eta", 1.0 / x.b()}});
    }
    case Family::Consensus: {
      double tau = 0.0;
      const auto cover = consensus_cover(consensus_bounds(bounds, family), tau_check, tau);
      return MethodSpec(family, {{"alpha", 1.0 / cover.ellipse.c()}, {"tau", tau}});
    }
    case Family::ConsensusMomentum: {
      double tau = 0.0;
      const auto cover = consensus_cover(consensus_bounds(bounds, family), tau_check, tau);
      const auto& e = cover.ellipse;
      const auto p = shapes::ellipse_momentum(e.a(), e.b(), e.c());
      return MethodSpec(family, {{"alpha", p.alpha}, {"beta", p.beta}, {"tau", tau}});
    }
  }
  throw Error(ErrorCode::UnsupportedFamily, "unknown method family");
}

IterateTrace run(const MethodSpec& method, const games::FieldPtr& field, const Vector& omega0,
                 std::size_t iters, std::string game_id, std::uint64_t seed) {
  if (!field) throw Error(ErrorCode::InvalidArgument, "null field");
  if (omega0.size() != field->dim()) {
    throw Error(ErrorCode::DimensionMismatch, "starting point has the wrong dimension");
  }
  IterateTrace trace{{}, method, std::move(game_id), seed, false};
  trace.distances.reserve(iters + 1);
  const Vector& star = field->equilibrium();
  const games::VectorField& F = *field;

  // Field seen by the one- and two-step families.
  games::FieldPtr effective = field;
  switch (method.family) {
    case Family::EGMomentum: effective = games::transform_eg(field, method.get("eta")); break;
    case Family::BilinearAccel: effective = games::transform_real(field, method.get("eta")); break;
    case Family::Consensus:
    case Family::ConsensusMomentum: effective = games::transform_consensus(field, method.get("tau")); break;
    default: break;
  }

  Vector w = omega0;
  Vector prev = omega0;
  Vector prev_f;
  if (method.family == Family::OMD) prev_f = F.eval(w);

  auto record = [&](const Vector& x) {
    double d = distance(x, star);
    if (!std::isfinite(d)) d = std::numeric_limits<double>::infinity();
    trace.distances.push_back(d);
    if (d > numerics::kTol.divergence) trace.diverged = true;
    return !trace.diverged;
  };
  if (!record(w)) return trace;

  for (std::size_t t = 0; t < iters; ++t) {
    Vector next;
    switch (method.family) {
      case Family::Gradient:
        next = w - method.get("eta") * F.eval(w);
        break;
      case Family::Extragradient: {
        const double eta = method.get("eta");
        next = w - eta * F.eval(w - eta * F.eval(w));
        break;
      }
      case Family::HGD:
        next = w - method.get("eta") * F.jacobian_transpose_apply(w, F.eval(w));
        break;
      case Family::Consensus:
        next = w - method.get("alpha") * effective->eval(w);
        break;
      case Family::Momentum:
      case Family::EGMomentum:
      case Family::BilinearAccel:
      case Family::ConsensusMomentum:
        next = w - method.get("alpha") * effective->eval(w) + method.get("beta") * (w - prev);
        break;
      case Family::OMD: {
        const double eta = method.get("eta");
        Vector f = F.eval(w);
        next = w - 2.0 * eta * f + eta * prev_f;
        prev_f = std::move(f);
        break;
      }
      case Family::NegMomentumAlt: {
        const double eta = method.get("eta");
        const double beta = method.get("beta");
        const Eigen::Index s = F.split();
        const Eigen::Index rest = F.dim() - s;
        next = w;
        next.head(s) += -eta * F.eval(w).head(s) + beta * (w.head(s) - prev.head(s));
        next.tail(rest) += -eta * F.eval(next).tail(rest) + beta * (w.tail(rest) - prev.tail(rest));
        break;
      }
    }
    prev = std::move(w);
    w = std::move(next);
    if (!record(w)) break;
  }
  return trace;
}

DenseMatrix iteration_matrix(const MethodSpec& method, const games::RealMatrix& Jm,
                             Eigen::Index split) {
  if (!Jm.is_square()) throw Error(ErrorCode::NonSquare, "Jacobian must be square");
  const DenseMatrix& J = Jm.dense();
  const Eigen::Index d = J.rows();
  const DenseMatrix I = DenseMatrix::Identity(d, d);
  auto momentum = [&](const DenseMatrix& jeff) {
    return games::augmented_jacobian(games::RealMatrix(jeff),
                                     {method.get("alpha"), method.get("beta")})
        .dense();
  };
  switch (method.family) {
    case Family::Gradient:
      return I - method.get("eta") * J;
    case Family::Momentum:
      return momentum(J);
    case Family::Extragradient: {
      const double eta = method.get("eta");
      return I - eta * (J - eta * J * J);
    }
    case Family::EGMomentum: {
      const double eta = method.get("eta");
      return momentum(J - eta * J * J);
    }
    case Family::BilinearAccel:
      return momentum(-(J * J));
    case Family::Consensus:
      return I - method.get("alpha") * (J + method.get("tau") * J.transpose() * J);
    case Family::ConsensusMomentum:
      return momentum(J + method.get("tau") * J.transpose() * J);
    case Family::HGD:
      return I - method.get("eta") * J.transpose() * J;
    case Family::OMD: {
      // State (e_t, e_{t-1}): e_{t+1} = (I - 2 eta J) e_t + eta J e_{t-1}.
      const double eta = method.get("eta");
      DenseMatrix m = DenseMatrix::Zero(2 * d, 2 * d);
      m.topLeftCorner(d, d) = I - 2.0 * eta * J;
      m.topRightCorner(d, d) = eta * J;
      m.bottomLeftCorner(d, d) = I;
      return m;
    }
    case Family::NegMomentumAlt: {
      // State (x, y, x_prev, y_prev); x is updated first, y sees the new x.
      if (split < 0 || split > d) throw Error(ErrorCode::InvalidArgument, "split out of range");
      const double eta = method.get("eta");
      const double beta = method.get("beta");
      const Eigen::Index s = split;
      const Eigen::Index r = d - s;
      DenseMatrix first = DenseMatrix::Identity(2 * d, 2 * d);
      first.block(0, 0, s, d) = -eta * J.topRows(s);
      first.block(0, 0, s, s) += (1.0 + beta) * DenseMatrix::Identity(s, s);
      first.block(0, d, s, s) = -beta * DenseMatrix::Identity(s, s);
      first.block(d, 0, s, 2 * d).setZero();
      first.block(d, 0, s, s) = DenseMatrix::Identity(s, s);
      DenseMatrix second = DenseMatrix::Identity(2 * d, 2 * d);
      second.block(s, 0, r, d) = -eta * J.bottomRows(r);
      second.block(s, s, r, r) += (1.0 + beta) * DenseMatrix::Identity(r, r);
      second.block(s, d + s, r, r) = -beta * DenseMatrix::Identity(r, r);
      second.block(d + s, 0, r, 2 * d).setZero();
      second.block(d + s, s, r, r) = DenseMatrix::Identity(r, r);
      return second * first;
    }
  }
  throw Error(ErrorCode::UnsupportedFamily, "unknown method family");
}

double predicted_rate(const MethodSpec& method, const games::LinearGame& game) {
  const DenseMatrix& J = game.A.dense();
  // Linear-in-J families reduce to scalar recurrences per eigenvalue of the
  // effective Jacobian, which avoids the defective double roots of the
  // augmented matrix at tuned parameters.
  auto effective = [&]() -> DenseMatrix {
    switch (method.family) {
      case Family::EGMomentum:
      case Family::Extragradient: {
        const double eta = method.get("eta");
        return J - eta * J * J;
      }
      case Family::BilinearAccel: return -(J * J);
      case Family::Consensus:
      case Family::ConsensusMomentum: return J + method.get("tau") * J.transpose() * J;
      case Family::HGD: return J.transpose() * J;
      default: return J;
    }
  };
  double radius = 0.0;
  switch (method.family) {
    case Family::Gradient:
    case Family::Extragradient:
    case Family::Consensus:
    case Family::HGD: {
      const double step = method.family == Family::Consensus ? method.get("alpha") : method.get("eta");
      for (const auto& l : numerics::eigenvalues(effective())) radius = std::max(radius, std::abs(1.0 - step * l));
      return radius;
    }
    case Family::Momentum:
    case Family::EGMomentum:
    case Family::BilinearAccel:
    case Family::ConsensusMomentum: {
      const shapes::MomentumParams p{method.get("alpha"), method.get("beta")};
      for (const auto& l : numerics::eigenvalues(effective())) {
        radius = std::max(radius, shapes::momentum_root_radius(l, p));
      }
      return radius;
    }
    case Family::OMD: {
      // z^2 - (1 - 2 eta l) z - eta l = 0 per eigenvalue.
      const double eta = method.get("eta");
      for (const auto& l : numerics::eigenvalues(J)) {
        const auto [z1, z2] = numerics::quadratic_roots(-(1.0 - 2.0 * eta * l), -eta * l);
        radius = std::max({radius, std::abs(z1), std::abs(z2)});
      }
      return radius;
    }
    case Family::NegMomentumAlt:
      return numerics::spectral_radius(iteration_matrix(method, game.A, game.split));
  }
  throw Error(ErrorCode::UnsupportedFamily, "unknown method family");
}

double fit_rate(const std::vector<double>& distances, Window window) {
  if (window.end <= window.start || window.end >= distances.size()) {
    throw Error(ErrorCode::InvalidArgument, "fit window must satisfy start < end < trace length");
  }
  const double n = static_cast<double>(window.end - window.start + 1);
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t t = window.start; t <= window.end; ++t) {
    if (!(distances[t] > 0.0)) {
      throw Error(ErrorCode::NonPositiveDistance,
                  "distance " + std::to_string(distances[t]) + " at iteration " + std::to_string(t));
    }
    sx += static_cast<double>(t);
    sy += std::log(distances[t]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = window.start; t <= window.end; ++t) {
    const double dx = static_cast<double>(t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(distances[t]) - my);
  }
  return std::exp(sxy / sxx);
}

double fit_rate(const IterateTrace& trace, Window window) { return fit_rate(trace.distances, window); }

StepSizeAsymptotics step_size_asymptotics(double a, double b) {
  if (!(a > 0.0) || !(a < b)) throw Error(ErrorCode::InvalidArgument, "needs 0 < a < b");
  const MethodSpec spec = derive_params(Family::EGMomentum, shapes::ImagCross(a, b));
  const double eta = spec.get("eta");
  const double alpha = spec.get("alpha");
  const double beta = spec.get("beta");
  return {eta * a * std::sqrt(2.0), alpha * b * b / (2.0 * std::sqrt(2.0) * a),
          (1.0 - beta) * b / (2.0 * std::sqrt(3.0) * a)};
}

}  // namespace spectral_games::methods
