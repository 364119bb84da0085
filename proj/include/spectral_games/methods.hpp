#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spectral_games/games.hpp"
#include "spectral_games/shapes.hpp"

namespace spectral_games::methods {

using numerics::Vector;

enum class Family {
  Gradient,
  Momentum,
  Extragradient,
  EGMomentum,
  BilinearAccel,
  Consensus,
  ConsensusMomentum,
  NegMomentumAlt,
  OMD,
  HGD,
};

inline constexpr Family kAllFamilies[] = {
    Family::Gradient,      Family::Momentum,  Family::Extragradient,     Family::EGMomentum,
    Family::BilinearAccel, Family::Consensus, Family::ConsensusMomentum, Family::NegMomentumAlt,
    Family::OMD,           Family::HGD,
};

/// snake_case identifier, e.g. "eg_momentum".
std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

/// Field evaluations per iteration; a Jacobian-vector product counts as one.
int f_evals_per_iter(Family f);

/// Hyperparameter names a family reads: subset of eta, alpha, beta, tau.
std::vector<std::string> hyper_keys(Family f);

struct MethodSpec {
  Family family = Family::Gradient;
  std::map<std::string, double> hyper;
  int f_evals = 1;

  MethodSpec() = default;
  MethodSpec(Family f, std::map<std::string, double> h);

  /// Throws InvalidArgument when the key is missing.
  double get(const std::string& key) const;
};

struct ConsensusBounds {
  double gamma;  // smallest singular value of the Jacobian
  double mu;     // lower bound on the Hermitian part
  double L;      // Lipschitz constant
};

using Bounds = std::variant<shapes::Segment, shapes::Disc, shapes::Ellipse, shapes::ImagCross,
                            ConsensusBounds>;

enum class TauCheck {
  Enforce,  // throw InadmissibleTau when consensus_tau_admissible fails
  Skip,     // build the cover anyway; it still contains the spectrum
};

/// Hyperparameters for `family` from spectral bounds. ImagCross{a, b} is
/// read as ConsensusBounds{a, 0, b} by the consensus families.
MethodSpec derive_params(Family family, const Bounds& bounds, TauCheck tau_check = TauCheck::Enforce);

struct IterateTrace {
  std::vector<double> distances;  // ||w_t - w*||, t = 0 .. iters (shorter if diverged)
  MethodSpec method;
  std::string game_id;
  std::uint64_t seed = 0;
  bool diverged = false;
};

/// Runs `iters` iterations from omega0. Two-step methods start with
/// w_1 = w_0. Stops early, flagging divergence, once a distance exceeds
/// 1e12 or stops being finite.
IterateTrace run(const MethodSpec& method, const games::FieldPtr& field, const Vector& omega0,
                 std::size_t iters, std::string game_id = {}, std::uint64_t seed = 0);

/// Exact one-iteration matrix of the method on w - w*, for an affine field
/// with Jacobian J. `split` is the size of the first player's block.
games::DenseMatrix iteration_matrix(const MethodSpec& method, const games::RealMatrix& J,
                                    Eigen::Index split);

/// Spectral radius of iteration_matrix.
double predicted_rate(const MethodSpec& method, const games::LinearGame& game);

struct Window {
  std::size_t start;
  std::size_t end;  // inclusive
};

/// exp of the least-squares slope of log distance against t over the window.
double fit_rate(const std::vector<double>& distances, Window window);
double fit_rate(const IterateTrace& trace, Window window);

struct StepSizeAsymptotics {
  double eta_norm;    // eta a sqrt(2)
  double alpha_norm;  // alpha b^2 / (2 sqrt(2) a)
  double beta_norm;   // (1 - beta) b / (2 sqrt(3) a)
};

/// Normalized EGMomentum step sizes for ImagCross{a, b}; each tends to 1 as a/b -> 0.
StepSizeAsymptotics step_size_asymptotics(double a, double b);

}  // namespace spectral_games::methods
