#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spectral_games/numerics.hpp"
#include "spectral_games/rng.hpp"
#include "spectral_games/shapes.hpp"

namespace spectral_games::games {

using numerics::Complex;
using numerics::DenseMatrix;
using numerics::RealMatrix;
using numerics::Spectrum;
using numerics::Vector;

/// A smooth game seen through its vector field F. Implementations are
/// immutable; every method is safe to call concurrently.
class VectorField {
 public:
  virtual ~VectorField() = default;

  virtual Eigen::Index dim() const = 0;
  /// Size of the first player's block; alternating methods update
  /// [0, split) then [split, dim).
  virtual Eigen::Index split() const = 0;
  virtual const Vector& equilibrium() const = 0;

  virtual Vector eval(const Vector& w) const = 0;
  /// J(w) v.
  virtual Vector jacobian_apply(const Vector& w, const Vector& v) const = 0;
  /// J(w)^T v.
  virtual Vector jacobian_transpose_apply(const Vector& w, const Vector& v) const = 0;
  virtual RealMatrix jacobian_at_star() const = 0;
};

using FieldPtr = std::shared_ptr<const VectorField>;

/// Affine game F(w) = A (w - w*).
struct LinearGame {
  RealMatrix A;
  Vector omega_star;
  Eigen::Index split = 0;

  LinearGame(RealMatrix a, Vector star);
  LinearGame(RealMatrix a, Vector star, Eigen::Index split_at);

  Eigen::Index dim() const { return A.rows(); }
};

/// min_x max_y (x - x*)^T A (y - y*), with a seeded starting point.
struct BilinearGame {
  Eigen::Index m = 0;
  RealMatrix payoff;
  Vector x_star;
  Vector y_star;
  Vector omega0;

  Vector omega_star() const;
  /// Dense LinearGame with Jacobian [[0, A], [-A^T, 0]].
  LinearGame to_linear() const;
};

FieldPtr make_field(const LinearGame& game);
/// Exploits the block structure: two m x m products per evaluation.
FieldPtr make_field(const BilinearGame& game);

/// w -> (F(w - eta F(w)) - F(w)) / eta, Jacobian -J^2 at w* for linear F.
FieldPtr transform_real(FieldPtr base, double eta);
/// w -> F(w - eta F(w)), Jacobian J - eta J^2 at w* for linear F.
FieldPtr transform_eg(FieldPtr base, double eta);
/// w -> F(w) + tau J(w)^T F(w), Jacobian J + tau J^T J at w*.
FieldPtr transform_consensus(FieldPtr base, double tau);

/// Payoff from seeded standard-normal entries with singular values remapped
/// affinely onto [sigma_max / cond, sigma_max]; x*, y* and omega0 are
/// standard normal from their own streams.
BilinearGame make_bilinear(Eigen::Index m, double cond, std::uint64_t seed);

/// Payoff U diag(sigma) V^T with seeded Haar-random orthogonal factors.
BilinearGame make_bilinear_with_singular_values(const std::vector<double>& sigma,
                                                std::uint64_t seed);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
DenseMatrix random_orthogonal(Eigen::Index n, Rng& rng);

/// Block-diagonal matrix with a complex_block per conjugate pair and a 1x1
/// block per real eigenvalue. Throws UnpairedComplexEigenvalue.
RealMatrix matrix_with_spectrum(const Spectrum& eigs);

/// [[(1 + beta) I - alpha J, -beta I], [I, 0]].
RealMatrix augmented_jacobian(const RealMatrix& J, shapes::MomentumParams p);

Spectrum game_spectrum(const VectorField& field);

}  // namespace spectral_games::games
