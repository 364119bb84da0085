#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spectral_games/numerics.hpp"
#include "spectral_games/shapes.hpp"

namespace spectral_games::oracle {

using numerics::Complex;

/// Real polynomial p(z) = 1 + sum_k c_k z^k, so p(0) = 1 always.
///
/// Polynomials produced by the Lawson solver also carry their Arnoldi
/// representation (Hessenberg recurrence plus expansion weights) and evaluate
/// through it: the monomial coefficients are reported for inspection, but
/// Horner evaluation of high-degree minimax polynomials loses every digit.
class ConstrainedPolynomial {
 public:
  explicit ConstrainedPolynomial(std::vector<double> coeffs);
  ConstrainedPolynomial(std::vector<double> coeffs, std::size_t basis_degree,
                        std::vector<double> hessenberg, std::vector<double> expansion);

  std::size_t degree() const { return coeffs_.size(); }
  /// c_1 .. c_t.
  const std::vector<double>& coeffs() const { return coeffs_; }
  Complex operator()(Complex z) const;
  std::vector<Complex> evaluate(std::span<const Complex> points) const;

 private:
  std::vector<double> coeffs_;
  std::size_t basis_degree_ = 0;
  std::vector<double> hessenberg_;
  std::vector<double> expansion_;
};

struct OracleResult {
  ConstrainedPolynomial poly;
  double max_abs;             // max |p| over the grid
  double acf_estimate;        // max_abs^(1/t)
  double lower_bound;         // sqrt of the best weighted least-squares error; <= minimax value
  std::size_t grid_size;
  std::size_t iterations_used;
  bool converged;
  std::vector<double> weighted_errors;  // per-iteration sum_i w_i |p(z_i)|^2
};

inline constexpr std::size_t kDefaultMaxIters = 500;
inline constexpr double kDefaultWeightFloor = 1e-14;

/// max(64, 50 t).
std::size_t default_grid_size(std::size_t degree);

/// n points on the boundary of the shape, conjugate-closed and deterministic.
/// Segments use Chebyshev-Lobatto nodes (end points included); ImagCross
/// rounds n up to an even count, half on each branch.
std::vector<Complex> sample_boundary(const shapes::SpectralShape& shape, std::size_t n);

/// Lawson iteration for min over real p in P_t of max_i |p(z_i)|.
OracleResult lawson_minimax(std::span<const Complex> points, std::size_t degree,
                            std::size_t max_iters = kDefaultMaxIters,
                            double weight_floor = kDefaultWeightFloor);

/// min over P_t of max over [mu, L] of |p|: 1/T_t((L + mu)/(L - mu)).
double chebyshev_reference(double mu, double L, std::size_t degree);

/// lawson_minimax(sample_boundary(shape, n), t).max_abs^(1/t); n = 0 picks the default grid.
double acf_estimate(const shapes::SpectralShape& shape, std::size_t degree, std::size_t n = 0);

}  // namespace spectral_games::oracle
