#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spectral_games::numerics {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Tolerance defaults shared by every module and by the acceptance suite.
struct Tolerances {
  double absolute = 1e-10;
  double relative = 1e-10;
  double boundary = 1e-12;    // shape membership slack
  double pairing = 1e-9;      // conjugate-pair matching
  double equilibrium = 1e-12; // |F(omega*)| for constructed fields
  double divergence = 1e12;   // iterate distance guard
};

inline constexpr Tolerances kTol{};

/// Dense real matrix, immutable after construction. Entries must be finite.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(DenseMatrix m);
  RealMatrix(Eigen::Index rows, Eigen::Index cols, std::vector<double> row_major);

  static RealMatrix identity(Eigen::Index n);
  static RealMatrix zero(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  bool is_square() const { return m_.rows() == m_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const DenseMatrix& dense() const { return m_; }

 private:
  DenseMatrix m_;
};

/// Multiset of eigenvalues kept in canonical order: descending real part,
/// then descending imaginary part.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<Complex> values);

  const std::vector<Complex>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double max_modulus() const;
  bool is_conjugate_closed(double tol = kTol.absolute) const;

 private:
  std::vector<Complex> values_;
};

bool canonical_less(const Complex& lhs, const Complex& rhs);

Spectrum eigenvalues(const RealMatrix& m);
Spectrum eigenvalues(const DenseMatrix& m);

/// Non-negative, descending.
std::vector<double> singular_values(const RealMatrix& m);
std::vector<double> singular_values(const DenseMatrix& m);

/// Both roots of z^2 + b z + c = 0, larger modulus first.
std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c);

double spectral_radius(const RealMatrix& m);
double spectral_radius(const DenseMatrix& m);

/// The 2x2 real block [[Re z, -Im z], [Im z, Re z]] whose spectrum is {z, conj z}.
DenseMatrix complex_block(Complex z);

}  // namespace spectral_games::numerics
