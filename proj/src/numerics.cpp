#include "spectral_games/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spectral_games/error.hpp"

namespace spectral_games::numerics {

namespace {

void require_finite(const DenseMatrix& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite");
  }
}

void require_square(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquare, "matrix is " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
}

}  // namespace

RealMatrix::RealMatrix(DenseMatrix m) : m_(std::move(m)) { require_finite(m_); }

RealMatrix::RealMatrix(Eigen::Index rows, Eigen::Index cols, std::vector<double> row_major) {
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != row_major.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rows*cols must equal the entry count");
  }
  m_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      row_major.data(), rows, cols);
  require_finite(m_);
}

RealMatrix RealMatrix::identity(Eigen::Index n) { return RealMatrix(DenseMatrix::Identity(n, n)); }

RealMatrix RealMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
  return RealMatrix(DenseMatrix::Zero(rows, cols));
}

bool canonical_less(const Complex& lhs, const Complex& rhs) {
  if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
  return lhs.imag() > rhs.imag();
}

Spectrum::Spectrum(std::vector<Complex> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end(), canonical_less);
}

double Spectrum::max_modulus() const {
  double r = 0.0;
  for (const auto& v : values_) r = std::max(r, std::abs(v));
  return r;
}

bool Spectrum::is_conjugate_closed(double tol) const {
  std::vector<bool> used(values_.size(), false);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (used[i]) continue;
    const Complex target = std::conj(values_[i]);
    const double slack = tol * (1.0 + std::abs(values_[i]));
    if (std::abs(values_[i].imag()) <= slack) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(values_[j] - target) <= slack) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Spectrum eigenvalues(const DenseMatrix& m) {
  require_square(m);
  require_finite(m);
  if (m.rows() == 0) return Spectrum{};
  if (m == m.transpose()) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> sym(m, Eigen::EigenvaluesOnly);
    if (sym.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "symmetric QR exceeded its iteration cap");
    }
    const auto& ev = sym.eigenvalues();
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) values.emplace_back(ev(i), 0.0);
    return Spectrum(std::move(values));
  }
  Eigen::EigenSolver<DenseMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hessenberg QR exceeded its iteration cap");
  }
  const auto& ev = solver.eigenvalues();
  std::vector<Complex> values(ev.data(), ev.data() + ev.size());
  return Spectrum(std::move(values));
}

Spectrum eigenvalues(const RealMatrix& m) { return eigenvalues(m.dense()); }

std::vector<double> singular_values(const DenseMatrix& m) {
  require_finite(m);
  if (m.size() == 0) return {};
  Eigen::BDCSVD<DenseMatrix> svd(m);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "SVD did not converge");
  }
  const auto& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> singular_values(const RealMatrix& m) { return singular_values(m.dense()); }

std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c) {
  // Pick the sign that avoids cancellation, then recover the other root from
  // the product c.
  const Complex disc = std::sqrt(b * b - 4.0 * c);
  const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  if (q == Complex{0.0, 0.0}) return {Complex{0.0, 0.0}, Complex{0.0, 0.0}};
  Complex z1 = q;
  Complex z2 = c / q;
  if (std::abs(z2) > std::abs(z1)) std::swap(z1, z2);
  return {z1, z2};
}

double spectral_radius(const DenseMatrix& m) { return eigenvalues(m).max_modulus(); }

double spectral_radius(const RealMatrix& m) { return spectral_radius(m.dense()); }

DenseMatrix complex_block(Complex z) {
  DenseMatrix block(2, 2);
  block << z.real(), -z.imag(), z.imag(), z.real();
  return block;
}

}  // namespace spectral_games::numerics
