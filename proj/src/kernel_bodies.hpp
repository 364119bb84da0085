#pragma once

// Per-entry bodies shared by the serial and OpenMP kernels.

#include "spectral_games/error.hpp"
#include "spectral_games/kernels.hpp"

namespace spectral_games::kernels::detail {

inline void check_matvec(MatrixView a, std::span<const double> x, std::span<const double> shift,
                         std::span<double> y) {
  if (a.data.size() != a.rows * a.cols || x.size() != a.cols || y.size() != a.rows ||
      (!shift.empty() && shift.size() != a.cols)) {
    throw Error(ErrorCode::DimensionMismatch, "matvec operand sizes disagree");
  }
}

inline double row_dot(MatrixView a, std::size_t i, std::span<const double> x,
                      std::span<const double> shift) {
  const double* row = a.data.data() + i * a.cols;
  double acc = 0.0;
  if (shift.empty()) {
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
  } else {
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * (x[j] - shift[j]);
  }
  return acc;
}

inline void check_arnoldi(HessenbergView h, std::span<const Complex> points,
                          std::span<Complex> out) {
  if (h.data.size() != (h.degree + 1) * h.degree || out.size() != points.size() * (h.degree + 1)) {
    throw Error(ErrorCode::DimensionMismatch, "arnoldi_eval operand sizes disagree");
  }
}

inline void arnoldi_point(HessenbergView h, Complex z, std::span<Complex> out, std::size_t p) {
  const std::size_t width = h.degree + 1;
  Complex* q = out.data() + p * width;
  q[0] = 1.0;
  for (std::size_t k = 0; k < h.degree; ++k) {
    Complex v = z * q[k];
    for (std::size_t j = 0; j <= k; ++j) v -= h(j, k) * q[j];
    q[k + 1] = v / h(k + 1, k);
  }
}

}  // namespace spectral_games::kernels::detail
