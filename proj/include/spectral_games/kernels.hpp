#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results: parallelism is only over independent output entries, and each
// entry is reduced in a fixed order, so both produce bitwise-equal output.

#include <complex>
#include <cstddef>
#include <span>

namespace spectral_games::kernels {

using Complex = std::complex<double>;

/// Row-major dense view.
struct MatrixView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const double> data;

  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Upper Hessenberg recurrence of a polynomial Arnoldi basis, (degree+1) x degree,
/// row-major. Column k holds the coefficients that orthogonalize z*q_k.
struct HessenbergView {
  std::size_t degree = 0;
  std::span<const double> data;

  double operator()(std::size_t j, std::size_t k) const { return data[j * degree + k]; }
};

namespace serial {

/// y = A (x - shift); shift may be empty (treated as zero).
void matvec(MatrixView a, std::span<const double> x, std::span<const double> shift,
            std::span<double> y);

/// Evaluates q_0..q_degree at every point; out is points.size() x (degree+1), row-major.
void arnoldi_eval(HessenbergView h, std::span<const Complex> points, std::span<Complex> out);

}  // namespace serial

namespace omp {

void matvec(MatrixView a, std::span<const double> x, std::span<const double> shift,
            std::span<double> y);

void arnoldi_eval(HessenbergView h, std::span<const Complex> points, std::span<Complex> out);

/// Number of threads an OpenMP region would use (1 when built without OpenMP).
int max_threads();

}  // namespace omp

}  // namespace spectral_games::kernels
