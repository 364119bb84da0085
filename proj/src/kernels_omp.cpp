#include "spectral_games/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernel_bodies.hpp"

namespace spectral_games::kernels::omp {

void matvec(MatrixView a, std::span<const double> x, std::span<const double> shift,
            std::span<double> y) {
  detail::check_matvec(a, x, shift, y);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static) if (a.rows * a.cols > 65536)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    y[static_cast<std::size_t>(i)] = detail::row_dot(a, static_cast<std::size_t>(i), x, shift);
  }
}

void arnoldi_eval(HessenbergView h, std::span<const Complex> points, std::span<Complex> out) {
  detail::check_arnoldi(h, points, out);
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (points.size() * h.degree > 4096)
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    const auto idx = static_cast<std::size_t>(p);
    detail::arnoldi_point(h, points[idx], out, idx);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace spectral_games::kernels::omp
