#include "spectral_games/kernels.hpp"

#include "kernel_bodies.hpp"

namespace spectral_games::kernels::serial {

void matvec(MatrixView a, std::span<const double> x, std::span<const double> shift,
            std::span<double> y) {
  detail::check_matvec(a, x, shift, y);
  for (std::size_t i = 0; i < a.rows; ++i) y[i] = detail::row_dot(a, i, x, shift);
}

void arnoldi_eval(HessenbergView h, std::span<const Complex> points, std::span<Complex> out) {
  detail::check_arnoldi(h, points, out);
  for (std::size_t p = 0; p < points.size(); ++p) detail::arnoldi_point(h, points[p], out, p);
}

}  // namespace spectral_games::kernels::serial
