#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spectral_games/error.hpp"
#include "spectral_games/oracle.hpp"

using namespace spectral_games;
using namespace spectral_games::oracle;
using Complex = std::complex<double>;

namespace {

bool conjugate_closed(const std::vector<Complex>& pts) {
  for (const auto& z : pts) {
    const bool found = std::any_of(pts.begin(), pts.end(), [&](const Complex& w) {
      return std::abs(w - std::conj(z)) <= 1e-12 * (1.0 + std::abs(z));
    });
    if (!found) return false;
  }
  return true;
}

double grid_max(const ConstrainedPolynomial& p, const std::vector<Complex>& pts) {
  double m = 0.0;
  for (const auto& v : p.evaluate(pts)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("boundary sampling") {
  const auto disc = sample_boundary(shapes::Disc(2, 1), 4);
  REQUIRE(disc.size() == 4);
  const std::vector<Complex> want{{3, 0}, {2, 1}, {1, 0}, {2, -1}};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(disc[i] - want[i]) < 1e-15);

  const auto seg = sample_boundary(shapes::Segment(1, 100), 2);
  REQUIRE(seg.size() == 2);
  CHECK(std::min(seg[0].real(), seg[1].real()) == 1.0);
  CHECK(std::max(seg[0].real(), seg[1].real()) == 100.0);

  const auto ell = sample_boundary(shapes::Ellipse(4, 3, 5), 360);
  CHECK(ell.size() == 360);
  CHECK(conjugate_closed(ell));
  for (const auto& z : ell) {
    const double q = std::pow((z.real() - 5.0) / 4.0, 2) + std::pow(z.imag() / 3.0, 2);
    CHECK(q == doctest::Approx(1.0).epsilon(1e-12));
  }

  const auto cross = sample_boundary(shapes::ImagCross(1, 10), 7);
  CHECK(cross.size() == 8);
  CHECK(conjugate_closed(cross));
  double lo = 1e300, hi = 0.0;
  for (const auto& z : cross) {
    CHECK(z.real() == 0.0);
    lo = std::min(lo, std::abs(z.imag()));
    hi = std::max(hi, std::abs(z.imag()));
  }
  CHECK(lo == 1.0);
  CHECK(hi == 10.0);

  CHECK(sample_boundary(shapes::Disc(2, 1), 100) == sample_boundary(shapes::Disc(2, 1), 100));
}

TEST_CASE("lawson exact interpolation and preconditions") {
  const std::vector<Complex> one{{2, 0}};
  const auto r = lawson_minimax(one, 1);
  CHECK(r.max_abs == 0.0);
  REQUIRE(r.poly.coeffs().size() == 1);
  CHECK(r.poly.coeffs()[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(r.poly(Complex{2, 0})) < 1e-15);
  CHECK(r.poly(Complex{0, 0}) == Complex{1, 0});

  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([] { lawson_minimax(std::vector<Complex>{}, 2); }) == ErrorCode::SingularLeastSquares);
  CHECK(code([] { lawson_minimax(std::vector<Complex>{{0, 0}, {1, 0}}, 2); }) == ErrorCode::SingularLeastSquares);
  CHECK(code([] { lawson_minimax(std::vector<Complex>{{1, 0}}, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lawson on a disc and a segment") {
  const auto disc = acf_estimate(shapes::Disc(2, 1), 8);
  CHECK(std::abs(disc - 0.5) <= 0.02 * 0.5);
  const auto disc16 = acf_estimate(shapes::Disc(2, 1), 16, 512);
  CHECK(std::abs(disc16 - 0.5) <= 0.02 * 0.5);

  const auto grid = sample_boundary(shapes::Segment(1, 100), 2000);
  const auto r = lawson_minimax(grid, 40);
  const double ref = std::pow(chebyshev_reference(1, 100, 40), 1.0 / 40.0);
  CHECK(std::abs(r.acf_estimate - ref) <= 0.02 * ref);
  CHECK(r.max_abs >= chebyshev_reference(1, 100, 40) * (1.0 - 1e-9));
  CHECK(r.lower_bound <= r.max_abs);
  CHECK(r.grid_size == 2000);
  CHECK(r.max_abs == doctest::Approx(grid_max(r.poly, grid)).epsilon(1e-12));
  CHECK(r.poly(Complex{0, 0}) == Complex{1, 0});
  for (double c : r.poly.coeffs()) CHECK(std::isfinite(c));
}

TEST_CASE("lawson weighted objective is non-decreasing") {
  for (const shapes::SpectralShape& s :
       {shapes::SpectralShape{shapes::Ellipse(4, 3, 5)}, shapes::SpectralShape{shapes::Segment(1, 50)},
        shapes::SpectralShape{shapes::ImagCross(1, 5)}}) {
    const auto r = lawson_minimax(sample_boundary(s, 400), 6, 200);
    REQUIRE(r.weighted_errors.size() >= 2);
    for (std::size_t i = 1; i < r.weighted_errors.size(); ++i)
      CHECK(r.weighted_errors[i] >= r.weighted_errors[i - 1] * (1.0 - 1e-10));
    CHECK(r.lower_bound <= r.max_abs * (1.0 + 1e-12));
  }
}

TEST_CASE("chebyshev reference") {
  CHECK(chebyshev_reference(1, 100, 1) == doctest::Approx(99.0 / 101.0).epsilon(1e-14));
  for (std::size_t t : {1, 2, 5, 10, 20}) {
    const double z0 = 101.0 / 99.0;
    CHECK(chebyshev_reference(1, 100, t) ==
          doctest::Approx(1.0 / static_cast<double>(oracles::chebyshev_t(t, z0))).epsilon(1e-10));
  }
  const double r40 = std::pow(chebyshev_reference(1, 100, 40), 1.0 / 40.0);
  const double corr = 9.0 / 11.0 * std::pow(2.0, 1.0 / 40.0);
  CHECK(std::abs(r40 - corr) < 1e-3);
  const double r1000 = std::pow(chebyshev_reference(1, 100, 1000), 1.0 / 1000.0);
  CHECK(std::abs(r1000 - 9.0 / 11.0) < 1e-3);
  CHECK(r1000 >= 9.0 / 11.0);
}

TEST_CASE("acf estimates against closed forms") {
  // The finite-degree optimum for the cross is the Chebyshev value in lambda^2.
  const double cross = acf_estimate(shapes::ImagCross(1, 10), 20, 1000);
  const double exact20 = std::pow(chebyshev_reference(1, 100, 10), 1.0 / 20.0);
  CHECK(std::abs(cross - exact20) <= 0.01 * exact20);
  CHECK(cross >= shapes::acf(shapes::ImagCross(1, 10)));

  const double ell = acf_estimate(shapes::Ellipse(4, 3, 5), 40, 2000);
  CHECK(std::abs(ell - 0.757359) <= 0.03 * 0.757359);
}

TEST_CASE("oracle upper-bounds the closed form and decreases with degree") {
  const std::vector<shapes::SpectralShape> shapes_list{shapes::Segment(1, 30), shapes::Disc(3, 2),
                                                       shapes::Ellipse(4, 3, 5), shapes::Ellipse(2, 5, 3),
                                                       shapes::ImagCross(1, 4)};
  for (const auto& s : shapes_list) {
    double prev = 1e300;
    for (std::size_t t : {5, 10, 20, 40}) {
      const auto pts = sample_boundary(s, 2000);
      const double est = lawson_minimax(pts, t).acf_estimate;
      CHECK(est >= shapes::acf(s) * (1.0 - 0.02));
      CHECK(est <= prev * (1.0 + 1e-6));
      prev = est;
    }
  }
}

TEST_CASE("imaginary cross polynomials are even") {
  const auto r = lawson_minimax(sample_boundary(shapes::ImagCross(1, 3), 600), 10);
  const auto& c = r.poly.coeffs();
  for (std::size_t k = 1; k <= c.size(); k += 2) CHECK(std::abs(c[k - 1]) < 1e-6);
}

TEST_CASE("finer grids barely raise the maximum") {
  for (const shapes::SpectralShape& s :
       {shapes::SpectralShape{shapes::Ellipse(4, 3, 5)}, shapes::SpectralShape{shapes::Segment(1, 100)},
        shapes::SpectralShape{shapes::ImagCross(1, 10)}}) {
    const std::size_t t = 20;
    const auto r = lawson_minimax(sample_boundary(s, 50 * t), t);
    const double fine = grid_max(r.poly, sample_boundary(s, 500 * t));
    CHECK(fine < 1.03 * r.max_abs);
  }
}

TEST_CASE("constrained polynomial evaluation") {
  const ConstrainedPolynomial p({-3.0, 1.0});
  CHECK(p(Complex{0, 0}) == Complex{1, 0});
  CHECK(p(Complex{1, 0}) == Complex{-1, 0});
  CHECK(std::abs(p(Complex{0, 1}) - Complex{0, -3}) < 1e-15);
  const std::vector<Complex> pts{{2, 0}, {1, 1}};
  const auto vals = p.evaluate(pts);
  CHECK(std::abs(vals[0] - Complex{-1, 0}) < 1e-15);
  CHECK(std::abs(vals[1] - p(pts[1])) < 1e-15);
}
