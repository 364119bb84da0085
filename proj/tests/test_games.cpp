#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "spectral_games/error.hpp"
#include "spectral_games/games.hpp"

using namespace spectral_games;
using namespace spectral_games::games;

namespace {

DenseMatrix gaussian(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed, Stream::Auxiliary);
  DenseMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Vector gaussian_vector(Eigen::Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }


double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

LinearGame random_linear(Eigen::Index d, std::uint64_t seed) {
  return LinearGame(RealMatrix(gaussian(d, d, seed)), gaussian_vector(d, seed + 1000));
}

}  // namespace

TEST_CASE("linear games validate their inputs") {
  CHECK_THROWS_AS(LinearGame(RealMatrix(gaussian(2, 3, 1)), Vector::Zero(2)), Error);
  CHECK_THROWS_AS(LinearGame(RealMatrix(gaussian(1, 1, 1)), Vector::Zero(1)), Error);
  CHECK_THROWS_AS(LinearGame(RealMatrix(gaussian(3, 3, 1)), Vector::Zero(2)), Error);
  const auto g = random_linear(4, 3);
  CHECK(g.split == 2);
  const auto f = make_field(g);
  CHECK(f->eval(g.omega_star).norm() == 0.0);
  const Vector w = gaussian_vector(4, 9);
  CHECK((f->eval(w) - g.A.dense() * (w - g.omega_star)).norm() < 1e-13);
}

TEST_CASE("make_bilinear normalizes the condition number") {
  const auto g = make_bilinear(50, 100, 7);
  const auto sv = numerics::singular_values(g.payoff);
  CHECK(sv.front() / sv.back() == doctest::Approx(100.0).epsilon(1e-8));

  const auto iso = make_bilinear(2, 1, 0);
  const auto s2 = numerics::singular_values(iso.payoff);
  CHECK(s2[0] == doctest::Approx(s2[1]).epsilon(1e-12));

  const auto spec = game_spectrum(*make_field(g));
  REQUIRE(spec.size() == 100);
  std::vector<double> moduli;
  for (const auto& z : spec) {
    CHECK(std::abs(z.real()) < 1e-10);
    moduli.push_back(std::abs(z.imag()));
  }
  std::sort(moduli.rbegin(), moduli.rend());
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::abs(moduli[2 * i] - sv[i]) < 1e-8);
    CHECK(std::abs(moduli[2 * i + 1] - sv[i]) < 1e-8);
  }

  const auto g10 = make_bilinear(10, 100, 1);
  for (const auto& z : game_spectrum(*make_field(g10))) CHECK(std::abs(z.real()) < 1e-10);
}

TEST_CASE("bilinear games are deterministic per seed") {
  const auto a = make_bilinear(20, 10, 5);
  const auto b = make_bilinear(20, 10, 5);
  const auto c = make_bilinear(20, 10, 6);
  CHECK(a.payoff.dense() == b.payoff.dense());
  CHECK(a.x_star == b.x_star);
  CHECK(a.y_star == b.y_star);
  CHECK(a.omega0 == b.omega0);
  CHECK(a.payoff.dense() != c.payoff.dense());
  CHECK(a.x_star != a.y_star);
}

TEST_CASE("bilinear field matches the dense linear game") {
  const auto g = make_bilinear(12, 30, 4);
  const auto lin = g.to_linear();
  const DenseMatrix& A = g.payoff.dense();
  DenseMatrix J = DenseMatrix::Zero(24, 24);
  J.topRightCorner(12, 12) = A;
  J.bottomLeftCorner(12, 12) = -A.transpose();
  CHECK(lin.A.dense() == J);
  CHECK(lin.split == 12);
  const auto fb = make_field(g);
  const auto fl = make_field(lin);
  CHECK(fb->dim() == 24);
  CHECK(fb->split() == 12);
  CHECK(fb->eval(g.omega_star()).norm() < 1e-12);
  CHECK(fb->jacobian_at_star().dense() == J);
  for (int k = 0; k < 5; ++k) {
    const Vector w = gaussian_vector(24, 100 + k);
    const Vector v = gaussian_vector(24, 200 + k);
    CHECK((fb->eval(w) - fl->eval(w)).norm() < 1e-12 * (1 + w.norm()));
    CHECK((fb->jacobian_apply(w, v) - J * v).norm() < 1e-12 * v.norm());
    CHECK((fb->jacobian_transpose_apply(w, v) - J.transpose() * v).norm() < 1e-12 * v.norm());
  }
}

TEST_CASE("singular-value games have the requested singular values") {
  const std::vector<double> sigma{10, 5, 2, 1};
  const auto g = make_bilinear_with_singular_values(sigma, 3);
  const auto sv = numerics::singular_values(g.payoff);
  for (std::size_t i = 0; i < 4; ++i) CHECK(sv[i] == doctest::Approx(sigma[i]).epsilon(1e-12));
  Rng rng(1, Stream::Auxiliary);
  const DenseMatrix q = random_orthogonal(6, rng);
  CHECK(max_entry_diff(q.transpose() * q, DenseMatrix::Identity(6, 6)) < 1e-13);
}

TEST_CASE("matrix with prescribed spectrum") {
  CHECK(matrix_with_spectrum(Spectrum(std::vector<Complex>{{3, 0}})).dense() == DenseMatrix::Constant(1, 1, 3.0));
  const auto m = matrix_with_spectrum(Spectrum(std::vector<Complex>{{1, 2}, {1, -2}}));
  DenseMatrix want(2, 2);
  want << 1, -2, 2, 1;
  CHECK(m.dense() == want);
  CHECK_THROWS_AS(matrix_with_spectrum(Spectrum(std::vector<Complex>{{1, 2}, {1, 0}})), Error);

  Rng rng(4, Stream::Auxiliary);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> eigs;
    for (int k = 0; k < 3; ++k) {
      const Complex z{rng.normal(), rng.normal()};
      eigs.push_back(z);
      eigs.push_back(std::conj(z));
    }
    for (int k = 0; k < 4; ++k) eigs.push_back({rng.normal(), 0.0});
    const auto mat = matrix_with_spectrum(Spectrum(eigs));
    CHECK(mat.rows() == 10);
    CHECK(oracles::multiset_distance(numerics::eigenvalues(mat).values(), eigs) < 1e-10);
    CHECK(oracles::multiset_distance(oracles::eigenvalues(mat.dense()), eigs) < 1e-8);
  }
}

TEST_CASE("transform_real") {
  const double s = 3.0;
  const auto rot = make_field(LinearGame(RealMatrix(numerics::complex_block({0, s})), Vector::Zero(2)));
  CHECK(max_entry_diff(transform_real(rot, 0.1)->jacobian_at_star().dense(), s * s * DenseMatrix::Identity(2, 2)) <
        1e-12);

  const auto g = random_linear(6, 8);
  const auto f = make_field(g);
  const DenseMatrix& J = g.A.dense();
  const auto fr = transform_real(f, 0.05);
  CHECK(max_entry_diff(fr->jacobian_at_star().dense(), -J * J) < 1e-12);
  CHECK(fr->eval(g.omega_star).norm() < 1e-12);
  const Vector w = gaussian_vector(6, 77);
  const Vector Fw = J * (w - g.omega_star);
  const Vector want = (J * (w - 0.05 * Fw - g.omega_star) - Fw) / 0.05;
  CHECK((fr->eval(w) - want).norm() < 1e-11 * (1 + want.norm()));

  const auto b = make_bilinear(8, 10, 2);
  const auto sv = numerics::singular_values(b.payoff);
  for (const auto& z : game_spectrum(*transform_real(make_field(b), 0.1))) {
    CHECK(std::abs(z.imag()) < 1e-9);
    CHECK(z.real() >= sv.back() * sv.back() * (1 - 1e-10));
    CHECK(z.real() <= sv.front() * sv.front() * (1 + 1e-10));
  }
}

TEST_CASE("transform_eg") {
  const auto rot = make_field(LinearGame(RealMatrix(numerics::complex_block({0, 1})), Vector::Zero(2)));
  const auto img = game_spectrum(*transform_eg(rot, 1.0));
  CHECK(oracles::multiset_distance(img.values(), {{1, 1}, {1, -1}}) < 1e-12);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = random_linear(8, seed);
    const DenseMatrix& J = g.A.dense();
    const double eta = 0.1;
    const auto fe = transform_eg(make_field(g), eta);
    CHECK(max_entry_diff(fe->jacobian_at_star().dense(), J - eta * J * J) < 1e-12);
    CHECK(fe->eval(g.omega_star).norm() < 1e-12);
    std::vector<Complex> image;
    for (const auto& l : oracles::eigenvalues(J)) image.push_back(l - eta * l * l);
    CHECK(oracles::multiset_distance(game_spectrum(*fe).values(), image) < 1e-8);
  }

  const auto b = make_bilinear_with_singular_values({1, 2, 3}, 1);
  const double eta = 0.2;
  std::vector<Complex> want;
  for (double s : {1.0, 2.0, 3.0}) {
    want.push_back({eta * s * s, s});
    want.push_back({eta * s * s, -s});
  }
  CHECK(oracles::multiset_distance(game_spectrum(*transform_eg(make_field(b), eta)).values(), want) < 1e-9);
}

TEST_CASE("transform_consensus") {
  const auto g = random_linear(6, 12);
  const auto f = make_field(g);
  const auto same = transform_consensus(f, 0.0);
  const Vector w = gaussian_vector(6, 5);
  CHECK(same->eval(w) == f->eval(w));
  CHECK(same->jacobian_at_star().dense() == g.A.dense());

  const DenseMatrix& J = g.A.dense();
  const auto fc = transform_consensus(f, 0.3);
  CHECK(max_entry_diff(fc->jacobian_at_star().dense(), J + 0.3 * J.transpose() * J) < 1e-12);
  const Vector want = J * (w - g.omega_star) + 0.3 * J.transpose() * (J * (w - g.omega_star));
  CHECK((fc->eval(w) - want).norm() < 1e-12 * (1 + want.norm()));
  CHECK(fc->eval(g.omega_star).norm() < 1e-12);

  const auto b = make_bilinear(10, 10, 3);
  const auto sv = numerics::singular_values(b.payoff);
  const DenseMatrix Jc = transform_consensus(make_field(b), 0.5)->jacobian_at_star().dense();
  const DenseMatrix herm = 0.5 * (Jc + Jc.transpose());
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm);
  CHECK(es.eigenvalues().minCoeff() >= 0.5 * sv.back() * sv.back() * (1 - 1e-10));

  // gamma = 1, L = 10, tau = 10 on a bilinear game with singular values in [1, 10].
  const auto b10 = make_bilinear_with_singular_values({10, 6, 3, 1}, 9);
  for (const auto& z : game_spectrum(*transform_consensus(make_field(b10), 10.0))) {
    CHECK(std::abs(z.imag()) / std::abs(z.real()) <= 0.1 + 1e-12);
    CHECK(z.real() >= 10.0 * (1 - 1e-12));
    CHECK(z.real() <= 1010.0 * (1 + 1e-12));
  }
}

TEST_CASE("transforms agree with finite differences of their fields") {
  const auto b = make_bilinear(5, 4, 11);
  const auto base = make_field(b);
  const std::vector<FieldPtr> fields{transform_real(base, 0.1), transform_eg(base, 0.1),
                                     transform_consensus(base, 0.2)};
  const Vector w = gaussian_vector(10, 1);
  const Vector v = gaussian_vector(10, 2);
  const Vector u = gaussian_vector(10, 3);
  for (const auto& f : fields) {
    const double h = 1e-6;
    const Vector fd = (f->eval(w + h * v) - f->eval(w - h * v)) / (2 * h);
    CHECK((f->jacobian_apply(w, v) - fd).norm() < 1e-6 * (1 + fd.norm()));
    // Adjoint consistency: <u, J v> = <J^T u, v>.
    CHECK(u.dot(f->jacobian_apply(w, v)) ==
          doctest::Approx(f->jacobian_transpose_apply(w, u).dot(v)).epsilon(1e-11));
    CHECK(max_entry_diff(f->jacobian_at_star().dense(), [&] {
            DenseMatrix m(10, 10);
            for (int j = 0; j < 10; ++j) m.col(j) = f->jacobian_apply(b.omega_star(), Vector::Unit(10, j));
            return m;
          }()) < 1e-11);
  }
}

TEST_CASE("augmented jacobian") {
  const auto g = random_linear(5, 21);
  const auto& J = g.A;
  const auto aug0 = augmented_jacobian(J, {0.1, 0.0});
  const DenseMatrix gd = DenseMatrix::Identity(5, 5) - 0.1 * J.dense();
  CHECK(numerics::spectral_radius(aug0) == doctest::Approx(numerics::spectral_radius(RealMatrix(gd))).epsilon(1e-10));

  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 100;
  const auto p = shapes::optimal_momentum(shapes::Segment(1, 100));
  CHECK(std::abs(numerics::spectral_radius(augmented_jacobian(RealMatrix(d), p)) - 9.0 / 11.0) < 1e-8);

  const shapes::MomentumParams q{0.2, 0.3};
  const auto aug = augmented_jacobian(J, q);
  std::vector<Complex> want;
  for (const auto& l : oracles::eigenvalues(J.dense())) {
    const auto [r1, r2] = numerics::quadratic_roots(-(1.0 - q.alpha * l + q.beta), q.beta);
    want.push_back(r1);
    want.push_back(r2);
  }
  CHECK(oracles::multiset_distance(numerics::eigenvalues(aug).values(), want) < 1e-8);
  const DenseMatrix& A = aug.dense();
  CHECK(A.topRightCorner(5, 5) == -0.3 * DenseMatrix::Identity(5, 5));
  CHECK(A.bottomLeftCorner(5, 5) == DenseMatrix::Identity(5, 5));
  CHECK(A.bottomRightCorner(5, 5) == DenseMatrix::Zero(5, 5));
}

TEST_CASE("strongly monotone constructions stay in the bounded half-disc") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, Stream::Auxiliary);
    const Eigen::Index d = 6;
    const double mu = 0.1 + rng.uniform();
    const DenseMatrix s = gaussian(d, d, seed + 500);
    DenseMatrix J = mu * DenseMatrix::Identity(d, d) + (s - s.transpose());
    const DenseMatrix p = gaussian(d, d, seed + 900);
    J += p.transpose() * p * rng.uniform();
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (J + J.transpose()));
    const double mu_true = es.eigenvalues().minCoeff();
    const double L = Eigen::JacobiSVD<DenseMatrix>(J).singularValues()(0);
    for (const auto& l : numerics::eigenvalues(RealMatrix(J))) {
      CHECK(l.real() >= mu_true * (1 - 1e-10));
      CHECK(std::abs(l) <= L * (1 + 1e-10));
    }
  }
}
