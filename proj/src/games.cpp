#include "spectral_games/games.hpp"

#include <algorithm>
#include <cmath>

#include "spectral_games/error.hpp"
#include "spectral_games/kernels.hpp"

namespace spectral_games::games {

namespace {

std::vector<double> row_major(const DenseMatrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), m.rows(), m.cols()) = m;
  return out;
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Vector apply(const std::vector<double>& a, Eigen::Index rows, Eigen::Index cols, const Vector& x,
             std::span<const double> shift = {}) {
  Vector y(rows);
  kernels::omp::matvec({static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), a},
                       as_span(x), shift, {y.data(), static_cast<std::size_t>(rows)});
  return y;
}

void check_dim(const VectorField& f, const Vector& w) {
  if (w.size() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "point has the wrong dimension");
}

class LinearField final : public VectorField {
 public:
  explicit LinearField(const LinearGame& g)
      : jac_(g.A), star_(g.omega_star), split_(g.split), a_(row_major(g.A.dense())),
        at_(row_major(g.A.dense().transpose())) {}

  Eigen::Index dim() const override { return star_.size(); }
  Eigen::Index split() const override { return split_; }
  const Vector& equilibrium() const override { return star_; }

  Vector eval(const Vector& w) const override {
    check_dim(*this, w);
    return apply(a_, dim(), dim(), w, as_span(star_));
  }
  Vector jacobian_apply(const Vector&, const Vector& v) const override {
    check_dim(*this, v);
    return apply(a_, dim(), dim(), v);
  }
  Vector jacobian_transpose_apply(const Vector&, const Vector& v) const override {
    check_dim(*this, v);
    return apply(at_, dim(), dim(), v);
  }
  RealMatrix jacobian_at_star() const override { return jac_; }

 private:
  RealMatrix jac_;
  Vector star_;
  Eigen::Index split_;
  std::vector<double> a_;
  std::vector<double> at_;
};

class BilinearField final : public VectorField {
 public:
  explicit BilinearField(const BilinearGame& g)
      : m_(g.m), star_(g.omega_star()), game_(g), a_(row_major(g.payoff.dense())),
        at_(row_major(g.payoff.dense().transpose())) {}

  Eigen::Index dim() const override { return 2 * m_; }
  Eigen::Index split() const override { return m_; }
  const Vector& equilibrium() const override { return star_; }

  Vector eval(const Vector& w) const override {
    check_dim(*this, w);
    Vector out(dim());
    out.head(m_) = apply(a_, m_, m_, w.tail(m_), as_span(game_.y_star));
    out.tail(m_) = -apply(at_, m_, m_, w.head(m_), as_span(game_.x_star));
    return out;
  }
  Vector jacobian_apply(const Vector&, const Vector& v) const override {
    check_dim(*this, v);
    Vector out(dim());
    out.head(m_) = apply(a_, m_, m_, v.tail(m_));
    out.tail(m_) = -apply(at_, m_, m_, v.head(m_));
    return out;
  }
  Vector jacobian_transpose_apply(const Vector&, const Vector& v) const override {
    check_dim(*this, v);
    Vector out(dim());
    out.head(m_) = -apply(a_, m_, m_, v.tail(m_));
    out.tail(m_) = apply(at_, m_, m_, v.head(m_));
    return out;
  }
  RealMatrix jacobian_at_star() const override { return game_.to_linear().A; }

 private:
  Eigen::Index m_;
  Vector star_;
  BilinearGame game_;
  std::vector<double> a_;
  std::vector<double> at_;
};

class TransformedField : public VectorField {
 public:
  explicit TransformedField(FieldPtr base) : base_(std::move(base)) {
    if (!base_) throw Error(ErrorCode::InvalidArgument, "null base field");
  }
  Eigen::Index dim() const override { return base_->dim(); }
  Eigen::Index split() const override { return base_->split(); }
  const Vector& equilibrium() const override { return base_->equilibrium(); }

 protected:
  FieldPtr base_;
};

class RealField final : public TransformedField {
 public:
  RealField(FieldPtr base, double eta) : TransformedField(std::move(base)), eta_(eta) {}

  Vector eval(const Vector& w) const override {
    const Vector f = base_->eval(w);
    return (base_->eval(w - eta_ * f) - f) / eta_;
  }
  // J_real(w) = (J(u) (I - eta J(w)) - J(w)) / eta with u = w - eta F(w).
  Vector jacobian_apply(const Vector& w, const Vector& v) const override {
    const Vector u = w - eta_ * base_->eval(w);
    const Vector jv = base_->jacobian_apply(w, v);
    return (base_->jacobian_apply(u, v - eta_ * jv) - jv) / eta_;
  }
  Vector jacobian_transpose_apply(const Vector& w, const Vector& v) const override {
    const Vector u = w - eta_ * base_->eval(w);
    const Vector g = base_->jacobian_transpose_apply(u, v);
    return (g - eta_ * base_->jacobian_transpose_apply(w, g) -
            base_->jacobian_transpose_apply(w, v)) / eta_;
  }
  RealMatrix jacobian_at_star() const override {
    const DenseMatrix j = base_->jacobian_at_star().dense();
    return RealMatrix(DenseMatrix(-(j * j)));
  }

 private:
  double eta_;
};

class EgField final : public TransformedField {
 public:
  EgField(FieldPtr base, double eta) : TransformedField(std::move(base)), eta_(eta) {}

  Vector eval(const Vector& w) const override { return base_->eval(w - eta_ * base_->eval(w)); }
  Vector jacobian_apply(const Vector& w, const Vector& v) const override {
    const Vector u = w - eta_ * base_->eval(w);
    return base_->jacobian_apply(u, v - eta_ * base_->jacobian_apply(w, v));
  }
  Vector jacobian_transpose_apply(const Vector& w, const Vector& v) const override {
    const Vector u = w - eta_ * base_->eval(w);
    const Vector g = base_->jacobian_transpose_apply(u, v);
    return g - eta_ * base_->jacobian_transpose_apply(w, g);
  }
  RealMatrix jacobian_at_star() const override {
    const DenseMatrix j = base_->jacobian_at_star().dense();
    return RealMatrix(DenseMatrix(j - eta_ * j * j));
  }

 private:
  double eta_;
};

// Derivative products drop the second-order term (d J^T / dw) F, which
// vanishes for affine fields and at the equilibrium.
class ConsensusField final : public TransformedField {
 public:
  ConsensusField(FieldPtr base, double tau) : TransformedField(std::move(base)), tau_(tau) {}

  Vector eval(const Vector& w) const override {
    const Vector f = base_->eval(w);
    if (tau_ == 0.0) return f;
    return f + tau_ * base_->jacobian_transpose_apply(w, f);
  }
  Vector jacobian_apply(const Vector& w, const Vector& v) const override {
    const Vector jv = base_->jacobian_apply(w, v);
    if (tau_ == 0.0) return jv;
    return jv + tau_ * base_->jacobian_transpose_apply(w, jv);
  }
  Vector jacobian_transpose_apply(const Vector& w, const Vector& v) const override {
    const Vector jtv = base_->jacobian_transpose_apply(w, v);
    if (tau_ == 0.0) return jtv;
    return jtv + tau_ * base_->jacobian_transpose_apply(w, base_->jacobian_apply(w, v));
  }
  RealMatrix jacobian_at_star() const override {
    const DenseMatrix j = base_->jacobian_at_star().dense();
    if (tau_ == 0.0) return RealMatrix(j);
    return RealMatrix(DenseMatrix(j + tau_ * j.transpose() * j));
  }

 private:
  double tau_;
};

Vector normal_vector(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

DenseMatrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  DenseMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
  }
  return a;
}

void fill_points(BilinearGame& g, std::uint64_t seed) {
  Rng xs(seed, Stream::XStar);
  Rng ys(seed, Stream::YStar);
  Rng w0(seed, Stream::Omega0);
  g.x_star = normal_vector(g.m, xs);
  g.y_star = normal_vector(g.m, ys);
  g.omega0 = normal_vector(2 * g.m, w0);
}

}  // namespace

LinearGame::LinearGame(RealMatrix a, Vector star) : LinearGame(std::move(a), std::move(star), 0) {
  split = dim() / 2;
}

LinearGame::LinearGame(RealMatrix a, Vector star, Eigen::Index split_at)
    : A(std::move(a)), omega_star(std::move(star)), split(split_at) {
  if (!A.is_square()) throw Error(ErrorCode::NonSquare, "game Jacobian must be square");
  if (A.rows() < 2) throw Error(ErrorCode::InvalidArgument, "game dimension must be at least 2");
  if (omega_star.size() != A.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "equilibrium size differs from the Jacobian");
  }
  if (split < 0 || split > A.rows()) throw Error(ErrorCode::InvalidArgument, "split out of range");
}

Vector BilinearGame::omega_star() const {
  Vector w(2 * m);
  w << x_star, y_star;
  return w;
}

LinearGame BilinearGame::to_linear() const {
  DenseMatrix j = DenseMatrix::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m) = payoff.dense();
  j.bottomLeftCorner(m, m) = -payoff.dense().transpose();
  return LinearGame(RealMatrix(std::move(j)), omega_star(), m);
}

FieldPtr make_field(const LinearGame& game) { return std::make_shared<LinearField>(game); }
FieldPtr make_field(const BilinearGame& game) { return std::make_shared<BilinearField>(game); }

FieldPtr transform_real(FieldPtr base, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
  return std::make_shared<RealField>(std::move(base), eta);
}

FieldPtr transform_eg(FieldPtr base, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
  return std::make_shared<EgField>(std::move(base), eta);
}

FieldPtr transform_consensus(FieldPtr base, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be non-negative");
  return std::make_shared<ConsensusField>(std::move(base), tau);
}

DenseMatrix random_orthogonal(Eigen::Index n, Rng& rng) {
  const DenseMatrix g = normal_matrix(n, n, rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

BilinearGame make_bilinear(Eigen::Index m, double cond, std::uint64_t seed) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "bilinear games need m >= 2");
  if (!(cond >= 1.0) || !std::isfinite(cond)) throw Error(ErrorCode::InvalidArgument, "cond must be >= 1");
  Rng rng(seed, Stream::Matrix);
  const DenseMatrix raw = normal_matrix(m, m, rng);
  Eigen::JacobiSVD<DenseMatrix> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const double hi = s(0);
  const double lo = s(m - 1);
  const double target_lo = hi / cond;
  Vector remapped(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    remapped(k) = hi > lo ? target_lo + (s(k) - lo) * (hi - target_lo) / (hi - lo) : hi;
  }
  remapped(0) = hi;
  remapped(m - 1) = target_lo;

  BilinearGame g;
  g.m = m;
  g.payoff = RealMatrix(DenseMatrix(svd.matrixU() * remapped.asDiagonal() * svd.matrixV().transpose()));
  fill_points(g, seed);
  return g;
}

BilinearGame make_bilinear_with_singular_values(const std::vector<double>& sigma, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(sigma.size());
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "bilinear games need m >= 2");
  Vector s(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s(k) = sigma[static_cast<std::size_t>(k)];
    if (!(s(k) > 0.0) || !std::isfinite(s(k))) {
      throw Error(ErrorCode::InvalidArgument, "singular values must be positive");
    }
  }
  Rng rng(seed, Stream::Matrix);
  const DenseMatrix u = random_orthogonal(m, rng);
  const DenseMatrix v = random_orthogonal(m, rng);
  BilinearGame g;
  g.m = m;
  g.payoff = RealMatrix(DenseMatrix(u * s.asDiagonal() * v.transpose()));
  fill_points(g, seed);
  return g;
}

RealMatrix matrix_with_spectrum(const Spectrum& eigs) {
  const auto& v = eigs.values();
  const auto n = static_cast<Eigen::Index>(v.size());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  auto is_real = [](const Complex& z) { return std::abs(z.imag()) <= numerics::kTol.pairing * (1.0 + std::abs(z)); };
  DenseMatrix m = DenseMatrix::Zero(n, n);
  std::vector<bool> used(v.size(), false);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (is_real(v[i])) {
      m(at, at) = v[i].real();
      ++at;
      continue;
    }
    std::size_t partner = v.size();
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!used[j] && !is_real(v[j]) &&
          std::abs(v[j] - std::conj(v[i])) <= numerics::kTol.pairing * (1.0 + std::abs(v[i]))) {
        partner = j;
        break;
      }
    }
    if (partner == v.size()) {
      throw Error(ErrorCode::UnpairedComplexEigenvalue,
                  "complex eigenvalue without a conjugate partner");
    }
    used[partner] = true;
    Complex z = 0.5 * (v[i] + std::conj(v[partner]));
    if (z.imag() < 0.0) z = std::conj(z);
    m.block(at, at, 2, 2) = numerics::complex_block(z);
    at += 2;
  }
  return RealMatrix(std::move(m));
}

RealMatrix augmented_jacobian(const RealMatrix& J, shapes::MomentumParams p) {
  if (!J.is_square()) throw Error(ErrorCode::NonSquare, "Jacobian must be square");
  const Eigen::Index d = J.rows();
  const DenseMatrix id = DenseMatrix::Identity(d, d);
  DenseMatrix aug = DenseMatrix::Zero(2 * d, 2 * d);
  aug.topLeftCorner(d, d) = (1.0 + p.beta) * id - p.alpha * J.dense();
  aug.topRightCorner(d, d) = -p.beta * id;
  aug.bottomLeftCorner(d, d) = id;
  return RealMatrix(std::move(aug));
}

Spectrum game_spectrum(const VectorField& field) { return numerics::eigenvalues(field.jacobian_at_star()); }

}  // namespace spectral_games::games
