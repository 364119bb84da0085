#include "spectral_games/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/QR>

#include "spectral_games/error.hpp"
#include "spectral_games/kernels.hpp"

namespace spectral_games::oracle {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Grid points with conjugate pairs folded onto their upper representative.
struct FoldedGrid {
  std::vector<Complex> z;
  std::vector<double> multiplicity;
};

FoldedGrid fold_conjugates(std::span<const Complex> points) {
  std::map<std::pair<double, double>, int> lower;
  for (const auto& p : points) {
    if (p.imag() < 0.0) ++lower[{p.real(), p.imag()}];
  }
  FoldedGrid folded;
  bool closed = true;
  for (const auto& p : points) {
    if (p.imag() > 0.0) {
      auto it = lower.find({p.real(), -p.imag()});
      if (it == lower.end() || it->second == 0) {
        closed = false;
        break;
      }
      --it->second;
      folded.z.push_back(p);
      folded.multiplicity.push_back(2.0);
    } else if (p.imag() == 0.0) {
      folded.z.push_back(p);
      folded.multiplicity.push_back(1.0);
    }
  }
  if (closed) {
    for (const auto& [key, count] : lower) closed = closed && count == 0;
  }
  if (closed) return folded;
  // Not exactly conjugate-closed: keep every point; the real-coefficient
  // constraint is still enforced through the stacked (Re, Im) rows.
  FoldedGrid all;
  all.z.assign(points.begin(), points.end());
  all.multiplicity.assign(points.size(), 1.0);
  return all;
}

struct ArnoldiBasis {
  std::size_t degree = 0;           // number of recurrence steps actually taken
  bool breakdown = false;           // grid supports fewer than the requested degree
  std::vector<double> hessenberg;   // (degree+1) x degree, row-major
  Eigen::MatrixXcd values;          // grid values, n x (degree+1)
  Eigen::VectorXd at_zero;          // q_k(0)
  std::vector<std::vector<long double>> monomial;  // q_k in the monomial basis
};

ArnoldiBasis build_basis(const FoldedGrid& grid, std::size_t t) {
  const auto n = static_cast<Eigen::Index>(grid.z.size());
  double total = 0.0;
  for (double m : grid.multiplicity) total += m;
  auto inner = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += grid.multiplicity[static_cast<std::size_t>(i)] * std::real(std::conj(u(i)) * v(i));
    }
    return acc / total;
  };

  Eigen::Map<const Eigen::VectorXcd> z(grid.z.data(), n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t + 1),
                                            static_cast<Eigen::Index>(t));
  std::vector<Eigen::VectorXcd> q{Eigen::VectorXcd::Ones(n)};
  std::size_t steps = t;
  bool breakdown = false;
  for (std::size_t k = 0; k < t; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXcd zq = z.cwiseProduct(q[k]);
    Eigen::VectorXcd v = zq;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j <= k; ++j) {
        const double c = inner(q[j], v);
        h(static_cast<Eigen::Index>(j), kk) += c;
        v -= c * q[j];
      }
    }
    const double norm = std::sqrt(inner(v, v));
    if (norm <= 1e-10 * std::sqrt(inner(zq, zq))) {
      // The grid has at most k+1 distinct points; the unnormalized next
      // polynomial vanishes on it.
      h(kk + 1, kk) = 1.0;
      steps = k + 1;
      breakdown = true;
      break;
    }
    h(kk + 1, kk) = norm;
    q.push_back(v / norm);
  }

  ArnoldiBasis basis;
  basis.degree = steps;
  basis.breakdown = breakdown;
  basis.hessenberg.resize((steps + 1) * steps);
  for (std::size_t j = 0; j <= steps; ++j) {
    for (std::size_t k = 0; k < steps; ++k) {
      basis.hessenberg[j * steps + k] = h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }
  }
  const kernels::HessenbergView view{steps, basis.hessenberg};

  // Re-evaluate through the recurrence so grid values, off-grid evaluation
  // and the reported maximum all come from one computation.
  std::vector<Complex> values(grid.z.size() * (steps + 1));
  kernels::omp::arnoldi_eval(view, grid.z, values);
  basis.values = Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(steps + 1));
  std::vector<Complex> origin(steps + 1);
  const Complex zero{0.0, 0.0};
  kernels::serial::arnoldi_eval(view, std::span<const Complex>(&zero, 1), origin);
  basis.at_zero.resize(static_cast<Eigen::Index>(steps + 1));
  for (std::size_t k = 0; k <= steps; ++k) basis.at_zero(static_cast<Eigen::Index>(k)) = origin[k].real();

  basis.monomial.assign(steps + 1, std::vector<long double>(steps + 1, 0.0L));
  basis.monomial[0][0] = 1.0L;
  for (std::size_t k = 0; k < steps; ++k) {
    auto& next = basis.monomial[k + 1];
    for (std::size_t i = 0; i < steps; ++i) next[i + 1] = basis.monomial[k][i];
    for (std::size_t j = 0; j <= k; ++j) {
      const long double c = view(j, k);
      for (std::size_t i = 0; i <= steps; ++i) next[i] -= c * basis.monomial[j][i];
    }
    for (auto& x : next) x /= static_cast<long double>(view(k + 1, k));
  }
  return basis;
}

ConstrainedPolynomial make_polynomial(const ArnoldiBasis& basis, const Eigen::VectorXd& expansion,
                                      std::size_t t) {
  std::vector<long double> mono(basis.degree + 1, 0.0L);
  for (std::size_t j = 0; j <= basis.degree; ++j) {
    for (std::size_t i = 0; i <= basis.degree; ++i) {
      mono[i] += static_cast<long double>(expansion(static_cast<Eigen::Index>(j))) * basis.monomial[j][i];
    }
  }
  std::vector<double> coeffs(t, 0.0);
  for (std::size_t i = 1; i <= basis.degree && i <= t; ++i) coeffs[i - 1] = static_cast<double>(mono[i] / mono[0]);
  std::vector<double> exp(expansion.data(), expansion.data() + expansion.size());
  return ConstrainedPolynomial(std::move(coeffs), basis.degree, basis.hessenberg, std::move(exp));
}

double max_modulus(const std::vector<Complex>& values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

ConstrainedPolynomial::ConstrainedPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

ConstrainedPolynomial::ConstrainedPolynomial(std::vector<double> coeffs, std::size_t basis_degree,
                                             std::vector<double> hessenberg,
                                             std::vector<double> expansion)
    : coeffs_(std::move(coeffs)),
      basis_degree_(basis_degree),
      hessenberg_(std::move(hessenberg)),
      expansion_(std::move(expansion)) {}

Complex ConstrainedPolynomial::operator()(Complex z) const {
  return evaluate(std::span<const Complex>(&z, 1)).front();
}

std::vector<Complex> ConstrainedPolynomial::evaluate(std::span<const Complex> points) const {
  std::vector<Complex> out(points.size());
  if (expansion_.empty()) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      Complex acc{0.0, 0.0};
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + *it) * points[p];
      out[p] = 1.0 + acc;
    }
    return out;
  }
  const std::size_t width = basis_degree_ + 1;
  std::vector<Complex> basis(points.size() * width);
  kernels::omp::arnoldi_eval({basis_degree_, hessenberg_}, points, basis);
  for (std::size_t p = 0; p < points.size(); ++p) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < width; ++k) acc += expansion_[k] * basis[p * width + k];
    out[p] = acc;
  }
  return out;
}

std::size_t default_grid_size(std::size_t degree) { return std::max<std::size_t>(64, 50 * degree); }

std::vector<Complex> sample_boundary(const shapes::SpectralShape& shape, std::size_t n) {
  using std::numbers::pi;
  // Closed curve c + a cos(th) + i b sin(th); the lower half mirrors the upper
  // half bitwise so the grid is exactly conjugate-closed.
  auto closed_curve = [n](double c, double a, double b) {
    std::vector<Complex> pts(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double th = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
      double s = std::sin(th);
      if (2 * k == n) s = 0.0;
      pts[k] = Complex{c + a * std::cos(th), b * s};
      if (k > 0 && k < n - k) pts[n - k] = std::conj(pts[k]);
    }
    return pts;
  };
  auto lobatto = [](double lo, double hi, std::size_t m) {
    std::vector<double> x(m);
    if (m == 1) {
      x[0] = 0.5 * (lo + hi);
      return x;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double th = pi * static_cast<double>(k) / static_cast<double>(m - 1);
      x[k] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(th);
    }
    x.front() = lo;
    x.back() = hi;
    return x;
  };
  if (n == 0) return {};
  return std::visit(
      overloaded{
          [&](const shapes::Segment& s) {
            std::vector<Complex> pts;
            for (double x : lobatto(s.mu(), s.L(), n)) pts.emplace_back(x, 0.0);
            return pts;
          },
          [&](const shapes::Disc& d) { return closed_curve(d.c(), d.r(), d.r()); },
          [&](const shapes::Ellipse& e) { return closed_curve(e.c(), e.a(), e.b()); },
          [&](const shapes::ImagCross& x) {
            const std::size_t half = (n + 1) / 2;
            std::vector<Complex> pts;
            for (double y : lobatto(x.a(), x.b(), half)) pts.emplace_back(0.0, y);
            for (double y : lobatto(x.a(), x.b(), half)) pts.emplace_back(0.0, -y);
            return pts;
          },
      },
      shape);
}

OracleResult lawson_minimax(std::span<const Complex> points, std::size_t degree,
                            std::size_t max_iters, double weight_floor) {
  if (degree == 0) throw Error(ErrorCode::InvalidArgument, "degree must be at least 1");
  if (points.empty()) throw Error(ErrorCode::SingularLeastSquares, "empty grid");
  for (const auto& p : points) {
    if (p == Complex{0.0, 0.0}) {
      throw Error(ErrorCode::SingularLeastSquares, "grid contains 0, where p(0) = 1 is pinned");
    }
  }
  const FoldedGrid grid = fold_conjugates(points);
  const ArnoldiBasis basis = build_basis(grid, degree);
  const auto n = static_cast<Eigen::Index>(grid.z.size());
  const auto width = static_cast<Eigen::Index>(basis.degree + 1);

  if (basis.breakdown) {
    // Interpolate zero on every grid point.
    Eigen::VectorXd expansion = Eigen::VectorXd::Zero(width);
    expansion(width - 1) = 1.0 / basis.at_zero(width - 1);
    ConstrainedPolynomial poly = make_polynomial(basis, expansion, degree);
    const double max_abs = max_modulus(poly.evaluate(points));
    return {std::move(poly), max_abs, std::pow(max_abs, 1.0 / static_cast<double>(degree)), 0.0,
            points.size(), 0, true, {}};
  }

  // p = q_j/e_j + sum_{k != j} x_k (q_k - (e_k/e_j) q_j) with j the largest
  // |q_k(0)|, so p(0) = 1 holds by construction and the columns stay
  // well-scaled.
  Eigen::Index pivot = 0;
  basis.at_zero.cwiseAbs().maxCoeff(&pivot);
  const double e_pivot = basis.at_zero(pivot);
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < width; ++k) {
    if (k != pivot) free.push_back(k);
  }
  const auto unknowns = static_cast<Eigen::Index>(free.size());

  // Stacked real rows: Re for every point, Im for non-real points.
  std::vector<Eigen::Index> row_point;
  std::vector<bool> row_is_imag;
  for (Eigen::Index i = 0; i < n; ++i) {
    row_point.push_back(i);
    row_is_imag.push_back(false);
    if (grid.z[static_cast<std::size_t>(i)].imag() != 0.0) {
      row_point.push_back(i);
      row_is_imag.push_back(true);
    }
  }
  const auto rows = static_cast<Eigen::Index>(row_point.size());
  Eigen::MatrixXd design(rows, unknowns);
  Eigen::VectorXd offset(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index i = row_point[static_cast<std::size_t>(r)];
    auto part = [&](Complex v) { return row_is_imag[static_cast<std::size_t>(r)] ? v.imag() : v.real(); };
    const Complex base = basis.values(i, pivot);
    offset(r) = part(base) / e_pivot;
    for (Eigen::Index c = 0; c < unknowns; ++c) {
      const Eigen::Index k = free[static_cast<std::size_t>(c)];
      design(r, c) = part(basis.values(i, k) - (basis.at_zero(k) / e_pivot) * base);
    }
  }

  double total = 0.0;
  for (double m : grid.multiplicity) total += m;
  Eigen::VectorXd weights(n);
  for (Eigen::Index i = 0; i < n; ++i) weights(i) = grid.multiplicity[static_cast<std::size_t>(i)] / total;

  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(unknowns);
  double best_max = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  std::vector<double> history_max;
  std::vector<double> weighted_errors;
  bool converged = false;
  std::size_t iters = 0;
  Eigen::MatrixXd weighted(rows, unknowns);
  Eigen::VectorXd rhs(rows);
  Eigen::VectorXd abs_res(n);

  for (std::size_t it = 0; it < max_iters; ++it) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double s = std::sqrt(weights(row_point[static_cast<std::size_t>(r)]));
      weighted.row(r) = s * design.row(r);
      rhs(r) = -s * offset(r);
    }
    Eigen::VectorXd x;
    if (it == 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
      if (qr.rank() < unknowns) {
        throw Error(ErrorCode::SingularLeastSquares,
                    "least-squares system is rank deficient; the grid needs more than t+1 points");
      }
      x = qr.solve(rhs);
    } else {
      x = weighted.householderQr().solve(rhs);
    }
    ++iters;

    const Eigen::VectorXd res = offset + design * x;
    abs_res.setZero();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = row_point[static_cast<std::size_t>(r)];
      abs_res(i) += res(r) * res(r);
    }
    abs_res = abs_res.cwiseSqrt();
    const double weighted_error = weights.dot(abs_res.cwiseAbs2());
    weighted_errors.push_back(weighted_error);
    const double max_abs = abs_res.maxCoeff();
    history_max.push_back(max_abs);
    best_lower = std::max(best_lower, std::sqrt(weighted_error));
    if (max_abs < best_max) {
      best_max = max_abs;
      best_x = x;
    }

    if (!(max_abs > 0.0)) {
      converged = true;
      break;
    }
    if (history_max.size() > 10) {
      const double old = history_max[history_max.size() - 11];
      if (std::abs(max_abs - old) < 1e-9 * max_abs) {
        converged = true;
        break;
      }
    }
    if (best_max - best_lower <= 1e-9 * best_max) {
      converged = true;
      break;
    }

    weights = weights.cwiseProduct(abs_res);
    weights /= weights.sum();
    weights = weights.cwiseMax(weight_floor);
    weights /= weights.sum();
  }

  Eigen::VectorXd expansion = Eigen::VectorXd::Zero(width);
  double constrained = 1.0;
  for (Eigen::Index c = 0; c < unknowns; ++c) {
    const Eigen::Index k = free[static_cast<std::size_t>(c)];
    expansion(k) = best_x(c);
    constrained -= basis.at_zero(k) * best_x(c);
  }
  expansion(pivot) = constrained / e_pivot;

  ConstrainedPolynomial poly = make_polynomial(basis, expansion, degree);
  const double max_abs = max_modulus(poly.evaluate(points));
  return {std::move(poly),
          max_abs,
          std::pow(max_abs, 1.0 / static_cast<double>(degree)),
          std::min(best_lower, max_abs),
          points.size(),
          iters,
          converged,
          std::move(weighted_errors)};
}

double chebyshev_reference(double mu, double L, std::size_t degree) {
  if (!(mu > 0.0) || !(mu < L)) throw Error(ErrorCode::InvalidArgument, "needs 0 < mu < L");
  const double z0 = (L + mu) / (L - mu);
  return 1.0 / std::cosh(static_cast<double>(degree) * std::acosh(z0));
}

double acf_estimate(const shapes::SpectralShape& shape, std::size_t degree, std::size_t n) {
  if (n == 0) n = default_grid_size(degree);
  const auto grid = sample_boundary(shape, n);
  return lawson_minimax(grid, degree).acf_estimate;
}

}  // namespace spectral_games::oracle
