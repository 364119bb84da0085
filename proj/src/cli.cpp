#include "spectral_games/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "spectral_games/bench.hpp"
#include "spectral_games/error.hpp"
#include "spectral_games/games.hpp"
#include "spectral_games/methods.hpp"
#include "spectral_games/oracle.hpp"

namespace spectral_games::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, const char* spec = "%g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct ShapeOptions {
  std::string shape;
  double mu = NAN, L = NAN, c = NAN, r = NAN, a = NAN, b = NAN;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--shape", shape, "segment, disc, ellipse or imagcross")
                    ->check(CLI::IsMember({"segment", "disc", "ellipse", "imagcross"}));
    if (required) opt->required();
    app->add_option("--mu", mu, "segment lower end");
    app->add_option("--L", L, "segment upper end");
    app->add_option("--c", c, "disc or ellipse center");
    app->add_option("--r", r, "disc radius");
    app->add_option("--a", a, "real semi-axis (ellipse) or inner radius (imagcross)");
    app->add_option("--b", b, "imaginary semi-axis (ellipse) or outer radius (imagcross)");
  }

  shapes::SpectralShape build() const {
    auto need = [&](double v, const char* name) {
      if (std::isnan(v)) throw UsageError("--shape " + shape + " needs --" + name);
      return v;
    };
    if (shape == "segment") return shapes::Segment(need(mu, "mu"), need(L, "L"));
    if (shape == "disc") return shapes::Disc(need(c, "c"), need(r, "r"));
    if (shape == "ellipse") return shapes::Ellipse(need(a, "a"), need(b, "b"), need(c, "c"));
    if (shape == "imagcross") return shapes::ImagCross(need(a, "a"), need(b, "b"));
    throw UsageError("unknown shape '" + shape + "'");
  }
};

// A linear game plus the bounds its parameters are derived from.
struct GameSetup {
  games::LinearGame linear;
  games::FieldPtr field;
  numerics::Vector omega0;
  methods::Bounds bounds;
  std::string id;
};

struct GameOptions {
  ShapeOptions shape;
  bool random_game = false;
  std::size_t dim = 40;
  double cond = 100.0;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    shape.add(app, false);
    app->add_flag("--random-game", random_game, "seeded bilinear game with normal entries instead of --shape");
    app->add_option("--dim", dim, "game dimension")->check(CLI::Range(std::size_t{2}, std::size_t{4000}));
    app->add_option("--cond", cond, "sigma_max / sigma_min for --random-game");
    app->add_option("--seed", seed, "game seed");
  }

  GameSetup build() const {
    if (random_game) {
      if (dim % 2 != 0) throw UsageError("--dim must be even for bilinear games");
      const auto g = games::make_bilinear(static_cast<Eigen::Index>(dim / 2), cond, seed);
      const auto sv = numerics::singular_values(g.payoff);
      return {g.to_linear(), games::make_field(g), g.omega0, shapes::ImagCross(sv.back(), sv.front()),
              "bilinear-random-" + std::to_string(dim)};
    }
    if (shape.shape.empty()) throw UsageError("give --shape bounds or --random-game");
    const auto s = shape.build();
    if (const auto* x = std::get_if<shapes::ImagCross>(&s)) {
      if (dim % 2 != 0) throw UsageError("--dim must be even for bilinear games");
      const std::size_t m = dim / 2;
      std::vector<double> sigma(m);
      for (std::size_t k = 0; k < m; ++k) {
        sigma[k] = m == 1 ? x->a() : x->a() + (x->b() - x->a()) * static_cast<double>(k) / static_cast<double>(m - 1);
      }
      const auto g = games::make_bilinear_with_singular_values(sigma, seed);
      return {g.to_linear(), games::make_field(g), g.omega0, *x, "bilinear-" + shapes::describe(s)};
    }
    // Spectrum sampled on the shape boundary, hidden by an orthogonal similarity.
    const auto pts = oracle::sample_boundary(s, dim);
    const auto block = games::matrix_with_spectrum(numerics::Spectrum(pts));
    Rng rng(seed, Stream::Auxiliary);
    const auto q = games::random_orthogonal(block.rows(), rng);
    Rng xs(seed, Stream::XStar);
    Rng w0(seed, Stream::Omega0);
    numerics::Vector star(block.rows());
    numerics::Vector start(block.rows());
    for (Eigen::Index i = 0; i < star.size(); ++i) star(i) = xs.normal();
    for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = w0.normal();
    games::LinearGame lg(numerics::RealMatrix(games::DenseMatrix(q * block.dense() * q.transpose())), star);
    methods::Bounds bounds = std::visit([](const auto& v) -> methods::Bounds { return v; }, s);
    return {lg, games::make_field(lg), start, bounds, "linear-" + shapes::describe(s)};
  }
};

methods::Family parse_family_or_usage(const std::string& name) {
  const auto f = methods::parse_family(name);
  if (!f) throw UsageError("unknown family '" + name + "'");
  return *f;
}

methods::MethodSpec with_overrides(methods::MethodSpec spec, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const auto keys = methods::hyper_keys(spec.family);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError(std::string(methods::family_name(spec.family)) + " has no hyperparameter '" + key + "'");
    }
    try {
      spec.hyper[key] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--set " + key + ": not a number");
    }
  }
  return methods::MethodSpec(spec.family, spec.hyper);
}

std::size_t auto_iters(double predicted) {
  if (!(predicted < 1.0) || !(predicted > 0.0)) return 1000;
  const double n = std::ceil(std::log(1e-9) / std::log(predicted));
  return static_cast<std::size_t>(std::clamp(n, 60.0, 100000.0));
}

// Fits over the second half of the positive prefix of the trace.
double fit_tail(const std::vector<double>& d) {
  std::size_t last = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
      last = i;
      break;
    }
  }
  if (last < 3) return NAN;
  return methods::fit_rate(d, {(last - 1) / 2, last - 1});
}

void print_hyper(std::ostream& out, const methods::MethodSpec& spec) {
  out << "family=" << methods::family_name(spec.family) << "\n";
  for (const auto& [k, v] : spec.hyper) out << k << "=" << fmt(v, "%.17g") << "\n";
  out << "f_evals_per_iter=" << spec.f_evals << "\n";
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral-shape analysis and solvers for smooth games", "spectral-games"};
  app.require_subcommand(1);

  auto* acf_cmd = app.add_subcommand("acf", "asymptotic convergence factor and optimal momentum of a shape");
  ShapeOptions acf_shape;
  acf_shape.add(acf_cmd, true);

  auto* oracle_cmd = app.add_subcommand("oracle", "Lawson minimax polynomial on a boundary grid");
  ShapeOptions oracle_shape;
  oracle_shape.add(oracle_cmd, true);
  std::size_t degree = 0;
  std::size_t grid = 0;
  std::size_t max_iters = oracle::kDefaultMaxIters;
  oracle_cmd->add_option("--degree,-t", degree, "polynomial degree")->required()->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--grid,-n", grid, "boundary points (default max(64, 50 t))");
  oracle_cmd->add_option("--max-iters", max_iters, "Lawson iteration cap");

  auto* rate_cmd = app.add_subcommand("rate", "predicted and fitted rate of a method on a game");
  GameOptions rate_game;
  rate_game.add(rate_cmd);
  std::string rate_family;
  std::size_t rate_iters = 0;
  std::vector<std::string> rate_sets;
  rate_cmd->add_option("--family", rate_family, "method family")->required();
  rate_cmd->add_option("--iters", rate_iters, "iterations for the fit (default from the predicted rate)");
  rate_cmd->add_option("--set", rate_sets, "hyperparameter override key=value");

  auto* solve_cmd = app.add_subcommand("solve", "run one method and write its distance trace as CSV");
  GameOptions solve_game;
  solve_game.add(solve_cmd);
  std::string solve_family;
  std::size_t solve_iters = 1000;
  std::string solve_out;
  std::vector<std::string> solve_sets;
  solve_cmd->add_option("--family", solve_family, "method family")->required();
  solve_cmd->add_option("--iters", solve_iters, "iterations")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", solve_out, "CSV path (default stdout)");
  solve_cmd->add_option("--set", solve_sets, "hyperparameter override key=value");

  auto* bench_cmd = app.add_subcommand("bench", "bilinear-game benchmark: one CSV, sidecar and plot per dimension");
  std::vector<std::size_t> bench_dims;
  double bench_cond = NAN;
  std::size_t bench_iters = 0;
  std::uint64_t bench_seed = 0;
  std::string bench_out, bench_out_dir, bench_config, bench_methods, from_meta;
  std::vector<std::string> bench_sets;
  bool bench_plot = false;
  auto* seed_opt = bench_cmd->add_option("--seed", bench_seed, "game seed (default $SPECTRAL_GAMES_SEED or 0)");
  bench_cmd->add_option("--dim", bench_dims, "dimension d = 2m, repeatable");
  bench_cmd->add_option("--cond", bench_cond, "sigma_max / sigma_min");
  bench_cmd->add_option("--iters", bench_iters, "iterations");
  bench_cmd->add_option("--out", bench_out, "CSV path when a single dimension is run");
  bench_cmd->add_option("--out-dir", bench_out_dir, "directory for xp-<d>.csv files");
  bench_cmd->add_option("--config", bench_config, "key = value config file; flags override it");
  bench_cmd->add_option("--methods", bench_methods, "comma-separated columns");
  bench_cmd->add_option("--set", bench_sets, "override column.hyper=value");
  bench_cmd->add_flag("--plot", bench_plot, "also write an SVG per dimension");
  bench_cmd->add_option("--from-meta", from_meta, "replay a run from its .meta.json sidecar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (acf_cmd->parsed()) {
      const auto shape = acf_shape.build();
      out << "shape=" << shapes::describe(shape) << "\n";
      out << "rho=" << fmt(shapes::acf(shape)) << "\n";
      if (!std::holds_alternative<shapes::ImagCross>(shape)) {
        const auto p = shapes::optimal_momentum(shape);
        out << "alpha=" << fmt(p.alpha) << "\nbeta=" << fmt(p.beta) << "\n";
      }
      return 0;
    }

    if (oracle_cmd->parsed()) {
      const auto shape = oracle_shape.build();
      const std::size_t n = grid == 0 ? oracle::default_grid_size(degree) : grid;
      const auto pts = oracle::sample_boundary(shape, n);
      const auto res = oracle::lawson_minimax(pts, degree, max_iters);
      out << "shape=" << shapes::describe(shape) << "\n";
      out << "degree=" << degree << "\ngrid=" << res.grid_size << "\n";
      out << "max_abs=" << fmt(res.max_abs, "%.10g") << "\n";
      out << "acf_estimate=" << fmt(res.acf_estimate, "%.10g") << "\n";
      out << "lower_bound=" << fmt(res.lower_bound, "%.10g") << "\n";
      out << "iterations=" << res.iterations_used << "\nconverged=" << (res.converged ? "true" : "false") << "\n";
      if (!std::holds_alternative<shapes::ImagCross>(shape)) out << "closed_form=" << fmt(shapes::acf(shape), "%.10g") << "\n";
      out << "coeffs=";
      for (std::size_t k = 0; k < res.poly.coeffs().size(); ++k) {
        out << (k ? "," : "") << fmt(res.poly.coeffs()[k], "%.17g");
      }
      out << "\n";
      return 0;
    }

    if (rate_cmd->parsed()) {
      const auto family = parse_family_or_usage(rate_family);
      const auto setup = rate_game.build();
      const auto spec = with_overrides(methods::derive_params(family, setup.bounds), rate_sets);
      const double predicted = methods::predicted_rate(spec, setup.linear);
      const std::size_t iters = rate_iters ? rate_iters : auto_iters(predicted);
      const auto trace = methods::run(spec, setup.field, setup.omega0, iters, setup.id, rate_game.seed);
      print_hyper(out, spec);
      out << "game=" << setup.id << "\n";
      out << "predicted=" << fmt(predicted, "%.10g") << "\n";
      out << "predicted_per_eval=" << fmt(std::pow(predicted, 1.0 / spec.f_evals), "%.10g") << "\n";
      out << "iters=" << iters << "\n";
      out << "fitted=" << fmt(trace.diverged ? INFINITY : fit_tail(trace.distances), "%.10g") << "\n";
      out << "diverged=" << (trace.diverged ? "true" : "false") << "\n";
      return 0;
    }

    if (solve_cmd->parsed()) {
      const auto family = parse_family_or_usage(solve_family);
      const auto setup = solve_game.build();
      const auto spec = with_overrides(methods::derive_params(family, setup.bounds), solve_sets);
      const auto trace = methods::run(spec, setup.field, setup.omega0, solve_iters, setup.id, solve_game.seed);
      bench::BenchTable table;
      table.header = {"iteration", std::string(methods::family_name(family))};
      for (std::size_t t = 0; t < trace.distances.size(); ++t) {
        table.rows.push_back({static_cast<double>(t), trace.distances[t]});
      }
      const std::string csv = bench::write_csv(table);
      if (solve_out.empty()) {
        out << csv;
      } else {
        bench::write_file(solve_out, csv);
        out << "wrote " << solve_out << "\n";
      }
      if (trace.diverged) err << "warning: run diverged at iteration " << trace.distances.size() - 1 << "\n";
      return 0;
    }

    if (bench_cmd->parsed()) {
      std::vector<std::pair<bench::DimResult, std::filesystem::path>> results;
      bool plot = bench_plot;
      if (!from_meta.empty()) {
        auto r = bench::rerun_from_sidecar(from_meta);
        std::filesystem::path csv = bench_out.empty() ? bench::csv_path(bench_out_dir.empty() ? "." : bench_out_dir, r.dim)
                                                      : std::filesystem::path(bench_out);
        results.emplace_back(std::move(r), csv);
      } else {
        bench::BenchConfig cfg;
        cfg.seed = bench::default_seed();
        try {
          if (!bench_config.empty()) cfg = bench::load_config(bench_config, cfg);
          if (!bench_dims.empty()) cfg.dims = bench_dims;
          if (!std::isnan(bench_cond)) cfg.cond = bench_cond;
          if (bench_iters) cfg.iters = bench_iters;
          if (seed_opt->count() > 0) cfg.seed = bench_seed;
          if (!bench_methods.empty()) bench::apply_setting(cfg, "methods", bench_methods);
          for (const auto& s : bench_sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects column.hyper=value");
            bench::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
          }
          if (!bench_out_dir.empty()) cfg.output_dir = bench_out_dir;
          plot = plot || cfg.emit_plot;
          cfg.validate();
        } catch (const Error& e) {
          if (e.code() == ErrorCode::Io) throw;
          throw UsageError(e.what());
        }
        if (!bench_out.empty() && cfg.dims.size() != 1) throw UsageError("--out needs exactly one --dim; use --out-dir");
        for (auto d : cfg.dims) {
          auto r = bench::run_dimension(cfg, d);
          std::filesystem::path csv = bench_out.empty() ? bench::csv_path(cfg.output_dir, d) : std::filesystem::path(bench_out);
          results.emplace_back(std::move(r), csv);
        }
      }
      for (const auto& [r, csv] : results) {
        bench::write_outputs(r, csv, plot);
        out << "d=" << r.dim << " sigma_min=" << fmt(r.sigma_min) << " sigma_max=" << fmt(r.sigma_max)
            << " wall=" << fmt(r.wall_seconds, "%.2f") << "s -> " << csv.string() << "\n";
        for (std::size_t k = 0; k < r.columns.size(); ++k) {
          const auto& c = r.columns[k];
          std::size_t hit = 0;
          for (const auto& row : r.table.rows) {
            if (row[k + 1] <= 1e-6) {
              hit = static_cast<std::size_t>(row[0]);
              break;
            }
          }
          out << "  " << c.method.column << ": final=" << fmt(r.table.rows.back()[k + 1], "%.3e")
              << " first<=1e-6=" << (hit ? std::to_string(hit) : std::string("never"));
          if (c.diverged) out << " diverged";
          if (!c.error.empty()) out << " error=\"" << c.error << "\"";
          out << "\n";
        }
      }
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace spectral_games::cli
