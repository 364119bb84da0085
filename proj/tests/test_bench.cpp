#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>

#include "spectral_games/bench.hpp"
#include "spectral_games/error.hpp"

using namespace spectral_games;
using namespace spectral_games::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spectral_games_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.dims = {100};
  cfg.iters = 1000;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("default columns and config validation") {
  const auto m = default_methods();
  REQUIRE(m.size() == 7);
  const std::vector<std::string> names{"extragradient", "hgd", "neg_momentum", "omd",
                                       "accel_bilinear", "accel_eg", "accel_consensus"};
  for (std::size_t i = 0; i < 7; ++i) CHECK(m[i].column == names[i]);
  CHECK(column_family("accel_eg") == methods::Family::EGMomentum);
  CHECK(column_family("momentum") == methods::Family::Momentum);
  CHECK_FALSE(column_family("sgd").has_value());

  BenchConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = BenchConfig{};
  cfg.dims = {101};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = BenchConfig{};
  cfg.iters = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = BenchConfig{};
  cfg.cond = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("settings and config files") {
  BenchConfig cfg;
  apply_setting(cfg, "dims", "10, 20");
  apply_setting(cfg, "iters", "50");
  apply_setting(cfg, "cond", "5");
  apply_setting(cfg, "methods", "extragradient,omd");
  apply_setting(cfg, "omd.eta", "0.01");
  CHECK(cfg.dims == std::vector<std::size_t>{10, 20});
  CHECK(cfg.iters == 50);
  CHECK(cfg.cond == 5.0);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[1].overrides.at("eta") == 0.01);
  CHECK_THROWS_AS(apply_setting(cfg, "bogus", "1"), Error);
  CHECK_THROWS_AS(apply_setting(cfg, "iters", "ten"), Error);
  CHECK_THROWS_AS(apply_setting(cfg, "omd.zeta", "1"), Error);

  const auto dir = scratch_dir("config");
  write_file(dir / "run.cfg", "# comment\ndims = 40\niters = 7   # trailing\nseed = 9\n\nemit_plot = true\n");
  const auto loaded = load_config(dir / "run.cfg", BenchConfig{});
  CHECK(loaded.dims == std::vector<std::size_t>{40});
  CHECK(loaded.iters == 7);
  CHECK(loaded.seed == 9);
  CHECK(loaded.emit_plot);
  write_file(dir / "bad.cfg", "dims 40\n");
  CHECK_THROWS_AS(load_config(dir / "bad.cfg", BenchConfig{}), Error);
  CHECK_THROWS_AS(load_config(dir / "missing.cfg", BenchConfig{}), Error);
}

TEST_CASE("default seed reads the environment") {
  ::setenv("SPECTRAL_GAMES_SEED", "123", 1);
  CHECK(default_seed() == 123);
  ::setenv("SPECTRAL_GAMES_SEED", "x", 1);
  CHECK(default_seed() == 0);
  ::unsetenv("SPECTRAL_GAMES_SEED");
  CHECK(default_seed() == 0);
}

TEST_CASE("csv format and round trip") {
  BenchTable t;
  t.header = {"iteration", "a", "b"};
  t.rows = {{0, 1.0 / 3.0, std::numeric_limits<double>::infinity()},
            {1, 1e-300, std::numeric_limits<double>::quiet_NaN()},
            {2, 0.1, -std::numeric_limits<double>::infinity()}};
  const auto text = write_csv(t);
  CHECK(text.rfind("iteration,a,b\n0,0.33333333333333331,inf\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto back = parse_csv(text);
  CHECK(bitwise_equal(t, back));
  CHECK(write_csv(back) == text);
  CHECK_THROWS_AS(parse_csv("iteration,a\n0,1,2\n"), Error);
  CHECK_THROWS_AS(parse_csv("iteration,a\n0,abc\n"), Error);
}

TEST_CASE("d = 100 benchmark layout, determinism and sidecar replay") {
  const auto cfg = small_config();
  const auto r1 = run_dimension(cfg, 100);
  const auto r2 = run_dimension(cfg, 100);
  CHECK(r1.table.header ==
        std::vector<std::string>{"iteration", "extragradient", "hgd", "neg_momentum", "omd", "accel_bilinear",
                                 "accel_eg", "accel_consensus"});
  CHECK(r1.table.rows.size() == 1001);
  for (std::size_t i = 0; i < r1.table.rows.size(); ++i) CHECK(r1.table.rows[i][0] == static_cast<double>(i));
  for (std::size_t j = 2; j < 8; ++j) CHECK(r1.table.rows[0][j] == r1.table.rows[0][1]);
  CHECK(write_csv(r1.table) == write_csv(r2.table));
  CHECK(r1.sigma_max / r1.sigma_min == doctest::Approx(100.0).epsilon(1e-8));

  const auto dir = scratch_dir("bench");
  const auto csv = csv_path(dir, 100);
  CHECK(csv.filename() == "xp-100.csv");
  write_outputs(r1, csv, true);
  CHECK(fs::exists(sidecar_path(csv)));
  CHECK(sidecar_path(csv).filename() == "xp-100.meta.json");
  const auto replay = rerun_from_sidecar(sidecar_path(csv));
  CHECK(write_csv(replay.table) == read_file(csv));

  const auto sidecar = read_file(sidecar_path(csv));
  for (const auto& key : {"\"seed\"", "\"cond\"", "\"iters\"", "\"sigma_min\"", "\"sigma_max\"", "\"alpha\"",
                          "\"beta\"", "\"eta\"", "\"tau\""})
    CHECK(sidecar.find(key) != std::string::npos);

  // The plot spans at least six decades.
  const auto svg = read_file(fs::path(csv).replace_extension(".svg"));
  const std::regex tick(">1e-?[0-9]+</text>");
  const auto ticks = std::distance(std::sregex_iterator(svg.begin(), svg.end(), tick), std::sregex_iterator());
  CHECK(ticks >= 7);
}

TEST_CASE("hyperparameter overrides reach the runs") {
  auto cfg = small_config();
  cfg.iters = 20;
  apply_setting(cfg, "methods", "extragradient");
  const auto base = run_dimension(cfg, 20);
  apply_setting(cfg, "extragradient.eta", "0.001");
  const auto slow = run_dimension(cfg, 20);
  REQUIRE(slow.columns.front().spec.has_value());
  CHECK(slow.columns.front().spec->get("eta") == 0.001);
  CHECK(slow.table.rows.back()[1] != base.table.rows.back()[1]);
}

TEST_CASE("isotropic games") {
  auto cfg = small_config();
  cfg.cond = 1.0;
  cfg.iters = 200;
  const auto r = run_dimension(cfg, 100);
  const auto game = games::make_bilinear(50, 1.0, cfg.seed).to_linear();
  for (std::size_t j = 1; j < r.table.header.size(); ++j) {
    CAPTURE(r.table.header[j]);
    const auto& col = r.columns[j - 1];
    REQUIRE(col.spec.has_value());
    const double rate = methods::predicted_rate(*col.spec, game);
    const double d0 = r.table.rows.front()[j];
    const double d200 = r.table.rows.back()[j];
    if (col.method.family == methods::Family::OMD || col.method.family == methods::Family::NegMomentumAlt) {
      // The fixed baseline steps contract at about 0.97 per iteration even here.
      CHECK(rate > 0.9);
      CHECK(d200 <= 10.0 * d0 * std::pow(rate, 200));
      CHECK(d200 < d0);
    } else {
      CHECK(d200 <= 1e-6);
    }
  }
}

TEST_CASE("plot of a toy result") {
  DimResult r;
  r.dim = 4;
  r.cond = 2;
  r.table.header = {"iteration", "first", "second"};
  r.table.rows = {{0, 1.0, 1.0}, {1, 0.5, 0.1}, {2, 0.25, 0.01}};
  const auto svg = render_svg(r);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find(">iteration<") != std::string::npos);
  CHECK(svg.find(">distance to the optimum<") != std::string::npos);
  CHECK(svg.find("<title>second</title>") != std::string::npos);
}
