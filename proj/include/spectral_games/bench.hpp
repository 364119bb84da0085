#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_games/methods.hpp"

namespace spectral_games::bench {

/// One CSV column: a method family plus hyperparameter overrides applied on
/// top of the values derived from the game.
struct BenchMethod {
  std::string column;
  methods::Family family;
  std::map<std::string, double> overrides;
};

/// extragradient, hgd, neg_momentum, omd, accel_bilinear, accel_eg, accel_consensus.
std::vector<BenchMethod> default_methods();

/// Column name to family: the seven default names plus every family_name().
std::optional<methods::Family> column_family(std::string_view column);

struct BenchConfig {
  std::vector<std::size_t> dims{100, 500, 1000};
  double cond = 100.0;
  std::size_t iters = 1000;
  std::uint64_t seed = 0;
  std::vector<BenchMethod> methods = default_methods();
  std::filesystem::path output_dir = ".";
  bool emit_plot = false;

  /// Throws InvalidArgument on odd or zero dims, iters == 0, cond < 1 or no methods.
  void validate() const;
};

/// SPECTRAL_GAMES_SEED when set to an unsigned integer, else 0.
std::uint64_t default_seed();

/// Applies a flat `key = value` file (# starts a comment) on top of `base`.
/// Keys: dims, cond, iters, seed, methods, output_dir, emit_plot and
/// <column>.<hyperparameter>.
BenchConfig load_config(const std::filesystem::path& path, BenchConfig base);
void apply_setting(BenchConfig& cfg, std::string_view key, std::string_view value);

/// Iteration column followed by one distance column per method.
struct BenchTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

bool bitwise_equal(const BenchTable& a, const BenchTable& b);

struct ColumnRun {
  BenchMethod method;
  std::optional<methods::MethodSpec> spec;  // empty when derivation failed
  bool diverged = false;
  std::string error;
  double seconds = 0.0;
};

struct DimResult {
  std::size_t dim = 0;
  double cond = 0.0;
  std::uint64_t seed = 0;
  std::size_t iters = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  BenchTable table;
  std::vector<ColumnRun> columns;
  double wall_seconds = 0.0;
};

struct BenchResult {
  std::vector<DimResult> dims;
};

/// Runs every method on the seeded d = 2m bilinear game from a shared start.
/// Methods run in parallel; a method whose derivation throws gets an all-NaN
/// column, a diverged run is padded with inf.
DimResult run_dimension(const BenchConfig& cfg, std::size_t dim);
BenchResult run_benchmark(const BenchConfig& cfg);

/// Replays a run from its sidecar alone, using the recorded hyperparameters.
DimResult rerun_from_sidecar(const std::filesystem::path& sidecar);

std::string write_csv(const BenchTable& table);
BenchTable parse_csv(std::string_view text);

std::string sidecar_json(const DimResult& result);

/// Log-scale SVG, one polyline per method.
std::string render_svg(const DimResult& result);

std::filesystem::path csv_path(const std::filesystem::path& dir, std::size_t dim);
/// foo.csv -> foo.meta.json
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes csv, sidecar and (optionally) svg next to each other.
void write_outputs(const DimResult& result, const std::filesystem::path& csv, bool plot);
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace spectral_games::bench
