#include "spectral_games/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spectral_games/error.hpp"
#include "spectral_games/games.hpp"

namespace spectral_games::bench {

namespace {

using methods::Family;
using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct DefaultColumn {
  const char* name;
  Family family;
};

constexpr DefaultColumn kDefaultColumns[] = {
    {"extragradient", Family::Extragradient}, {"hgd", Family::HGD},
    {"neg_momentum", Family::NegMomentumAlt}, {"omd", Family::OMD},
    {"accel_bilinear", Family::BilinearAccel}, {"accel_eg", Family::EGMomentum},
    {"accel_consensus", Family::ConsensusMomentum},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": not an unsigned integer: '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::InvalidArgument, std::string(what) + ": not a boolean: '" + std::string(s) + "'");
}

BenchMethod method_for_column(std::string_view column) {
  const auto family = column_family(column);
  if (!family) throw Error(ErrorCode::UnsupportedFamily, "unknown method column '" + std::string(column) + "'");
  return {std::string(column), *family, {}};
}

void format_double(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
  } else if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
}

bool same_bits(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::memcmp(&a, &b, sizeof a) == 0;
}

// Bounds handed to derive_params. A cond = 1 game has sigma_min = sigma_max
// up to rounding; the cross needs a < b, so the upper end is nudged. The
// consensus tau gate is skipped: it rejects gamma = L although the cover
// still holds the spectrum.
shapes::ImagCross game_bounds(double sigma_min, double sigma_max) {
  return shapes::ImagCross(sigma_min, std::max(sigma_max, sigma_min * (1.0 + 1e-9)));
}

struct Job {
  BenchMethod method;
  std::optional<methods::MethodSpec> spec;
  std::string error;
};

DimResult run_jobs(std::vector<Job> jobs, const games::BilinearGame& game, std::size_t dim,
                   double cond, std::uint64_t seed, std::size_t iters, double smin, double smax) {
  const auto start = std::chrono::steady_clock::now();
  const games::FieldPtr field = games::make_field(game);
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  std::vector<ColumnRun> runs(jobs.size());
  std::vector<std::vector<double>> columns(jobs.size(), std::vector<double>(iters + 1, kNaN));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const Job& job = jobs[idx];
    ColumnRun& run = runs[idx];
    run.method = job.method;
    run.spec = job.spec;
    run.error = job.error;
    if (!job.spec) {
      run.diverged = true;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto trace = methods::run(*job.spec, field, game.omega0, iters, "bilinear-" + std::to_string(dim), seed);
      std::vector<double>& col = columns[idx];
      std::copy(trace.distances.begin(), trace.distances.end(), col.begin());
      std::fill(col.begin() + static_cast<std::ptrdiff_t>(trace.distances.size()), col.end(), kInf);
      run.diverged = trace.diverged;
    } catch (const std::exception& e) {
      run.error = e.what();
      run.diverged = true;
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  DimResult result;
  result.dim = dim;
  result.cond = cond;
  result.seed = seed;
  result.iters = iters;
  result.sigma_min = smin;
  result.sigma_max = smax;
  result.table.header.push_back("iteration");
  for (const auto& job : jobs) result.table.header.push_back(job.method.column);
  result.table.rows.assign(iters + 1, std::vector<double>(jobs.size() + 1, 0.0));
  for (std::size_t t = 0; t <= iters; ++t) {
    auto& row = result.table.rows[t];
    row[0] = static_cast<double>(t);
    for (std::size_t k = 0; k < jobs.size(); ++k) row[k + 1] = columns[k][t];
  }
  result.columns = std::move(runs);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::vector<BenchMethod> default_methods() {
  std::vector<BenchMethod> out;
  for (const auto& c : kDefaultColumns) out.push_back({c.name, c.family, {}});
  return out;
}

std::optional<Family> column_family(std::string_view column) {
  for (const auto& c : kDefaultColumns) {
    if (column == c.name) return c.family;
  }
  return methods::parse_family(column);
}

void BenchConfig::validate() const {
  if (dims.empty()) throw Error(ErrorCode::InvalidArgument, "no dimensions given");
  for (auto d : dims) {
    if (d < 4 || d % 2 != 0) {
      throw Error(ErrorCode::InvalidArgument, "dimension " + std::to_string(d) + " must be even and at least 4");
    }
  }
  if (iters == 0) throw Error(ErrorCode::InvalidArgument, "iters must be at least 1");
  if (!(cond >= 1.0) || !std::isfinite(cond)) throw Error(ErrorCode::InvalidArgument, "cond must be >= 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "method list is empty");
}

std::uint64_t default_seed() {
  const char* env = std::getenv("SPECTRAL_GAMES_SEED");
  if (env == nullptr) return 0;
  try {
    return parse_u64(env, "SPECTRAL_GAMES_SEED");
  } catch (const Error&) {
    return 0;
  }
}

void apply_setting(BenchConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "dims") {
    cfg.dims.clear();
    for (auto part : split(value, ',')) cfg.dims.push_back(parse_u64(part, "dims"));
  } else if (key == "cond") {
    cfg.cond = parse_double(value, "cond");
  } else if (key == "iters") {
    cfg.iters = parse_u64(value, "iters");
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, "seed");
  } else if (key == "methods") {
    std::vector<BenchMethod> chosen;
    for (auto part : split(value, ',')) {
      BenchMethod m = method_for_column(trim(part));
      // Keep overrides already set for a column that stays.
      for (const auto& old : cfg.methods) {
        if (old.column == m.column) m.overrides = old.overrides;
      }
      chosen.push_back(std::move(m));
    }
    cfg.methods = std::move(chosen);
  } else if (key == "output_dir") {
    cfg.output_dir = std::string(value);
  } else if (key == "emit_plot") {
    cfg.emit_plot = parse_bool(value, "emit_plot");
  } else if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    const auto column = key.substr(0, dot);
    const std::string hyper(key.substr(dot + 1));
    auto it = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                           [&](const BenchMethod& m) { return m.column == column; });
    if (it == cfg.methods.end()) {
      throw Error(ErrorCode::InvalidArgument, "override for a column not in the method list: '" + std::string(key) + "'");
    }
    const auto keys = methods::hyper_keys(it->family);
    if (std::find(keys.begin(), keys.end(), hyper) == keys.end()) {
      throw Error(ErrorCode::InvalidArgument, std::string(column) + " has no hyperparameter '" + hyper + "'");
    }
    it->overrides[hyper] = parse_double(value, key);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
  }
}

BenchConfig load_config(const std::filesystem::path& path, BenchConfig base) {
  const std::string text = read_file(path);
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

bool bitwise_equal(const BenchTable& a, const BenchTable& b) {
  if (a.header != b.header || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t j = 0; j < a.rows[i].size(); ++j) {
      if (!same_bits(a.rows[i][j], b.rows[i][j])) return false;
    }
  }
  return true;
}

DimResult run_dimension(const BenchConfig& cfg, std::size_t dim) {
  const auto m = static_cast<Eigen::Index>(dim / 2);
  const games::BilinearGame game = games::make_bilinear(m, cfg.cond, cfg.seed);
  const auto sv = numerics::singular_values(game.payoff);
  const double smin = sv.back();
  const double smax = sv.front();
  std::vector<Job> jobs;
  for (const auto& method : cfg.methods) {
    Job job{method, std::nullopt, {}};
    try {
      methods::MethodSpec spec = methods::derive_params(method.family, game_bounds(smin, smax), methods::TauCheck::Skip);
      for (const auto& [k, v] : method.overrides) spec.hyper[k] = v;
      job.spec = methods::MethodSpec(spec.family, spec.hyper);
    } catch (const std::exception& e) {
      job.error = e.what();
    }
    jobs.push_back(std::move(job));
  }
  return run_jobs(std::move(jobs), game, dim, cfg.cond, cfg.seed, cfg.iters, smin, smax);
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  BenchResult result;
  for (auto d : cfg.dims) result.dims.push_back(run_dimension(cfg, d));
  return result;
}

std::string sidecar_json(const DimResult& r) {
  json meta;
  meta["dim"] = r.dim;
  meta["m"] = r.dim / 2;
  meta["cond"] = r.cond;
  meta["seed"] = r.seed;
  meta["iters"] = r.iters;
  meta["sigma_min"] = r.sigma_min;
  meta["sigma_max"] = r.sigma_max;
  meta["wall_seconds"] = r.wall_seconds;
  json cols = json::array();
  for (const auto& c : r.columns) {
    json col;
    col["column"] = c.method.column;
    col["family"] = std::string(methods::family_name(c.method.family));
    if (c.spec) {
      col["hyper"] = c.spec->hyper;
      col["f_evals_per_iter"] = c.spec->f_evals;
    } else {
      col["hyper"] = nullptr;
    }
    col["overrides"] = c.method.overrides;
    col["diverged"] = c.diverged;
    col["error"] = c.error;
    col["seconds"] = c.seconds;
    cols.push_back(std::move(col));
  }
  meta["methods"] = std::move(cols);
  return meta.dump(2) + "\n";
}

DimResult rerun_from_sidecar(const std::filesystem::path& sidecar) {
  json meta;
  try {
    meta = json::parse(read_file(sidecar));
    const auto dim = meta.at("dim").get<std::size_t>();
    const auto cond = meta.at("cond").get<double>();
    const auto seed = meta.at("seed").get<std::uint64_t>();
    const auto iters = meta.at("iters").get<std::size_t>();
    const games::BilinearGame game = games::make_bilinear(static_cast<Eigen::Index>(dim / 2), cond, seed);
    std::vector<Job> jobs;
    for (const auto& col : meta.at("methods")) {
      const auto column = col.at("column").get<std::string>();
      const auto family = methods::parse_family(col.at("family").get<std::string>());
      if (!family) throw Error(ErrorCode::UnsupportedFamily, "unknown family in sidecar");
      Job job{{column, *family, col.value("overrides", std::map<std::string, double>{})}, std::nullopt,
              col.value("error", std::string{})};
      if (!col.at("hyper").is_null()) {
        job.spec = methods::MethodSpec(*family, col.at("hyper").get<std::map<std::string, double>>());
      }
      jobs.push_back(std::move(job));
    }
    return run_jobs(std::move(jobs), game, dim, cond, seed, iters, meta.at("sigma_min").get<double>(),
                    meta.at("sigma_max").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, sidecar.string() + ": malformed sidecar: " + e.what());
  }
}

std::string write_csv(const BenchTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j > 0) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      format_double(out, row[j]);
    }
    out += '\n';
  }
  return out;
}

BenchTable parse_csv(std::string_view text) {
  BenchTable table;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::Io, "empty CSV");
  for (auto h : split(lines[0], ',')) table.header.emplace_back(h);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::Io, "CSV row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                                     " cells, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw Error(ErrorCode::Io, "CSV row " + std::to_string(i) + ": bad number '" + std::string(c) + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string render_svg(const DimResult& r) {
  const auto& t = r.table;
  if (t.rows.empty() || t.header.size() < 2) throw Error(ErrorCode::InvalidArgument, "nothing to plot");
  constexpr double W = 800, H = 500, left = 80, right = 180, top = 40, bottom = 60;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  double lo = kInf;
  double hi = -kInf;
  for (const auto& row : t.rows) {
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (std::isfinite(row[j]) && row[j] > 0.0) {
        lo = std::min(lo, row[j]);
        hi = std::max(hi, row[j]);
      }
    }
  }
  if (!(lo <= hi)) {
    lo = 1e-1;
    hi = 1e1;
  }
  const double ylo = std::floor(std::log10(lo));
  const double yhi = std::max(std::ceil(std::log10(hi)), ylo + 1.0);
  const double xmax = std::max(t.rows.back()[0], 1.0);
  auto X = [&](double it) { return left + pw * it / xmax; };
  auto Y = [&](double v) { return top + ph * (yhi - std::log10(v)) / (yhi - ylo); };

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">d = " << r.dim
      << ", cond = " << r.cond << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = ylo; e <= yhi + 0.5; e += 1.0) {
    const double y = top + ph * (yhi - e) / (yhi - ylo);
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double it = xmax * k / 5.0;
    svg << "<text x=\"" << X(it) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << std::llround(it) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">iteration</text>\n";
  svg << "<text transform=\"translate(20," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">distance to the optimum</text>\n";
  for (std::size_t j = 1; j < t.header.size(); ++j) {
    const char* color = colors[(j - 1) % std::size(colors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : t.rows) {
      if (std::isfinite(row[j]) && row[j] > 0.0) svg << X(row[0]) << ',' << Y(row[j]) << ' ';
    }
    svg << "\"><title>" << t.header[j] << "</title></polyline>\n";
    const double ly = top + 16.0 * static_cast<double>(j);
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << t.header[j] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::filesystem::path csv_path(const std::filesystem::path& dir, std::size_t dim) {
  return dir / ("xp-" + std::to_string(dim) + ".csv");
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

void write_outputs(const DimResult& result, const std::filesystem::path& csv, bool plot) {
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  write_file(csv, write_csv(result.table));
  write_file(sidecar_path(csv), sidecar_json(result));
  if (plot) {
    auto svg = csv;
    svg.replace_extension(".svg");
    write_file(svg, render_svg(result));
  }
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace spectral_games::bench
