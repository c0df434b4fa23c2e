#include "aoisched/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoisched/baselines.hpp"
#include "aoisched/config_io.hpp"
#include "aoisched/mc.hpp"
#include "aoisched/mgf.hpp"
#include "aoisched/nots.hpp"
#include "aoisched/sams.hpp"
#include "aoisched/sim.hpp"

namespace aoi {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Options {
  std::string config_path;
  std::string format = "text";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  int ms = 0;
  std::size_t ms_n = 0;
  bool dump_config = false;

  std::string pattern;
  std::string method = "mgf";
  std::uint64_t cycles = 100'000;
  std::optional<std::uint64_t> warmup;
  std::size_t batches = 100;
  std::string eta;

  std::uint64_t alpha = kDefaultNotsResolution;
  int variant = 3;
  bool grouped = false;
  std::size_t max_size = kDefaultIsMaxSize;
  double grid = kDefaultGridStep;
  std::string output;

  std::string target = "drop_prob";
  std::size_t source = 1;
  std::string values;
  std::string methods = "rr,nots";
  bool no_timing = false;
};

SystemConfig resolve_config(const Options& o) {
  if (!o.config_path.empty() && o.ms != 0)
    throw ConfigError("--config and --ms are mutually exclusive");
  if (!o.config_path.empty()) return load_config(o.config_path);
  if (o.ms != 0) {
    if (o.ms_n == 0) throw ConfigError("--ms needs --n");
    return scenario_config(o.ms, o.ms_n);
  }
  throw ConfigError("no configuration given (use --config PATH or --ms K --n N)");
}

ojson per_source_json(const AoiReport& r) {
  ojson arr = ojson::array();
  for (std::size_t n = 0; n < r.per_source_aoi.size(); ++n) {
    ojson s;
    s["source"] = n + 1;
    s["aoi"] = r.per_source_aoi[n];
    if (n < r.gap_mean.size()) s["gap_mean"] = r.gap_mean[n];
    if (n < r.gap_second.size()) s["gap_second"] = r.gap_second[n];
    if (n < r.gap_scov.size()) s["gap_scov"] = r.gap_scov[n];
    arr.push_back(s);
  }
  return arr;
}

void render_text(const ojson& doc, std::ostream& out) {
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array() && !value.empty() && value.front().is_object()) {
      for (const auto& row : value) {
        out << key;
        for (const auto& [k, v] : row.items())
          out << ' ' << k << '=' << (v.is_number_float() ? fmt(v.get<double>()) : v.dump());
        out << '\n';
      }
    } else if (value.is_array()) {
      out << key << ':';
      for (const auto& v : value)
        out << ' ' << (v.is_number_float() ? fmt(v.get<double>()) : v.dump());
      out << '\n';
    } else if (value.is_number_float()) {
      out << key << ": " << fmt(value.get<double>()) << '\n';
    } else if (value.is_string()) {
      out << key << ": " << value.get<std::string>() << '\n';
    } else {
      out << key << ": " << value.dump() << '\n';
    }
  }
}

void emit(const Options& o, const ojson& doc, std::ostream& out) {
  if (o.format == "json")
    out << doc.dump(2) << '\n';
  else
    render_text(doc, out);
  if (!o.output.empty()) {
    std::ofstream file(o.output);
    if (!file) throw ConfigError("cannot write " + o.output);
    file << doc.dump(2) << '\n';
  }
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "'");
    }
  }
  return out;
}

AoiReport evaluate(const SystemConfig& config, const Pattern& pattern, const Options& o) {
  const EvalMethod method = parse_method(o.method);
  switch (method) {
    case EvalMethod::mc:
      return mc_report(config, pattern);
    case EvalMethod::mgf:
      return mgf_report(config, pattern);
    case EvalMethod::closed2:
      return closed2_report(config, pattern_to_placement(pattern));
    case EvalMethod::rr: {
      occurrence_counts(pattern, config.size());
      if (config.size() != 2 || pattern.size() != 2)
        throw InfeasibleError("the rr method evaluates the two-source round robin pattern only");
      AoiReport r = closed2_report(config, PlacementVector{{1}});
      r.method = EvalMethod::rr;
      r.weighted_aoi = rr_aoi(config);
      return r;
    }
    case EvalMethod::sim: {
      SimSpec spec;
      spec.schedule = pattern;
      spec.horizon = o.cycles;
      spec.warmup = o.warmup;
      spec.seed = o.seed;
      spec.batches = o.batches;
      const SimReport s = simulate(config, spec);
      AoiReport r;
      r.method = EvalMethod::sim;
      r.per_source_aoi = s.per_source_aoi;
      r.gap_mean = s.gap_mean;
      r.gap_second = s.gap_second;
      for (std::size_t n = 0; n < s.gap_mean.size(); ++n)
        r.gap_scov.push_back((s.gap_second[n] - s.gap_mean[n] * s.gap_mean[n]) /
                             (s.gap_mean[n] * s.gap_mean[n]));
      r.weighted_aoi = s.weighted_aoi;
      return r;
    }
  }
  throw ConfigError("unknown method");
}

ojson report_json(const std::string& label, const AoiReport& r) {
  ojson doc;
  doc["method"] = label;
  doc["weighted_aoi"] = r.weighted_aoi;
  doc["per_source"] = per_source_json(r);
  return doc;
}

ojson pattern_json(const std::string& algorithm, const Pattern& p, const AoiReport& r) {
  ojson doc;
  doc["algorithm"] = algorithm;
  doc["pattern"] = format_pattern(p);
  doc["pattern_size"] = p.size();
  doc["weighted_aoi"] = r.weighted_aoi;
  doc["per_source"] = per_source_json(r);
  return doc;
}

// Outcome of one method in a sweep cell.
struct Cell {
  std::optional<double> aoi;
  std::optional<std::size_t> size;
  double seconds = 0.0;
  std::optional<Pattern> pattern;
  std::string warning;
};

Cell run_method(const std::string& method, const SystemConfig& config, const Options& o,
                const std::optional<Pattern>& previous) {
  Cell cell;
  if (method == "rr") {
    const auto res = rr_build(config);
    cell.aoi = res.report.weighted_aoi;
    cell.pattern = res.pattern;
  } else if (method == "nots") {
    const auto res = nots_build(config, o.alpha);
    cell.aoi = res.weighted_aoi;
    cell.pattern = res.pattern();
  } else if (method == "sams1" || method == "sams2" || method == "sams3" || method == "sams3g") {
    const int level = method[4] - '0';
    const auto res = sams_build(config, SamsConfig::variant(level, method == "sams3g"));
    cell.aoi = res.report.weighted_aoi;
    cell.pattern = res.pattern;
  } else if (method == "is") {
    const auto res = is_build(config, o.max_size);
    cell.aoi = res.report.weighted_aoi;
    cell.pattern = res.pattern;
  } else if (method == "pgaw") {
    cell.aoi = pgaw_optimize(config, o.grid).report.weighted_aoi;
  } else if (method == "sim-check") {
    if (!previous) throw ConfigError("sim-check needs a pattern-producing method before it");
    SimSpec spec;
    spec.schedule = *previous;
    spec.horizon = o.cycles;
    spec.warmup = o.warmup;
    spec.seed = o.seed;
    spec.batches = o.batches;
    cell.aoi = simulate(config, spec).weighted_aoi;
    cell.pattern = previous;
  }
  if (cell.pattern) cell.size = cell.pattern->size();
  return cell;
}

SystemConfig with_value(const SystemConfig& base, const std::string& target, std::size_t source,
                        double value) {
  std::vector<SourceParams> raw(base.sources().begin(), base.sources().end());
  if (source == 0 || source > raw.size())
    throw ConfigError("sweep source " + std::to_string(source) + " out of range");
  auto& src = raw[source - 1];
  if (target == "drop_prob")
    src.drop_prob = value;
  else if (target == "weight")
    src.weight = value;
  else if (target == "mean_service")
    src.mean_service = value;
  else if (target == "scov")
    src.scov = value;
  else
    throw ConfigError("unknown sweep target '" + target + "'");
  return validate_config(std::move(raw));
}

const std::vector<std::string> kSweepMethods = {"rr",     "nots", "sams1", "sams2",    "sams3",
                                                "sams3g", "is",   "pgaw",  "sim-check"};

int run_sweep(const Options& o, const SystemConfig& base, std::ostream& out, std::ostream& err) {
  const std::vector<double> values = parse_range(o.values);
  std::vector<std::string> methods;
  {
    std::stringstream ss(o.methods);
    std::string m;
    while (std::getline(ss, m, ',')) {
      if (std::find(kSweepMethods.begin(), kSweepMethods.end(), m) == kSweepMethods.end())
        throw ConfigError("unknown sweep method '" + m + "'");
      methods.push_back(m);
    }
  }
  if (methods.empty()) throw ConfigError("sweep needs at least one method");

  std::vector<SystemConfig> configs;
  for (double v : values) configs.push_back(with_value(base, o.target, o.source, v));

  std::vector<std::vector<Cell>> cells(values.size(), std::vector<Cell>(methods.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      std::optional<Pattern> previous;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto start = std::chrono::steady_clock::now();
        try {
          cells[i][m] = run_method(methods[m], configs[i], o, previous);
        } catch (const std::exception& e) {
          cells[i][m].warning = e.what();
        }
        cells[i][m].seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cells[i][m].pattern) previous = cells[i][m].pattern;
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(o.jobs, 1, std::max<std::size_t>(values.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) throw ConfigError("cannot write " + o.output);
  }
  std::ostream& csv = o.output.empty() ? out : file;
  csv << "sweep_value,method,weighted_aoi,pattern_size,seconds\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const Cell& c = cells[i][m];
      if (!c.warning.empty())
        err << "warning: " << methods[m] << " at " << fmt(values[i], 10) << ": " << c.warning << '\n';
      csv << fmt(values[i], 10) << ',' << methods[m] << ',' << (c.aoi ? fmt(*c.aoi) : "") << ','
          << (c.size ? std::to_string(*c.size) : "") << ','
          << (o.no_timing ? "" : fmt(c.seconds, 6)) << '\n';
    }
  }
  return 0;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  const auto parts = [&] {
    std::vector<std::string> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(item);
    return p;
  }();
  if (parts.size() == 1) return parse_doubles(parts[0]);
  if (parts.size() != 3) throw ConfigError("range must be start:step:stop");
  const double start = parse_doubles(parts[0]).at(0);
  const double step = parse_doubles(parts[1]).at(0);
  const double stop = parse_doubles(parts[2]).at(0);
  if (!(step > 0.0)) throw ConfigError("range step must be positive");
  if (stop < start) throw ConfigError("range stop must not precede start");
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e6) throw ConfigError("range has too many values");
  std::vector<double> values;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(count); ++i) {
    // Snap to 12 significant digits so 0.1 * 3 prints as 0.3.
    const double v = start + static_cast<double>(i) * step;
    values.push_back(std::stod(fmt(v, 12)));
  }
  return values;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cyclic schedulers for weighted age of information", "aoisched"};
  app.fallthrough();
  app.add_option("--config", o.config_path, "JSON config file");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--jobs", o.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--ms", o.ms, "Built-in scenario MS1..MS4")->check(CLI::Range(1, 4));
  app.add_option("--n", o.ms_n, "Number of sources for --ms");
  app.add_flag("--dump-config", o.dump_config, "Print the resolved config as JSON");

  auto* eval = app.add_subcommand("eval", "Evaluate a pattern");
  eval->add_option("--pattern", o.pattern, "Comma-separated 1-based pattern")->required();
  eval->add_option("--method", o.method, "mc, mgf, closed2, rr or sim")
      ->check(CLI::IsMember({"mc", "mgf", "closed2", "rr", "sim"}));
  eval->add_option("--cycles", o.cycles, "Simulated pattern rounds");
  eval->add_option("--warmup", o.warmup, "Discarded rounds");

  auto* build = app.add_subcommand("build", "Construct a schedule");
  build->require_subcommand(1);
  build->add_option("--output", o.output, "Also write the JSON report here");
  auto* b_rr = build->add_subcommand("rr", "Round robin");
  auto* b_nots = build->add_subcommand("nots", "Two-source near-optimal scheduler");
  b_nots->add_option("--alpha", o.alpha, "Ratio scan resolution")->check(CLI::PositiveNumber);
  auto* b_sams = build->add_subcommand("sams", "Scalable scheduler");
  b_sams->add_option("--variant", o.variant, "1, 2 or 3")->check(CLI::Range(1, 3));
  b_sams->add_flag("--grouped", o.grouped, "Grouped packet spreading");
  auto* b_is = build->add_subcommand("is", "Insertion search");
  b_is->add_option("--max-size", o.max_size, "Largest pattern explored");
  auto* b_pgaw = build->add_subcommand("pgaw", "Optimized probabilistic policy");
  b_pgaw->add_option("--grid", o.grid, "Simplex grid step");
  for (auto* sub : {b_rr, b_nots, b_sams, b_is, b_pgaw}) sub->fallthrough();

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep to CSV");
  sweep->add_option("--target", o.target, "drop_prob, weight, mean_service or scov");
  sweep->add_option("--source", o.source, "1-based source whose parameter is swept");
  sweep->add_option("--values", o.values, "start:step:stop or a comma list")->required();
  sweep->add_option("--methods", o.methods, "Comma list of methods");
  sweep->add_option("--output", o.output, "CSV path (default stdout)");
  sweep->add_flag("--no-timing", o.no_timing, "Leave the seconds column empty");
  sweep->add_option("--alpha", o.alpha, "NOTS resolution");
  sweep->add_option("--max-size", o.max_size, "IS maximum pattern size");
  sweep->add_option("--grid", o.grid, "P-GAW grid step");
  sweep->add_option("--cycles", o.cycles, "sim-check rounds");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo age simulation");
  auto* pat = simulate_cmd->add_option("--pattern", o.pattern, "Cyclic pattern");
  auto* eta = simulate_cmd->add_option("--eta", o.eta, "P-GAW selection probabilities");
  pat->excludes(eta);
  simulate_cmd->add_option("--cycles", o.cycles, "Rounds (slots for --eta)");
  simulate_cmd->add_option("--warmup", o.warmup, "Discarded rounds");
  simulate_cmd->add_option("--batches", o.batches, "Batch-means batches");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const SystemConfig config = resolve_config(o);
    if (o.dump_config) {
      out << dump_config_json(config);
      return 0;
    }

    if (*eval) {
      const Pattern pattern = parse_pattern(o.pattern);
      const AoiReport r = evaluate(config, pattern, o);
      ojson doc = report_json(o.method, r);
      doc["pattern"] = format_pattern(pattern);
      emit(o, doc, out);
    } else if (*b_rr) {
      const auto res = rr_build(config);
      emit(o, pattern_json("rr", res.pattern, res.report), out);
    } else if (*b_nots) {
      const auto res = nots_build(config, o.alpha);
      const Pattern p = res.pattern();
      AoiReport r = closed2_report(config, res.placement);
      ojson doc = pattern_json("nots", p, r);
      doc["alpha"] = {res.alpha_pair.first, res.alpha_pair.second};
      doc["a_bounds"] = {res.a_bounds.first, res.a_bounds.second};
      doc["candidates"] = res.candidates;
      emit(o, doc, out);
    } else if (*b_sams) {
      const auto res = sams_build(config, SamsConfig::variant(o.variant, o.grouped));
      ojson doc = pattern_json("sams", res.pattern, res.report);
      doc["variant"] = o.variant;
      doc["grouped"] = o.grouped;
      doc["iteration"] = res.iteration;
      doc["epsilon"] = res.epsilon;
      emit(o, doc, out);
    } else if (*b_is) {
      const auto res = is_build(config, o.max_size);
      emit(o, pattern_json("is", res.pattern, res.report), out);
    } else if (*b_pgaw) {
      const auto res = pgaw_optimize(config, o.grid);
      ojson doc;
      doc["algorithm"] = "pgaw";
      doc["eta"] = res.policy.eta;
      doc["grid_points"] = res.grid_points;
      doc["weighted_aoi"] = res.report.weighted_aoi;
      doc["per_source"] = per_source_json(res.report);
      emit(o, doc, out);
    } else if (*sweep) {
      return run_sweep(o, config, out, err);
    } else if (*simulate_cmd) {
      SimSpec spec;
      if (!o.eta.empty())
        spec.schedule = PgawPolicy{parse_doubles(o.eta)};
      else if (!o.pattern.empty())
        spec.schedule = parse_pattern(o.pattern);
      else
        throw ConfigError("simulate needs --pattern or --eta");
      spec.horizon = o.cycles;
      spec.warmup = o.warmup;
      spec.seed = o.seed;
      spec.batches = o.batches;
      const SimReport s = simulate(config, spec);
      ojson doc;
      doc["method"] = "sim";
      doc["seed"] = o.seed;
      doc["slots"] = s.slots_simulated;
      doc["weighted_aoi"] = s.weighted_aoi;
      doc["weighted_stderr"] = s.weighted_stderr;
      ojson rows = ojson::array();
      for (std::size_t n = 0; n < s.per_source_aoi.size(); ++n) {
        rows.push_back({{"source", n + 1},
                        {"aoi", s.per_source_aoi[n]},
                        {"stderr", s.stderr_aoi[n]},
                        {"gap_mean", s.gap_mean[n]},
                        {"gap_second", s.gap_second[n]},
                        {"busy_fraction", s.busy_fraction[n]},
                        {"updates", s.updates[n]}});
      }
      doc["per_source"] = rows;
      emit(o, doc, out);
    } else {
      err << app.help();
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace aoi
