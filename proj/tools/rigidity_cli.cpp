// Command-line front end: norm sweeps over eccentricity grids, single-orbit
// and kappa-table inspection, SVG plotting of sweep results, and cache
// maintenance.
//
// Exit codes: 0 success, 2 validation or usage error, 3 numerical
// non-convergence, 4 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <rigidity/cache.hpp>
#include <rigidity/isospectral.hpp>
#include <rigidity/svg.hpp>
#include <rigidity/sweep.hpp>

namespace {

using namespace rigidity;

std::string default_cache_dir() {
  const char* env = std::getenv("RIGIDITY_CACHE_DIR");
  return env ? env : "";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

struct SweepArgs {
  SweepConfig cfg;
  double e_min = -1.0, e_max = -1.0, e_step = -1.0;
  std::string csv_path, json_path;
  std::string config_path;
  bool quiet = false;
};

std::string strip(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_num(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not a number: " + v);
  }
  if (used != v.size())
    throw std::invalid_argument(where + ": not a number: " + v);
  return out;
}

std::vector<double> parse_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_num(strip(item), where));
  if (out.empty()) throw std::invalid_argument(where + ": empty list");
  return out;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(where + ": not a boolean: " + v);
}

// Flat key=value config file; keys are the long option names.  Applied
// after parsing, and only for options absent from the command line, so
// flags always win over the file.
void apply_config_file(const CLI::App& sweep, SweepArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw IoError("cannot read config file: " + args.config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    const std::string where =
        args.config_path + ":" + std::to_string(lineno);
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(where + ": expected key=value");
    const std::string key = strip(text.substr(0, eq));
    const std::string value = strip(text.substr(eq + 1));
    const CLI::Option* opt = sweep.get_option_no_throw("--" + key);
    if (!opt)
      throw std::invalid_argument(where + ": unknown key: " + key);
    if (opt->count() > 0) continue;

    if (key == "e") {
      if (args.cfg.e_values.empty())
        args.cfg.e_values = parse_list(value, where);
    } else if (key == "e-min") {
      args.e_min = parse_num(value, where);
    } else if (key == "e-max") {
      args.e_max = parse_num(value, where);
    } else if (key == "e-step") {
      args.e_step = parse_num(value, where);
    } else if (key == "gamma") {
      if (args.cfg.gamma_values.empty())
        args.cfg.gamma_values = parse_list(value, where);
    } else if (key == "c-cutoff") {
      args.cfg.c_cutoff = static_cast<int>(parse_num(value, where));
    } else if (key == "kappa-threshold") {
      args.cfg.kappa_threshold = parse_num(value, where);
    } else if (key == "maxq") {
      args.cfg.maxq = static_cast<int>(parse_num(value, where));
    } else if (key == "q-cap") {
      args.cfg.q_cap = static_cast<int>(parse_num(value, where));
    } else if (key == "circle-accord") {
      args.cfg.circle_accord = parse_num(value, where);
    } else if (key == "below-half") {
      args.cfg.below_half = parse_num(value, where);
    } else if (key == "min-stop-q") {
      args.cfg.min_stop_q = static_cast<int>(parse_num(value, where));
    } else if (key == "jobs") {
      args.cfg.jobs = static_cast<int>(parse_num(value, where));
    } else if (key == "cache-dir") {
      args.cfg.cache_dir = value;
    } else if (key == "csv") {
      args.csv_path = value;
    } else if (key == "json") {
      args.json_path = value;
    } else if (key == "quiet") {
      args.quiet = parse_bool(value, where);
    } else {
      throw std::invalid_argument(where + ": unknown key: " + key);
    }
  }
}

void run_sweep_cmd(SweepArgs& args) {
  if (args.e_step > 0.0) {
    if (!(args.e_min >= 0.0 && args.e_max >= args.e_min))
      throw ConfigError("sweep: bad eccentricity grid bounds");
    const int n =
        static_cast<int>(std::lround((args.e_max - args.e_min) / args.e_step));
    for (int i = 0; i <= n; ++i) {
      const double e = args.e_min + i * args.e_step;
      if (e < 1.0) args.cfg.e_values.push_back(e);
    }
  }
  validate(args.cfg);

  if (!args.quiet)
    std::cerr << "sweep: " << args.cfg.e_values.size() << " eccentricities x "
              << args.cfg.gamma_values.size() << " gamma values\n";

  SweepResult result = run_sweep(args.cfg);

  int unconverged = 0;
  for (const SweepRow& row : result.rows) unconverged += row.kappa_unconverged;
  if (unconverged > 0)
    std::cerr << "sweep: warning: " << unconverged
              << " kappa entries kept their last iterate (unconverged)\n";

  if (args.csv_path.empty()) {
    write_csv(result, std::cout);
  } else {
    auto out = open_out(args.csv_path);
    write_csv(result, out);
    if (!out) throw IoError("short write: " + args.csv_path);
  }
  if (!args.json_path.empty()) {
    auto out = open_out(args.json_path);
    write_json(result, out);
    if (!out) throw IoError("short write: " + args.json_path);
  }
}

struct OrbitArgs {
  double e = 0.0;
  int q = 0;
  int maxq = 500;
  bool as_json = false;
};

void run_orbit_cmd(const OrbitArgs& args) {
  if (args.q > args.maxq)
    throw std::invalid_argument("orbit: period " + std::to_string(args.q) +
                                " exceeds the cap maxq = " +
                                std::to_string(args.maxq));
  const EllipseSpec ell = make_ellipse(args.e);
  const PeriodicOrbit orb = build_orbit(ell, args.q);
  double refl = 0.0;
  if (orb.q >= 2) reflection_angles(ell, orb.points, &refl);

  if (args.as_json) {
    nlohmann::ordered_json doc;
    doc["eccentricity"] = args.e;
    doc["q"] = args.q;
    if (orb.caustic) {
      doc["lambda"] = orb.caustic->lambda;
      doc["caustic_m"] = orb.caustic->m;
      doc["omega"] = orb.caustic->omega;
    }
    doc["points"] = nlohmann::ordered_json::array();
    for (int n = 0; n < orb.q; ++n)
      doc["points"].push_back({{"x", orb.x[n]},
                               {"theta", orb.theta[n]},
                               {"mu", orb.mu[n]},
                               {"px", orb.points[n][0]},
                               {"py", orb.points[n][1]}});
    doc["perimeter"] = orbit_length(orb.points);
    doc["closure_residual"] = closure_residual(orb);
    doc["winding"] = winding_number(orb.points);
    doc["reflection_residual"] = refl;
    std::cout << doc.dump(2) << "\n";
    return;
  }

  std::cout << "orbit e=" << format_sig(args.e) << " q=" << args.q << "\n";
  if (orb.caustic)
    std::cout << "caustic lambda=" << detail::fmt17(orb.caustic->lambda)
              << " m=" << detail::fmt17(orb.caustic->m)
              << " omega=" << detail::fmt17(orb.caustic->omega) << "\n";
  std::cout << "n x theta mu px py\n";
  for (int n = 0; n < orb.q; ++n)
    std::cout << n << " " << detail::fmt17(orb.x[n]) << " "
              << detail::fmt17(orb.theta[n]) << " " << detail::fmt17(orb.mu[n])
              << " " << detail::fmt17(orb.points[n][0]) << " "
              << detail::fmt17(orb.points[n][1]) << "\n";
  std::cout << "perimeter " << detail::fmt17(orbit_length(orb.points)) << "\n"
            << "closure_residual " << detail::fmt17(closure_residual(orb))
            << "\n"
            << "winding " << winding_number(orb.points) << "\n"
            << "reflection_residual " << detail::fmt17(refl) << "\n";
}

struct KappaArgs {
  double e = 0.0;
  int max_j = 0;
  double threshold = 1e-6;
  int maxq = 500;
  std::string cache_dir;
};

void run_kappa_cmd(const KappaArgs& args) {
  const CacheKey key{args.e, args.maxq, args.threshold};
  CachedTables tables;
  bool from_cache = false;
  if (auto hit = load_cache(args.cache_dir, key, args.max_j)) {
    tables = *hit;
    from_cache = true;
  } else {
    const EllipseSpec ell = make_ellipse(args.e);
    tables.kappa = kappa_table(ell, args.max_j, args.threshold, args.maxq,
                               &tables.lambdas);
    if (!args.cache_dir.empty()) save_cache(args.cache_dir, key, tables);
  }

  std::cout << "kappa e=" << format_sig(args.e) << " max_j=" << args.max_j
            << " threshold=" << format_sig(args.threshold)
            << " maxq=" << args.maxq
            << (from_cache ? " (cached)" : " (computed)") << "\n";
  std::cout << "j value q_used status\n";
  for (int j = 1; j <= args.max_j; ++j) {
    const KappaEntry& en = tables.kappa.entry(j);
    const char* st = en.status == KappaStatus::symmetry_zero ? "symmetry-zero"
                     : en.status == KappaStatus::converged   ? "converged"
                                                             : "unconverged";
    std::cout << j << " " << detail::fmt17(en.value) << " " << en.q_used
              << " " << st << "\n";
  }
}

struct PlotArgs {
  std::vector<std::string> files;
  std::string svg_path;
  std::string data_path;
};

std::vector<PlotSeries> read_result_files(const std::vector<std::string>& files) {
  std::map<double, std::map<double, double>> by_gamma;  // gamma -> e -> norm
  for (const std::string& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read result file: " + file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1) {
        if (line.rfind("eccentricity,gamma,max_norm", 0) != 0)
          throw std::invalid_argument(file + ":1: not a sweep result file");
        continue;
      }
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string fe, fg, fn;
      if (!std::getline(row, fe, ',') || !std::getline(row, fg, ',') ||
          !std::getline(row, fn, ','))
        throw std::invalid_argument(file + ":" + std::to_string(lineno) +
                                    ": malformed row");
      try {
        by_gamma[std::stod(fg)][std::stod(fe)] = std::stod(fn);
      } catch (const std::exception&) {
        throw std::invalid_argument(file + ":" + std::to_string(lineno) +
                                    ": malformed number");
      }
    }
  }
  std::vector<PlotSeries> series;
  for (const auto& [gamma, pts] : by_gamma) {
    PlotSeries s;
    s.gamma = gamma;
    for (const auto& [e, n] : pts) s.points.emplace_back(e, n);
    series.push_back(std::move(s));
  }
  return series;
}

void run_plot_cmd(const PlotArgs& args) {
  const std::vector<PlotSeries> series = read_result_files(args.files);
  {
    auto out = open_out(args.svg_path);
    write_svg_plot(series, out);
    if (!out) throw IoError("short write: " + args.svg_path);
  }
  const std::string data_path =
      args.data_path.empty() ? args.svg_path + ".txt" : args.data_path;
  auto out = open_out(data_path);
  write_plot_data(series, out);
  if (!out) throw IoError("short write: " + data_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamical spectral rigidity norms for ellipse billiards"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  sweep_args.cfg.cache_dir = default_cache_dir();
  CLI::App* sweep = app.add_subcommand(
      "sweep", "scan the operator norm over eccentricities and gammas");
  sweep->add_option("--config", sweep_args.config_path,
                    "key=value config file; command-line flags win");
  sweep->add_option("--e", sweep_args.cfg.e_values,
                    "eccentricity list (repeat or comma-separate)")
      ->delimiter(',');
  sweep->add_option("--e-min", sweep_args.e_min, "grid start");
  sweep->add_option("--e-max", sweep_args.e_max, "grid end (inclusive)");
  sweep->add_option("--e-step", sweep_args.e_step, "grid step");
  sweep->add_option("--gamma", sweep_args.cfg.gamma_values,
                    "norm exponent list, each in (3, 4)")
      ->delimiter(',');
  sweep->add_option("--c-cutoff", sweep_args.cfg.c_cutoff,
                    "row truncation multiplier: sum j up to C*q");
  sweep->add_option("--kappa-threshold", sweep_args.cfg.kappa_threshold,
                    "freeze tolerance for the kappa scan");
  sweep->add_option("--maxq", sweep_args.cfg.maxq,
                    "kappa scan period cap");
  sweep->add_option("--q-cap", sweep_args.cfg.q_cap, "norm scan period cap");
  sweep->add_option("--circle-accord", sweep_args.cfg.circle_accord,
                    "relative circle-agreement stop tolerance");
  sweep->add_option("--below-half", sweep_args.cfg.below_half,
                    "absolute small-norm stop level");
  sweep->add_option("--min-stop-q", sweep_args.cfg.min_stop_q,
                    "first q at which stop rules apply");
  sweep->add_option("--jobs", sweep_args.cfg.jobs, "worker threads");
  sweep->add_option("--cache-dir", sweep_args.cfg.cache_dir,
                    "table cache directory (default: RIGIDITY_CACHE_DIR)");
  sweep->add_option("--csv", sweep_args.csv_path,
                    "CSV output path (default: stdout)");
  sweep->add_option("--json", sweep_args.json_path,
                    "JSON output path with per-q terms");
  sweep->add_flag("--quiet", sweep_args.quiet, "suppress progress notes");
  sweep->callback([&] {
    if (!sweep_args.config_path.empty()) apply_config_file(*sweep, sweep_args);
    run_sweep_cmd(sweep_args);
  });

  OrbitArgs orbit_args;
  CLI::App* orbit =
      app.add_subcommand("orbit", "print one periodic orbit and diagnostics");
  orbit->add_option("--e", orbit_args.e, "eccentricity")->required();
  orbit->add_option("--q", orbit_args.q, "orbit period")->required();
  orbit->add_option("--maxq", orbit_args.maxq, "refuse periods above this");
  orbit->add_flag("--json", orbit_args.as_json, "emit JSON");
  orbit->callback([&] { run_orbit_cmd(orbit_args); });

  KappaArgs kappa_args;
  kappa_args.cache_dir = default_cache_dir();
  CLI::App* kappa =
      app.add_subcommand("kappa", "print the kappa tail-profile table");
  kappa->add_option("--e", kappa_args.e, "eccentricity")->required();
  kappa->add_option("--max-j", kappa_args.max_j, "table width")->required();
  kappa->add_option("--threshold", kappa_args.threshold, "freeze tolerance");
  kappa->add_option("--maxq", kappa_args.maxq, "scan period cap");
  kappa->add_option("--cache-dir", kappa_args.cache_dir,
                    "table cache directory (default: RIGIDITY_CACHE_DIR)");
  kappa->callback([&] { run_kappa_cmd(kappa_args); });

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand(
      "plot", "render sweep CSV files as an SVG norm-vs-eccentricity plot");
  plot->add_option("files", plot_args.files, "sweep CSV result files")
      ->expected(-1);
  plot->add_option("--svg", plot_args.svg_path, "SVG output path")->required();
  plot->add_option("--data", plot_args.data_path,
                   "sidecar data path (default: <svg>.txt)");
  plot->callback([&] { run_plot_cmd(plot_args); });

  CLI::App* cache = app.add_subcommand("cache", "cache maintenance");
  cache->require_subcommand(1);
  std::string clear_dir = default_cache_dir();
  CLI::App* clear = cache->add_subcommand("clear", "delete cached tables");
  clear->add_option("--cache-dir", clear_dir,
                    "table cache directory (default: RIGIDITY_CACHE_DIR)");
  clear->callback([&] {
    if (clear_dir.empty())
      throw std::invalid_argument(
          "cache clear: no cache directory (set --cache-dir or "
          "RIGIDITY_CACHE_DIR)");
    std::cout << "removed " << clear_cache(clear_dir) << " cache file(s)\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
