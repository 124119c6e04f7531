#pragma once

// Batch driver: run the norm scan over a grid of eccentricities and gamma
// exponents, reuse the per-eccentricity tables through the on-disk cache,
// and emit deterministic CSV (and optionally JSON) results.
//
// The unit of work is one eccentricity: its caustic and kappa tables are
// produced once (or loaded), then every gamma is scanned against them.
// With jobs > 1 the eccentricities are distributed over a small thread
// pool; each cache file is touched by exactly one worker and results land
// in preassigned slots, so the output bytes never depend on scheduling.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <rigidity/cache.hpp>
#include <rigidity/isospectral.hpp>

namespace rigidity {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SweepConfig {
  std::vector<double> e_values;
  std::vector<double> gamma_values;
  int c_cutoff = 100;
  double kappa_threshold = 1e-6;
  int maxq = 500;
  int q_cap = 30;
  double circle_accord = 0.10;
  double below_half = 0.5;
  int min_stop_q = 4;
  int jobs = 1;
  std::string cache_dir;  // empty disables the cache

  StopPolicy policy() const {
    StopPolicy p;
    p.circle_accord = circle_accord;
    p.below_half = below_half;
    p.q_cap = q_cap;
    p.min_stop_q = min_stop_q;
    p.c_cutoff = c_cutoff;
    p.kappa_threshold = kappa_threshold;
    p.kappa_maxq = maxq;
    return p;
  }
};

inline void validate(const SweepConfig& cfg) {
  if (cfg.e_values.empty())
    throw ConfigError("sweep: need at least one eccentricity");
  for (double e : cfg.e_values)
    if (!(e >= 0.0 && e < 1.0))
      throw ConfigError("sweep: eccentricity out of [0, 1): " +
                        std::to_string(e));
  if (cfg.gamma_values.empty())
    throw ConfigError("sweep: need at least one gamma");
  for (double g : cfg.gamma_values)
    if (!(g > 3.0 && g < 4.0))
      throw ConfigError("sweep: gamma out of (3, 4): " + std::to_string(g));
  if (cfg.c_cutoff < 1) throw ConfigError("sweep: cutoff must be positive");
  if (!(cfg.kappa_threshold > 0.0))
    throw ConfigError("sweep: kappa threshold must be positive");
  if (cfg.maxq < 4) throw ConfigError("sweep: maxq must be >= 4");
  if (cfg.q_cap < 1) throw ConfigError("sweep: q cap must be positive");
  if (!(cfg.circle_accord > 0.0))
    throw ConfigError("sweep: circle accord must be positive");
  if (cfg.min_stop_q < 1)
    throw ConfigError("sweep: min stop q must be positive");
  if (cfg.jobs < 1) throw ConfigError("sweep: jobs must be positive");
}

struct SweepRow {
  double e = 0.0;
  double gamma = 0.0;
  double max_norm = 0.0;
  int argmax_q = 0;
  StopReason stop_reason = StopReason::q_cap;
  Verdict verdict = Verdict::inconclusive;
  double wall_ms = 0.0;
  int kappa_unconverged = 0;
  std::vector<std::pair<int, double>> terms;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // e-major, gamma-minor, in config order
};

// Tables for one eccentricity, by way of the cache when enabled.
inline CachedTables tables_for(const SweepConfig& cfg, double e) {
  const CacheKey key{e, cfg.maxq, cfg.kappa_threshold};
  const int need_j = cfg.c_cutoff * cfg.q_cap;
  if (auto hit = load_cache(cfg.cache_dir, key, need_j)) return *hit;
  CachedTables tables;
  const EllipseSpec ell = make_ellipse(e);
  tables.kappa = kappa_table(ell, need_j, cfg.kappa_threshold, cfg.maxq,
                             &tables.lambdas);
  if (!cfg.cache_dir.empty()) save_cache(cfg.cache_dir, key, tables);
  return tables;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  SweepResult result;
  result.config = cfg;
  const std::size_t ne = cfg.e_values.size();
  const std::size_t ng = cfg.gamma_values.size();
  result.rows.assign(ne * ng, SweepRow{});

  auto work_one = [&](std::size_t ie) {
    const double e = cfg.e_values[ie];
    const EllipseSpec ell = make_ellipse(e);
    CachedTables tables = tables_for(cfg, e);
    for (std::size_t ig = 0; ig < ng; ++ig) {
      const auto t0 = std::chrono::steady_clock::now();
      NormScan scan = rigidity_scan(ell, cfg.gamma_values[ig], cfg.policy(),
                                    &tables.kappa, &tables.lambdas);
      const auto t1 = std::chrono::steady_clock::now();
      SweepRow& row = result.rows[ie * ng + ig];
      row.e = e;
      row.gamma = cfg.gamma_values[ig];
      row.max_norm = scan.max_norm;
      row.argmax_q = scan.argmax_q;
      row.stop_reason = scan.stop_reason;
      row.verdict = scan.verdict;
      row.wall_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.kappa_unconverged = scan.kappa_unconverged;
      row.terms = std::move(scan.terms);
    }
  };

  if (cfg.jobs == 1 || ne == 1) {
    for (std::size_t ie = 0; ie < ne; ++ie) work_one(ie);
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t nw =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), ne);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mu;
    for (std::size_t w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        for (std::size_t ie = next.fetch_add(1); ie < ne;
             ie = next.fetch_add(1)) {
          try {
            work_one(ie);
          } catch (...) {
            std::lock_guard<std::mutex> lk(error_mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return result;
}

// Fixed 6-significant-digit formatting shared by every writer, so re-runs
// of the same configuration agree byte for byte.
inline std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_csv(const SweepResult& result, std::ostream& out) {
  out << "eccentricity,gamma,max_norm,argmax_q,stop_reason,verdict\n";
  for (const SweepRow& row : result.rows) {
    out << format_sig(row.e) << "," << format_sig(row.gamma) << ","
        << format_sig(row.max_norm) << "," << row.argmax_q << ","
        << stop_reason_name(row.stop_reason) << ","
        << verdict_name(row.verdict) << "\n";
  }
}

// JSON mirror of the CSV rows plus the full per-q term lists and the
// configuration that produced them.  Timings are informational; everything
// else is as deterministic as the CSV.
inline void write_json(const SweepResult& result, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["version"] = kVersion;
  const SweepConfig& cfg = result.config;
  doc["config"] = {{"e_values", cfg.e_values},
                   {"gamma_values", cfg.gamma_values},
                   {"c_cutoff", cfg.c_cutoff},
                   {"kappa_threshold", cfg.kappa_threshold},
                   {"maxq", cfg.maxq},
                   {"q_cap", cfg.q_cap},
                   {"circle_accord", cfg.circle_accord},
                   {"below_half", cfg.below_half},
                   {"min_stop_q", cfg.min_stop_q},
                   {"jobs", cfg.jobs},
                   {"cache_dir", cfg.cache_dir}};
  doc["rows"] = nlohmann::ordered_json::array();
  for (const SweepRow& row : result.rows) {
    nlohmann::ordered_json r;
    r["eccentricity"] = row.e;
    r["gamma"] = row.gamma;
    r["max_norm"] = row.max_norm;
    r["argmax_q"] = row.argmax_q;
    r["stop_reason"] = stop_reason_name(row.stop_reason);
    r["verdict"] = verdict_name(row.verdict);
    r["kappa_unconverged"] = row.kappa_unconverged;
    r["wall_time_ms"] = row.wall_ms;
    r["terms"] = nlohmann::ordered_json::array();
    for (const auto& [q, nq] : row.terms) r["terms"].push_back({q, nq});
    doc["rows"].push_back(std::move(r));
  }
  out << doc.dump(2) << "\n";
}

}  // namespace rigidity
