#pragma once

// On-disk cache of the per-eccentricity tables (caustic parameters and the
// kappa profile), the two expensive ingredients shared by every gamma.
//
// One plain-text file per key (e, maxq, threshold); the key is hashed into
// the filename, the payload stores doubles at 17 significant digits so
// values round-trip bit-exactly, and the final line carries an FNV-1a
// checksum of everything above it.  Writes go through a temp file and an
// atomic rename; anything unreadable, mismatched or corrupt loads as a
// miss and is simply recomputed.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <rigidity/isospectral.hpp>

namespace rigidity {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CacheKey {
  double e;
  int maxq;
  double threshold;
};

struct CachedTables {
  std::map<int, double> lambdas;
  KappaTable kappa;
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

inline std::string cache_filename(const CacheKey& key) {
  const std::string canon = "e=" + detail::fmt17(key.e) +
                            ";maxq=" + std::to_string(key.maxq) +
                            ";threshold=" + detail::fmt17(key.threshold);
  return "rigidity-" + detail::hex64(detail::fnv1a(canon)) + ".cache";
}

inline std::string serialize_cache(const CacheKey& key,
                                   const CachedTables& tables) {
  std::ostringstream out;
  out << "rigidity-cache v1\n";
  out << "e " << detail::fmt17(key.e) << "\n";
  out << "maxq " << key.maxq << "\n";
  out << "threshold " << detail::fmt17(key.threshold) << "\n";
  out << "lambda " << tables.lambdas.size() << "\n";
  for (const auto& [q, lam] : tables.lambdas)
    out << q << " " << detail::fmt17(lam) << "\n";
  out << "kappa " << tables.kappa.max_j << " " << tables.kappa.q_used << "\n";
  for (int j = 1; j <= tables.kappa.max_j; ++j) {
    const KappaEntry& en = tables.kappa.entries[static_cast<std::size_t>(j - 1)];
    const char st = en.status == KappaStatus::symmetry_zero ? 's'
                    : en.status == KappaStatus::converged   ? 'c'
                                                            : 'u';
    out << j << " " << detail::fmt17(en.value) << " " << en.q_used << " "
        << st << "\n";
  }
  std::string body = out.str();
  body += "checksum " + detail::hex64(detail::fnv1a(body)) + "\n";
  return body;
}

inline std::optional<CachedTables> parse_cache(const std::string& text,
                                               const CacheKey& key) {
  const std::size_t mark = text.rfind("checksum ");
  if (mark == std::string::npos || mark == 0) return std::nullopt;
  const std::string body = text.substr(0, mark);
  std::istringstream tail(text.substr(mark));
  std::string word, digest;
  if (!(tail >> word >> digest) || word != "checksum") return std::nullopt;
  if (digest != detail::hex64(detail::fnv1a(body))) return std::nullopt;

  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || line != "rigidity-cache v1")
    return std::nullopt;

  double e = 0.0, threshold = 0.0;
  int maxq = 0;
  std::size_t n_lambda = 0;
  if (!(in >> word >> e) || word != "e") return std::nullopt;
  if (!(in >> word >> maxq) || word != "maxq") return std::nullopt;
  if (!(in >> word >> threshold) || word != "threshold") return std::nullopt;
  if (e != key.e || maxq != key.maxq || threshold != key.threshold)
    return std::nullopt;
  if (!(in >> word >> n_lambda) || word != "lambda") return std::nullopt;

  CachedTables tables;
  for (std::size_t i = 0; i < n_lambda; ++i) {
    int q = 0;
    double lam = 0.0;
    if (!(in >> q >> lam)) return std::nullopt;
    tables.lambdas[q] = lam;
  }

  int max_j = 0, q_used = 0;
  if (!(in >> word >> max_j >> q_used) || word != "kappa" || max_j < 0)
    return std::nullopt;
  tables.kappa.e = e;
  tables.kappa.max_j = max_j;
  tables.kappa.threshold = threshold;
  tables.kappa.maxq = maxq;
  tables.kappa.q_used = q_used;
  tables.kappa.entries.assign(static_cast<std::size_t>(max_j), KappaEntry{});
  for (int j = 1; j <= max_j; ++j) {
    int jj = 0, qu = 0;
    double val = 0.0;
    char st = 0;
    if (!(in >> jj >> val >> qu >> st) || jj != j) return std::nullopt;
    KappaStatus status;
    switch (st) {
      case 's': status = KappaStatus::symmetry_zero; break;
      case 'c': status = KappaStatus::converged; break;
      case 'u': status = KappaStatus::unconverged; break;
      default: return std::nullopt;
    }
    tables.kappa.entries[static_cast<std::size_t>(j - 1)] = {val, qu, status};
  }
  return tables;
}

// Load the tables for a key, or nullopt on any kind of miss.  A hit with a
// kappa table narrower than min_j is also a miss: the caller needs the
// wider table and will rewrite the file.
inline std::optional<CachedTables> load_cache(const std::string& dir,
                                              const CacheKey& key,
                                              int min_j = 0) {
  if (dir.empty()) return std::nullopt;
  const std::filesystem::path path =
      std::filesystem::path(dir) / cache_filename(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  auto tables = parse_cache(buf.str(), key);
  if (tables && tables->kappa.max_j < min_j) return std::nullopt;
  return tables;
}

inline void save_cache(const std::string& dir, const CacheKey& key,
                       const CachedTables& tables) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path path =
      std::filesystem::path(dir) / cache_filename(key);
  const std::filesystem::path tmp =
      path.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cache: cannot write " + tmp.string());
    out << serialize_cache(key, tables);
    if (!out) throw IoError("cache: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cache: cannot replace " + path.string());
  }
}

// Remove every cache file in the directory; returns how many went away.
inline int clear_cache(const std::string& dir) {
  if (dir.empty() || !std::filesystem::exists(dir)) return 0;
  int removed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("rigidity-", 0) == 0 &&
        name.find(".cache") != std::string::npos) {
      std::error_code ec;
      if (std::filesystem::remove(entry.path(), ec) && !ec) ++removed;
    }
  }
  return removed;
}

}  // namespace rigidity
