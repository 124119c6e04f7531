#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <json.hpp>

#include <rigidity/cache.hpp>
#include <rigidity/svg.hpp>
#include <rigidity/sweep.hpp>

using namespace rigidity;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.e_values = {0.1, 0.3};
  cfg.gamma_values = {3.5};
  return cfg;
}

std::string csv_of(const SweepResult& result) {
  std::ostringstream out;
  write_csv(result, out);
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rigidity-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

}  // namespace

TEST_CASE("config validation") {
  SweepConfig cfg = small_config();
  cfg.e_values.clear();
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = small_config();
  cfg.e_values.push_back(1.0);
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = small_config();
  cfg.gamma_values = {2.9};
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = small_config();
  cfg.gamma_values.clear();
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = small_config();
  cfg.q_cap = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = small_config();
  cfg.jobs = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  CHECK_NOTHROW(validate(small_config()));
}

TEST_CASE("sweep rows agree with direct scans") {
  const SweepConfig cfg = small_config();
  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const NormScan direct =
        rigidity_scan(make_ellipse(cfg.e_values[i]), 3.5, cfg.policy());
    CHECK(result.rows[i].max_norm == direct.max_norm);
    CHECK(result.rows[i].argmax_q == direct.argmax_q);
    CHECK(result.rows[i].stop_reason == direct.stop_reason);
    CHECK(result.rows[i].verdict == direct.verdict);
    CHECK(result.rows[i].terms == direct.terms);
  }
}

TEST_CASE("CSV output shape and determinism") {
  const SweepConfig cfg = small_config();
  const std::string first = csv_of(run_sweep(cfg));
  const std::string second = csv_of(run_sweep(cfg));
  CHECK(first == second);

  std::istringstream lines(first);
  std::string header, row1, row2, extra;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row1));
  REQUIRE(std::getline(lines, row2));
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(header == "eccentricity,gamma,max_norm,argmax_q,stop_reason,verdict");
  CHECK(std::regex_match(
      row1, std::regex("0\\.1,3\\.5,0\\.72\\d+,1,circle-agreement,"
                       "injective-evidence")));
  CHECK(std::regex_match(
      row2,
      std::regex("0\\.3,3\\.5,1\\.0\\d+,3,below-half,inconclusive")));
}

TEST_CASE("parallel sweep matches serial byte for byte") {
  SweepConfig cfg = small_config();
  const std::string serial = csv_of(run_sweep(cfg));
  cfg.jobs = 2;
  CHECK(csv_of(run_sweep(cfg)) == serial);
}

TEST_CASE("cold and warm cache produce identical results") {
  TempDir tmp;
  SweepConfig cfg = small_config();
  cfg.cache_dir = tmp.path.string();

  const std::string cold = csv_of(run_sweep(cfg));
  int files = 0;
  for (const auto& entry : fs::directory_iterator(tmp.path)) {
    ++files;
    CHECK(entry.path().filename().string().rfind("rigidity-", 0) == 0);
  }
  CHECK(files == 2);
  const std::string warm = csv_of(run_sweep(cfg));
  CHECK(warm == cold);
}

TEST_CASE("corrupted cache files are recomputed") {
  TempDir tmp;
  SweepConfig cfg = small_config();
  cfg.e_values = {0.3};
  cfg.cache_dir = tmp.path.string();
  const std::string cold = csv_of(run_sweep(cfg));

  fs::path victim;
  for (const auto& entry : fs::directory_iterator(tmp.path))
    victim = entry.path();
  REQUIRE_FALSE(victim.empty());

  std::string text;
  {
    std::ifstream in(victim, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  const std::size_t mid = text.size() / 2;
  text[mid] = (text[mid] == '1') ? '2' : '1';
  {
    std::ofstream out(victim, std::ios::binary | std::ios::trunc);
    out << text;
  }
  const CacheKey key{0.3, cfg.maxq, cfg.kappa_threshold};
  CHECK_FALSE(load_cache(cfg.cache_dir, key).has_value());

  CHECK(csv_of(run_sweep(cfg)) == cold);
  CHECK(load_cache(cfg.cache_dir, key).has_value());
}

TEST_CASE("cache serialization round trip") {
  const EllipseSpec ell = make_ellipse(0.35);
  CachedTables tables;
  tables.kappa = kappa_table(ell, 16, 1e-6, 500, &tables.lambdas);
  const CacheKey key{0.35, 500, 1e-6};

  const std::string text = serialize_cache(key, tables);
  const auto back = parse_cache(text, key);
  REQUIRE(back.has_value());
  CHECK(back->lambdas == tables.lambdas);
  REQUIRE(back->kappa.max_j == tables.kappa.max_j);
  for (int j = 1; j <= 16; ++j) {
    CHECK(back->kappa.value(j) == tables.kappa.value(j));
    CHECK(back->kappa.entry(j).q_used == tables.kappa.entry(j).q_used);
    CHECK(back->kappa.entry(j).status == tables.kappa.entry(j).status);
  }

  // Key mismatch and tampering both read as misses.
  const CacheKey other{0.36, 500, 1e-6};
  CHECK_FALSE(parse_cache(text, other).has_value());
  std::string bad = text;
  bad[text.size() / 3] ^= 1;
  CHECK_FALSE(parse_cache(bad, key).has_value());
}

TEST_CASE("cache filenames key on e, maxq and threshold") {
  const std::string base = cache_filename({0.3, 500, 1e-6});
  CHECK(base == cache_filename({0.3, 500, 1e-6}));
  CHECK(base != cache_filename({0.31, 500, 1e-6}));
  CHECK(base != cache_filename({0.3, 400, 1e-6}));
  CHECK(base != cache_filename({0.3, 500, 1e-7}));
}

TEST_CASE("narrow cached tables read as misses") {
  TempDir tmp;
  const EllipseSpec ell = make_ellipse(0.2);
  const CacheKey key{0.2, 500, 1e-6};
  CachedTables tables;
  tables.kappa = kappa_table(ell, 10, 1e-6, 500, &tables.lambdas);
  save_cache(tmp.path.string(), key, tables);
  CHECK(load_cache(tmp.path.string(), key, 10).has_value());
  CHECK_FALSE(load_cache(tmp.path.string(), key, 11).has_value());
}

TEST_CASE("clear cache") {
  TempDir tmp;
  SweepConfig cfg = small_config();
  cfg.e_values = {0.1};
  cfg.cache_dir = tmp.path.string();
  run_sweep(cfg);
  CHECK(clear_cache(cfg.cache_dir) == 1);
  CHECK(clear_cache(cfg.cache_dir) == 0);
  const CacheKey key{0.1, cfg.maxq, cfg.kappa_threshold};
  CHECK_FALSE(load_cache(cfg.cache_dir, key).has_value());
}

TEST_CASE("JSON mirrors the rows with terms") {
  const SweepResult result = run_sweep(small_config());
  std::ostringstream out;
  write_json(result, out);
  const nlohmann::json doc = nlohmann::json::parse(out.str());
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["version"] == kVersion);
  CHECK(doc["rows"][0]["eccentricity"] == 0.1);
  CHECK(doc["rows"][0]["argmax_q"] == 1);
  CHECK(doc["rows"][1]["stop_reason"] == "below-half");
  CHECK(doc["rows"][1]["terms"].size() == result.rows[1].terms.size());
  CHECK(doc["config"]["q_cap"] == 30);
}

TEST_CASE("unconverged kappa entries are surfaced per row") {
  SweepConfig cfg;
  cfg.e_values = {0.2};
  cfg.gamma_values = {3.5};
  cfg.kappa_threshold = 1e-18;
  cfg.maxq = 4;
  const SweepResult result = run_sweep(cfg);
  CHECK(result.rows[0].kappa_unconverged > 0);
}

TEST_CASE("SVG plot output") {
  std::vector<PlotSeries> series(2);
  series[0].gamma = 3.5;
  series[0].points = {{0.0, 0.72}, {0.3, 1.08}, {0.4, 1.74}};
  series[1].gamma = 3.1;
  series[1].points = {{0.0, 0.72}, {0.3, 0.95}};

  std::ostringstream svg;
  write_svg_plot(series, svg);
  const std::string text = svg.str();
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("polyline") != std::string::npos);
  CHECK(text.find("gamma = 3.5") != std::string::npos);
  CHECK(text.find("gamma = 3.1") != std::string::npos);
  CHECK(text.find("stroke-dasharray") != std::string::npos);

  std::ostringstream data;
  write_plot_data(series, data);
  CHECK(data.str().find("0.3 1.08") != std::string::npos);

  std::ostringstream empty;
  write_svg_plot({}, empty);
  CHECK(empty.str().find("<svg") != std::string::npos);
  CHECK(empty.str().find("polyline") == std::string::npos);
}
