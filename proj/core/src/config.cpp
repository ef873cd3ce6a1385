#include "docroute/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "docroute/errors.hpp"

namespace docroute {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    fail(ErrorKind::kConfig, "invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::uint32_t parse_u32(std::string_view key, std::string_view text) { return parse_number<std::uint32_t>(key, text); }

double parse_double(std::string_view key, std::string_view text) {
  // from_chars for double is unavailable in libstdc++ 11.
  std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) fail(ErrorKind::kConfig, "invalid value '" + s + "' for " + std::string(key));
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  fail(ErrorKind::kConfig, "invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::string value_type(std::string_view key) {
  if (key == "parallel") return "BOOL";
  if (key == "provider" || key == "endpoint" || key == "model" || key == "reranker") return "TEXT";
  if (key == "overlap-fraction" || key == "tightness-floor" || key == "kmeans-tolerance" || key == "timeout-s" ||
      key == "rerank-unit-cost-ms" || key == "query-noise") {
    return "FLOAT";
  }
  return "UINT";
}

std::vector<Setting> make_settings() {
  std::vector<Setting> s;
  auto add = [&s](std::string section, std::string key, std::string short_flag, std::string help,
                  std::function<void(CliConfig&, std::string_view)> set,
                  std::function<std::string(const CliConfig&)> get) {
    std::string type = value_type(key);
    s.push_back({std::move(section), std::move(key), std::move(short_flag), std::move(help), std::move(type),
                 std::move(set), std::move(get)});
  };

  add("", "seed", "", "random seed for clustering and benchmarks",
      [](CliConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
      [](const CliConfig& c) { return std::to_string(c.seed); });

  add("chunking", "window-size", "", "tokens per chunk",
      [](CliConfig& c, std::string_view v) { c.chunking.window_size = parse_u32("window-size", v); },
      [](const CliConfig& c) { return std::to_string(c.chunking.window_size); });
  add("chunking", "overlap-fraction", "", "overlap between consecutive chunks, in [0, 1)",
      [](CliConfig& c, std::string_view v) { c.chunking.overlap_fraction = parse_double("overlap-fraction", v); },
      [](const CliConfig& c) { return fmt_double(c.chunking.overlap_fraction); });

  add("embedding", "provider", "", "deterministic-local or remote-http",
      [](CliConfig& c, std::string_view v) {
        try {
          c.provider.kind = parse_provider_kind(v);
        } catch (const Error& e) {
          fail(ErrorKind::kConfig, e.what());
        }
      },
      [](const CliConfig& c) { return std::string(to_string(c.provider.kind)); });
  add("embedding", "dim", "", "embedding dimension",
      [](CliConfig& c, std::string_view v) { c.provider.dim = parse_u32("dim", v); },
      [](const CliConfig& c) { return std::to_string(c.provider.dim); });
  add("embedding", "embed-seed", "", "hash seed of the deterministic-local provider",
      [](CliConfig& c, std::string_view v) { c.provider.seed = parse_number<std::uint64_t>("embed-seed", v); },
      [](const CliConfig& c) { return std::to_string(c.provider.seed); });
  add("embedding", "endpoint", "", "remote-http endpoint URL",
      [](CliConfig& c, std::string_view v) { c.provider.endpoint = std::string(v); },
      [](const CliConfig& c) { return c.provider.endpoint; });
  add("embedding", "batch-size", "", "texts per embedding request",
      [](CliConfig& c, std::string_view v) { c.provider.batch_size = parse_u32("batch-size", v); },
      [](const CliConfig& c) { return std::to_string(c.provider.batch_size); });
  add("embedding", "model", "", "model name sent to the remote provider",
      [](CliConfig& c, std::string_view v) { c.provider.model_name = std::string(v); },
      [](const CliConfig& c) { return c.provider.model_name; });
  add("embedding", "timeout-s", "", "remote request timeout in seconds",
      [](CliConfig& c, std::string_view v) {
        c.http.timeout = std::chrono::milliseconds(static_cast<long>(parse_double("timeout-s", v) * 1000.0));
      },
      [](const CliConfig& c) { return fmt_double(static_cast<double>(c.http.timeout.count()) / 1000.0); });
  add("embedding", "retries", "", "remote retries per batch",
      [](CliConfig& c, std::string_view v) { c.http.retries = parse_u32("retries", v); },
      [](const CliConfig& c) { return std::to_string(c.http.retries); });

  add("clustering", "min-cluster-size", "", "HDBSCAN min_cluster_size",
      [](CliConfig& c, std::string_view v) { c.clustering.min_cluster_size = parse_u32("min-cluster-size", v); },
      [](const CliConfig& c) { return std::to_string(c.clustering.min_cluster_size); });
  add("clustering", "min-samples", "", "HDBSCAN min_samples (0 = same as min-cluster-size)",
      [](CliConfig& c, std::string_view v) {
        const std::uint32_t n = parse_u32("min-samples", v);
        c.clustering.min_samples = n == 0 ? std::nullopt : std::optional<std::uint32_t>(n);
      },
      [](const CliConfig& c) { return std::to_string(c.clustering.min_samples.value_or(0)); });
  add("clustering", "max-cluster-size", "", "clusters above this size are split by KMeans",
      [](CliConfig& c, std::string_view v) { c.clustering.max_cluster_size = parse_u32("max-cluster-size", v); },
      [](const CliConfig& c) { return std::to_string(c.clustering.max_cluster_size); });
  add("clustering", "tightness-floor", "", "clusters below this tightness are split by KMeans",
      [](CliConfig& c, std::string_view v) { c.clustering.tightness_floor = parse_double("tightness-floor", v); },
      [](const CliConfig& c) { return fmt_double(c.clustering.tightness_floor); });
  add("clustering", "kmeans-max-iters", "", "KMeans iteration cap",
      [](CliConfig& c, std::string_view v) { c.clustering.kmeans_max_iters = parse_u32("kmeans-max-iters", v); },
      [](const CliConfig& c) { return std::to_string(c.clustering.kmeans_max_iters); });
  add("clustering", "kmeans-tolerance", "", "KMeans centroid-shift tolerance",
      [](CliConfig& c, std::string_view v) { c.clustering.kmeans_tolerance = parse_double("kmeans-tolerance", v); },
      [](const CliConfig& c) { return fmt_double(c.clustering.kmeans_tolerance); });

  add("router", "top-clusters", "-m", "clusters selected per query (m)",
      [](CliConfig& c, std::string_view v) { c.router.m = parse_u32("top-clusters", v); },
      [](const CliConfig& c) { return std::to_string(c.router.m); });
  add("router", "chunks-per-cluster", "-p", "chunks taken from each selected cluster (p)",
      [](CliConfig& c, std::string_view v) { c.router.p = parse_u32("chunks-per-cluster", v); },
      [](const CliConfig& c) { return std::to_string(c.router.p); });
  add("router", "context-budget", "", "context token budget (0 = unlimited)",
      [](CliConfig& c, std::string_view v) {
        const std::uint32_t n = parse_u32("context-budget", v);
        c.router.context_token_budget = n == 0 ? std::nullopt : std::optional<std::uint32_t>(n);
        c.baseline.context_token_budget = c.router.context_token_budget;
      },
      [](const CliConfig& c) { return std::to_string(c.router.context_token_budget.value_or(0)); });

  add("baseline", "k", "", "candidates retrieved by the flat baseline",
      [](CliConfig& c, std::string_view v) { c.baseline.k = parse_u32("k", v); },
      [](const CliConfig& c) { return std::to_string(c.baseline.k); });
  add("baseline", "reranker", "", "none, lexical-overlap or fixed-cost-mock",
      [](CliConfig& c, std::string_view v) {
        try {
          c.baseline.reranker = parse_reranker(v);
        } catch (const Error& e) {
          fail(ErrorKind::kConfig, e.what());
        }
      },
      [](const CliConfig& c) { return std::string(to_string(c.baseline.reranker)); });
  add("baseline", "rerank-unit-cost-ms", "", "fixed-cost-mock delay per candidate in ms",
      [](CliConfig& c, std::string_view v) {
        c.baseline.rerank_unit_cost =
            std::chrono::microseconds(static_cast<long>(parse_double("rerank-unit-cost-ms", v) * 1000.0));
      },
      [](const CliConfig& c) { return fmt_double(static_cast<double>(c.baseline.rerank_unit_cost.count()) / 1000.0); });

  add("bench", "runs", "", "independent benchmark runs",
      [](CliConfig& c, std::string_view v) { c.runs = parse_u32("runs", v); },
      [](const CliConfig& c) { return std::to_string(c.runs); });
  add("bench", "warmup", "", "unrecorded warm-up queries per pipeline",
      [](CliConfig& c, std::string_view v) { c.warmup = parse_u32("warmup", v); },
      [](const CliConfig& c) { return std::to_string(c.warmup); });
  add("bench", "queries", "", "queries per synthetic run",
      [](CliConfig& c, std::string_view v) { c.queries = parse_number<std::size_t>("queries", v); },
      [](const CliConfig& c) { return std::to_string(c.queries); });
  add("bench", "query-noise", "", "noise sigma of synthetic queries",
      [](CliConfig& c, std::string_view v) { c.query_noise = parse_double("query-noise", v); },
      [](const CliConfig& c) { return fmt_double(c.query_noise); });
  add("bench", "parallel", "", "replay queries on all cores (latencies are then contended)",
      [](CliConfig& c, std::string_view v) { c.parallel = parse_bool("parallel", v); },
      [](const CliConfig& c) { return std::string(c.parallel ? "true" : "false"); });
  return s;
}

}  // namespace

bool CliConfig::is_explicit(std::string_view section) const {
  const std::string prefix = std::string(section) + ".";
  for (const std::string& k : explicit_keys) {
    if (k.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

void CliConfig::validate() const {
  try {
    chunking.validate();
    provider.validate();
    clustering.validate();
    router.validate();
    baseline.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, e.what());
  }
  if (runs < 1) fail(ErrorKind::kConfig, "runs must be >= 1");
  if (queries < 1) fail(ErrorKind::kConfig, "queries must be >= 1");
  if (!(query_noise >= 0.0)) fail(ErrorKind::kConfig, "query-noise must be >= 0");
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> all = make_settings();
  return all;
}

const Setting* find_setting(std::string_view qualified_key) {
  for (const Setting& s : settings()) {
    if (s.qualified() == qualified_key) return &s;
  }
  return nullptr;
}

void apply_setting(CliConfig& config, std::string_view qualified_key, std::string_view value) {
  const Setting* s = find_setting(qualified_key);
  if (s == nullptr) fail(ErrorKind::kConfig, "unknown config key '" + std::string(qualified_key) + "'");
  s->set(config, value);
  config.explicit_keys.insert(std::string(qualified_key));
}

void parse_config(std::string_view content, CliConfig& config, std::string_view source) {
  std::istringstream in{std::string(content)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const std::exception& e) {
    fail(ErrorKind::kConfig, std::string(source) + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const std::string& p : item.parents) key += p + ".";
    key += item.name;
    if (item.inputs.size() != 1) {
      fail(ErrorKind::kConfig, std::string(source) + ": key '" + key + "' needs exactly one value");
    }
    if (find_setting(key) == nullptr) fail(ErrorKind::kConfig, std::string(source) + ": unknown config key '" + key + "'");
    apply_setting(config, key, unquote(item.inputs.front()));
  }
}

void load_config_file(const std::filesystem::path& path, CliConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kConfig, "config file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  parse_config(buf.str(), config, path.string());
}

std::string dump_config(const CliConfig& config) {
  std::ostringstream out;
  std::string section = "\x01";
  for (const Setting& s : settings()) {
    if (s.section != section) {
      section = s.section;
      if (!section.empty()) out << "\n[" << section << "]\n";
    }
    const std::string value = s.get(config);
    const bool text = s.key == "provider" || s.key == "endpoint" || s.key == "model" || s.key == "reranker";
    out << s.key << " = " << (text ? "\"" + value + "\"" : value) << "\n";
  }
  return out.str();
}

}  // namespace docroute
