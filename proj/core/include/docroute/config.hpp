#pragma once

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "docroute/baseline.hpp"
#include "docroute/clustering.hpp"
#include "docroute/corpus.hpp"
#include "docroute/embedding.hpp"
#include "docroute/router.hpp"

namespace docroute {

/// Every tunable setting of the command-line tool in one place.
struct CliConfig {
  ChunkParams chunking;
  ProviderSpec provider;
  HttpOptions http;
  ClusteringConfig clustering;
  RouterConfig router;
  BaselineConfig baseline;

  std::uint32_t runs = 3;
  std::uint32_t warmup = 5;
  std::size_t queries = 100;  // synthetic benches
  double query_noise = 0.05;
  bool parallel = false;

  std::uint64_t seed = 0;

  /// Qualified keys ("embedding.dim") set by a config file or a flag.
  std::set<std::string> explicit_keys;

  bool is_explicit(std::string_view section) const;
  void validate() const;
};

/// One config-file key. The flag is "--" + key; the file key lives in
/// [section] (top level when section is empty).
struct Setting {
  std::string section;
  std::string key;
  std::string short_flag;  // e.g. "-m", may be empty
  std::string help;
  std::string value_type;  // UINT, FLOAT, BOOL or TEXT, for help output
  std::function<void(CliConfig&, std::string_view)> set;
  std::function<std::string(const CliConfig&)> get;

  std::string qualified() const { return section.empty() ? key : section + "." + key; }
};

const std::vector<Setting>& settings();
const Setting* find_setting(std::string_view qualified_key);

/// Parses and applies one value; bad values throw kConfig naming the key.
void apply_setting(CliConfig& config, std::string_view qualified_key, std::string_view value);

/// TOML-style file: `key = value` lines under [section] headers, '#'
/// comments. Unknown sections or keys throw kConfig.
void load_config_file(const std::filesystem::path& path, CliConfig& config);
void parse_config(std::string_view content, CliConfig& config, std::string_view source = "<memory>");

/// The config as a file that load_config_file accepts.
std::string dump_config(const CliConfig& config);

}  // namespace docroute
