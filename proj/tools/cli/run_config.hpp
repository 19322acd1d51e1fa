#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weldnet/data_pipeline.hpp"
#include "weldnet/neural_net.hpp"
#include "weldnet/schema.hpp"
#include "weldnet/synth_data.hpp"
#include "weldnet/trainer.hpp"

namespace weldnet::cli {

/// Either a named preset ("depth15", "pore6") or explicit hidden widths.
struct NetworkChoice {
  std::string preset;
  std::vector<std::size_t> hidden_widths;
};

/// Parsed run configuration. See docs/config_format.md for the grammar.
struct RunConfig {
  std::optional<FeatureSchema> schema;
  std::map<std::string, std::string> targets;  // "depth"/"pore" -> column name
  std::map<std::string, NetworkChoice> networks;
  std::size_t hidden_width = kDefaultHiddenWidth;

  SplitRatios split;
  std::uint64_t split_seed = 42;
  std::uint64_t init_seed = 1;
  TrainingConfig training;
  bool average_repetitions = true;

  std::size_t hist_bins = 10;
  std::vector<std::string> analyze_columns;

  GeneratorConfig synth;

  /// Normalised key=value lines, used for the model fingerprint hash.
  std::string canonical;

  const FeatureSchema& require_schema() const;
  /// Column name for a target key such as "depth".
  const std::string& target_column(const std::string& key) const;
  NetworkConfig network_for(const std::string& key, std::size_t input_dim) const;
};

RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace weldnet::cli
