#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "weldnet/data_pipeline.hpp"
#include "weldnet/neural_net.hpp"
#include "weldnet/schema.hpp"

namespace weldnet {

inline constexpr int kModelFormatVersion = 1;

/// Seeds and settings a model was trained with.
struct TrainingFingerprint {
  std::uint64_t split_seed = 0;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t config_hash = 0;
  SplitRatios split;
  bool average_repetitions = true;
};

/// A trained regressor plus the preprocessing state needed to reproduce its
/// predictions from raw CSV rows.
struct ModelBundle {
  int format_version = kModelFormatVersion;
  NetworkState network;
  ScalerParams scaler;
  EncodingMap encoding;
  FeatureSchema schema;
  std::string target_name;
  TrainingFingerprint fingerprint;

  /// Position of target_name among the schema's targets.
  std::size_t target_index() const;
  /// Checks version, layer chain and consistency with the schema.
  void validate() const;
};

/// Writes the line-oriented text format described in docs/model_format.md.
/// Reals use 17 significant digits, so every double round-trips exactly.
void write_model(std::ostream& out, const ModelBundle& bundle);
void save_model(const ModelBundle& bundle, const std::filesystem::path& path);

ModelBundle read_model(std::istream& in, const std::string& source = "<stream>");
ModelBundle load_model(const std::filesystem::path& path);

/// 64-bit FNV-1a, used for the config hash in the fingerprint.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace weldnet
