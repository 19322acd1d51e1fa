#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "weldnet/data_pipeline.hpp"
#include "weldnet/schema.hpp"

namespace weldnet {

/// Inclusive sampling interval of one process parameter.
struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;
  bool integral = false;

  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Column layout produced by the generator: a configuration id (group key),
/// the beam geometry, path repetitions Re-P1..Re-P4, feed rates per path,
/// BLW core ratios E1..E3, and the two targets.
FeatureSchema welding_schema();

/// The six beam geometries, in lexicographic order.
const std::vector<std::string>& geometry_names();

/// Documented parameter windows for every numeric input of welding_schema():
/// repetitions P1 2-4, P2 1-2, P3 1-3, P4 0-2; feed rate P1/P2 180-321 mm/s,
/// P3 150-500 mm/s, P4 0-290 mm/s; BLW core ratio E1 30-100 %, E2/E3 40-100 %.
std::map<std::string, ParameterRange> default_parameter_ranges();

struct GeneratorConfig {
  std::size_t n_configs = 27;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  double depth_noise_std = 0.05;  // additive Gaussian, mm
  double pore_noise_std = 0.5;    // sigma of the multiplicative log-normal factor
  std::map<std::string, ParameterRange> ranges = default_parameter_ranges();

  void validate() const;
};

/// Noise-free welding depth [mm] for one configuration. Increasing in E1, E2
/// and the P1/P2 feed rates:
///   1.0 + 1.8 e1 + 0.6 e2 + 0.2 e1 e2 + 0.35 f1 + 0.35 f2 + g
/// where e*, f* are the parameters rescaled to [0, 1] over their default
/// windows and g is a small per-geometry offset (0 .. 0.1).
double reference_depth(const std::map<std::string, double>& params, const std::string& geometry);

/// Noise-free average pore volume [mm^3]. Decreasing in Re-P3, increasing in
/// Re-P1 and the P3 feed rate:
///   0.04 + 0.11 (3 - re_p3) + 0.03 (re_p1 - 2) + 0.03 f3
double reference_pore_volume(const std::map<std::string, double>& params);

/// Draws `n_configs` parameter sets uniformly within their ranges and emits
/// each `repetitions` times with independent noise and a shared config id.
RawDataset generate_dataset(const GeneratorConfig& cfg);

}  // namespace weldnet
