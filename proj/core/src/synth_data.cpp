#include "weldnet/synth_data.hpp"

#include <cmath>
#include <cstdio>

#include "weldnet/error.hpp"
#include "weldnet/rng.hpp"

namespace weldnet {
namespace {

const std::vector<std::string> kNumericInputs = {
    "re_p1", "re_p2", "re_p3", "re_p4", "feed_p1", "feed_p2",
    "feed_p3", "feed_p4", "e1", "e2", "e3"};

double unit(const std::map<std::string, double>& params, const char* name, double lo,
            double hi) {
  return (params.at(name) - lo) / (hi - lo);
}

std::string config_id(std::size_t index, std::size_t total) {
  const int width = std::max(4, static_cast<int>(std::to_string(total).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "C%0*zu", width, index + 1);
  return buf;
}

}  // namespace

FeatureSchema welding_schema() {
  std::vector<ColumnSpec> cols;
  cols.push_back({"config_id", ColumnKind::categorical, ColumnRole::group_key, std::nullopt});
  cols.push_back({"geometry", ColumnKind::categorical, ColumnRole::input, std::nullopt});
  for (const char* n : {"re_p1", "re_p2", "re_p3", "re_p4"}) {
    cols.push_back({n, ColumnKind::numeric, ColumnRole::input, "count"});
  }
  for (const char* n : {"feed_p1", "feed_p2", "feed_p3", "feed_p4"}) {
    cols.push_back({n, ColumnKind::numeric, ColumnRole::input, "mm/s"});
  }
  for (const char* n : {"e1", "e2", "e3"}) {
    cols.push_back({n, ColumnKind::numeric, ColumnRole::input, "%"});
  }
  cols.push_back({"welding_depth", ColumnKind::numeric, ColumnRole::target, "mm"});
  cols.push_back({"pore_volume", ColumnKind::numeric, ColumnRole::target, "mm^3"});
  return FeatureSchema(std::move(cols));
}

const std::vector<std::string>& geometry_names() {
  static const std::vector<std::string> names = {"G1", "G2", "G3", "G4", "G4_ellipse", "G4_line"};
  return names;
}

std::map<std::string, ParameterRange> default_parameter_ranges() {
  return {
      {"re_p1", {2, 4, true}},       {"re_p2", {1, 2, true}},
      {"re_p3", {1, 3, true}},       {"re_p4", {0, 2, true}},
      {"feed_p1", {180, 321, false}}, {"feed_p2", {180, 321, false}},
      {"feed_p3", {150, 500, false}}, {"feed_p4", {0, 290, false}},
      {"e1", {30, 100, false}},      {"e2", {40, 100, false}},
      {"e3", {40, 100, false}},
  };
}

void GeneratorConfig::validate() const {
  if (n_configs < 1) throw Error(ErrorCode::invalid_argument, "n_configs must be at least 1");
  if (repetitions < 1) throw Error(ErrorCode::invalid_argument, "repetitions must be at least 1");
  if (!std::isfinite(depth_noise_std) || !std::isfinite(pore_noise_std) ||
      depth_noise_std < 0.0 || pore_noise_std < 0.0) {
    throw Error(ErrorCode::invalid_argument, "noise levels must be finite and non-negative");
  }
  if (!(pore_noise_std > depth_noise_std)) {
    throw Error(ErrorCode::invalid_argument,
                "pore_noise_std must exceed depth_noise_std");
  }
  for (const auto& name : kNumericInputs) {
    auto it = ranges.find(name);
    if (it == ranges.end()) {
      throw Error(ErrorCode::invalid_argument, "no sampling range for '" + name + "'");
    }
    const auto& r = it->second;
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
      throw Error(ErrorCode::invalid_argument, "invalid range for '" + name + "'");
    }
    if (r.integral && (r.lo != std::floor(r.lo) || r.hi != std::floor(r.hi))) {
      throw Error(ErrorCode::invalid_argument,
                  "integer range for '" + name + "' has fractional bounds");
    }
  }
  if (ranges.size() != kNumericInputs.size()) {
    throw Error(ErrorCode::invalid_argument, "sampling ranges name unknown parameters");
  }
}

double reference_depth(const std::map<std::string, double>& params, const std::string& geometry) {
  const double e1 = unit(params, "e1", 30, 100);
  const double e2 = unit(params, "e2", 40, 100);
  const double f1 = unit(params, "feed_p1", 180, 321);
  const double f2 = unit(params, "feed_p2", 180, 321);
  double offset = 0.0;
  const auto& names = geometry_names();
  for (std::size_t g = 0; g < names.size(); ++g) {
    if (names[g] == geometry) offset = 0.02 * static_cast<double>(g);
  }
  return 1.0 + 1.8 * e1 + 0.6 * e2 + 0.2 * e1 * e2 + 0.35 * f1 + 0.35 * f2 + offset;
}

double reference_pore_volume(const std::map<std::string, double>& params) {
  const double f3 = unit(params, "feed_p3", 150, 500);
  return 0.04 + 0.11 * (3.0 - params.at("re_p3")) + 0.03 * (params.at("re_p1") - 2.0) +
         0.03 * f3;
}

RawDataset generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  const FeatureSchema schema = welding_schema();
  Rng rng(cfg.seed);
  RawDataset out{schema, {}};
  out.records.reserve(cfg.n_configs * cfg.repetitions);

  const auto& geometries = geometry_names();
  // Mean-one log-normal factor: exp(sigma z - sigma^2 / 2).
  const double log_shift = -0.5 * cfg.pore_noise_std * cfg.pore_noise_std;

  for (std::size_t c = 0; c < cfg.n_configs; ++c) {
    const std::string geometry =
        geometries[static_cast<std::size_t>(rng.below(geometries.size()))];
    std::map<std::string, double> params;
    for (const auto& name : kNumericInputs) {
      const auto& r = cfg.ranges.at(name);
      params[name] = r.integral ? static_cast<double>(rng.integer(static_cast<std::int64_t>(r.lo),
                                                                  static_cast<std::int64_t>(r.hi)))
                                : rng.uniform(r.lo, r.hi);
    }
    const double depth = reference_depth(params, geometry);
    const double pore = reference_pore_volume(params);
    const std::string id = config_id(c, cfg.n_configs);

    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const double noisy_depth = depth + cfg.depth_noise_std * rng.normal();
      const double noisy_pore = pore * std::exp(cfg.pore_noise_std * rng.normal() + log_shift);
      RawRecord rec;
      rec.values.reserve(schema.column_count());
      for (const auto& col : schema.columns()) {
        if (col.name == "config_id") {
          rec.values.emplace_back(id);
        } else if (col.name == "geometry") {
          rec.values.emplace_back(geometry);
        } else if (col.name == "welding_depth") {
          rec.values.emplace_back(noisy_depth);
        } else if (col.name == "pore_volume") {
          rec.values.emplace_back(noisy_pore);
        } else {
          rec.values.emplace_back(params.at(col.name));
        }
      }
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace weldnet
