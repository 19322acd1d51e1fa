#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "weldnet/error.hpp"

namespace weldnet::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

class LineContext {
 public:
  LineContext(const std::string& source, std::size_t line, const std::string& key)
      : where_(source + ":" + std::to_string(line) + ": " + key) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::config, where_ + ": " + message);
  }

  std::uint64_t to_u64(const std::string& v) const {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      fail("expected a non-negative integer, got '" + v + "'");
    }
    return out;
  }

  std::size_t to_size(const std::string& v) const { return static_cast<std::size_t>(to_u64(v)); }

  double to_real(const std::string& v) const {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size() ||
        !std::isfinite(out)) {
      fail("expected a number, got '" + v + "'");
    }
    return out;
  }

  bool to_bool(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected true or false, got '" + v + "'");
  }

 private:
  std::string where_;
};

NetworkChoice parse_network(const LineContext& ctx, const std::string& value) {
  NetworkChoice choice;
  if (value == "depth15" || value == "pore6") {
    choice.preset = value;
    return choice;
  }
  for (const auto& item : split_list(value)) {
    const auto w = ctx.to_size(item);
    if (w == 0) ctx.fail("layer widths must be positive");
    choice.hidden_widths.push_back(w);
  }
  return choice;
}

ColumnSpec parse_column(const LineContext& ctx, const std::string& value) {
  const auto parts = split_list(value);
  if (parts.size() < 3 || parts.size() > 4) {
    ctx.fail("expected 'name, kind, role[, unit]'");
  }
  ColumnSpec spec;
  spec.name = parts[0];
  try {
    spec.kind = parse_column_kind(parts[1]);
    spec.role = parse_column_role(parts[2]);
  } catch (const Error& e) {
    ctx.fail(e.what());
  }
  if (parts.size() == 4 && !parts[3].empty()) spec.unit = parts[3];
  return spec;
}

}  // namespace

const FeatureSchema& RunConfig::require_schema() const {
  if (!schema) throw Error(ErrorCode::config, "config defines no columns");
  return *schema;
}

const std::string& RunConfig::target_column(const std::string& key) const {
  auto it = targets.find(key);
  if (it == targets.end()) {
    throw Error(ErrorCode::config, "config has no target column for '" + key + "'");
  }
  return it->second;
}

NetworkConfig RunConfig::network_for(const std::string& key, std::size_t input_dim) const {
  NetworkChoice choice;
  if (auto it = networks.find(key); it != networks.end()) {
    choice = it->second;
  } else {
    choice.preset = key == "pore" ? "pore6" : "depth15";
  }
  if (choice.preset == "depth15") return depth15_preset(input_dim, init_seed, hidden_width);
  if (choice.preset == "pore6") return pore6_preset(input_dim, init_seed, hidden_width);
  return NetworkConfig::regressor(input_dim, choice.hidden_widths, init_seed);
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::vector<ColumnSpec> columns;
  std::map<std::string, std::string> explicit_targets;
  std::set<std::string> seen;
  std::vector<std::string> canonical;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config,
                  source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const LineContext ctx(source, line_no, key);
    if (key != "column" && !seen.insert(key).second) ctx.fail("key given more than once");
    canonical.push_back(key + "=" + value);

    if (key == "column") {
      columns.push_back(parse_column(ctx, value));
    } else if (key.rfind("target.", 0) == 0) {
      explicit_targets[key.substr(7)] = value;
    } else if (key.rfind("network.", 0) == 0) {
      cfg.networks[key.substr(8)] = parse_network(ctx, value);
    } else if (key == "hidden_width") {
      cfg.hidden_width = ctx.to_size(value);
      if (cfg.hidden_width == 0) ctx.fail("must be positive");
    } else if (key == "split_seed") {
      cfg.split_seed = ctx.to_u64(value);
    } else if (key == "split_ratios") {
      const auto parts = split_list(value);
      if (parts.size() != 3) ctx.fail("expected three ratios");
      cfg.split = {ctx.to_real(parts[0]), ctx.to_real(parts[1]), ctx.to_real(parts[2])};
    } else if (key == "shuffle_seed") {
      cfg.training.shuffle_seed = ctx.to_u64(value);
    } else if (key == "init_seed") {
      cfg.init_seed = ctx.to_u64(value);
    } else if (key == "epochs") {
      cfg.training.epochs = ctx.to_size(value);
    } else if (key == "batch_size") {
      cfg.training.batch_size = ctx.to_size(value);
    } else if (key == "learning_rate") {
      cfg.training.adam.learning_rate = ctx.to_real(value);
    } else if (key == "beta1") {
      cfg.training.adam.beta1 = ctx.to_real(value);
    } else if (key == "beta2") {
      cfg.training.adam.beta2 = ctx.to_real(value);
    } else if (key == "epsilon") {
      cfg.training.adam.epsilon = ctx.to_real(value);
    } else if (key == "average_repetitions") {
      cfg.average_repetitions = ctx.to_bool(value);
    } else if (key == "hist_bins") {
      cfg.hist_bins = ctx.to_size(value);
    } else if (key == "analyze.columns") {
      cfg.analyze_columns = split_list(value);
    } else if (key == "synth.n_configs") {
      cfg.synth.n_configs = ctx.to_size(value);
    } else if (key == "synth.repetitions") {
      cfg.synth.repetitions = ctx.to_size(value);
    } else if (key == "synth.seed") {
      cfg.synth.seed = ctx.to_u64(value);
    } else if (key == "synth.depth_noise_std") {
      cfg.synth.depth_noise_std = ctx.to_real(value);
    } else if (key == "synth.pore_noise_std") {
      cfg.synth.pore_noise_std = ctx.to_real(value);
    } else {
      ctx.fail("unknown key");
    }
  }

  for (const auto& key : cfg.networks) {
    if (key.first != "depth" && key.first != "pore") {
      throw Error(ErrorCode::config, source + ": unknown network key 'network." + key.first + "'");
    }
  }
  for (const auto& [key, column] : explicit_targets) {
    if (key != "depth" && key != "pore") {
      throw Error(ErrorCode::config, source + ": unknown target key 'target." + key + "'");
    }
  }

  if (!columns.empty()) {
    try {
      cfg.schema = FeatureSchema(std::move(columns));
    } catch (const Error& e) {
      throw Error(ErrorCode::config, source + ": " + e.what());
    }
    const auto& schema = *cfg.schema;
    for (const auto& [key, column] : explicit_targets) {
      if (!schema.target_index(column)) {
        throw Error(ErrorCode::config, source + ": target." + key + " = '" + column +
                                           "' is not a target column of the schema");
      }
      cfg.targets[key] = column;
    }
    const std::map<std::string, std::string> defaults = {{"depth", "welding_depth"},
                                                         {"pore", "pore_volume"}};
    for (const auto& [key, column] : defaults) {
      if (!cfg.targets.contains(key) && schema.target_index(column)) cfg.targets[key] = column;
    }
    for (const auto& name : cfg.analyze_columns) {
      if (!schema.input_index(name) && !schema.target_index(name)) {
        throw Error(ErrorCode::config, source + ": analyze.columns names unknown column '" +
                                           name + "'");
      }
    }
  } else {
    cfg.targets = explicit_targets;
  }

  try {
    cfg.training.validate();
    if (cfg.hist_bins < 1) throw Error(ErrorCode::invalid_argument, "hist_bins must be at least 1");
  } catch (const Error& e) {
    throw Error(ErrorCode::config, source + ": " + e.what());
  }

  for (const auto& c : canonical) cfg.canonical += c + "\n";
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path.string() + "'");
  return parse_run_config(in, path.string());
}

}  // namespace weldnet::cli
