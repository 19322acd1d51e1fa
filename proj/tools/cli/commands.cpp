#include "cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cli/run_config.hpp"
#include "weldnet/data_pipeline.hpp"
#include "weldnet/eda.hpp"
#include "weldnet/error.hpp"
#include "weldnet/model_store.hpp"
#include "weldnet/synth_data.hpp"
#include "weldnet/trainer.hpp"

namespace weldnet::cli {
namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

/// Encoded (and optionally averaged) data plus its split, shared by `train`
/// and `evaluate` so both see exactly the same rows.
struct Prepared {
  Dataset data;
  SplitIndices split;
};

Prepared prepare(const RawDataset& raw, const EncodingMap* encoding, bool average,
                 const SplitRatios& ratios, std::uint64_t split_seed, EncodingMap* fitted) {
  auto encoded = encoding ? encode_categoricals(raw, *encoding) : encode_categoricals(raw);
  if (fitted) *fitted = encoded.encoding;
  Dataset data = std::move(encoded.dataset);
  if (average && data.group_ids) data = average_repetitions(data);
  auto split = split_dataset(data.rows(), ratios, split_seed);
  return {std::move(data), std::move(split)};
}

void print_metrics_header(std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-9s %6s %18s %18s %18s\n", "split", "space", "n",
                "msle", "mae", "r2");
  out << line;
}

void print_metrics_row(std::ostream& out, const std::string& split, const MetricsReport& m) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-9s %6zu %18.10g %18.10g %18.10g\n", split.c_str(),
                to_string(m.unit_space).c_str(), m.n, m.msle, m.mae, m.r_squared);
  out << line;
}

void print_split_metrics(std::ostream& out, const NetworkState& net, const Dataset& scaled,
                         const SplitIndices& split, std::size_t target, const ColumnRange& range) {
  print_metrics_header(out);
  const std::pair<const char*, const std::vector<std::size_t>*> parts[] = {
      {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
  for (const auto& [name, rows] : parts) {
    if (rows->empty()) continue;
    const auto set = regression_set(scaled, target, *rows);
    print_metrics_row(out, name, evaluate(net, set, range, UnitSpace::scaled));
    print_metrics_row(out, name, evaluate(net, set, range, UnitSpace::original));
  }
}

void cmd_synth(const std::string& config_path, const std::string& out_path,
               std::optional<std::uint64_t> seed, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path);
  if (cfg.schema && !(*cfg.schema == welding_schema())) {
    throw Error(ErrorCode::schema_mismatch,
                config_path + ": columns differ from the generator's welding schema");
  }
  GeneratorConfig gen = cfg.synth;
  if (seed) gen.seed = *seed;
  const RawDataset data = generate_dataset(gen);
  save_csv(out_path, data);
  out << "wrote " << data.size() << " rows (" << gen.n_configs << " configurations x "
      << gen.repetitions << " repetitions) to " << out_path << '\n';
}

void cmd_analyze(const std::string& data_path, const std::string& config_path,
                 const std::string& corr_path, const std::string& dist_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path);
  const auto& schema = cfg.require_schema();
  const Dataset ds = encode_categoricals(load_csv(data_path, schema)).dataset;

  std::vector<std::string> columns = cfg.analyze_columns;
  if (columns.empty()) {
    columns = schema.input_names();
    for (const auto& t : schema.target_names()) columns.push_back(t);
  }
  const CorrelationMatrix corr = correlation_matrix(ds, columns);
  auto corr_out = open_output(corr_path);
  write_correlation_csv(corr_out, corr);
  close_output(corr_out, corr_path);

  std::vector<DistributionSummary> summaries;
  for (const auto& c : columns) summaries.push_back(distribution_summary(ds, c, cfg.hist_bins));
  auto dist_out = open_output(dist_path);
  write_distribution_csv(dist_out, summaries);
  close_output(dist_out, dist_path);

  out << "correlation strength (strong: |r| > " << kStrongCorrelation
      << ", weak: |r| < " << kWeakCorrelation << ")\n";
  char line[200];
  std::snprintf(line, sizeof(line), "%-16s %-16s %12s  %s\n", "input", "target", "r", "strength");
  out << line;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!schema.input_index(columns[i])) continue;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (!schema.target_index(columns[j])) continue;
      const double r = corr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      std::snprintf(line, sizeof(line), "%-16s %-16s %12.6f  %s\n", columns[i].c_str(),
                    columns[j].c_str(), r, to_string(classify_strength(r)).c_str());
      out << line;
    }
  }
  out << "rows " << ds.rows() << ", correlation matrix -> " << corr_path
      << ", distributions -> " << dist_path << '\n';
}

struct TrainOverrides {
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::uint64_t> shuffle_seed;
  std::optional<std::uint64_t> init_seed;
};

void cmd_train(const std::string& data_path, const std::string& config_path,
               const std::string& target_key, const std::string& model_path,
               const std::string& curve_path, const TrainOverrides& ov, std::ostream& out) {
  RunConfig cfg = load_run_config(config_path);
  if (ov.epochs) cfg.training.epochs = *ov.epochs;
  if (ov.split_seed) cfg.split_seed = *ov.split_seed;
  if (ov.shuffle_seed) cfg.training.shuffle_seed = *ov.shuffle_seed;
  if (ov.init_seed) cfg.init_seed = *ov.init_seed;
  cfg.training.validate();

  const auto& schema = cfg.require_schema();
  const std::string target_name = cfg.target_column(target_key);
  const std::size_t target = *schema.target_index(target_name);

  EncodingMap encoding;
  Prepared prep = prepare(load_csv(data_path, schema), nullptr, cfg.average_repetitions,
                          cfg.split, cfg.split_seed, &encoding);
  const ScalerParams scaler = fit_scaler(prep.data, prep.split.train);
  const Dataset scaled = transform(prep.data, scaler);

  NetworkState net = init_network(cfg.network_for(target_key, schema.input_count()));
  const auto train_set = regression_set(scaled, target, prep.split.train);
  const auto val_set = regression_set(scaled, target, prep.split.validation);
  const LearningCurve curve = train(net, train_set, val_set, cfg.training);

  auto curve_out = open_output(curve_path);
  write_learning_curve_csv(curve_out, curve);
  close_output(curve_out, curve_path);

  ModelBundle bundle;
  bundle.network = net;
  bundle.scaler = scaler;
  bundle.encoding = encoding;
  bundle.schema = schema;
  bundle.target_name = target_name;
  bundle.fingerprint.split_seed = cfg.split_seed;
  bundle.fingerprint.shuffle_seed = cfg.training.shuffle_seed;
  bundle.fingerprint.init_seed = cfg.init_seed;
  bundle.fingerprint.split = cfg.split;
  bundle.fingerprint.average_repetitions = cfg.average_repetitions;
  bundle.fingerprint.config_hash = fnv1a64(
      cfg.canonical + "epochs=" + std::to_string(cfg.training.epochs) +
      "\nsplit_seed=" + std::to_string(cfg.split_seed) +
      "\nshuffle_seed=" + std::to_string(cfg.training.shuffle_seed) +
      "\ninit_seed=" + std::to_string(cfg.init_seed) + "\ntarget=" + target_key + "\n");
  save_model(bundle, model_path);

  out << "target " << target_name << ": " << net.layers.size() << " dense layers, "
      << net.parameter_count() << " parameters, rows " << prep.data.rows() << " (train "
      << prep.split.train.size() << ", validation " << prep.split.validation.size() << ", test "
      << prep.split.test.size() << ")\n";
  const auto& last = curve.records.back();
  out << "epoch " << last.epoch << ": train_loss " << last.train_loss << ", val_loss "
      << last.val_loss << ", train_mae " << last.train_mae << ", val_mae " << last.val_mae
      << '\n';
  print_split_metrics(out, net, scaled, prep.split, target, scaler.targets[target]);
}

void cmd_evaluate(const std::string& model_path, const std::string& data_path,
                  std::ostream& out) {
  const ModelBundle bundle = load_model(model_path);
  const auto& fp = bundle.fingerprint;
  Prepared prep = prepare(load_csv(data_path, bundle.schema), &bundle.encoding,
                          fp.average_repetitions, fp.split, fp.split_seed, nullptr);
  const Dataset scaled = transform(prep.data, bundle.scaler);
  const std::size_t target = bundle.target_index();
  out << "target " << bundle.target_name << ", rows " << prep.data.rows() << '\n';
  print_split_metrics(out, bundle.network, scaled, prep.split, target,
                      bundle.scaler.targets[target]);
  const auto all = regression_set(scaled, target);
  print_metrics_row(out, "all", evaluate(bundle.network, all, bundle.scaler.targets[target],
                                         UnitSpace::scaled));
  print_metrics_row(out, "all", evaluate(bundle.network, all, bundle.scaler.targets[target],
                                         UnitSpace::original));
}

void cmd_predict(const std::string& model_path, const std::string& data_path,
                 const std::string& out_path, std::ostream& out) {
  const ModelBundle bundle = load_model(model_path);
  const auto raw = load_csv(data_path, bundle.schema);
  const Dataset ds = encode_categoricals(raw, bundle.encoding).dataset;
  const Dataset scaled = transform(ds, bundle.scaler);
  const Eigen::VectorXd pred = predict(bundle.network, scaled.features);
  const auto& range = bundle.scaler.targets[bundle.target_index()];

  auto file = open_output(out_path);
  const auto group = bundle.schema.group_column();
  file << "row";
  if (group) file << ',' << bundle.schema.columns()[*group].name;
  file << ',' << bundle.target_name << "_predicted\n";
  char buf[64];
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    file << i;
    if (group) file << ',' << (*ds.group_ids)[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%.17g", range.unscale(pred[i]));
    file << ',' << buf << '\n';
  }
  close_output(file, out_path);
  out << "wrote " << pred.size() << " predictions of " << bundle.target_name << " to "
      << out_path << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"weldnet: weld depth and pore volume regression pipeline", "weldnet"};
  app.require_subcommand(1);

  std::string config, data, out_path, corr_path, dist_path, target, model, curve;
  std::optional<std::uint64_t> seed;
  TrainOverrides ov;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic welding dataset");
  synth->add_option("--config", config, "Run config file")->required();
  synth->add_option("--out", out_path, "Output CSV")->required();
  synth->add_option("--seed", seed, "Override synth.seed");

  auto* analyze = app.add_subcommand("analyze", "Correlation and distribution analysis");
  analyze->add_option("--data", data, "Input CSV")->required();
  analyze->add_option("--config", config, "Run config file")->required();
  analyze->add_option("--out-corr", corr_path, "Correlation matrix CSV")->required();
  analyze->add_option("--out-dist", dist_path, "Distribution summary CSV")->required();

  auto* train_cmd = app.add_subcommand("train", "Train one regressor");
  train_cmd->add_option("--data", data, "Input CSV")->required();
  train_cmd->add_option("--config", config, "Run config file")->required();
  train_cmd->add_option("--target", target, "Target to model")
      ->required()
      ->check(CLI::IsMember({"depth", "pore"}));
  train_cmd->add_option("--out", model, "Model file to write")->required();
  train_cmd->add_option("--curve", curve, "Learning-curve CSV to write")->required();
  train_cmd->add_option("--epochs", ov.epochs, "Override epochs");
  train_cmd->add_option("--split-seed", ov.split_seed, "Override split_seed");
  train_cmd->add_option("--shuffle-seed", ov.shuffle_seed, "Override shuffle_seed");
  train_cmd->add_option("--init-seed", ov.init_seed, "Override init_seed");

  auto* eval_cmd = app.add_subcommand("evaluate", "Metrics of a saved model on a dataset");
  eval_cmd->add_option("--model", model, "Model file")->required();
  eval_cmd->add_option("--data", data, "Input CSV")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Per-row predictions in original units");
  predict_cmd->add_option("--model", model, "Model file")->required();
  predict_cmd->add_option("--data", data, "Input CSV")->required();
  predict_cmd->add_option("--out", out_path, "Predictions CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[USAGE]: " << one_line(e.what()) << '\n' << app.help();
    return 2;
  }

  try {
    if (*synth) {
      cmd_synth(config, out_path, seed, out);
    } else if (*analyze) {
      cmd_analyze(data, config, corr_path, dist_path, out);
    } else if (*train_cmd) {
      cmd_train(data, config, target, model, curve, ov, out);
    } else if (*eval_cmd) {
      cmd_evaluate(model, data, out);
    } else if (*predict_cmd) {
      cmd_predict(model, data, out_path, out);
    }
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error[INTERNAL]: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace weldnet::cli
