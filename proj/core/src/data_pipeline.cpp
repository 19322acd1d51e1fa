#include "weldnet/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "weldnet/error.hpp"
#include "weldnet/rng.hpp"

namespace weldnet {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Splits one CSV line. Fields may be wrapped in double quotes, with "" as an
// escaped quote; quoted fields cannot span lines.
std::vector<std::string> split_line(std::string_view line, std::size_t line_no,
                                    const std::string& source) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && trim(current).empty()) {
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::parse, source + ": line " + std::to_string(line_no) +
                                      ": unterminated quoted field");
  }
  fields.push_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"") != std::string::npos || s != trim(s);
}

std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

Eigen::VectorXd Dataset::column(const std::string& name) const {
  if (auto k = schema.input_index(name)) return features.col(static_cast<Eigen::Index>(*k));
  if (auto k = schema.target_index(name)) return targets.col(static_cast<Eigen::Index>(*k));
  throw Error(ErrorCode::column_mismatch, "no input or target column named '" + name + "'");
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.schema = schema;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()), targets.cols());
  if (group_ids) out.group_ids.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= this->rows()) {
      throw Error(ErrorCode::invalid_argument,
                  "row index " + std::to_string(rows[i]) + " out of range");
    }
    const auto src = static_cast<Eigen::Index>(rows[i]);
    const auto dst = static_cast<Eigen::Index>(i);
    out.features.row(dst) = features.row(src);
    out.targets.row(dst) = targets.row(src);
    if (group_ids) out.group_ids->push_back((*group_ids)[rows[i]]);
  }
  return out;
}

int EncodingMap::encode(const std::string& column, const std::string& value) const {
  auto it = categories.find(column);
  if (it == categories.end()) {
    throw Error(ErrorCode::unseen_category,
                "no encoding for categorical column '" + column + "'");
  }
  const auto& cats = it->second;
  auto pos = std::lower_bound(cats.begin(), cats.end(), value);
  if (pos == cats.end() || *pos != value) {
    throw Error(ErrorCode::unseen_category,
                "unseen category '" + value + "' in column '" + column + "'");
  }
  return static_cast<int>(pos - cats.begin());
}

const std::string& EncodingMap::decode(const std::string& column, int code) const {
  auto it = categories.find(column);
  if (it == categories.end() || code < 0 ||
      static_cast<std::size_t>(code) >= it->second.size()) {
    throw Error(ErrorCode::unseen_category,
                "code " + std::to_string(code) + " is not defined for column '" + column + "'");
  }
  return it->second[static_cast<std::size_t>(code)];
}

RawDataset parse_csv(std::istream& in, const FeatureSchema& schema, const std::string& source) {
  RawDataset out{schema, {}};
  const auto expected = schema.column_names();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;

    auto fields = split_line(line, line_no, source);
    if (!have_header) {
      if (fields != expected) {
        throw Error(ErrorCode::header_mismatch,
                    source + ": header does not match schema; expected [" + join(expected) +
                        "], found [" + join(fields) + "]");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      throw Error(ErrorCode::arity, source + ": row at line " + std::to_string(line_no) +
                                        " has " + std::to_string(fields.size()) +
                                        " cells, expected " + std::to_string(expected.size()));
    }
    RawRecord rec;
    rec.values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& spec = schema.columns()[c];
      if (spec.kind == ColumnKind::categorical || spec.role == ColumnRole::group_key) {
        rec.values.emplace_back(std::move(fields[c]));
        continue;
      }
      const auto& text = fields[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::parse, source + ": line " + std::to_string(line_no) +
                                          ", column '" + spec.name +
                                          "': cannot parse '" + text + "' as a finite number");
      }
      rec.values.emplace_back(v);
    }
    out.records.push_back(std::move(rec));
  }
  if (!have_header) {
    throw Error(ErrorCode::header_mismatch, source + ": missing header row");
  }
  return out;
}

RawDataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return parse_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const RawDataset& data) {
  const auto names = data.schema.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << quote(names[c]);
  }
  out << '\n';
  for (const auto& rec : data.records) {
    for (std::size_t c = 0; c < rec.values.size(); ++c) {
      if (c) out << ',';
      if (const auto* v = std::get_if<double>(&rec.values[c])) {
        out << format_real(*v);
      } else {
        out << quote(std::get<std::string>(rec.values[c]));
      }
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const RawDataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  write_csv(out, data);
  if (!out) throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

EncodedDataset encode_categoricals(const RawDataset& raw, const std::optional<EncodingMap>& map) {
  const auto& schema = raw.schema;
  const auto& cols = schema.columns();

  EncodingMap encoding;
  if (map) {
    encoding = *map;
  } else {
    for (auto c : schema.input_columns()) {
      if (cols[c].kind != ColumnKind::categorical) continue;
      std::set<std::string> distinct;
      for (const auto& rec : raw.records) distinct.insert(std::get<std::string>(rec.values[c]));
      encoding.categories[cols[c].name] = {distinct.begin(), distinct.end()};
    }
  }

  const auto n = static_cast<Eigen::Index>(raw.size());
  Dataset ds;
  ds.schema = schema;
  ds.features.resize(n, static_cast<Eigen::Index>(schema.input_count()));
  ds.targets.resize(n, static_cast<Eigen::Index>(schema.target_count()));
  if (schema.group_column()) ds.group_ids.emplace();

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rec = raw.records[static_cast<std::size_t>(r)];
    if (rec.values.size() != cols.size()) {
      throw Error(ErrorCode::arity, "record " + std::to_string(r) + " has " +
                                        std::to_string(rec.values.size()) + " cells, expected " +
                                        std::to_string(cols.size()));
    }
    for (std::size_t k = 0; k < schema.input_count(); ++k) {
      const auto c = schema.input_columns()[k];
      const auto& cell = rec.values[c];
      double v;
      if (cols[c].kind == ColumnKind::categorical) {
        v = encoding.encode(cols[c].name, std::get<std::string>(cell));
      } else {
        v = std::get<double>(cell);
      }
      ds.features(r, static_cast<Eigen::Index>(k)) = v;
    }
    for (std::size_t k = 0; k < schema.target_count(); ++k) {
      ds.targets(r, static_cast<Eigen::Index>(k)) =
          std::get<double>(rec.values[schema.target_columns()[k]]);
    }
    if (auto g = schema.group_column()) {
      ds.group_ids->push_back(std::get<std::string>(rec.values[*g]));
    }
  }
  if (!ds.features.allFinite() || !ds.targets.allFinite()) {
    throw Error(ErrorCode::non_finite, "dataset contains non-finite values after encoding");
  }
  return {std::move(ds), std::move(encoding)};
}

ScalerParams fit_scaler(const Dataset& ds, std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(ErrorCode::empty_selection, "cannot fit scaler on zero rows");
  auto fit = [&](const Eigen::MatrixXd& m) {
    std::vector<ColumnRange> ranges;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      ColumnRange range{m(static_cast<Eigen::Index>(rows[0]), c),
                        m(static_cast<Eigen::Index>(rows[0]), c)};
      for (auto r : rows) {
        if (r >= ds.rows()) {
          throw Error(ErrorCode::invalid_argument,
                      "row index " + std::to_string(r) + " out of range");
        }
        const double v = m(static_cast<Eigen::Index>(r), c);
        range.min = std::min(range.min, v);
        range.max = std::max(range.max, v);
      }
      ranges.push_back(range);
    }
    return ranges;
  };
  return {fit(ds.features), fit(ds.targets)};
}

namespace {

void check_columns(const Dataset& ds, const ScalerParams& scaler) {
  if (scaler.inputs.size() != static_cast<std::size_t>(ds.features.cols()) ||
      scaler.targets.size() != static_cast<std::size_t>(ds.targets.cols())) {
    throw Error(ErrorCode::column_mismatch,
                "scaler has " + std::to_string(scaler.inputs.size()) + " input / " +
                    std::to_string(scaler.targets.size()) + " target columns, dataset has " +
                    std::to_string(ds.features.cols()) + " / " +
                    std::to_string(ds.targets.cols()));
  }
}

template <typename Fn>
Dataset map_columns(const Dataset& ds, const ScalerParams& scaler, Fn fn) {
  check_columns(ds, scaler);
  Dataset out = ds;
  for (Eigen::Index c = 0; c < out.features.cols(); ++c) {
    const auto& range = scaler.inputs[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < out.features.rows(); ++r) {
      out.features(r, c) = fn(range, out.features(r, c));
    }
  }
  for (Eigen::Index c = 0; c < out.targets.cols(); ++c) {
    const auto& range = scaler.targets[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < out.targets.rows(); ++r) {
      out.targets(r, c) = fn(range, out.targets(r, c));
    }
  }
  return out;
}

}  // namespace

Dataset transform(const Dataset& ds, const ScalerParams& scaler) {
  return map_columns(ds, scaler, [](const ColumnRange& r, double v) { return r.scale(v); });
}

Dataset inverse_transform(const Dataset& ds, const ScalerParams& scaler) {
  return map_columns(ds, scaler, [](const ColumnRange& r, double v) { return r.unscale(v); });
}

Dataset average_repetitions(const Dataset& ds) {
  if (!ds.group_ids) {
    throw Error(ErrorCode::missing_groups, "dataset has no group ids to average over");
  }
  const auto& ids = *ds.group_ids;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto [it, inserted] = members.try_emplace(ids[r]);
    if (inserted) order.push_back(ids[r]);
    it->second.push_back(r);
  }

  Dataset out;
  out.schema = ds.schema;
  out.features.resize(static_cast<Eigen::Index>(order.size()), ds.features.cols());
  out.targets.resize(static_cast<Eigen::Index>(order.size()), ds.targets.cols());
  out.group_ids = order;
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& rows = members[order[g]];
    const auto first = static_cast<Eigen::Index>(rows.front());
    const auto dst = static_cast<Eigen::Index>(g);
    out.features.row(dst) = ds.features.row(first);
    for (auto r : rows) {
      if (ds.features.row(static_cast<Eigen::Index>(r)) != ds.features.row(first)) {
        throw Error(ErrorCode::invalid_argument,
                    "group '" + order[g] + "' has rows with different inputs (rows " +
                        std::to_string(rows.front()) + " and " + std::to_string(r) + ")");
      }
    }
    for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) {
      double sum = 0.0;
      for (auto r : rows) sum += ds.targets(static_cast<Eigen::Index>(r), c);
      out.targets(dst, c) = sum / static_cast<double>(rows.size());
    }
  }
  return out;
}

SplitIndices split_dataset(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  if (n < 3) {
    throw Error(ErrorCode::invalid_argument,
                "need at least 3 rows to split, got " + std::to_string(n));
  }
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, "split ratios must be non-negative and sum to 1");
  }
  const auto round_half_up = [](double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
  };
  const auto nd = static_cast<double>(n);
  const std::size_t n_train = std::min(n, round_half_up(ratios.train * nd));
  const std::size_t n_val = std::min(n - n_train, round_half_up(ratios.validation * nd));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));

  SplitIndices out;
  out.seed = seed;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                        perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  return out;
}

}  // namespace weldnet
