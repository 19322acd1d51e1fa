#include "weldnet/model_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "weldnet/error.hpp"

namespace weldnet {
namespace {

constexpr const char* kMagic = "weldnet-model";

// Tokens are whitespace-separated; '%', whitespace and control bytes are
// written as %XX. The empty string is a lone '%'.
std::string escape(const std::string& s) {
  if (s.empty()) return "%";
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == '%' || c == 0x7F) {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_hex(std::uint64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, 16);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Reads the next non-empty line and checks its leading keyword.
  std::istringstream expect(const std::string& keyword) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::istringstream tokens(line);
      std::string head;
      tokens >> head;
      if (head != keyword) {
        fail(ErrorCode::parse, "expected '" + keyword + "', found '" + head + "'");
      }
      return tokens;
    }
    fail(ErrorCode::parse, "unexpected end of file, expected '" + keyword + "'");
  }

  std::string word(std::istringstream& tokens, const char* what) {
    std::string w;
    if (!(tokens >> w)) fail(ErrorCode::parse, std::string("missing ") + what);
    return w;
  }

  std::string text(std::istringstream& tokens, const char* what) {
    const std::string w = word(tokens, what);
    if (w == "%") return {};
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != '%') {
        out.push_back(w[i]);
        continue;
      }
      unsigned value = 0;
      if (i + 2 >= w.size()) fail(ErrorCode::parse, std::string("truncated escape in ") + what);
      auto res = std::from_chars(w.data() + i + 1, w.data() + i + 3, value, 16);
      if (res.ec != std::errc{} || res.ptr != w.data() + i + 3) {
        fail(ErrorCode::parse, std::string("bad escape in ") + what);
      }
      out.push_back(static_cast<char>(value));
      i += 2;
    }
    return out;
  }

  template <typename T>
  T integer(std::istringstream& tokens, const char* what, int base = 10) {
    const std::string w = word(tokens, what);
    T value{};
    auto res = std::from_chars(w.data(), w.data() + w.size(), value, base);
    if (res.ec != std::errc{} || res.ptr != w.data() + w.size()) {
      fail(ErrorCode::parse, std::string("bad integer for ") + what + ": '" + w + "'");
    }
    return value;
  }

  double real(std::istringstream& tokens, const char* what) {
    const std::string w = word(tokens, what);
    double value = 0.0;
    auto res = std::from_chars(w.data(), w.data() + w.size(), value);
    if (res.ec != std::errc{} || res.ptr != w.data() + w.size() || !std::isfinite(value)) {
      fail(ErrorCode::parse, std::string("bad number for ") + what + ": '" + w + "'");
    }
    return value;
  }

  // Reads every remaining real on the line; the caller checks the count.
  std::vector<double> reals(std::istringstream& tokens, const char* what) {
    std::vector<double> values;
    std::string w;
    while (tokens >> w) {
      double value = 0.0;
      auto res = std::from_chars(w.data(), w.data() + w.size(), value);
      if (res.ec != std::errc{} || res.ptr != w.data() + w.size() || !std::isfinite(value)) {
        fail(ErrorCode::parse, std::string("bad number in ") + what + ": '" + w + "'");
      }
      values.push_back(value);
    }
    return values;
  }

  void end_of_line(std::istringstream& tokens) {
    std::string extra;
    if (tokens >> extra) fail(ErrorCode::parse, "unexpected token '" + extra + "'");
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& message) const {
    throw Error(code, source_ + ":" + std::to_string(line_no_) + ": " + message);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::size_t ModelBundle::target_index() const {
  auto k = schema.target_index(target_name);
  if (!k) {
    throw Error(ErrorCode::schema_mismatch,
                "target '" + target_name + "' is not a target column of the schema");
  }
  return *k;
}

void ModelBundle::validate() const {
  if (format_version != kModelFormatVersion) {
    throw Error(ErrorCode::unknown_version,
                "unsupported model format version " + std::to_string(format_version));
  }
  target_index();
  network.validate();
  if (network.input_dim() != schema.input_count()) {
    throw Error(ErrorCode::schema_mismatch,
                "network expects " + std::to_string(network.input_dim()) +
                    " inputs but the schema has " + std::to_string(schema.input_count()));
  }
  if (network.output_dim() != 1) {
    throw Error(ErrorCode::corrupted_dims, "network must end in a single output unit");
  }
  if (scaler.inputs.size() != schema.input_count() ||
      scaler.targets.size() != schema.target_count()) {
    throw Error(ErrorCode::schema_mismatch, "scaler columns do not match the schema");
  }
  for (const auto& r : scaler.inputs) {
    if (!(r.min <= r.max)) throw Error(ErrorCode::corrupted_dims, "scaler range with min > max");
  }
  for (const auto& r : scaler.targets) {
    if (!(r.min <= r.max)) throw Error(ErrorCode::corrupted_dims, "scaler range with min > max");
  }
  std::size_t categorical = 0;
  for (auto c : schema.input_columns()) {
    const auto& col = schema.columns()[c];
    if (col.kind != ColumnKind::categorical) continue;
    ++categorical;
    if (!encoding.categories.contains(col.name)) {
      throw Error(ErrorCode::schema_mismatch, "no encoding for categorical input '" + col.name + "'");
    }
  }
  if (encoding.categories.size() != categorical) {
    throw Error(ErrorCode::schema_mismatch, "encoding names columns that are not categorical inputs");
  }
}

void write_model(std::ostream& out, const ModelBundle& b) {
  out << kMagic << ' ' << b.format_version << '\n';
  out << "target " << escape(b.target_name) << '\n';
  const auto& fp = b.fingerprint;
  out << "fingerprint " << fp.split_seed << ' ' << fp.shuffle_seed << ' ' << fp.init_seed << ' '
      << format_hex(fp.config_hash) << '\n';
  out << "split " << format_real(fp.split.train) << ' ' << format_real(fp.split.validation) << ' '
      << format_real(fp.split.test) << '\n';
  out << "average_repetitions " << (fp.average_repetitions ? 1 : 0) << '\n';

  out << "columns " << b.schema.column_count() << '\n';
  for (const auto& col : b.schema.columns()) {
    out << "column " << escape(col.name) << ' ' << to_string(col.kind) << ' '
        << to_string(col.role) << ' ' << (col.unit ? escape(*col.unit) : "-") << '\n';
  }

  out << "encoding " << b.encoding.categories.size() << '\n';
  for (const auto& [name, cats] : b.encoding.categories) {
    out << "categories " << escape(name) << ' ' << cats.size();
    for (const auto& c : cats) out << ' ' << escape(c);
    out << '\n';
  }

  out << "scaler " << b.scaler.inputs.size() << ' ' << b.scaler.targets.size() << '\n';
  for (const auto& r : b.scaler.inputs) {
    out << "input " << format_real(r.min) << ' ' << format_real(r.max) << '\n';
  }
  for (const auto& r : b.scaler.targets) {
    out << "target_range " << format_real(r.min) << ' ' << format_real(r.max) << '\n';
  }

  out << "layers " << b.network.layers.size() << '\n';
  for (std::size_t i = 0; i < b.network.layers.size(); ++i) {
    const auto& l = b.network.layers[i];
    out << "layer " << i << ' ' << to_string(l.activation) << ' ' << l.weights.rows() << ' '
        << l.weights.cols() << '\n';
    out << "weights";
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out << ' ' << format_real(l.weights(r, c));
    }
    out << '\n';
    out << "biases";
    for (Eigen::Index r = 0; r < l.biases.size(); ++r) out << ' ' << format_real(l.biases[r]);
    out << '\n';
  }
  out << "end\n";
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  write_model(out, bundle);
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

ModelBundle read_model(std::istream& in, const std::string& source) {
  Reader rd(in, source);
  ModelBundle b;

  {
    auto t = rd.expect(kMagic);
    b.format_version = rd.integer<int>(t, "format version");
    if (b.format_version != kModelFormatVersion) {
      rd.fail(ErrorCode::unknown_version,
              "unknown model format version " + std::to_string(b.format_version) +
                  " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
    }
  }
  {
    auto t = rd.expect("target");
    b.target_name = rd.text(t, "target name");
    rd.end_of_line(t);
  }
  {
    auto t = rd.expect("fingerprint");
    b.fingerprint.split_seed = rd.integer<std::uint64_t>(t, "split seed");
    b.fingerprint.shuffle_seed = rd.integer<std::uint64_t>(t, "shuffle seed");
    b.fingerprint.init_seed = rd.integer<std::uint64_t>(t, "init seed");
    b.fingerprint.config_hash = rd.integer<std::uint64_t>(t, "config hash", 16);
    rd.end_of_line(t);
  }
  {
    auto t = rd.expect("split");
    b.fingerprint.split.train = rd.real(t, "train ratio");
    b.fingerprint.split.validation = rd.real(t, "validation ratio");
    b.fingerprint.split.test = rd.real(t, "test ratio");
    rd.end_of_line(t);
  }
  {
    auto t = rd.expect("average_repetitions");
    const auto flag = rd.integer<int>(t, "average_repetitions flag");
    if (flag != 0 && flag != 1) rd.fail(ErrorCode::parse, "average_repetitions must be 0 or 1");
    b.fingerprint.average_repetitions = flag == 1;
    rd.end_of_line(t);
  }
  {
    auto t = rd.expect("columns");
    const auto count = rd.integer<std::size_t>(t, "column count");
    std::vector<ColumnSpec> cols;
    for (std::size_t i = 0; i < count; ++i) {
      auto c = rd.expect("column");
      ColumnSpec spec;
      spec.name = rd.text(c, "column name");
      spec.kind = parse_column_kind(rd.word(c, "column kind"));
      spec.role = parse_column_role(rd.word(c, "column role"));
      const std::string unit = rd.word(c, "column unit");
      if (unit != "-") {
        std::istringstream u(unit);
        spec.unit = rd.text(u, "column unit");
      }
      rd.end_of_line(c);
      cols.push_back(std::move(spec));
    }
    try {
      b.schema = FeatureSchema(std::move(cols));
    } catch (const Error& e) {
      rd.fail(ErrorCode::schema_mismatch, e.what());
    }
  }
  {
    auto t = rd.expect("encoding");
    const auto count = rd.integer<std::size_t>(t, "encoding count");
    for (std::size_t i = 0; i < count; ++i) {
      auto c = rd.expect("categories");
      const std::string name = rd.text(c, "encoded column");
      const auto k = rd.integer<std::size_t>(c, "category count");
      std::vector<std::string> cats;
      for (std::size_t j = 0; j < k; ++j) cats.push_back(rd.text(c, "category"));
      rd.end_of_line(c);
      if (!std::is_sorted(cats.begin(), cats.end()) ||
          std::adjacent_find(cats.begin(), cats.end()) != cats.end()) {
        rd.fail(ErrorCode::parse, "categories of '" + name + "' are not strictly sorted");
      }
      b.encoding.categories[name] = std::move(cats);
    }
  }
  {
    auto t = rd.expect("scaler");
    const auto n_inputs = rd.integer<std::size_t>(t, "scaler input count");
    const auto n_targets = rd.integer<std::size_t>(t, "scaler target count");
    for (std::size_t i = 0; i < n_inputs; ++i) {
      auto r = rd.expect("input");
      ColumnRange range{rd.real(r, "min"), rd.real(r, "max")};
      rd.end_of_line(r);
      b.scaler.inputs.push_back(range);
    }
    for (std::size_t i = 0; i < n_targets; ++i) {
      auto r = rd.expect("target_range");
      ColumnRange range{rd.real(r, "min"), rd.real(r, "max")};
      rd.end_of_line(r);
      b.scaler.targets.push_back(range);
    }
  }
  {
    auto t = rd.expect("layers");
    const auto count = rd.integer<std::size_t>(t, "layer count");
    for (std::size_t i = 0; i < count; ++i) {
      auto h = rd.expect("layer");
      const auto index = rd.integer<std::size_t>(h, "layer index");
      if (index != i) {
        rd.fail(ErrorCode::corrupted_dims,
                "layer " + std::to_string(i) + ": header says layer " + std::to_string(index));
      }
      DenseLayer layer;
      try {
        layer.activation = parse_activation(rd.word(h, "activation"));
      } catch (const Error& e) {
        rd.fail(ErrorCode::parse, e.what());
      }
      const auto rows = rd.integer<std::size_t>(h, "output width");
      const auto cols = rd.integer<std::size_t>(h, "input width");
      rd.end_of_line(h);
      if (rows == 0 || cols == 0) {
        rd.fail(ErrorCode::corrupted_dims, "layer " + std::to_string(i) + " has a zero dimension");
      }

      auto w = rd.expect("weights");
      const auto weights = rd.reals(w, "weights");
      if (weights.size() != rows * cols) {
        rd.fail(ErrorCode::corrupted_dims,
                "layer " + std::to_string(i) + ": expected " + std::to_string(rows * cols) +
                    " weights, found " + std::to_string(weights.size()));
      }
      layer.weights.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              weights[r * cols + c];
        }
      }

      auto bl = rd.expect("biases");
      const auto biases = rd.reals(bl, "biases");
      if (biases.size() != rows) {
        rd.fail(ErrorCode::corrupted_dims,
                "layer " + std::to_string(i) + ": expected " + std::to_string(rows) +
                    " biases, found " + std::to_string(biases.size()));
      }
      layer.biases = Eigen::Map<const Eigen::VectorXd>(biases.data(),
                                                       static_cast<Eigen::Index>(rows));
      if (i > 0 && cols != b.network.layers.back().output_dim()) {
        rd.fail(ErrorCode::corrupted_dims,
                "layer " + std::to_string(i) + " takes " + std::to_string(cols) +
                    " inputs but layer " + std::to_string(i - 1) + " produces " +
                    std::to_string(b.network.layers.back().output_dim()));
      }
      b.network.layers.push_back(std::move(layer));
    }
  }
  rd.expect("end");
  if (b.network.layers.empty()) {
    rd.fail(ErrorCode::corrupted_dims, "model has no layers");
  }
  b.validate();
  return b;
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return read_model(in, path.string());
}

}  // namespace weldnet
