#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "weldnet/error.hpp"
#include "weldnet/model_store.hpp"
#include "weldnet/synth_data.hpp"

using namespace weldnet;

namespace {

ModelBundle make_bundle(std::uint64_t seed) {
  GeneratorConfig g;
  g.n_configs = 12;
  g.seed = seed;
  auto enc = encode_categoricals(generate_dataset(g));
  const auto ds = average_repetitions(enc.dataset);
  const auto split = split_dataset(ds.rows(), {}, seed);
  ModelBundle b;
  b.network = init_network(pore6_preset(ds.features.cols(), seed, 8));
  b.scaler = fit_scaler(ds, split.train);
  b.encoding = enc.encoding;
  b.schema = ds.schema;
  b.target_name = "pore_volume";
  b.fingerprint = {seed, 7, seed, fnv1a64("cfg"), {}, true};
  // Non-trivial biases so they take part in the round trip.
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0, 1);
  for (auto& l : b.network.layers)
    for (auto& v : l.biases) v = n(gen);
  return b;
}

std::string serialize(const ModelBundle& b) {
  std::ostringstream out;
  write_model(out, b);
  return out.str();
}

ErrorCode load_error(const std::string& text, std::string* message = nullptr) {
  std::istringstream in(text);
  try {
    read_model(in, "m.model");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "load succeeded";
  return ErrorCode::io;
}

std::string replace_line(const std::string& text, const std::string& prefix, const std::string& line) {
  std::istringstream in(text);
  std::string out, l;
  bool done = false;
  while (std::getline(in, l)) {
    if (!done && l.rfind(prefix, 0) == 0) {
      l = line;
      done = true;
    }
    out += l + "\n";
  }
  EXPECT_TRUE(done) << prefix;
  return out;
}

std::string line_starting(const std::string& text, const std::string& prefix, int skip = 0) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l))
    if (l.rfind(prefix, 0) == 0 && skip-- == 0) return l;
  return {};
}

}  // namespace

TEST(ModelStore, RoundTripReproducesBundleExactly) {
  const auto b = make_bundle(3);
  oracle::TempDir dir("model");
  save_model(b, dir / "m.model");
  const auto back = load_model(dir / "m.model");
  EXPECT_EQ(back.format_version, kModelFormatVersion);
  EXPECT_EQ(back.schema, b.schema);
  EXPECT_EQ(back.encoding, b.encoding);
  EXPECT_EQ(back.scaler, b.scaler);
  EXPECT_EQ(back.target_name, b.target_name);
  EXPECT_EQ(back.fingerprint.split_seed, b.fingerprint.split_seed);
  EXPECT_EQ(back.fingerprint.config_hash, b.fingerprint.config_hash);
  EXPECT_EQ(back.fingerprint.average_repetitions, b.fingerprint.average_repetitions);
  ASSERT_EQ(back.network.layers.size(), b.network.layers.size());
  for (std::size_t l = 0; l < b.network.layers.size(); ++l) {
    EXPECT_EQ(back.network.layers[l].weights, b.network.layers[l].weights);
    EXPECT_EQ(back.network.layers[l].biases, b.network.layers[l].biases);
    EXPECT_EQ(back.network.layers[l].activation, b.network.layers[l].activation);
  }
  EXPECT_EQ(serialize(back), serialize(b));
}

TEST(ModelStore, PredictionsAreBitIdenticalAfterReload) {
  const auto b = make_bundle(4);
  std::istringstream in(serialize(b));
  const auto back = read_model(in);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  Eigen::MatrixXd x(100, b.network.input_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(gen);
  const auto p = predict(b.network, x), q = predict(back.network, x);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_EQ(p(i), q(i));
}

TEST(ModelStore, ExtremeDoublesSurviveText) {
  auto b = make_bundle(5);
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  auto& w = b.network.layers[0].weights;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double v;
    do {
      const auto r = bits(gen);
      std::memcpy(&v, &r, sizeof v);
    } while (!std::isfinite(v));
    w.data()[i] = v;
  }
  w(0, 0) = 5e-324;
  w(0, 1) = -0.0;
  std::istringstream in(serialize(b));
  const auto back = read_model(in);
  const auto& r = back.network.layers[0].weights;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    EXPECT_EQ(std::memcmp(&r.data()[i], &w.data()[i], sizeof(double)), 0) << i;
}

TEST(ModelStore, EveryFileStartsWithVersion) {
  EXPECT_EQ(line_starting(serialize(make_bundle(6)), "weldnet-model"), "weldnet-model 1");
}

TEST(ModelStore, FutureVersionIsRejected) {
  const auto text = replace_line(serialize(make_bundle(6)), "weldnet-model", "weldnet-model 2");
  EXPECT_EQ(load_error(text), ErrorCode::unknown_version);
}

TEST(ModelStore, TruncatedWeightsNameTheLayer) {
  const auto text = serialize(make_bundle(7));
  auto weights = line_starting(text, "weights", 2);
  weights = weights.substr(0, weights.rfind(' '));
  std::string msg;
  EXPECT_EQ(load_error(replace_line(text, line_starting(text, "weights", 2), weights), &msg),
            ErrorCode::corrupted_dims);
  EXPECT_NE(msg.find("layer 2"), std::string::npos) << msg;
}

TEST(ModelStore, BrokenLayerChainIsCorruptedDims) {
  const auto good = serialize(make_bundle(8));
  const auto header = line_starting(good, "layer ", 1);
  std::istringstream fields(header);
  std::string tag, idx, act, out_dim, in_dim;
  fields >> tag >> idx >> act >> out_dim >> in_dim;
  const auto bad = replace_line(good, header, tag + " " + idx + " " + act + " " + out_dim + " " +
                                                  std::to_string(std::stoi(in_dim) + 1));
  EXPECT_EQ(load_error(bad), ErrorCode::corrupted_dims);
}

TEST(ModelStore, SchemaMismatchIsDistinct) {
  const auto text = serialize(make_bundle(9));
  EXPECT_EQ(load_error(replace_line(text, "target ", "target not_a_column")), ErrorCode::schema_mismatch);

  auto b = make_bundle(9);
  b.scaler.inputs.pop_back();
  EXPECT_THROW(b.validate(), Error);
}

TEST(ModelStore, GarbageAndMissingFiles) {
  EXPECT_EQ(load_error("hello\n"), ErrorCode::parse);
  EXPECT_EQ(load_error(""), ErrorCode::parse);
  const auto text = serialize(make_bundle(10));
  std::istringstream half(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_model(half), Error);
  EXPECT_THROW(load_model("/nonexistent/x.model"), Error);
}

TEST(ModelStore, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}
