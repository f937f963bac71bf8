#include "negata/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "negata/errors.hpp"

namespace negata {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string u64_hex(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

const ordered_json& require(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw data_format_error(std::string("model file: missing field '") + key + "'");
  }
  return *it;
}

ordered_json nodes_to_json(const DecisionTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const DecisionTree::Node& n : tree.nodes()) {
    ordered_json j;
    j["f"] = n.feature;
    j["t"] = n.threshold;
    j["l"] = n.left;
    j["r"] = n.right;
    j["g"] = n.gain;
    j["c"] = n.cover;
    j["v"] = n.value;
    nodes.push_back(std::move(j));
  }
  return nodes;
}

DecisionTree tree_from_json(const ordered_json& nodes_json) {
  if (!nodes_json.is_array() || nodes_json.empty()) {
    throw data_format_error("model file: tree nodes must be a non-empty array");
  }
  std::vector<DecisionTree::Node> nodes;
  nodes.reserve(nodes_json.size());
  const int count = static_cast<int>(nodes_json.size());
  int index = 0;
  for (const ordered_json& j : nodes_json) {
    DecisionTree::Node n;
    n.feature = require(j, "f").get<int>();
    n.threshold = require(j, "t").get<double>();
    n.left = require(j, "l").get<int>();
    n.right = require(j, "r").get<int>();
    n.gain = require(j, "g").get<double>();
    n.cover = require(j, "c").get<double>();
    n.value = require(j, "v").get<double>();
    if (!n.is_leaf()) {
      // Children must come after their parent; prediction decomposition
      // relies on that ordering.
      if (n.left <= index || n.left >= count || n.right <= index || n.right >= count) {
        throw data_format_error("model file: tree node has out-of-order children");
      }
    }
    nodes.push_back(n);
    ++index;
  }
  return DecisionTree(std::move(nodes));
}

ordered_json metrics_to_json(const MetricsReport& m) {
  ordered_json j;
  j["per_class_f1"] = m.per_class_f1;
  j["macro_f1"] = m.macro_f1;
  j["accuracy"] = m.accuracy;
  j["support"] = m.support;
  j["n_evaluated"] = m.n_evaluated;
  j["class_absent"] = m.class_absent;
  if (m.fp_rate) j["fp_rate"] = *m.fp_rate;
  if (m.fn_rate) j["fn_rate"] = *m.fn_rate;
  return j;
}

MetricsReport metrics_from_json(const ordered_json& j) {
  MetricsReport m;
  m.per_class_f1 = require(j, "per_class_f1").get<std::array<double, 3>>();
  m.macro_f1 = require(j, "macro_f1").get<double>();
  m.accuracy = require(j, "accuracy").get<double>();
  m.support = require(j, "support").get<std::array<long long, 3>>();
  m.n_evaluated = require(j, "n_evaluated").get<long long>();
  m.class_absent = require(j, "class_absent").get<std::array<bool, 3>>();
  if (j.contains("fp_rate")) m.fp_rate = j.at("fp_rate").get<double>();
  if (j.contains("fn_rate")) m.fn_rate = j.at("fn_rate").get<double>();
  return m;
}

ordered_json bundle_to_json(const ModelBundle& bundle) {
  ordered_json root;
  root["format_version"] = bundle.format_version;
  root["disease"] = bundle.disease;
  root["tau"] = bundle.tau;
  root["lemma_table_checksum"] = bundle.lemma_table_checksum;

  const Vocabulary& vocab = bundle.tfidf.vocabulary();
  ordered_json tfidf;
  tfidf["min_df"] = bundle.tfidf.params().min_df;
  tfidf["use_bigrams"] = bundle.tfidf.params().use_bigrams;
  tfidf["doc_count"] = vocab.doc_count();
  tfidf["terms"] = vocab.terms();
  tfidf["df"] = vocab.dfs();
  tfidf["idf"] = bundle.tfidf.idf_values();  // informational; recomputed on load
  root["tfidf"] = std::move(tfidf);

  const GbdtModel& model = bundle.classifier;
  ordered_json clf;
  clf["objective"] =
      model.objective() == Objective::Softmax ? "softmax" : "binary_logistic";
  clf["num_classes"] = model.num_classes();
  clf["num_features"] = model.num_features();
  clf["eta"] = model.eta();
  clf["base_scores"] = model.base_scores();
  clf["train_loss"] = model.train_loss();
  ordered_json rounds = ordered_json::array();
  for (const auto& round : model.trees()) {
    ordered_json streams = ordered_json::array();
    for (const DecisionTree& tree : round) {
      ordered_json t;
      t["nodes"] = nodes_to_json(tree);
      streams.push_back(std::move(t));
    }
    rounds.push_back(std::move(streams));
  }
  clf["trees"] = std::move(rounds);
  root["classifier"] = std::move(clf);

  const ModelMetadata& md = bundle.metadata;
  ordered_json meta;
  meta["seed"] = md.seed;
  meta["rounds"] = md.params.rounds;
  meta["depth"] = md.params.depth;
  meta["eta"] = md.params.eta;
  meta["lambda"] = md.params.lambda;
  meta["min_leaf"] = md.params.min_leaf;
  meta["test_fraction"] = md.params.test_fraction;
  meta["tau"] = md.params.tau;
  meta["min_df"] = md.params.vectorizer.min_df;
  meta["use_bigrams"] = md.params.vectorizer.use_bigrams;
  meta["corpus_fingerprint"] = md.corpus_fingerprint;
  meta["metrics"] = metrics_to_json(md.metrics);
  root["metadata"] = std::move(meta);
  return root;
}

ModelBundle bundle_from_json(const ordered_json& root) {
  const int version = require(root, "format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw model_version_error("unsupported model format version " +
                              std::to_string(version) + " (this build reads version " +
                              std::to_string(kModelFormatVersion) + ")");
  }

  ModelBundle bundle;
  bundle.format_version = version;
  bundle.disease = require(root, "disease").get<std::string>();
  bundle.tau = require(root, "tau").get<double>();
  bundle.lemma_table_checksum = require(root, "lemma_table_checksum").get<std::string>();

  const ordered_json& tfidf = require(root, "tfidf");
  VectorizerParams vp;
  vp.min_df = require(tfidf, "min_df").get<int>();
  vp.use_bigrams = require(tfidf, "use_bigrams").get<bool>();
  Vocabulary vocab(require(tfidf, "terms").get<std::vector<std::string>>(),
                   require(tfidf, "df").get<std::vector<int>>(),
                   require(tfidf, "doc_count").get<std::size_t>());
  bundle.tfidf = TfIdfModel(std::move(vocab), vp);

  const ordered_json& clf = require(root, "classifier");
  const std::string objective_name = require(clf, "objective").get<std::string>();
  Objective objective;
  if (objective_name == "softmax") {
    objective = Objective::Softmax;
  } else if (objective_name == "binary_logistic") {
    objective = Objective::BinaryLogistic;
  } else {
    throw data_format_error("model file: unknown objective '" + objective_name + "'");
  }
  const int num_classes = require(clf, "num_classes").get<int>();
  const int num_features = require(clf, "num_features").get<int>();
  const double eta = require(clf, "eta").get<double>();
  auto base_scores = require(clf, "base_scores").get<std::vector<double>>();
  auto train_loss = require(clf, "train_loss").get<std::vector<double>>();
  const ordered_json& rounds_json = require(clf, "trees");
  if (!rounds_json.is_array()) {
    throw data_format_error("model file: 'trees' must be an array");
  }
  std::vector<std::vector<DecisionTree>> trees;
  trees.reserve(rounds_json.size());
  for (const ordered_json& round_json : rounds_json) {
    if (!round_json.is_array()) {
      throw data_format_error("model file: each round must be an array of trees");
    }
    std::vector<DecisionTree> round;
    round.reserve(round_json.size());
    for (const ordered_json& tree_json : round_json) {
      round.push_back(tree_from_json(require(tree_json, "nodes")));
    }
    trees.push_back(std::move(round));
  }
  bundle.classifier = GbdtModel(std::move(trees), std::move(base_scores), eta,
                                objective, num_classes, num_features);
  bundle.classifier.set_train_loss(std::move(train_loss));

  const ordered_json& meta = require(root, "metadata");
  bundle.metadata.seed = require(meta, "seed").get<std::uint64_t>();
  bundle.metadata.params.rounds = require(meta, "rounds").get<int>();
  bundle.metadata.params.depth = require(meta, "depth").get<int>();
  bundle.metadata.params.eta = require(meta, "eta").get<double>();
  bundle.metadata.params.lambda = require(meta, "lambda").get<double>();
  bundle.metadata.params.min_leaf = require(meta, "min_leaf").get<int>();
  bundle.metadata.params.test_fraction = require(meta, "test_fraction").get<double>();
  bundle.metadata.params.tau = require(meta, "tau").get<double>();
  bundle.metadata.params.vectorizer.min_df = require(meta, "min_df").get<int>();
  bundle.metadata.params.vectorizer.use_bigrams = require(meta, "use_bigrams").get<bool>();
  bundle.metadata.corpus_fingerprint =
      require(meta, "corpus_fingerprint").get<std::string>();
  bundle.metadata.metrics = metrics_from_json(require(meta, "metrics"));
  return bundle;
}

}  // namespace

ModelBundle make_bundle(const NegationDetector& detector, const ModelMetadata& metadata) {
  ModelBundle bundle;
  bundle.disease = detector.disease();
  bundle.tfidf = detector.tfidf();
  bundle.classifier = detector.classifier();
  bundle.tau = detector.tau();
  bundle.lemma_table_checksum = u64_hex(detector.lemmatizer()->checksum());
  bundle.metadata = metadata;
  return bundle;
}

NegationDetector detector_from_bundle(const ModelBundle& bundle,
                                      std::shared_ptr<const Lemmatizer> lemmatizer,
                                      bool* lemma_checksum_mismatch) {
  if (!lemmatizer) throw argument_error("detector_from_bundle needs a lemmatizer");
  if (lemma_checksum_mismatch != nullptr) {
    *lemma_checksum_mismatch =
        u64_hex(lemmatizer->checksum()) != bundle.lemma_table_checksum;
  }
  return NegationDetector(bundle.disease, bundle.tfidf, bundle.classifier,
                          bundle.tau, std::move(lemmatizer));
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  const ordered_json root = bundle_to_json(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open model file for writing: " + path.string());
  out << root.dump() << '\n';
  out.flush();
  if (!out) throw io_error("failed writing model file: " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open model file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("failed reading model file: " + path.string());
  try {
    const ordered_json root = ordered_json::parse(buffer.str());
    if (!root.is_object()) {
      throw data_format_error("model file: top level must be a JSON object");
    }
    return bundle_from_json(root);
  } catch (const nlohmann::json::exception& e) {
    throw data_format_error(path.string() + ": " + e.what());
  }
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return u64_hex(h);
}

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file for fingerprinting: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("failed reading file: " + path.string());
  return fnv1a64_hex(buffer.str());
}

}  // namespace negata
