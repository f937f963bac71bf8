#include "negata/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "negata/corpus.hpp"
#include "negata/downstream.hpp"
#include "negata/errors.hpp"
#include "negata/metrics.hpp"
#include "negata/model_io.hpp"
#include "negata/negation.hpp"
#include "negata/paths.hpp"
#include "negata/textnorm.hpp"

namespace negata {

namespace {

// Options shared by every command that normalizes text.
struct TextOpts {
  std::string lemma_table;     // empty: NEGATA_LEMMA_TABLE env, then default
  std::string abbreviations;   // empty: built-in defaults
};

void add_text_opts(CLI::App* sub, const std::shared_ptr<TextOpts>& o) {
  sub->add_option("--lemma-table", o->lemma_table,
                  "lemma table TSV (default: NEGATA_LEMMA_TABLE env, then the packaged table)");
  sub->add_option("--abbrev", o->abbreviations,
                  "abbreviation list, one per line (default: built-in list)");
}

std::shared_ptr<const Lemmatizer> load_lemmatizer(const TextOpts& o) {
  return std::make_shared<const Lemmatizer>(
      Lemmatizer::from_file(resolve_lemma_table(o.lemma_table)));
}

std::set<std::string> load_abbrevs(const TextOpts& o) {
  if (o.abbreviations.empty()) return default_abbreviations();
  return load_abbreviations(o.abbreviations);
}

std::vector<Document> load_normalized(const std::filesystem::path& path,
                                      const Lemmatizer& lemmatizer,
                                      const std::set<std::string>& abbrevs) {
  std::vector<Document> docs = load_documents(path);
  for (Document& doc : docs) {
    doc = normalize_document(std::move(doc), lemmatizer, abbrevs);
  }
  return docs;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw argument_error("cannot parse " + what + ": '" + text + "'");
  }
}

std::string format_fixed(double value, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << value;
  return out.str();
}

std::string metrics_header(bool with_disagreement) {
  std::string head =
      "disease\tdocs\tf1_denied\tf1_not_mentioned\tf1_present\tmacro_f1\taccuracy";
  if (with_disagreement) head += "\tfp_rate\tfn_rate";
  return head + "\n";
}

std::string metrics_row(const std::string& disease, long long docs,
                        const MetricsReport& m) {
  std::ostringstream out;
  out << disease << '\t' << docs;
  for (int k = 0; k < 3; ++k) {
    out << '\t' << format_fixed(m.per_class_f1[static_cast<std::size_t>(k)], 4);
  }
  out << '\t' << format_fixed(m.macro_f1, 4) << '\t' << format_fixed(m.accuracy, 4);
  if (m.fp_rate && m.fn_rate) {
    out << '\t' << format_fixed(*m.fp_rate, 4) << '\t' << format_fixed(*m.fn_rate, 4);
  }
  out << '\n';
  return out.str();
}

TermLexicon load_lexicon(const std::string& flag_value) {
  if (!flag_value.empty()) return TermLexicon::from_file(flag_value);
  return TermLexicon::builtin();
}

struct LoadedDetector {
  NegationDetector detector;
  ModelBundle bundle;
};

LoadedDetector load_detector(const std::filesystem::path& model_path,
                             std::shared_ptr<const Lemmatizer> lemmatizer) {
  ModelBundle bundle = load_model(model_path);
  bool mismatch = false;
  NegationDetector detector =
      detector_from_bundle(bundle, std::move(lemmatizer), &mismatch);
  if (mismatch) {
    std::cerr << "warning: lemma table checksum differs from the one recorded in "
              << model_path.string() << "; predictions may not match training\n";
  }
  return {std::move(detector), std::move(bundle)};
}

// --- gen-corpus ---------------------------------------------------------

struct GenOpts {
  std::string out;
  std::uint64_t seed = 42;
  long long size = 1000;
  std::string diseases;  // comma separated, empty: all canonical
  std::string mix;       // denied,not_mentioned,present
  double family_fraction = 0.25;
  bool no_targets = false;
};

void setup_gen_corpus(CLI::App& app) {
  auto o = std::make_shared<GenOpts>();
  CLI::App* sub = app.add_subcommand(
      "gen-corpus", "generate a labeled synthetic anamnesis corpus (JSONL)");
  sub->add_option("--out", o->out, "output JSONL path")->required();
  sub->add_option("--seed", o->seed, "random seed (default 42)");
  sub->add_option("--size", o->size, "number of documents (default 1000)");
  sub->add_option("--diseases", o->diseases,
                  "comma-separated disease ids (default: stroke,MI,AH,DM,AP)");
  sub->add_option("--mix", o->mix,
                  "label mix denied,not_mentioned,present (default 0.3,0.3,0.4)");
  sub->add_option("--family-fraction", o->family_fraction,
                  "share of label-0 documents that mention family history (default 0.25)");
  sub->add_flag("--no-targets", o->no_targets,
                "skip downstream targets and lab values");
  sub->callback([o] {
    SynthParams params;
    params.seed = o->seed;
    params.size = o->size;
    params.family_fraction = o->family_fraction;
    params.with_targets = !o->no_targets;
    if (!o->diseases.empty()) params.diseases = split_csv(o->diseases);
    if (!o->mix.empty()) {
      const std::vector<std::string> parts = split_csv(o->mix);
      if (parts.size() != 3) {
        throw argument_error("--mix needs exactly three comma-separated numbers");
      }
      params.mix.denied = parse_double(parts[0], "--mix");
      params.mix.not_mentioned = parse_double(parts[1], "--mix");
      params.mix.present = parse_double(parts[2], "--mix");
    }
    const std::vector<Document> docs = generate_synthetic_corpus(params);
    save_documents(docs, o->out);
    std::cerr << "wrote " << docs.size() << " documents to " << o->out << '\n';
  });
}

// --- annotate -----------------------------------------------------------

struct AnnotateOpts {
  std::string in;
  std::string rules;
  std::string disease;
  std::string out;
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_annotate(CLI::App& app) {
  auto o = std::make_shared<AnnotateOpts>();
  CLI::App* sub = app.add_subcommand(
      "annotate", "label documents for one disease with phrase rules");
  sub->add_option("--in", o->in, "input JSONL corpus")->required();
  sub->add_option("--rules", o->rules, "rule TSV: phrase, disease, label, priority")
      ->required();
  sub->add_option("--disease", o->disease, "disease id to annotate")->required();
  sub->add_option("--out", o->out, "output JSONL path")->required();
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const std::vector<Document> docs = load_normalized(o->in, *lemmatizer, abbrevs);
    const std::vector<AnnotationRule> rules = load_rules(o->rules);
    const AnnotationResult result = apply_annotation_rules(docs, rules, o->disease);
    save_documents(result.labeled, o->out);
    std::cerr << "annotated " << (result.labeled.size() - result.unmatched.size())
              << " of " << result.labeled.size() << " documents ("
              << result.unmatched.size() << " unmatched)\n";
  });
}

// --- train --------------------------------------------------------------

struct TrainOpts {
  std::string corpus;
  std::string disease;
  std::string out;
  std::uint64_t seed = 42;
  DetectorParams params;
  bool no_bigrams = false;
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_train(CLI::App& app) {
  auto o = std::make_shared<TrainOpts>();
  CLI::App* sub = app.add_subcommand(
      "train", "train a per-disease negation detector and write a model file");
  sub->add_option("--corpus", o->corpus, "labeled JSONL corpus")->required();
  sub->add_option("--disease", o->disease, "disease id")->required();
  sub->add_option("--out", o->out, "output model JSON path")->required();
  sub->add_option("--seed", o->seed, "random seed (default 42)");
  sub->add_option("--rounds", o->params.rounds, "boosting rounds (default 200)");
  sub->add_option("--depth", o->params.depth, "tree depth (default 4)");
  sub->add_option("--eta", o->params.eta, "learning rate (default 0.1)");
  sub->add_option("--lambda", o->params.lambda, "L2 leaf regularization (default 1)");
  sub->add_option("--min-leaf", o->params.min_leaf, "minimum samples per leaf (default 1)");
  sub->add_option("--test-fraction", o->params.test_fraction,
                  "held-out fraction (default 0.33)");
  sub->add_option("--tau", o->params.tau, "sentence flagging threshold (default 0)");
  sub->add_option("--min-df", o->params.vectorizer.min_df,
                  "minimum document frequency (default 1)");
  sub->add_flag("--no-bigrams", o->no_bigrams, "restrict features to unigrams");
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const std::vector<Document> docs = load_normalized(o->corpus, *lemmatizer, abbrevs);
    DetectorParams params = o->params;
    params.vectorizer.use_bigrams = !o->no_bigrams;
    const TrainedDetector trained =
        train_detector(docs, o->disease, params, o->seed, lemmatizer);

    ModelMetadata metadata;
    metadata.seed = o->seed;
    metadata.params = params;
    metadata.corpus_fingerprint = file_fingerprint(o->corpus);
    metadata.metrics = trained.metrics;
    save_model(make_bundle(trained.detector, metadata), o->out);

    std::cerr << metrics_header(false)
              << metrics_row(o->disease, static_cast<long long>(docs.size()),
                             trained.metrics)
              << "model written to " << o->out << '\n';
  });
}

// --- predict ------------------------------------------------------------

struct PredictOpts {
  std::string model;
  std::string in;
  std::string out = "-";
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_predict(CLI::App& app) {
  auto o = std::make_shared<PredictOpts>();
  CLI::App* sub = app.add_subcommand(
      "predict", "classify documents with a trained model (TSV on stdout)");
  sub->add_option("--model", o->model, "model JSON path")->required();
  sub->add_option("--in", o->in, "input JSONL corpus")->required();
  sub->add_option("--out", o->out, "output TSV path, '-' for stdout (default)");
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const LoadedDetector loaded = load_detector(o->model, lemmatizer);
    const std::vector<Document> docs = load_normalized(o->in, *lemmatizer, abbrevs);

    std::ostringstream body;
    body << "id\tlabel\tp_denied\tp_not_mentioned\tp_present\n";
    for (const Document& doc : docs) {
      const Classification c = loaded.detector.classify(doc);
      body << doc.id << '\t' << to_int(c.label);
      for (const double p : c.proba) body << '\t' << format_fixed(p, 6);
      body << '\n';
    }
    if (o->out == "-") {
      std::cout << body.str();
    } else {
      std::ofstream file(o->out, std::ios::binary);
      if (!file) throw io_error("cannot open output file: " + o->out);
      file << body.str();
      if (!file) throw io_error("failed writing output file: " + o->out);
    }
  });
}

// --- clean --------------------------------------------------------------

struct CleanOpts {
  std::string model;
  std::string in;
  std::string out;
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_clean(CLI::App& app) {
  auto o = std::make_shared<CleanOpts>();
  CLI::App* sub = app.add_subcommand(
      "clean", "remove negation sentences from documents (idempotent)");
  sub->add_option("--model", o->model, "model JSON path")->required();
  sub->add_option("--in", o->in, "input JSONL corpus")->required();
  sub->add_option("--out", o->out, "output JSONL path")->required();
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const LoadedDetector loaded = load_detector(o->model, lemmatizer);
    const std::vector<Document> docs = load_normalized(o->in, *lemmatizer, abbrevs);

    std::vector<Document> cleaned;
    cleaned.reserve(docs.size());
    std::size_t modified = 0;
    for (const Document& doc : docs) {
      Document stripped = loaded.detector.strip_negations(doc);
      if (stripped.text != doc.text) ++modified;
      cleaned.push_back(std::move(stripped));
    }
    save_documents(cleaned, o->out);
    std::cerr << "cleaned " << cleaned.size() << " documents (" << modified
              << " modified)\n";
  });
}

// --- eval ---------------------------------------------------------------

struct EvalOpts {
  std::string model;
  std::string corpus;
  std::string lexicon;
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_eval(CLI::App& app) {
  auto o = std::make_shared<EvalOpts>();
  CLI::App* sub = app.add_subcommand(
      "eval", "evaluate a model on a labeled corpus, with term-search disagreement");
  sub->add_option("--model", o->model, "model JSON path")->required();
  sub->add_option("--corpus", o->corpus, "labeled JSONL corpus")->required();
  sub->add_option("--lexicon", o->lexicon,
                  "term lexicon TSV (default: built-in lexicon)");
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const LoadedDetector loaded = load_detector(o->model, lemmatizer);
    const TermLexicon lexicon = load_lexicon(o->lexicon);
    const std::vector<Document> docs = load_normalized(o->corpus, *lemmatizer, abbrevs);
    if (docs.empty()) throw argument_error("corpus is empty: " + o->corpus);

    const DiseaseId& disease = loaded.detector.disease();
    std::vector<int> truth, predicted;
    truth.reserve(docs.size());
    predicted.reserve(docs.size());
    for (const Document& doc : docs) {
      const auto it = doc.labels.find(disease);
      if (it == doc.labels.end()) {
        throw argument_error("document " + doc.id + " has no label for disease " +
                             disease);
      }
      truth.push_back(to_int(it->second) + 1);
      predicted.push_back(to_int(loaded.detector.classify(doc).label) + 1);
    }
    const ConfusionMatrix cm = confusion_matrix(truth, predicted, 3);
    const F1Result f1 = f1_scores(cm);
    const BaselineComparison disagreement =
        compare_baseline(loaded.detector, lexicon, docs);

    MetricsReport report;
    for (int k = 0; k < 3; ++k) {
      const auto u = static_cast<std::size_t>(k);
      report.per_class_f1[u] = f1.per_class[u];
      report.support[u] = cm.row_sum(k);
      report.class_absent[u] = f1.absent[u];
    }
    report.macro_f1 = f1.macro;
    report.accuracy = f1.accuracy;
    report.n_evaluated = static_cast<long long>(docs.size());
    report.fp_rate = disagreement.fp_rate;
    report.fn_rate = disagreement.fn_rate;

    std::cout << metrics_header(true)
              << metrics_row(disease, static_cast<long long>(docs.size()), report);
  });
}

// --- downstream ---------------------------------------------------------

struct DownstreamOpts {
  std::string corpus;
  std::string task = "surgery";
  std::vector<std::string> models;
  std::string lexicon;
  DownstreamParams params;
  std::shared_ptr<TextOpts> text = std::make_shared<TextOpts>();
};

void setup_downstream(CLI::App& app) {
  auto o = std::make_shared<DownstreamOpts>();
  CLI::App* sub = app.add_subcommand(
      "downstream", "compare downstream predictors with and without negation stripping");
  sub->add_option("--corpus", o->corpus, "JSONL corpus carrying the target")->required();
  sub->add_option("--task", o->task, "binary target name (default: surgery)");
  sub->add_option("--model", o->models,
                  "model JSON path; repeat for every lexicon disease")
      ->required()
      ->take_all();
  sub->add_option("--lexicon", o->lexicon,
                  "term lexicon TSV (default: built-in lexicon)");
  sub->add_option("--seed", o->params.seed, "random seed (default 42)");
  sub->add_option("--test-fraction", o->params.test_fraction,
                  "held-out fraction (default 0.33)");
  add_text_opts(sub, o->text);
  sub->callback([o] {
    const auto lemmatizer = load_lemmatizer(*o->text);
    const auto abbrevs = load_abbrevs(*o->text);
    const TermLexicon lexicon = load_lexicon(o->lexicon);
    std::map<DiseaseId, NegationDetector> detectors;
    for (const std::string& path : o->models) {
      LoadedDetector loaded = load_detector(path, lemmatizer);
      const DiseaseId disease = loaded.detector.disease();
      if (!detectors.emplace(disease, std::move(loaded.detector)).second) {
        throw argument_error("duplicate model for disease: " + disease);
      }
    }
    const std::vector<Document> docs = load_normalized(o->corpus, *lemmatizer, abbrevs);
    const std::vector<DownstreamResult> results =
        run_downstream_experiment(docs, o->task, lexicon, detectors, o->params);
    std::cout << downstream_table_tsv(results);
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"negation detection toolkit for Russian clinical free text"};
  app.require_subcommand(1);
  setup_gen_corpus(app);
  setup_annotate(app);
  setup_train(app);
  setup_predict(app);
  setup_clean(app);
  setup_eval(app);
  setup_downstream(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const argument_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const model_version_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const error& e) {  // data_format_error, io_error and other data problems
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace negata
