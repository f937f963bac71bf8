#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "negata/textnorm.hpp"

namespace negata {

// Document-level status of one disease.
enum class DiseaseLabel : int {
  Denied = -1,        // mentioned and explicitly denied
  NotMentioned = 0,   // no usable mention (includes family history)
  Present = 1,        // present in the patient's history
};

int to_int(DiseaseLabel label);
DiseaseLabel label_from_int(int value);  // throws data_format_error

using DiseaseId = std::string;

// stroke, MI, AH, DM, AP. Identifiers are case-sensitive; any other string
// is accepted wherever a DiseaseId is taken.
const std::vector<DiseaseId>& canonical_diseases();
bool is_canonical_disease(const DiseaseId& id);

// One anamnesis. labels carries per-disease annotations, targets binary
// downstream outcomes, labs optional numeric features of those outcomes.
// sentences is derived state filled in by normalize_document.
struct Document {
  std::string id;
  std::string text;
  std::map<DiseaseId, DiseaseLabel> labels;
  std::map<std::string, int> targets;
  std::map<std::string, double> labs;
  std::vector<Sentence> sentences;
  bool normalized = false;

  // Lemma sequence concatenated over sentences.
  std::vector<std::string> lemmas() const;
};

// JSONL, one document per line with fields id, text, labels, targets and
// optionally labs. Malformed lines and duplicate ids are rejected with the
// line number in the message.
std::vector<Document> load_documents(const std::filesystem::path& path);

// Inverse of load_documents; labels/targets/labs are written only when
// non-empty, keys in sorted order, so save/load round-trips field for field.
void save_documents(const std::vector<Document>& docs,
                    const std::filesystem::path& path);

// Phrase rule for bootstrapping labels: a document whose lemma sequence
// contains the phrase contiguously inside one sentence receives the label.
// Lower priority number wins; ties resolve by rule order.
struct AnnotationRule {
  std::vector<std::string> phrase;  // lemma sequence, non-empty
  DiseaseId disease;
  DiseaseLabel label;
  int priority = 0;
};

// TSV: phrase<TAB>disease<TAB>label<TAB>priority.
std::vector<AnnotationRule> load_rules(const std::filesystem::path& tsv);

struct AnnotationResult {
  std::vector<Document> labeled;       // all documents, input order
  std::vector<std::string> unmatched;  // ids left without a label
};

// Applies the rules that target `disease` to every document. Documents must
// be normalized. Idempotent.
AnnotationResult apply_annotation_rules(std::vector<Document> docs,
                                        const std::vector<AnnotationRule>& rules,
                                        const DiseaseId& disease);

// Per-label generation proportions; must sum to 1 (within 1e-9).
struct LabelMix {
  double denied = 0.3;
  double not_mentioned = 0.3;
  double present = 0.4;
};

struct SynthParams {
  std::uint64_t seed = 42;
  long long size = 1000;
  std::vector<DiseaseId> diseases = canonical_diseases();
  LabelMix mix;
  // Share of not-mentioned slots rendered as a family-history sentence.
  double family_fraction = 0.25;
  // Attach surgery/outcome targets and lab columns (requires MI in diseases
  // for the surgery correlation to be meaningful).
  bool with_targets = true;
};

// Deterministic synthetic anamnesis corpus: `size` documents, each labeled
// for every requested disease with label counts allocated exactly per mix.
// Texts are assembled from denial / presence / family-history / filler
// sentence templates with seed-driven paraphrase jitter.
std::vector<Document> generate_synthetic_corpus(const SynthParams& params);

}  // namespace negata
