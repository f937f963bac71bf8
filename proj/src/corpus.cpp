#include "negata/corpus.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "negata/errors.hpp"
#include "negata/utf8.hpp"

namespace negata {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string line_prefix(std::size_t lineno) {
  return "line " + std::to_string(lineno) + ": ";
}

}  // namespace

int to_int(DiseaseLabel label) { return static_cast<int>(label); }

DiseaseLabel label_from_int(int value) {
  switch (value) {
    case -1:
      return DiseaseLabel::Denied;
    case 0:
      return DiseaseLabel::NotMentioned;
    case 1:
      return DiseaseLabel::Present;
    default:
      throw data_format_error("disease label must be -1, 0 or 1, got " +
                              std::to_string(value));
  }
}

const std::vector<DiseaseId>& canonical_diseases() {
  static const std::vector<DiseaseId> ids = {"stroke", "MI", "AH", "DM", "AP"};
  return ids;
}

bool is_canonical_disease(const DiseaseId& id) {
  const auto& ids = canonical_diseases();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<std::string> Document::lemmas() const {
  std::vector<std::string> out;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence.tokens) out.push_back(token.lemma);
  }
  return out;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read corpus: " + path.string());
  std::vector<Document> docs;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw data_format_error(line_prefix(lineno) + e.what());
    }
    if (!j.is_object()) {
      throw data_format_error(line_prefix(lineno) + "expected a JSON object");
    }
    Document doc;
    for (const auto& [key, value] : j.items()) {
      if (key == "id") {
        if (!value.is_string() || value.get<std::string>().empty()) {
          throw data_format_error(line_prefix(lineno) +
                                  "id must be a non-empty string");
        }
        doc.id = value.get<std::string>();
      } else if (key == "text") {
        if (!value.is_string()) {
          throw data_format_error(line_prefix(lineno) + "text must be a string");
        }
        doc.text = value.get<std::string>();
      } else if (key == "labels") {
        if (!value.is_object()) {
          throw data_format_error(line_prefix(lineno) + "labels must be an object");
        }
        for (const auto& [disease, lab] : value.items()) {
          if (!lab.is_number_integer()) {
            throw data_format_error(line_prefix(lineno) + "label for '" +
                                    disease + "' must be an integer");
          }
          try {
            doc.labels[disease] = label_from_int(lab.get<int>());
          } catch (const data_format_error& e) {
            throw data_format_error(line_prefix(lineno) + "label for '" +
                                    disease + "': " + e.what());
          }
        }
      } else if (key == "targets") {
        if (!value.is_object()) {
          throw data_format_error(line_prefix(lineno) + "targets must be an object");
        }
        for (const auto& [target, v] : value.items()) {
          if (!v.is_number_integer() ||
              (v.get<int>() != 0 && v.get<int>() != 1)) {
            throw data_format_error(line_prefix(lineno) + "target '" + target +
                                    "' must be 0 or 1");
          }
          doc.targets[target] = v.get<int>();
        }
      } else if (key == "labs") {
        if (!value.is_object()) {
          throw data_format_error(line_prefix(lineno) + "labs must be an object");
        }
        for (const auto& [lab, v] : value.items()) {
          if (!v.is_number()) {
            throw data_format_error(line_prefix(lineno) + "lab '" + lab +
                                    "' must be a number");
          }
          doc.labs[lab] = v.get<double>();
        }
      } else {
        throw data_format_error(line_prefix(lineno) + "unknown field '" + key +
                                "'");
      }
    }
    if (doc.id.empty()) {
      throw data_format_error(line_prefix(lineno) + "missing id");
    }
    if (!j.contains("text")) {
      throw data_format_error(line_prefix(lineno) + "missing text");
    }
    if (!seen_ids.insert(doc.id).second) {
      throw data_format_error(line_prefix(lineno) + "duplicate document id '" +
                              doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_documents(const std::vector<Document>& docs,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write corpus: " + path.string());
  for (const auto& doc : docs) {
    ordered_json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    if (!doc.labels.empty()) {
      ordered_json labels = ordered_json::object();
      for (const auto& [disease, label] : doc.labels) {
        labels[disease] = to_int(label);
      }
      j["labels"] = std::move(labels);
    }
    if (!doc.targets.empty()) {
      ordered_json targets = ordered_json::object();
      for (const auto& [target, v] : doc.targets) targets[target] = v;
      j["targets"] = std::move(targets);
    }
    if (!doc.labs.empty()) {
      ordered_json labs = ordered_json::object();
      for (const auto& [lab, v] : doc.labs) labs[lab] = v;
      j["labs"] = std::move(labs);
    }
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw io_error("failed writing corpus: " + path.string());
}

std::vector<AnnotationRule> load_rules(const std::filesystem::path& tsv) {
  std::ifstream in(tsv);
  if (!in) throw io_error("cannot read rules: " + tsv.string());
  std::vector<AnnotationRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() != 4) {
      throw data_format_error(line_prefix(lineno) +
                              "expected phrase<TAB>disease<TAB>label<TAB>priority");
    }
    AnnotationRule rule;
    for (const auto& word : tokenize(cols[0])) rule.phrase.push_back(word.text);
    if (rule.phrase.empty()) {
      throw data_format_error(line_prefix(lineno) + "empty rule phrase");
    }
    rule.disease = cols[1];
    if (rule.disease.empty()) {
      throw data_format_error(line_prefix(lineno) + "empty disease id");
    }
    try {
      rule.label = label_from_int(std::stoi(cols[2]));
      rule.priority = std::stoi(cols[3]);
    } catch (const std::exception& e) {
      throw data_format_error(line_prefix(lineno) + e.what());
    }
    if (rule.priority < 0) {
      throw data_format_error(line_prefix(lineno) + "priority must be >= 0");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

namespace {

bool sentence_contains_phrase(const Sentence& sentence,
                              const std::vector<std::string>& phrase) {
  if (phrase.empty() || sentence.tokens.size() < phrase.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= sentence.tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (sentence.tokens[i + k].lemma != phrase[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

AnnotationResult apply_annotation_rules(std::vector<Document> docs,
                                        const std::vector<AnnotationRule>& rules,
                                        const DiseaseId& disease) {
  // Evaluation order encodes the conflict policy: priority, then file order.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].disease == disease) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rules[a].priority < rules[b].priority;
  });

  AnnotationResult result;
  for (auto& doc : docs) {
    if (!doc.normalized) {
      throw argument_error("document '" + doc.id +
                           "' must be normalized before rule annotation");
    }
    bool matched = false;
    for (const auto rule_idx : order) {
      const auto& rule = rules[rule_idx];
      for (const auto& sentence : doc.sentences) {
        if (sentence_contains_phrase(sentence, rule.phrase)) {
          doc.labels[disease] = rule.label;
          matched = true;
          break;
        }
      }
      if (matched) break;
    }
    if (!matched) result.unmatched.push_back(doc.id);
  }
  result.labeled = std::move(docs);
  return result;
}

}  // namespace negata
