#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "negata/metrics.hpp"
#include "negata/negation.hpp"

namespace negata {

inline constexpr int kModelFormatVersion = 1;

struct ModelMetadata {
  std::uint64_t seed = 42;
  DetectorParams params;
  std::string corpus_fingerprint;  // fingerprint of the training corpus file
  MetricsReport metrics;           // held-out metrics captured at training time
};

// Everything needed to reload a detector, plus provenance.
struct ModelBundle {
  int format_version = kModelFormatVersion;
  DiseaseId disease;
  TfIdfModel tfidf;
  GbdtModel classifier;
  double tau = 0.0;
  std::string lemma_table_checksum;  // hex checksum of the lemma table
  ModelMetadata metadata;
};

ModelBundle make_bundle(const NegationDetector& detector, const ModelMetadata& metadata);

// A reloaded detector is built against the caller's lemmatizer. When its
// checksum differs from the one recorded in the bundle, the mismatch flag is
// set (the caller decides whether to warn); loading still succeeds.
NegationDetector detector_from_bundle(const ModelBundle& bundle,
                                      std::shared_ptr<const Lemmatizer> lemmatizer,
                                      bool* lemma_checksum_mismatch = nullptr);

// Single JSON file. Writing is deterministic: the same bundle always
// produces the same bytes.
void save_model(const ModelBundle& bundle, const std::filesystem::path& path);

// Parse failures and missing fields raise data_format_error; an unsupported
// format_version raises model_version_error. Never returns a partial bundle.
ModelBundle load_model(const std::filesystem::path& path);

std::string fnv1a64_hex(std::string_view bytes);
// Hex FNV-1a of the file contents.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace negata
