#pragma once

#include <filesystem>
#include <string>

namespace negata {

// Data directory shipped with the toolkit (lemma table, abbreviations,
// term lexicon). Overridable per call site via explicit paths.
std::filesystem::path default_data_dir();

// Explicit flag value beats the NEGATA_LEMMA_TABLE environment variable,
// which beats the shipped default table.
std::filesystem::path resolve_lemma_table(const std::string& flag_value);

std::filesystem::path default_abbreviations_path();
std::filesystem::path default_lexicon_path();

}  // namespace negata
