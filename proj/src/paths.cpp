#include "negata/paths.hpp"

#include <cstdlib>

#ifndef NEGATA_DATA_DIR
#define NEGATA_DATA_DIR "data"
#endif

namespace negata {

std::filesystem::path default_data_dir() { return NEGATA_DATA_DIR; }

std::filesystem::path resolve_lemma_table(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("NEGATA_LEMMA_TABLE"); env != nullptr && *env != '\0') {
    return env;
  }
  return default_data_dir() / "lemmas.tsv";
}

std::filesystem::path default_abbreviations_path() {
  return default_data_dir() / "abbreviations.txt";
}

std::filesystem::path default_lexicon_path() {
  return default_data_dir() / "lexicon.tsv";
}

}  // namespace negata
