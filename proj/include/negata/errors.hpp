#pragma once

#include <stdexcept>

namespace negata {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: corpus lines, rule files, model JSON.
struct data_format_error : error {
  using error::error;
};

// Invalid arguments or an unsatisfied call precondition.
struct argument_error : error {
  using error::error;
};

// Unreadable or unwritable path.
struct io_error : error {
  using error::error;
};

// Model file carrying an unsupported format version.
struct model_version_error : error {
  using error::error;
};

}  // namespace negata
