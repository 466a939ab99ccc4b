#pragma once

#include <stdexcept>
#include <string>

namespace envbal {

/// Input file could not be parsed (CSV/KEEL). Messages carry row/column info.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration value violates a precondition (bad method, k < 1, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Instance generation failed (inconsistent layer plan, degenerate cluster).
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stratified split would leave a class without train or test instances.
struct SplitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace envbal
