#pragma once

#include <stdexcept>

namespace npos {

/// Malformed or inconsistent configuration (bad key, bad value, violated
/// invariant). Exit code 2 at the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A required input file does not exist or cannot be opened. Exit code 3.
struct MissingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unknown training method name. Exit code 4.
struct UnknownMethodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace npos
