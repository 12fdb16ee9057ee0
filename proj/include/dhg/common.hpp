#pragma once

#include <stdexcept>
#include <string>

namespace dhg {

// Error taxonomy. Everything derives from std::runtime_error so the CLI
// boundary can catch coarsely and report the message.

// Argument outside its mathematical domain (mode index, negative discount).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Incompatible truncations / array shapes.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration; message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed serialized payload (checkpoints, sparse CSV).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulation or training run left the finite regime.
struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dhg
