#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stereo {

// Error categories. The C API and the CLI map these onto status values and
// process exit codes, so every throw site picks the category deliberately.
enum class ErrorKind {
  Config,     // bad parameters, shape mismatch, unnormalized weights
  Dimension,  // zero or negative container dimension
  Index,      // out-of-range element access
  Parse,      // malformed input file
  Io,         // filesystem failure
  Numeric,    // non-finite values where finite ones are required
  Training,   // divergence during optimization
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(std::string m) : Error(ErrorKind::Config, std::move(m)) {}
};

struct DimensionError : Error {
  explicit DimensionError(std::string m) : Error(ErrorKind::Dimension, std::move(m)) {}
};

struct IndexError : Error {
  explicit IndexError(std::string m) : Error(ErrorKind::Index, std::move(m)) {}
};

// Carries the byte offset at which parsing stopped making sense.
struct ParseError : Error {
  ParseError(std::string m, long long offset)
      : Error(ErrorKind::Parse, std::move(m) + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  long long byte_offset;
};

struct IoError : Error {
  explicit IoError(std::string m) : Error(ErrorKind::Io, std::move(m)) {}
};

struct NumericError : Error {
  explicit NumericError(std::string m) : Error(ErrorKind::Numeric, std::move(m)) {}
};

struct TrainingError : Error {
  TrainingError(std::string m, long step)
      : Error(ErrorKind::Training, std::move(m) + " (step " + std::to_string(step) + ")"),
        step(step) {}
  long step;
};

}  // namespace stereo
