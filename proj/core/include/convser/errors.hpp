#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace convser {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed container (bad RIFF header, truncated chunk, bad CSV row).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed WAV with an encoding we do not decode (ADPCM, 24-bit, ...).
class UnsupportedCodecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Shape or length mismatch between operands.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Signal shorter than one analysis frame.
class TooShortError : public SizeError {
 public:
  using SizeError::SizeError;
};

// Mel filters too narrow for the FFT bin spacing.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Incompatible combination of configs (feature width vs model width, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Collects every problem found while validating an input as a whole.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace convser
