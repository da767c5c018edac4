#ifndef PTPMDL_TYPES_HPP
#define PTPMDL_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptpmdl {

/// A binary source symbol, always 0 or 1.
using Symbol = std::uint8_t;

/// A binary sequence in temporal order (x_1 first).
using Sequence = std::vector<Symbol>;

/// Raised for invalid parameters or configurations (bad depth, bad block count,
/// malformed tree descriptions, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a compressed stream is truncated, corrupt, or otherwise cannot
/// be decoded. Decoders never return wrong output silently.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an internal consistency check fails (e.g. a counts tree whose
/// internal nodes do not equal the sum of their children).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ptpmdl

#endif  // PTPMDL_TYPES_HPP
