#ifndef PTPMDL_ARITH_HPP
#define PTPMDL_ARITH_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ptpmdl/bitio.hpp"
#include "ptpmdl/types.hpp"

namespace ptpmdl {

/// p(1) on a 2^scale_bits integer scale; never 0 or 2^scale_bits so both
/// symbols stay encodable.
struct ProbabilityAssignment {
  std::uint32_t one = 1;
  int scale_bits = 1;

  /// Round-half-up of p1 * 2^scale_bits, clamped to [1, 2^scale_bits - 1].
  static ProbabilityAssignment from_real(double p1, int scale_bits);

  double p1() const { return static_cast<double>(one) / static_cast<double>(std::uint64_t{1} << scale_bits); }
  double probability_of(Symbol x) const { return x ? p1() : 1.0 - p1(); }

  friend bool operator==(const ProbabilityAssignment&, const ProbabilityAssignment&) = default;
};

/// Probability scale for a sequence of n symbols: P - 2 bits, where
/// P = max(16, ceil(log2 n)) is the coder precision. Capped at 30.
int probability_bits(std::uint64_t n);

struct CodedPayload {
  std::vector<std::uint8_t> bytes;  ///< MSB-first, zero padded
  std::uint64_t bit_length = 0;

  friend bool operator==(const CodedPayload&, const CodedPayload&) = default;
};

/// Integer arithmetic encoder with a 60-bit interval, underflow handled by
/// counting pending bits. finish() emits two disambiguating bits, so the
/// output length is (number of renormalization shifts) + 2.
class ArithmeticEncoder {
 public:
  void encode_bit(Symbol x, ProbabilityAssignment p);
  /// Codes v uniformly over [0, k).
  void encode_uniform(std::uint32_t v, std::uint32_t k);
  CodedPayload finish();

  std::uint64_t symbols() const { return symbols_; }

 private:
  void narrow(std::uint64_t step, std::uint64_t cum_lo, std::uint64_t cum_hi, bool last);
  void emit(unsigned bit);

  std::uint64_t low_ = 0;
  std::uint64_t high_ = (std::uint64_t{1} << 60) - 1;
  std::uint64_t pending_ = 0;
  std::uint64_t symbols_ = 0;
  BitWriter out_;
};

/// Mirror of ArithmeticEncoder. Reading beyond the payload's bit length, or
/// finishing at a different length than the encoder produced, throws
/// FormatError.
class ArithmeticDecoder {
 public:
  explicit ArithmeticDecoder(const CodedPayload& payload);

  Symbol decode_bit(ProbabilityAssignment p);
  std::uint32_t decode_uniform(std::uint32_t k);
  /// Checks that exactly the encoded bits were consumed.
  void finish() const;

 private:
  void narrow(std::uint64_t step, std::uint64_t cum_lo, std::uint64_t cum_hi, bool last);

  std::uint64_t low_ = 0;
  std::uint64_t high_ = (std::uint64_t{1} << 60) - 1;
  std::uint64_t value_ = 0;
  std::uint64_t shifts_ = 0;
  BitReader in_;
};

/// Causal probability source for decoding: receives the symbols decoded so far.
using ProbabilitySource = std::function<ProbabilityAssignment(std::span<const Symbol>)>;

CodedPayload encode_binary(std::span<const Symbol> symbols, std::span<const ProbabilityAssignment> probs);
Sequence decode_binary(const CodedPayload& payload, const ProbabilitySource& probs, std::uint64_t count);

CodedPayload encode_uniform(std::span<const std::uint32_t> values, std::uint32_t k);
std::vector<std::uint32_t> decode_uniform(const CodedPayload& payload, std::uint32_t k, std::uint64_t count);

}  // namespace ptpmdl

#endif  // PTPMDL_ARITH_HPP
