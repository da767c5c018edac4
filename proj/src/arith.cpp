#include "ptpmdl/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ptpmdl {

namespace {

constexpr int kCodeBits = 60;
constexpr std::uint64_t kHalf = std::uint64_t{1} << (kCodeBits - 1);
constexpr std::uint64_t kQuarter = kHalf >> 1;
constexpr std::uint64_t kThreeQuarters = kHalf + kQuarter;
constexpr int kMaxScaleBits = 30;

void check_scale(int scale_bits) {
  if (scale_bits < 1 || scale_bits > kMaxScaleBits) throw ConfigError("probability scale out of range");
}

}  // namespace

ProbabilityAssignment ProbabilityAssignment::from_real(double p1, int scale_bits) {
  check_scale(scale_bits);
  const auto total = std::uint64_t{1} << scale_bits;
  const double scaled = std::floor(std::clamp(p1, 0.0, 1.0) * static_cast<double>(total) + 0.5);
  const auto one = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(scaled), 1, total - 1);
  return {static_cast<std::uint32_t>(one), scale_bits};
}

int probability_bits(std::uint64_t n) {
  const int log2n = n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));  // ceil(log2 n)
  return std::min(std::max(16, log2n), kMaxScaleBits + 2) - 2;
}

// ---------------------------------------------------------------------------

void ArithmeticEncoder::emit(unsigned bit) {
  out_.put(bit);
  out_.put_repeated(bit ^ 1u, pending_);
  pending_ = 0;
}

void ArithmeticEncoder::narrow(std::uint64_t step, std::uint64_t cum_lo, std::uint64_t cum_hi, bool last) {
  // The last symbol absorbs the division remainder.
  const std::uint64_t new_high = last ? high_ : low_ + step * cum_hi - 1;
  low_ += step * cum_lo;
  high_ = new_high;
  ++symbols_;
  for (;;) {
    if (high_ < kHalf) {
      emit(0);
    } else if (low_ >= kHalf) {
      emit(1);
      low_ -= kHalf;
      high_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
      ++pending_;
      low_ -= kQuarter;
      high_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1u;
  }
}

void ArithmeticEncoder::encode_bit(Symbol x, ProbabilityAssignment p) {
  check_scale(p.scale_bits);
  const std::uint64_t total = std::uint64_t{1} << p.scale_bits;
  if (p.one == 0 || p.one >= total) throw ConfigError("probability assignment must be strictly inside (0, 1)");
  const std::uint64_t step = (high_ - low_ + 1) >> p.scale_bits;
  const std::uint64_t split = total - p.one;  // symbol 0 owns [0, split)
  if (x)
    narrow(step, split, total, true);
  else
    narrow(step, 0, split, false);
}

void ArithmeticEncoder::encode_uniform(std::uint32_t v, std::uint32_t k) {
  if (k == 0 || v >= k) throw ConfigError("uniform symbol out of range");
  const std::uint64_t step = (high_ - low_ + 1) / k;
  narrow(step, v, std::uint64_t{v} + 1, v + 1 == k);
}

CodedPayload ArithmeticEncoder::finish() {
  ++pending_;
  emit(low_ < kQuarter ? 0 : 1);
  CodedPayload payload;
  payload.bit_length = out_.size();
  payload.bytes = out_.release();
  return payload;
}

// ---------------------------------------------------------------------------

ArithmeticDecoder::ArithmeticDecoder(const CodedPayload& payload) : in_(payload.bytes, payload.bit_length) {
  if (packed_size(payload.bit_length) > payload.bytes.size()) throw FormatError("arithmetic payload is truncated");
  for (int i = 0; i < kCodeBits; ++i) value_ = (value_ << 1) | in_.get();
}

void ArithmeticDecoder::narrow(std::uint64_t step, std::uint64_t cum_lo, std::uint64_t cum_hi, bool last) {
  const std::uint64_t new_high = last ? high_ : low_ + step * cum_hi - 1;
  low_ += step * cum_lo;
  high_ = new_high;
  for (;;) {
    if (high_ < kHalf) {
      // nothing to subtract
    } else if (low_ >= kHalf) {
      low_ -= kHalf;
      high_ -= kHalf;
      value_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
      low_ -= kQuarter;
      high_ -= kQuarter;
      value_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1u;
    value_ = (value_ << 1) | in_.get();
    // The encoder wrote shifts + 2 bits; more shifts than that means the
    // payload is shorter than the symbols it claims to hold.
    if (++shifts_ + 2 > in_.length()) throw FormatError("arithmetic payload exhausted");
  }
}

Symbol ArithmeticDecoder::decode_bit(ProbabilityAssignment p) {
  check_scale(p.scale_bits);
  const std::uint64_t total = std::uint64_t{1} << p.scale_bits;
  if (p.one == 0 || p.one >= total) throw ConfigError("probability assignment must be strictly inside (0, 1)");
  const std::uint64_t step = (high_ - low_ + 1) >> p.scale_bits;
  const std::uint64_t split = total - p.one;
  const std::uint64_t target = (value_ - low_) / step;
  if (target >= split) {
    narrow(step, split, total, true);
    return 1;
  }
  narrow(step, 0, split, false);
  return 0;
}

std::uint32_t ArithmeticDecoder::decode_uniform(std::uint32_t k) {
  if (k == 0) throw ConfigError("uniform alphabet must be non-empty");
  const std::uint64_t step = (high_ - low_ + 1) / k;
  const auto v = static_cast<std::uint32_t>(std::min<std::uint64_t>((value_ - low_) / step, k - 1));
  narrow(step, v, std::uint64_t{v} + 1, v + 1 == k);
  return v;
}

void ArithmeticDecoder::finish() const {
  if (shifts_ + 2 != in_.length()) throw FormatError("arithmetic payload length does not match its contents");
  // The flush leaves the code value at exactly 1/4 or 1/2 of the current
  // interval's coordinates, followed by zero padding.
  if (value_ != (low_ < kQuarter ? kQuarter : kHalf)) throw FormatError("arithmetic payload has a corrupt tail");
}

// ---------------------------------------------------------------------------

CodedPayload encode_binary(std::span<const Symbol> symbols, std::span<const ProbabilityAssignment> probs) {
  if (probs.size() != symbols.size()) throw ConfigError("one probability assignment is needed per symbol");
  ArithmeticEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode_bit(symbols[i], probs[i]);
  return enc.finish();
}

Sequence decode_binary(const CodedPayload& payload, const ProbabilitySource& probs, std::uint64_t count) {
  ArithmeticDecoder dec(payload);
  Sequence out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(dec.decode_bit(probs(out)));
  dec.finish();
  return out;
}

CodedPayload encode_uniform(std::span<const std::uint32_t> values, std::uint32_t k) {
  ArithmeticEncoder enc;
  for (auto v : values) enc.encode_uniform(v, k);
  return enc.finish();
}

std::vector<std::uint32_t> decode_uniform(const CodedPayload& payload, std::uint32_t k, std::uint64_t count) {
  ArithmeticDecoder dec(payload);
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(dec.decode_uniform(k));
  dec.finish();
  return out;
}

}  // namespace ptpmdl
