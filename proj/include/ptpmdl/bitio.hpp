#ifndef PTPMDL_BITIO_HPP
#define PTPMDL_BITIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ptpmdl/types.hpp"

namespace ptpmdl {

// Bits are packed most significant bit first; the final byte is zero padded.

class BitWriter {
 public:
  void put(unsigned bit) {
    if ((count_ & 7u) == 0) bytes_.push_back(0);
    if (bit & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (count_ & 7u));
    ++count_;
  }
  void put_repeated(unsigned bit, std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) put(bit);
  }

  std::uint64_t size() const { return count_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> release() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t count_ = 0;
};

/// Reads a bit string of known length; reads past the end return 0.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length)
      : bytes_(bytes), length_(bit_length) {}

  unsigned get() {
    const std::uint64_t at = pos_++;
    if (at >= length_) return 0;
    return (bytes_[at >> 3] >> (7u - (at & 7u))) & 1u;
  }

  std::uint64_t position() const { return pos_; }
  std::uint64_t length() const { return length_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t length_;
  std::uint64_t pos_ = 0;
};

inline std::size_t packed_size(std::uint64_t bits) { return static_cast<std::size_t>((bits + 7) / 8); }

inline std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  BitWriter w;
  for (auto b : bits) w.put(b);
  return w.release();
}

inline std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::uint64_t bit_length) {
  if (packed_size(bit_length) > bytes.size()) throw FormatError("bit string is truncated");
  BitReader r(bytes, bit_length);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(bit_length));
  for (auto& b : bits) b = static_cast<std::uint8_t>(r.get());
  return bits;
}

}  // namespace ptpmdl

#endif  // PTPMDL_BITIO_HPP
