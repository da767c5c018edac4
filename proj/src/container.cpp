#include <zlib.h>

#include <cstring>

#include "ptpmdl/codec.hpp"

namespace ptpmdl {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'P', 'M'};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  void little_endian(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  std::uint64_t u64() { return little_endian(8); }
  std::span<const std::uint8_t> raw(std::uint64_t n) {
    need(n);
    auto out = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > remaining()) throw FormatError("container is truncated");
  }
  std::uint64_t little_endian(int width) {
    need(static_cast<std::uint64_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in chunks.
  constexpr std::size_t kChunk = std::size_t{1} << 30;
  for (std::size_t at = 0; at < bytes.size(); at += kChunk) {
    const auto n = std::min(kChunk, bytes.size() - at);
    crc = crc32(crc, bytes.data() + at, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

void put_payload(ByteWriter& w, const CodedPayload& p) {
  w.u64(p.bit_length);
  w.raw(p.bytes);
}

CodedPayload get_payload(ByteReader& r) {
  CodedPayload p;
  p.bit_length = r.u64();
  if (p.bit_length / 8 > r.remaining()) throw FormatError("payload length exceeds the container");
  const auto bytes = r.raw(packed_size(p.bit_length));
  p.bytes.assign(bytes.begin(), bytes.end());
  return p;
}

}  // namespace

std::uint64_t Container::coded_bits() const {
  std::uint64_t bits = 0;
  for (const auto& m : models) bits += m.natural.size() + m.params.bit_length;
  for (const auto& b : blocks) bits += b.context.size() + b.payload.bit_length;
  return bits;
}

std::vector<std::uint8_t> serialize(const Container& c) {
  const std::size_t expected_models = is_naive(c.mode) ? c.block_lengths.size() : 1;
  if (c.models.size() != expected_models || c.blocks.size() != c.block_lengths.size())
    throw ConfigError("container sections do not match its block count");

  ByteWriter w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u8(kContainerVersion);
  w.u8(static_cast<std::uint8_t>(c.mode));
  w.u8(static_cast<std::uint8_t>(c.depth));
  w.u8(0);
  w.u64(c.length);
  w.u32(static_cast<std::uint32_t>(c.block_lengths.size()));
  for (auto len : c.block_lengths) w.u64(len);

  for (const auto& m : c.models) {
    w.u32(static_cast<std::uint32_t>(m.natural.size()));
    w.raw(pack_bits(m.natural));
    put_payload(w, m.params);
  }
  for (const auto& b : c.blocks) {
    if (b.context.size() != static_cast<std::size_t>(c.depth))
      throw ConfigError("block context must hold exactly D symbols");
    w.raw(pack_bits(b.context));
    put_payload(w, b.payload);
  }
  w.u32(crc_of(w.bytes()));
  return std::move(w.bytes());
}

Container parse_container(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kFixedHeader = 4 + 4 + 8 + 4;
  if (bytes.size() < kFixedHeader + 4) throw FormatError("container is truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a PTPM container (bad magic)");
  if (bytes[4] != kContainerVersion)
    throw FormatError("unsupported container version " + std::to_string(bytes[4]));

  const auto body = bytes.first(bytes.size() - 4);
  ByteReader trailer(bytes.last(4));
  if (trailer.u32() != crc_of(body)) throw FormatError("container checksum mismatch");

  ByteReader r(body);
  r.raw(5);
  Container c;
  const auto mode = r.u8();
  if (mode > static_cast<std::uint8_t>(Mode::naive_markov)) throw FormatError("unknown container mode");
  c.mode = static_cast<Mode>(mode);
  c.depth = r.u8();
  if (c.depth > kMaxDepth) throw FormatError("context depth out of range");
  if (r.u8() != 0) throw FormatError("reserved header byte is not zero");
  c.length = r.u64();
  const auto blocks = r.u32();
  if (blocks == 0) throw FormatError("container has no blocks");
  if (blocks > r.remaining() / 8) throw FormatError("block table exceeds the container");

  std::uint64_t total = 0;
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const auto len = r.u64();
    if (len < static_cast<std::uint64_t>(c.depth)) throw FormatError("block shorter than the context depth");
    if (len > c.length - total) throw FormatError("block lengths exceed the sequence length");
    total += len;
    c.block_lengths.push_back(len);
  }
  if (total != c.length) throw FormatError("block lengths do not add up to the sequence length");

  const std::size_t model_count = is_naive(c.mode) ? blocks : 1;
  const std::uint64_t max_natural = (std::uint64_t{1} << c.depth) - 1;  // nodes above depth D
  for (std::size_t m = 0; m < model_count; ++m) {
    ModelSection section;
    const auto natural_bits = r.u32();
    if (natural_bits > max_natural) throw FormatError("natural code longer than the full tree");
    section.natural = unpack_bits(r.raw(packed_size(natural_bits)), natural_bits);
    section.params = get_payload(r);
    c.models.push_back(std::move(section));
  }
  const auto context_bytes = packed_size(static_cast<std::uint64_t>(c.depth));
  for (std::uint32_t b = 0; b < blocks; ++b) {
    BlockSection section;
    section.context = unpack_bits(r.raw(context_bytes), static_cast<std::uint64_t>(c.depth));
    section.payload = get_payload(r);
    c.blocks.push_back(std::move(section));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after the last block");
  return c;
}

}  // namespace ptpmdl
