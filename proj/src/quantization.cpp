#include "qdopt/quantization.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "qdopt/error.hpp"

namespace qdopt {

int bits_for_level(std::int64_t levels, BitCount mode) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  const std::uint64_t alphabet = 2 * static_cast<std::uint64_t>(levels) + (mode == BitCount::Strict ? 1 : 0);
  int bits = 0;
  while ((std::uint64_t{1} << bits) < alphabet) ++bits;
  return bits;
}

UniformQuantizer::UniformQuantizer(std::int64_t levels) : levels_(levels) {
  if (levels < 1 || levels > std::numeric_limits<std::int32_t>::max()) {
    throw Error(ErrorCode::InvalidArgument, "quantizer level must be in [1, 2^31 - 1]");
  }
}

std::int32_t UniformQuantizer::quantize(double a) const {
  if (!std::isfinite(a)) throw Error(ErrorCode::NonFiniteInput, "quantizer input is not finite");
  if (a <= -0.5) return -quantize(-a);
  if (a > limit()) return static_cast<std::int32_t>(levels_);
  // Band (j - 1/2, j + 1/2] maps to j; a - 0.5 is exact in this range.
  return static_cast<std::int32_t>(std::ceil(a - 0.5));
}

QuantizedMessage UniformQuantizer::quantize(std::span<const double> h) const {
  QuantizedMessage msg;
  msg.symbols.resize(h.size());
  for (std::size_t c = 0; c < h.size(); ++c) {
    msg.symbols[c] = quantize(h[c]);
    msg.peak = std::max(msg.peak, std::abs(h[c]));
  }
  msg.unsaturated = msg.peak <= limit();
  return msg;
}

std::int32_t quantize_scalar(const UniformQuantizer& q, double a) { return q.quantize(a); }

QuantizedMessage quantize_vector(const UniformQuantizer& q, std::span<const double> h) { return q.quantize(h); }

namespace {

void check_codec_args(double s0, double mu) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw Error(ErrorCode::InvalidArgument, "s0 must be positive and finite");
  if (!(mu > 0.0 && mu < 1.0)) throw Error(ErrorCode::InvalidArgument, "mu must lie in (0, 1)");
}

}  // namespace

Encoder::Encoder(std::size_t dimension, double s0, double mu)
    : internal_(dimension, 0.0), s0_(s0), mu_(mu), scale_(s0) {
  check_codec_args(s0, mu);
}

void Encoder::encode(const UniformQuantizer& q, std::span<const double> value, QuantizedMessage& out) {
  if (value.size() != internal_.size()) throw Error(ErrorCode::DimensionMismatch, "encoder input dimension");
  out.symbols.resize(value.size());
  out.peak = 0.0;
  for (std::size_t c = 0; c < value.size(); ++c) {
    const double h = (value[c] - internal_[c]) / scale_;
    out.symbols[c] = q.quantize(h);
    out.peak = std::max(out.peak, std::abs(h));
  }
  for (std::size_t c = 0; c < value.size(); ++c) internal_[c] = scale_ * out.symbols[c] + internal_[c];
  out.unsaturated = out.peak <= q.limit();
  ++step_;
  out.scale_index = step_;
  scale_ *= mu_;
}

QuantizedMessage Encoder::encode(const UniformQuantizer& q, std::span<const double> value) {
  QuantizedMessage msg;
  encode(q, value, msg);
  return msg;
}

Decoder::Decoder(std::size_t dimension, double s0, double mu)
    : estimate_(dimension, 0.0), s0_(s0), mu_(mu), scale_(s0) {
  check_codec_args(s0, mu);
}

std::span<const double> Decoder::decode(const QuantizedMessage& msg) {
  if (msg.scale_index != step_ + 1) {
    throw Error(ErrorCode::ScaleIndexMismatch, "decoder at step " + std::to_string(step_) + " received message " +
                                                   std::to_string(msg.scale_index));
  }
  if (msg.symbols.size() != estimate_.size()) throw Error(ErrorCode::DimensionMismatch, "message dimension");
  for (std::size_t c = 0; c < estimate_.size(); ++c) estimate_[c] = scale_ * msg.symbols[c] + estimate_[c];
  ++step_;
  scale_ *= mu_;
  return estimate_;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t& offset, int width) {
  if (offset + static_cast<std::size_t>(width) > bytes.size()) throw Error(ErrorCode::IoError, "truncated stream");
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes[offset + b]) << (8 * b);
  offset += static_cast<std::size_t>(width);
  return v;
}

constexpr std::uint32_t kReplayMagic = 0x50524451;  // "QDRP"

}  // namespace

void write_message(std::vector<std::uint8_t>& out, const QuantizedMessage& msg) {
  put_u32(out, msg.scale_index);
  for (std::int32_t s : msg.symbols) {
    std::uint32_t z = (static_cast<std::uint32_t>(s) << 1) ^ static_cast<std::uint32_t>(s >> 31);
    while (z >= 0x80) {
      out.push_back(static_cast<std::uint8_t>(z | 0x80));
      z >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(z));
  }
}

QuantizedMessage read_message(std::span<const std::uint8_t> bytes, std::size_t& offset, std::size_t dimension) {
  QuantizedMessage msg;
  msg.scale_index = static_cast<std::uint32_t>(get_le(bytes, offset, 4));
  msg.symbols.resize(dimension);
  for (std::size_t c = 0; c < dimension; ++c) {
    std::uint32_t z = 0;
    for (int shift = 0;; shift += 7) {
      if (offset >= bytes.size() || shift > 28) throw Error(ErrorCode::IoError, "malformed varint");
      const std::uint8_t byte = bytes[offset++];
      z |= static_cast<std::uint32_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) break;
    }
    msg.symbols[c] = static_cast<std::int32_t>((z >> 1) ^ (~(z & 1) + 1));
  }
  return msg;
}

std::vector<std::uint8_t> encode_replay(const ReplayHeader& header, std::span<const QuantizedMessage> messages) {
  std::vector<std::uint8_t> out;
  put_u32(out, kReplayMagic);
  put_u32(out, header.dimension);
  put_u64(out, std::bit_cast<std::uint64_t>(header.s0));
  put_u64(out, std::bit_cast<std::uint64_t>(header.mu));
  for (const auto& msg : messages) {
    if (msg.symbols.size() != header.dimension) throw Error(ErrorCode::DimensionMismatch, "replay message dimension");
    write_message(out, msg);
  }
  return out;
}

std::vector<std::vector<double>> replay(std::span<const std::uint8_t> bytes, ReplayHeader* header_out) {
  std::size_t offset = 0;
  if (get_le(bytes, offset, 4) != kReplayMagic) throw Error(ErrorCode::IoError, "not a replay stream");
  ReplayHeader header;
  header.dimension = static_cast<std::uint32_t>(get_le(bytes, offset, 4));
  header.s0 = std::bit_cast<double>(get_le(bytes, offset, 8));
  header.mu = std::bit_cast<double>(get_le(bytes, offset, 8));
  if (header_out) *header_out = header;
  Decoder decoder(header.dimension, header.s0, header.mu);
  std::vector<std::vector<double>> estimates;
  while (offset < bytes.size()) {
    auto msg = read_message(bytes, offset, header.dimension);
    auto est = decoder.decode(msg);
    estimates.emplace_back(est.begin(), est.end());
  }
  return estimates;
}

void save_replay(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::vector<std::uint8_t> load_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace qdopt
