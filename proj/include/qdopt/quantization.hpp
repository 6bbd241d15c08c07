#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qdopt {

enum class BitCount { Nominal, Strict };

// ceil(log2(2K)) for the nominal count, ceil(log2(2K+1)) for the strict count.
int bits_for_level(std::int64_t levels, BitCount mode = BitCount::Nominal);

struct QuantizedMessage {
  std::uint32_t scale_index = 0;  // encoder step k that produced the message
  std::vector<std::int32_t> symbols;
  double peak = 0.0;  // infinity norm of the quantizer argument
  bool unsaturated = true;

  std::size_t bits(std::int64_t levels, BitCount mode = BitCount::Nominal) const {
    return symbols.size() * static_cast<std::size_t>(bits_for_level(levels, mode));
  }
};

// Mid-tread uniform quantizer with outputs in [-K, K].
class UniformQuantizer {
 public:
  explicit UniformQuantizer(std::int64_t levels);

  std::int64_t levels() const { return levels_; }
  double limit() const { return static_cast<double>(levels_) + 0.5; }

  std::int32_t quantize(double a) const;
  QuantizedMessage quantize(std::span<const double> h) const;

 private:
  std::int64_t levels_;
};

std::int32_t quantize_scalar(const UniformQuantizer& q, double a);
QuantizedMessage quantize_vector(const UniformQuantizer& q, std::span<const double> h);

class Encoder {
 public:
  Encoder(std::size_t dimension, double s0, double mu);

  // z = Q[(value - b) / s(k-1)], b <- s(k-1) z + b.
  void encode(const UniformQuantizer& q, std::span<const double> value, QuantizedMessage& out);
  QuantizedMessage encode(const UniformQuantizer& q, std::span<const double> value);

  std::span<const double> internal() const { return internal_; }
  std::uint32_t step() const { return step_; }
  double scale() const { return scale_; }  // s(step)
  double s0() const { return s0_; }
  double mu() const { return mu_; }
  std::size_t dimension() const { return internal_.size(); }

 private:
  std::vector<double> internal_;
  double s0_;
  double mu_;
  double scale_;
  std::uint32_t step_ = 0;
};

class Decoder {
 public:
  Decoder(std::size_t dimension, double s0, double mu);

  std::span<const double> decode(const QuantizedMessage& msg);

  std::span<const double> estimate() const { return estimate_; }
  std::uint32_t step() const { return step_; }
  double scale() const { return scale_; }
  std::size_t dimension() const { return estimate_.size(); }

 private:
  std::vector<double> estimate_;
  double s0_;
  double mu_;
  double scale_;
  std::uint32_t step_ = 0;
};

// Wire format: scale_index as little-endian u32, then one zig-zag LEB128 varint per symbol.
void write_message(std::vector<std::uint8_t>& out, const QuantizedMessage& msg);
QuantizedMessage read_message(std::span<const std::uint8_t> bytes, std::size_t& offset, std::size_t dimension);

// Replay stream: header (magic, dimension, s0, mu) followed by messages.
struct ReplayHeader {
  std::uint32_t dimension = 0;
  double s0 = 1.0;
  double mu = 0.5;
};

std::vector<std::uint8_t> encode_replay(const ReplayHeader& header, std::span<const QuantizedMessage> messages);
// Decodes every message in order and returns the estimate after each one.
std::vector<std::vector<double>> replay(std::span<const std::uint8_t> bytes, ReplayHeader* header = nullptr);

void save_replay(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> load_replay(const std::string& path);

}  // namespace qdopt
