#include "carrychain/word_vec.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "carrychain/errors.hpp"

namespace carrychain {
namespace {

constexpr std::int64_t kChunkBits = 64;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::int64_t chunks_for(std::int64_t width) {
  return (width + kChunkBits - 1) / kChunkBits;
}

std::uint64_t low_mask(std::int64_t bits) {
  return bits == 0 ? 0 : ~std::uint64_t{0} >> (kChunkBits - bits);
}

}  // namespace

namespace detail {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace detail

void WordVec::mask_top() {
  if (std::int64_t rem = width_ % kChunkBits; rem != 0) {
    chunks_.back() &= low_mask(rem);
  }
}

WordVec WordVec::zeros(std::int64_t width) {
  if (width < 1) {
    throw RangeError("WordVec width must be positive, got " +
                     std::to_string(width));
  }
  WordVec w;
  w.width_ = width;
  w.chunks_.assign(chunks_for(width), 0);
  return w;
}

WordVec WordVec::from_integer(std::uint64_t value, std::int64_t width) {
  WordVec w = zeros(width);
  if (width < kChunkBits && (value >> width) != 0) {
    throw RangeError("value does not fit in " + std::to_string(width) +
                     " bits");
  }
  w.chunks_[0] = value;
  return w;
}

WordVec WordVec::from_chunks(std::vector<std::uint64_t> chunks,
                             std::int64_t width) {
  if (width < 1) {
    throw RangeError("WordVec width must be positive, got " +
                     std::to_string(width));
  }
  if (static_cast<std::int64_t>(chunks.size()) != chunks_for(width)) {
    throw ShapeError("chunk count does not match width");
  }
  WordVec w;
  w.width_ = width;
  w.chunks_ = std::move(chunks);
  w.mask_top();
  return w;
}

WordVec WordVec::sample_uniform(std::int64_t n, std::int64_t width,
                                std::uint64_t seed, std::uint64_t index) {
  if (n < 1) {
    throw RangeError("sample_uniform: n must be positive");
  }
  if (width < n) {
    throw RangeError("sample_uniform: width " + std::to_string(width) +
                     " is smaller than n = " + std::to_string(n));
  }
  WordVec w = zeros(width);
  const std::uint64_t stream = detail::mix64(seed + kGolden * index);
  const std::int64_t filled = chunks_for(n);
  for (std::int64_t j = 0; j < filled; ++j) {
    w.chunks_[j] = detail::mix64(
        stream + kGolden * (static_cast<std::uint64_t>(j) + 1));
  }
  if (std::int64_t rem = n % kChunkBits; rem != 0) {
    w.chunks_[filled - 1] &= low_mask(rem);
  }
  return w;
}

bool WordVec::bit(std::int64_t position) const {
  if (position < 0 || position >= width_) {
    throw RangeError("bit position " + std::to_string(position) +
                     " outside width " + std::to_string(width_));
  }
  return (chunks_[position / kChunkBits] >> (position % kChunkBits)) & 1u;
}

void WordVec::set_bit(std::int64_t position, bool value) {
  if (position < 0 || position >= width_) {
    throw RangeError("bit position " + std::to_string(position) +
                     " outside width " + std::to_string(width_));
  }
  const std::uint64_t mask = std::uint64_t{1} << (position % kChunkBits);
  if (value) {
    chunks_[position / kChunkBits] |= mask;
  } else {
    chunks_[position / kChunkBits] &= ~mask;
  }
}

bool WordVec::is_zero() const {
  for (std::uint64_t c : chunks_) {
    if (c != 0) return false;
  }
  return true;
}

std::uint64_t WordVec::to_uint64() const {
  for (std::size_t i = 1; i < chunks_.size(); ++i) {
    if (chunks_[i] != 0) {
      throw RangeError("value does not fit in 64 bits");
    }
  }
  return chunks_.empty() ? 0 : chunks_[0];
}

WordVec WordVec::shifted_left(std::int64_t shift) const {
  if (shift < 0 || shift >= width_) {
    throw RangeError("shift " + std::to_string(shift) + " outside [0, " +
                     std::to_string(width_) + ")");
  }
  WordVec out = zeros(width_);
  const std::int64_t chunk_shift = shift / kChunkBits;
  const std::int64_t bit_shift = shift % kChunkBits;
  const std::int64_t count = chunk_count();
  for (std::int64_t i = count - 1; i >= chunk_shift; --i) {
    std::uint64_t v = chunks_[i - chunk_shift] << bit_shift;
    if (bit_shift != 0 && i - chunk_shift > 0) {
      v |= chunks_[i - chunk_shift - 1] >> (kChunkBits - bit_shift);
    }
    out.chunks_[i] = v;
  }
  out.mask_top();
  return out;
}

WordVec WordVec::resized(std::int64_t new_width) const {
  if (new_width < 1) {
    throw RangeError("WordVec width must be positive, got " +
                     std::to_string(new_width));
  }
  if (new_width < width_) {
    for (std::int64_t pos = new_width; pos < width_; ++pos) {
      if ((chunks_[pos / kChunkBits] >> (pos % kChunkBits)) & 1u) {
        throw RangeError("resize would drop set bit at position " +
                         std::to_string(pos));
      }
    }
  }
  WordVec out = zeros(new_width);
  const std::int64_t copy =
      std::min(out.chunk_count(), chunk_count());
  for (std::int64_t i = 0; i < copy; ++i) {
    out.chunks_[i] = chunks_[i];
  }
  out.mask_top();
  return out;
}

WordVec WordVec::with_bit_flipped(std::int64_t position) const {
  WordVec out = *this;
  out.set_bit(position, !bit(position));
  return out;
}

WordVec WordVec::with_low_bits_complemented(std::int64_t n) const {
  if (n < 0 || n > width_) {
    throw RangeError("complement count " + std::to_string(n) +
                     " outside [0, " + std::to_string(width_) + "]");
  }
  WordVec out = *this;
  const std::int64_t full = n / kChunkBits;
  for (std::int64_t i = 0; i < full; ++i) {
    out.chunks_[i] = ~out.chunks_[i];
  }
  if (std::int64_t rem = n % kChunkBits; rem != 0) {
    out.chunks_[full] ^= low_mask(rem);
  }
  out.mask_top();
  return out;
}

std::string WordVec::to_binary_string() const {
  std::string s;
  s.reserve(width_);
  for (std::int64_t pos = width_ - 1; pos >= 0; --pos) {
    s.push_back(bit(pos) ? '1' : '0');
  }
  return s;
}

std::string WordVec::to_hex_string() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::int64_t digits = (width_ + 3) / 4;
  std::string s;
  s.reserve(digits);
  for (std::int64_t digit = digits - 1; digit >= 0; --digit) {
    unsigned nibble = 0;
    for (std::int64_t b = 3; b >= 0; --b) {
      const std::int64_t pos = digit * 4 + b;
      nibble <<= 1;
      if (pos < width_ && bit(pos)) nibble |= 1;
    }
    s.push_back(kDigits[nibble]);
  }
  return s;
}

}  // namespace carrychain
