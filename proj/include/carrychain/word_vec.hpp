#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace carrychain {

// Fixed-width binary word. Bit 0 is the least significant (rightmost)
// position; bit width-1 is the leftmost. Values are held in 64-bit chunks,
// least significant chunk first, with unused bits of the top chunk kept at
// zero so chunkwise operations never see garbage.
class WordVec {
 public:
  WordVec() = default;

  static WordVec zeros(std::int64_t width);
  static WordVec from_integer(std::uint64_t value, std::int64_t width);
  // Takes ownership of a chunk vector sized for `width` and masks the top.
  static WordVec from_chunks(std::vector<std::uint64_t> chunks,
                             std::int64_t width);
  // Uniform n-bit value in a word of the given width; bits >= n are zero.
  // A pure function of (seed, index), so trial streams are reproducible and
  // independent of evaluation order.
  static WordVec sample_uniform(std::int64_t n, std::int64_t width,
                                std::uint64_t seed, std::uint64_t index);

  std::int64_t width() const { return width_; }
  std::int64_t chunk_count() const {
    return static_cast<std::int64_t>(chunks_.size());
  }
  std::span<const std::uint64_t> chunks() const { return chunks_; }

  bool bit(std::int64_t position) const;
  void set_bit(std::int64_t position, bool value);
  bool is_zero() const;

  // Fails if any set bit lies at position >= 64.
  std::uint64_t to_uint64() const;

  // Logical left shift by 0 <= s < width; bits shifted past the top are
  // discarded (arithmetic is modulo 2^width throughout the pipeline).
  WordVec shifted_left(std::int64_t shift) const;

  // Grows with zero fill, or shrinks when every dropped bit is zero.
  WordVec resized(std::int64_t new_width) const;

  WordVec with_bit_flipped(std::int64_t position) const;
  // Complements bits 0..n-1 and leaves the rest untouched.
  WordVec with_low_bits_complemented(std::int64_t n) const;

  std::string to_binary_string() const;  // most significant bit first
  std::string to_hex_string() const;     // most significant digit first

  friend bool operator==(const WordVec&, const WordVec&) = default;

 private:
  std::int64_t width_ = 0;
  std::vector<std::uint64_t> chunks_;

  void mask_top();
};

namespace detail {

// splitmix64 finalizer; bijective on 64-bit values.
std::uint64_t mix64(std::uint64_t x);

}  // namespace detail

}  // namespace carrychain
