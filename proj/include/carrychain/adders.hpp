#pragma once

#include <cstdint>
#include <vector>

#include "carrychain/word_vec.hpp"

namespace carrychain {

// Classification of one bit position of an addition x + y:
//   Generate:  both bits set, a carry starts here regardless of input carry.
//   Propagate: exactly one bit set, an incoming carry passes through.
//   Kill:      both bits clear, any incoming carry stops here.
enum class PositionClass : char {
  Kill = 'K',
  Propagate = 'P',
  Generate = 'G',
};

struct BitAddResult {
  bool sum;
  bool carry;
};

// One full-adder cell: sum is the parity of the inputs, carry the majority.
constexpr BitAddResult full_add_bit(bool f, bool g, bool h) {
  return {.sum = (f != g) != h,
          .carry = (f && g) || (f && h) || (g && h)};
}

struct CarrySaveResult {
  WordVec sum;    // bitwise parity of the three inputs
  WordVec carry;  // bitwise majority, shifted left one position
};

// Carry-save (3-to-2) addition: sum + carry == f + g + h (mod 2^width).
CarrySaveResult carry_save_add(const WordVec& f, const WordVec& g,
                               const WordVec& h);

std::vector<PositionClass> classify_positions(const WordVec& x,
                                              const WordVec& y);

// A maximal carry chain: a Generate position followed by `length - 1`
// Propagate positions. `start` is the Generate's index.
struct Chain {
  std::int64_t start = 0;
  std::int64_t length = 0;

  friend bool operator==(const Chain&, const Chain&) = default;
};

struct ChainProfile {
  std::int64_t width = 0;
  std::vector<PositionClass> classes;  // index 0 = rightmost position
  std::vector<Chain> chains;           // ordered by start position
  std::int64_t longest = 0;            // 0 when no Generate occurs
};

ChainProfile extract_chains(std::vector<PositionClass> classes);

// True when the k-block at position l is active: class(l) == Generate and
// classes l+1 .. l+k-1 are all Propagate.
bool block_active(const ChainProfile& profile, std::int64_t l, std::int64_t k);

struct CarryPropagateResult {
  WordVec sum;  // x + y mod 2^width
  ChainProfile profile;
};

CarryPropagateResult carry_propagate_add(const WordVec& x, const WordVec& y);

// Longest carry-chain length of x + y without materializing the profile.
// Agrees with carry_propagate_add(x, y).profile.longest.
std::int64_t longest_chain_length(const WordVec& x, const WordVec& y);

}  // namespace carrychain
