#include "carrychain/adders.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "carrychain/errors.hpp"

namespace carrychain {
namespace {

void require_same_width(const WordVec& a, const WordVec& b,
                        const char* what) {
  if (a.width() != b.width()) {
    throw ShapeError(std::string(what) + ": widths differ (" +
                     std::to_string(a.width()) + " vs " +
                     std::to_string(b.width()) + ")");
  }
}

}  // namespace

CarrySaveResult carry_save_add(const WordVec& f, const WordVec& g,
                               const WordVec& h) {
  require_same_width(f, g, "carry_save_add");
  require_same_width(f, h, "carry_save_add");
  const auto fc = f.chunks();
  const auto gc = g.chunks();
  const auto hc = h.chunks();
  std::vector<std::uint64_t> sum(fc.size());
  std::vector<std::uint64_t> carry(fc.size());
  std::uint64_t spill = 0;
  for (std::size_t i = 0; i < fc.size(); ++i) {
    sum[i] = fc[i] ^ gc[i] ^ hc[i];
    const std::uint64_t maj =
        (fc[i] & gc[i]) | (fc[i] & hc[i]) | (gc[i] & hc[i]);
    carry[i] = (maj << 1) | spill;
    spill = maj >> 63;
  }
  return {.sum = WordVec::from_chunks(std::move(sum), f.width()),
          .carry = WordVec::from_chunks(std::move(carry), f.width())};
}

std::vector<PositionClass> classify_positions(const WordVec& x,
                                              const WordVec& y) {
  require_same_width(x, y, "classify_positions");
  const auto xc = x.chunks();
  const auto yc = y.chunks();
  std::vector<PositionClass> classes(x.width());
  for (std::int64_t pos = 0; pos < x.width(); ++pos) {
    const unsigned xb = (xc[pos / 64] >> (pos % 64)) & 1u;
    const unsigned yb = (yc[pos / 64] >> (pos % 64)) & 1u;
    classes[pos] = (xb & yb) ? PositionClass::Generate
                 : (xb ^ yb) ? PositionClass::Propagate
                             : PositionClass::Kill;
  }
  return classes;
}

ChainProfile extract_chains(std::vector<PositionClass> classes) {
  ChainProfile profile;
  profile.width = static_cast<std::int64_t>(classes.size());
  std::int64_t pos = 0;
  while (pos < profile.width) {
    if (classes[pos] != PositionClass::Generate) {
      ++pos;
      continue;
    }
    std::int64_t end = pos + 1;
    while (end < profile.width && classes[end] == PositionClass::Propagate) {
      ++end;
    }
    profile.chains.push_back({.start = pos, .length = end - pos});
    profile.longest = std::max(profile.longest, end - pos);
    pos = end;
  }
  profile.classes = std::move(classes);
  return profile;
}

bool block_active(const ChainProfile& profile, std::int64_t l,
                  std::int64_t k) {
  if (k < 1) {
    throw RangeError("block length must be positive, got " +
                     std::to_string(k));
  }
  if (l < 0 || l + k > profile.width) {
    throw RangeError("block [" + std::to_string(l) + ", " +
                     std::to_string(l + k) + ") outside width " +
                     std::to_string(profile.width));
  }
  if (profile.classes[l] != PositionClass::Generate) return false;
  for (std::int64_t j = 1; j < k; ++j) {
    if (profile.classes[l + j] != PositionClass::Propagate) return false;
  }
  return true;
}

CarryPropagateResult carry_propagate_add(const WordVec& x, const WordVec& y) {
  require_same_width(x, y, "carry_propagate_add");
  const auto xc = x.chunks();
  const auto yc = y.chunks();
  std::vector<std::uint64_t> sum(xc.size());
  unsigned __int128 carry = 0;
  for (std::size_t i = 0; i < xc.size(); ++i) {
    const unsigned __int128 t =
        static_cast<unsigned __int128>(xc[i]) + yc[i] + carry;
    sum[i] = static_cast<std::uint64_t>(t);
    carry = t >> 64;
  }
  return {.sum = WordVec::from_chunks(std::move(sum), x.width()),
          .profile = extract_chains(classify_positions(x, y))};
}

std::int64_t longest_chain_length(const WordVec& x, const WordVec& y) {
  require_same_width(x, y, "longest_chain_length");
  const auto xc = x.chunks();
  const auto yc = y.chunks();
  const std::size_t count = xc.size();
  std::vector<std::uint64_t> prop(count);
  std::vector<std::uint64_t> run(count);
  bool any = false;
  for (std::size_t i = 0; i < count; ++i) {
    prop[i] = xc[i] ^ yc[i];
    run[i] = xc[i] & yc[i];
    any |= run[i] != 0;
  }
  std::int64_t length = 0;
  while (any) {
    ++length;
    any = false;
    std::uint64_t spill = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t next = ((run[i] << 1) | spill) & prop[i];
      spill = run[i] >> 63;
      run[i] = next;
      any |= next != 0;
    }
  }
  return length;
}

}  // namespace carrychain
