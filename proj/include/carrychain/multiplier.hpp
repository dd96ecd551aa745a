#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carrychain/adders.hpp"
#include "carrychain/word_vec.hpp"

namespace carrychain {

// Odd constant m >= 3 decomposed into its set bits: m = sum of 2^s_i with
// 0 = s_1 < s_2 < ... < s_c = d.
struct MultiplierSpec {
  std::uint64_t m = 0;
  std::int64_t d = 0;                   // index of the highest set bit
  std::int64_t c = 0;                   // number of set bits (summand count)
  std::vector<std::int64_t> positions;  // the s_i, ascending
};

MultiplierSpec decompose_constant(std::uint64_t m);

// Operand of a reduction step: one of the c shifted summands ("in:i",
// 1-based) or an output of an earlier step ("sum:t" / "carry:t").
struct Operand {
  enum class Kind { Input, Sum, Carry };

  Kind kind = Kind::Input;
  std::int64_t index = 0;

  std::string to_string() const;
  static Operand parse(const std::string& text);

  friend bool operator==(const Operand&, const Operand&) = default;
};

// One carry-save adder consuming three live values.
struct ReductionStep {
  std::array<Operand, 3> operands;

  friend bool operator==(const ReductionStep&, const ReductionStep&) = default;
};

// Schedule reducing c summands to two words via c-2 carry-save adders.
// `depth` is the longest dependency path, counting each step as one level.
struct ReductionPlan {
  std::int64_t c = 0;
  std::vector<ReductionStep> steps;
  std::int64_t depth = 0;

  friend bool operator==(const ReductionPlan&, const ReductionPlan&) = default;
};

// Chain: step t feeds step t+1, third leg takes the next unused input.
ReductionPlan serial_plan(std::int64_t c);

// Level-by-level: group as many disjoint triples of live values as possible
// per level, earliest-created first.
ReductionPlan wallace_plan(std::int64_t c);

// Longest dependency path of a structurally valid step list.
std::int64_t plan_dependency_depth(const ReductionPlan& plan);

struct PlanViolation {
  std::int64_t step = 0;  // 1-based offending step, 0 for plan-level issues
  std::string message;
};

// Checks operand references, single consumption of every value, step count,
// and that exactly the last step's outputs remain live. Returns the first
// violation found, or nullopt for a valid plan.
std::optional<PlanViolation> validate_plan(const ReductionPlan& plan);

// The c words 2^{s_i} * v, each of width n + d + 1 (v has n payload bits).
std::vector<WordVec> make_summands(const WordVec& v, std::int64_t n,
                                   const MultiplierSpec& spec);

struct ReducedPair {
  WordVec x;
  WordVec y;
};

// Executes the plan. Invariant: x + y == sum of all summands (mod 2^width).
ReducedPair reduce_to_two(std::span<const WordVec> summands,
                          const ReductionPlan& plan);

struct PipelineResult {
  WordVec x;
  WordVec y;
  WordVec z;  // x + y == m * v (mod 2^(n+d+1)), exact since the product fits
  ChainProfile profile;
};

PipelineResult multiply_profile(const WordVec& v, std::int64_t n,
                                const MultiplierSpec& spec,
                                const ReductionPlan& plan);

// Fast path: longest chain of the final addition only.
std::int64_t multiply_longest(const WordVec& v, std::int64_t n,
                              const MultiplierSpec& spec,
                              const ReductionPlan& plan);

// Number of positions to the right that the final addends can depend on:
// d + (number of carry-save levels in the worst case), i.e. d + (c - 2).
std::int64_t dependence_depth(const MultiplierSpec& spec);

}  // namespace carrychain
