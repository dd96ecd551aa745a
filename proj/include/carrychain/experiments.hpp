#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carrychain/analytic.hpp"
#include "carrychain/multiplier.hpp"

namespace carrychain {

// Common knobs for a sampling or sweep run; validate() throws the most
// specific error for the first bad field.
struct ExperimentConfig {
  std::int64_t n = 0;
  std::optional<std::uint64_t> m;  // unset for plain addition
  std::string plan = "serial";     // "serial", "wallace", or "@<file>"
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::int64_t k_min = 1;
  std::int64_t k_max = 0;  // 0 = up to the natural maximum
};

void validate(const ExperimentConfig& config);

TailDistribution mc_addition_tail(std::int64_t n, std::uint64_t trials,
                                  std::uint64_t seed, std::int64_t k_max);

TailDistribution mc_multiplication_tail(std::int64_t n,
                                        const MultiplierSpec& spec,
                                        const ReductionPlan& plan,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        std::int64_t k_max);

// Counts of the longest-chain statistic over a full enumeration.
struct CountDistribution {
  std::int64_t n = 0;
  std::int64_t positions = 0;  // width the chains live in
  std::uint64_t total = 0;
  std::map<std::int64_t, std::uint64_t> counts;

  TailDistribution tail(std::int64_t k_max) const;  // exact rationals
};

// All 4^n ordered pairs of n-bit words.
CountDistribution exhaustive_addition_dist(std::int64_t n);

// All 2^n inputs through the multiplication pipeline.
CountDistribution exhaustive_multiplication_dist(std::int64_t n,
                                                 const MultiplierSpec& spec,
                                                 const ReductionPlan& plan);

struct CheckReport {
  std::string name;
  bool passed = true;
  std::vector<std::string> violations;  // first few, human-readable
  std::vector<std::pair<std::string, std::string>> stats;

  void fail(std::string message);
  void note(std::string key, std::string value);
};

// Exhaustive (samples == 0) or sampled verification that every k-block of
// an n-bit addition is active with probability exactly 1 / 2^(k+1) and that
// non-overlapping blocks are independent (overlapping pairs never co-occur).
CheckReport check_a1_a2(std::int64_t n, std::int64_t k,
                        std::uint64_t samples = 0, std::uint64_t seed = 0);

// A + B == F + G + H for the carry-save adder, exhaustively over small
// widths and randomized at a large width.
CheckReport check_csa_identity(std::int64_t exhaustive_width_max,
                               std::int64_t random_width,
                               std::uint64_t random_samples,
                               std::uint64_t seed);

// Exhaustive sweep of the full pipeline for one constant and plan: per-step
// value conservation, agreement with reduce_to_two, and z == m * v.
CheckReport check_product_exactness(const MultiplierSpec& spec,
                                    const ReductionPlan& plan, std::int64_t n);

struct M1Result {
  std::int64_t block_position = 0;  // l = 2 * dependence_depth
  std::int64_t n_used = 0;
  std::int64_t window_low = 0;
  std::int64_t window_bits = 0;
  BigRat probability;            // exact activity over the window
  bool window_sufficient = false;  // same count under 0-fill and 1-fill
};

// Exact enumeration of a central block's activity; the window of input bits
// the block can depend on is enumerated, all other bits held fixed.
M1Result check_m1_central(const MultiplierSpec& spec,
                          const ReductionPlan& plan, std::int64_t k);

struct M5Result {
  std::int64_t block_a = 0;  // left block, at 2 * dependence_depth + k
  std::int64_t block_b = 0;  // right block, at 2 * dependence_depth
  std::int64_t n_used = 0;
  bool degenerate = false;  // conditioning event has probability zero
  BigRat conditional;       // Pr[B active | A active]
  BigRat bound;             // 2^D / 2^(k+1)
  bool within_bound = false;
};

// Exact conditional activity of a block given an active block k positions
// to its left (weak-overlap regime).
M5Result check_m5_weak_overlap(const MultiplierSpec& spec,
                               const ReductionPlan& plan, std::int64_t k);

// Randomized check that complementing the low n input bits complements
// both final addends on positions D..n-1, and that flipping input bit l
// flips x_l, leaves y_l, and leaves all lower bits of both unchanged.
CheckReport check_duality_and_linearity(const MultiplierSpec& spec,
                                        const ReductionPlan& plan,
                                        std::int64_t n, std::uint64_t trials,
                                        std::uint64_t seed);

struct TailComparison {
  double sup_distance = 0.0;
  std::int64_t argmax_k = 0;
  std::vector<std::pair<std::int64_t, double>> per_k;  // absolute gaps
};

TailComparison compare_tails(const TailDistribution& a,
                             const TailDistribution& b, std::int64_t k_min,
                             std::int64_t k_max);

struct BlockClassification {
  std::int64_t total_blocks = 0;
  std::int64_t central_low = 0;   // inclusive; range empty if count is 0
  std::int64_t central_high = 0;  // inclusive
  std::int64_t central_count = 0;
  std::int64_t marginal_count = 0;
  std::int64_t dependence = 0;
};

// Splits the k-block positions of the final (n+d+1)-wide addition into
// central blocks (clear of both margins) and marginal ones.
BlockClassification classify_blocks(std::int64_t n,
                                    const MultiplierSpec& spec,
                                    std::int64_t k);

namespace detail {

// Exact Pr[B active | A active] with explicit geometry; used by
// check_m5_weak_overlap and by tests probing degenerate placements.
M5Result conditional_activity(const MultiplierSpec& spec,
                              const ReductionPlan& plan, std::int64_t k,
                              std::int64_t block_a, std::int64_t block_b,
                              std::int64_t window_low,
                              std::int64_t window_bits, std::int64_t n_used);

}  // namespace detail

}  // namespace carrychain
