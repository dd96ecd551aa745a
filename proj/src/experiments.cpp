#include "carrychain/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "carrychain/errors.hpp"

namespace carrychain {
namespace {

void require_positive(std::int64_t value, const char* name) {
  if (value < 1) {
    throw RangeError(std::string(name) + " must be positive, got " +
                     std::to_string(value));
  }
}

// Reference modular adder working on raw chunks; independent of both the
// gate-level view and carry_propagate_add's implementation details.
WordVec add_mod(const WordVec& a, const WordVec& b) {
  if (a.width() != b.width()) {
    throw ShapeError("add_mod: widths differ");
  }
  const auto ac = a.chunks();
  const auto bc = b.chunks();
  std::vector<std::uint64_t> out(ac.size());
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < ac.size(); ++i) {
    const std::uint64_t partial = ac[i] + bc[i];
    const std::uint64_t full = partial + carry;
    carry = (partial < ac[i]) || (full < partial) ? 1 : 0;
    out[i] = full;
  }
  return WordVec::from_chunks(std::move(out), a.width());
}

std::int64_t worker_cap() {
  std::int64_t cap = std::thread::hardware_concurrency();
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("CARRYCHAIN_THREADS")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) {
      cap = static_cast<std::int64_t>(parsed);
    }
  }
  return cap;
}

// Runs body(worker, begin, end) over a contiguous split of [0, total).
// Bodies must depend only on absolute indices so the split is invisible.
void run_partitioned(
    std::uint64_t total,
    const std::function<void(std::int64_t, std::uint64_t, std::uint64_t)>&
        body) {
  if (total == 0) return;
  const std::int64_t workers = static_cast<std::int64_t>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(worker_cap()),
                              total));
  if (workers <= 1) {
    body(0, 0, total);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::uint64_t base = total / workers;
  const std::uint64_t extra = total % workers;
  std::uint64_t begin = 0;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::uint64_t end =
        begin + base + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

TailDistribution tail_from_bins(std::int64_t n, std::int64_t positions,
                                const std::vector<std::uint64_t>& bins,
                                std::uint64_t trials) {
  TailDistribution tail;
  tail.n = n;
  tail.positions = positions;
  tail.kind = TailKind::Estimate;
  tail.trials = trials;
  const std::int64_t k_eff = static_cast<std::int64_t>(bins.size()) - 1;
  std::uint64_t at_least = 0;
  std::vector<double> values(k_eff);
  std::vector<double> errors(k_eff);
  for (std::int64_t k = k_eff; k >= 1; --k) {
    at_least += bins[k];
    const double p =
        static_cast<double>(at_least) / static_cast<double>(trials);
    values[k - 1] = p;
    errors[k - 1] = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }
  tail.values = std::move(values);
  tail.std_errors = std::move(errors);
  return tail;
}

std::vector<std::uint64_t> merge_bins(
    const std::vector<std::vector<std::uint64_t>>& locals) {
  std::vector<std::uint64_t> merged(locals.at(0).size(), 0);
  for (const auto& local : locals) {
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i] += local[i];
  }
  return merged;
}

// Longest chain for addends held in plain 64-bit words.
std::int64_t longest_bits(std::uint64_t x, std::uint64_t y) {
  std::uint64_t prop = x ^ y;
  std::uint64_t run = x & y;
  std::int64_t length = 0;
  while (run != 0) {
    ++length;
    run = (run << 1) & prop;
  }
  return length;
}

bool block_active_xy(const WordVec& x, const WordVec& y, std::int64_t l,
                     std::int64_t k) {
  if (!(x.bit(l) && y.bit(l))) return false;
  for (std::int64_t j = 1; j < k; ++j) {
    if (x.bit(l + j) == y.bit(l + j)) return false;
  }
  return true;
}

bool prefix_equal(const WordVec& a, const WordVec& b, std::int64_t end_pos) {
  const auto ac = a.chunks();
  const auto bc = b.chunks();
  const std::int64_t full = end_pos / 64;
  for (std::int64_t i = 0; i < full; ++i) {
    if (ac[i] != bc[i]) return false;
  }
  if (const std::int64_t rem = end_pos % 64; rem != 0) {
    const std::uint64_t mask = ~std::uint64_t{0} >> (64 - rem);
    if ((ac[full] & mask) != (bc[full] & mask)) return false;
  }
  return true;
}

std::string describe(const MultiplierSpec& spec) {
  return "m=" + std::to_string(spec.m);
}

}  // namespace

void CheckReport::fail(std::string message) {
  passed = false;
  if (violations.size() < 16) {
    violations.push_back(std::move(message));
  }
}

void CheckReport::note(std::string key, std::string value) {
  stats.emplace_back(std::move(key), std::move(value));
}

void validate(const ExperimentConfig& config) {
  require_positive(config.n, "n");
  if (config.trials < 1) {
    throw RangeError("trials must be at least 1");
  }
  if (config.m) {
    decompose_constant(*config.m);  // throws UnsupportedConstantError
  }
  if (config.plan != "serial" && config.plan != "wallace" &&
      (config.plan.empty() || config.plan[0] != '@')) {
    throw PlanError("plan must be serial, wallace, or @<file>, got '" +
                    config.plan + "'");
  }
  require_positive(config.k_min, "k_min");
  if (config.k_max != 0 && config.k_max < config.k_min) {
    throw RangeError("k_max below k_min");
  }
}

TailDistribution mc_addition_tail(std::int64_t n, std::uint64_t trials,
                                  std::uint64_t seed, std::int64_t k_max) {
  require_positive(n, "n");
  require_positive(k_max, "k_max");
  if (trials < 1) {
    throw RangeError("trials must be at least 1");
  }
  const std::int64_t k_eff = std::min(k_max, n);
  std::vector<std::vector<std::uint64_t>> locals(
      worker_cap(), std::vector<std::uint64_t>(k_eff + 1, 0));
  run_partitioned(trials, [&](std::int64_t w, std::uint64_t begin,
                              std::uint64_t end) {
    auto& bins = locals[w];
    for (std::uint64_t t = begin; t < end; ++t) {
      const WordVec x = WordVec::sample_uniform(n, n, seed, 2 * t);
      const WordVec y = WordVec::sample_uniform(n, n, seed, 2 * t + 1);
      const std::int64_t longest = longest_chain_length(x, y);
      ++bins[std::min(longest, k_eff)];
    }
  });
  return tail_from_bins(n, n, merge_bins(locals), trials);
}

TailDistribution mc_multiplication_tail(std::int64_t n,
                                        const MultiplierSpec& spec,
                                        const ReductionPlan& plan,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        std::int64_t k_max) {
  require_positive(n, "n");
  require_positive(k_max, "k_max");
  if (trials < 1) {
    throw RangeError("trials must be at least 1");
  }
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  const std::int64_t width = n + spec.d + 1;
  const std::int64_t k_eff = std::min(k_max, width);
  std::vector<std::vector<std::uint64_t>> locals(
      worker_cap(), std::vector<std::uint64_t>(k_eff + 1, 0));
  run_partitioned(trials, [&](std::int64_t w, std::uint64_t begin,
                              std::uint64_t end) {
    auto& bins = locals[w];
    for (std::uint64_t t = begin; t < end; ++t) {
      const WordVec v = WordVec::sample_uniform(n, width, seed, t);
      const std::int64_t longest = multiply_longest(v, n, spec, plan);
      ++bins[std::min(longest, k_eff)];
    }
  });
  return tail_from_bins(n, width, merge_bins(locals), trials);
}

TailDistribution CountDistribution::tail(std::int64_t k_max) const {
  require_positive(k_max, "k_max");
  TailDistribution tail;
  tail.n = n;
  tail.positions = positions;
  tail.kind = TailKind::ExactRational;
  const std::int64_t k_eff = std::min(k_max, positions);
  tail.exact.resize(k_eff);
  tail.values.resize(k_eff);
  for (std::int64_t k = 1; k <= k_eff; ++k) {
    std::uint64_t at_least = 0;
    for (const auto& [value, count] : counts) {
      if (value >= k) at_least += count;
    }
    tail.exact[k - 1] = BigRat(at_least, total);
    tail.values[k - 1] = tail.exact[k - 1].convert_to<double>();
  }
  return tail;
}

CountDistribution exhaustive_addition_dist(std::int64_t n) {
  require_positive(n, "n");
  if (n > 14) {
    throw ResourceError("exhaustive addition enumerates 4^n pairs; n = " +
                        std::to_string(n) + " exceeds 14");
  }
  const std::uint64_t side = std::uint64_t{1} << n;
  std::vector<std::vector<std::uint64_t>> locals(
      worker_cap(), std::vector<std::uint64_t>(n + 1, 0));
  run_partitioned(side, [&](std::int64_t w, std::uint64_t begin,
                            std::uint64_t end) {
    auto& bins = locals[w];
    for (std::uint64_t x = begin; x < end; ++x) {
      for (std::uint64_t y = 0; y < side; ++y) {
        ++bins[longest_bits(x, y)];
      }
    }
  });
  const std::vector<std::uint64_t> bins = merge_bins(locals);
  CountDistribution dist;
  dist.n = n;
  dist.positions = n;
  dist.total = side * side;
  for (std::int64_t value = 0; value <= n; ++value) {
    if (bins[value] != 0) dist.counts[value] = bins[value];
  }
  return dist;
}

CountDistribution exhaustive_multiplication_dist(std::int64_t n,
                                                 const MultiplierSpec& spec,
                                                 const ReductionPlan& plan) {
  require_positive(n, "n");
  if (n > 24) {
    throw ResourceError(
        "exhaustive multiplication enumerates 2^n values; n = " +
        std::to_string(n) + " exceeds 24");
  }
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  const std::int64_t width = n + spec.d + 1;
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<std::vector<std::uint64_t>> locals(
      worker_cap(), std::vector<std::uint64_t>(width + 1, 0));
  run_partitioned(count, [&](std::int64_t w, std::uint64_t begin,
                             std::uint64_t end) {
    auto& bins = locals[w];
    for (std::uint64_t value = begin; value < end; ++value) {
      const WordVec v = WordVec::from_integer(value, width);
      ++bins[multiply_longest(v, n, spec, plan)];
    }
  });
  const std::vector<std::uint64_t> bins = merge_bins(locals);
  CountDistribution dist;
  dist.n = n;
  dist.positions = width;
  dist.total = count;
  for (std::int64_t value = 0; value <= width; ++value) {
    if (bins[value] != 0) dist.counts[value] = bins[value];
  }
  return dist;
}

CheckReport check_a1_a2(std::int64_t n, std::int64_t k, std::uint64_t samples,
                        std::uint64_t seed) {
  require_positive(n, "n");
  require_positive(k, "k");
  if (k > n) {
    throw RangeError("k exceeds n");
  }
  CheckReport report;
  report.name = "a1a2 n=" + std::to_string(n) + " k=" + std::to_string(k) +
                (samples == 0 ? " exact" : " sampled");
  const std::int64_t blocks = n - k + 1;

  const auto activity_mask = [&](std::uint64_t x, std::uint64_t y) {
    const std::uint64_t prop = x ^ y;
    std::uint64_t mask = x & y;
    for (std::int64_t j = 1; j < k; ++j) {
      mask &= prop >> j;
    }
    return mask;
  };

  if (samples == 0) {
    if (n > 12) {
      throw ResourceError("exact variant enumerates 4^n pairs; n = " +
                          std::to_string(n) + " exceeds 12");
    }
    std::vector<std::uint64_t> single(blocks, 0);
    std::vector<std::uint64_t> joint(blocks * blocks, 0);
    const std::uint64_t side = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < side; ++x) {
      for (std::uint64_t y = 0; y < side; ++y) {
        std::uint64_t mask = activity_mask(x, y);
        for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
          const int l1 = std::countr_zero(rest);
          ++single[l1];
          for (std::uint64_t rest2 = rest & (rest - 1); rest2 != 0;
               rest2 &= rest2 - 1) {
            ++joint[l1 * blocks + std::countr_zero(rest2)];
          }
        }
      }
    }
    const std::uint64_t expected_single =
        std::uint64_t{1} << (2 * n - k - 1);
    report.note("expected_single", std::to_string(expected_single));
    for (std::int64_t l = 0; l < blocks; ++l) {
      if (single[l] != expected_single) {
        report.fail("block " + std::to_string(l) + " active " +
                    std::to_string(single[l]) + " times, expected " +
                    std::to_string(expected_single));
      }
    }
    for (std::int64_t l1 = 0; l1 < blocks; ++l1) {
      for (std::int64_t l2 = l1 + 1; l2 < blocks; ++l2) {
        const std::uint64_t observed = joint[l1 * blocks + l2];
        if (l2 - l1 < k) {
          if (observed != 0) {
            report.fail("overlapping blocks " + std::to_string(l1) + "," +
                        std::to_string(l2) + " jointly active " +
                        std::to_string(observed) + " times");
          }
        } else if (2 * n - 2 * k - 2 >= 0) {
          const std::uint64_t expected_joint =
              std::uint64_t{1} << (2 * n - 2 * k - 2);
          if (observed != expected_joint) {
            report.fail("blocks " + std::to_string(l1) + "," +
                        std::to_string(l2) + " jointly active " +
                        std::to_string(observed) + " times, expected " +
                        std::to_string(expected_joint));
          }
        }
      }
    }
    return report;
  }

  if (n > 62) {
    throw ResourceError("sampled variant uses 64-bit addends; n = " +
                        std::to_string(n) + " exceeds 62");
  }
  std::vector<std::uint64_t> single(blocks, 0);
  std::vector<std::uint64_t> joint(blocks * blocks, 0);
  for (std::uint64_t t = 0; t < samples; ++t) {
    const std::uint64_t x =
        WordVec::sample_uniform(n, n, seed, 2 * t).to_uint64();
    const std::uint64_t y =
        WordVec::sample_uniform(n, n, seed, 2 * t + 1).to_uint64();
    const std::uint64_t mask = activity_mask(x, y);
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
      const int l1 = std::countr_zero(rest);
      ++single[l1];
      for (std::uint64_t rest2 = rest & (rest - 1); rest2 != 0;
           rest2 &= rest2 - 1) {
        ++joint[l1 * blocks + std::countr_zero(rest2)];
      }
    }
  }
  const double p1 = std::ldexp(1.0, -static_cast<int>(k + 1));
  const double band1 =
      6.0 * std::sqrt(p1 * (1 - p1) / static_cast<double>(samples));
  const double p2 = p1 * p1;
  const double band2 =
      6.0 * std::sqrt(p2 * (1 - p2) / static_cast<double>(samples));
  report.note("samples", std::to_string(samples));
  for (std::int64_t l = 0; l < blocks; ++l) {
    const double freq =
        static_cast<double>(single[l]) / static_cast<double>(samples);
    if (std::abs(freq - p1) > band1) {
      report.fail("block " + std::to_string(l) + " frequency " +
                  std::to_string(freq) + " outside 6-sigma band around " +
                  std::to_string(p1));
    }
  }
  for (std::int64_t l1 = 0; l1 < blocks; ++l1) {
    for (std::int64_t l2 = l1 + 1; l2 < blocks; ++l2) {
      const std::uint64_t observed = joint[l1 * blocks + l2];
      if (l2 - l1 < k) {
        if (observed != 0) {
          report.fail("overlapping blocks " + std::to_string(l1) + "," +
                      std::to_string(l2) + " jointly active");
        }
      } else {
        const double freq =
            static_cast<double>(observed) / static_cast<double>(samples);
        if (std::abs(freq - p2) > band2) {
          report.fail("blocks " + std::to_string(l1) + "," +
                      std::to_string(l2) + " joint frequency " +
                      std::to_string(freq) +
                      " outside 6-sigma band around " + std::to_string(p2));
        }
      }
    }
  }
  return report;
}

CheckReport check_csa_identity(std::int64_t exhaustive_width_max,
                               std::int64_t random_width,
                               std::uint64_t random_samples,
                               std::uint64_t seed) {
  CheckReport report;
  report.name = "csa identity";
  for (std::int64_t width = 1; width <= exhaustive_width_max; ++width) {
    const std::uint64_t side = std::uint64_t{1} << width;
    const std::uint64_t mod_mask = side - 1;
    for (std::uint64_t f = 0; f < side; ++f) {
      for (std::uint64_t g = 0; g < side; ++g) {
        for (std::uint64_t h = 0; h < side; ++h) {
          const CarrySaveResult r =
              carry_save_add(WordVec::from_integer(f, width),
                             WordVec::from_integer(g, width),
                             WordVec::from_integer(h, width));
          const std::uint64_t lhs =
              (r.sum.to_uint64() + r.carry.to_uint64()) & mod_mask;
          const std::uint64_t rhs = (f + g + h) & mod_mask;
          if (lhs != rhs) {
            report.fail("width " + std::to_string(width) + ": csa(" +
                        std::to_string(f) + "," + std::to_string(g) + "," +
                        std::to_string(h) + ") sums to " +
                        std::to_string(lhs) + ", expected " +
                        std::to_string(rhs));
          }
        }
      }
    }
  }
  report.note("exhaustive_widths",
              "1.." + std::to_string(exhaustive_width_max));
  for (std::uint64_t t = 0; t < random_samples; ++t) {
    const WordVec f =
        WordVec::sample_uniform(random_width, random_width, seed, 3 * t);
    const WordVec g =
        WordVec::sample_uniform(random_width, random_width, seed, 3 * t + 1);
    const WordVec h =
        WordVec::sample_uniform(random_width, random_width, seed, 3 * t + 2);
    const CarrySaveResult r = carry_save_add(f, g, h);
    if (add_mod(r.sum, r.carry) != add_mod(add_mod(f, g), h)) {
      report.fail("random triple at trial " + std::to_string(t) +
                  " violates A+B == F+G+H");
    }
  }
  report.note("random_width", std::to_string(random_width));
  report.note("random_samples", std::to_string(random_samples));
  return report;
}

CheckReport check_product_exactness(const MultiplierSpec& spec,
                                    const ReductionPlan& plan,
                                    std::int64_t n) {
  require_positive(n, "n");
  if (n > 24) {
    throw ResourceError("product sweep enumerates 2^n values; n = " +
                        std::to_string(n) + " exceeds 24");
  }
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  CheckReport report;
  report.name = "product exactness " + describe(spec) + " n=" +
                std::to_string(n);
  const std::int64_t width = n + spec.d + 1;
  for (std::uint64_t value = 0; value < (std::uint64_t{1} << n); ++value) {
    const WordVec v = WordVec::from_integer(value, width);
    const std::vector<WordVec> summands = make_summands(v, n, spec);
    WordVec target = summands[0];
    for (std::size_t i = 1; i < summands.size(); ++i) {
      target = add_mod(target, summands[i]);
    }
    // instrumented replay of the plan: conservation after every step
    std::vector<WordVec> sums(plan.steps.size());
    std::vector<WordVec> carries(plan.steps.size());
    std::vector<bool> input_live(spec.c, true);
    std::vector<bool> sum_live(plan.steps.size(), false);
    std::vector<bool> carry_live(plan.steps.size(), false);
    const auto resolve = [&](const Operand& op) -> const WordVec& {
      switch (op.kind) {
        case Operand::Kind::Input:
          return summands[op.index - 1];
        case Operand::Kind::Sum:
          return sums[op.index - 1];
        case Operand::Kind::Carry:
        default:
          return carries[op.index - 1];
      }
    };
    const auto consume = [&](const Operand& op) {
      switch (op.kind) {
        case Operand::Kind::Input:
          input_live[op.index - 1] = false;
          break;
        case Operand::Kind::Sum:
          sum_live[op.index - 1] = false;
          break;
        case Operand::Kind::Carry:
          carry_live[op.index - 1] = false;
          break;
      }
    };
    for (std::size_t t = 0; t < plan.steps.size(); ++t) {
      const auto& ops = plan.steps[t].operands;
      const CarrySaveResult r =
          carry_save_add(resolve(ops[0]), resolve(ops[1]), resolve(ops[2]));
      for (const Operand& op : ops) consume(op);
      sums[t] = r.sum;
      carries[t] = r.carry;
      sum_live[t] = true;
      carry_live[t] = true;
      WordVec running = WordVec::zeros(width);
      for (std::int64_t i = 0; i < spec.c; ++i) {
        if (input_live[i]) running = add_mod(running, summands[i]);
      }
      for (std::size_t s = 0; s <= t; ++s) {
        if (sum_live[s]) running = add_mod(running, sums[s]);
        if (carry_live[s]) running = add_mod(running, carries[s]);
      }
      if (running != target) {
        report.fail("v=" + std::to_string(value) + " step " +
                    std::to_string(t + 1) + " breaks value conservation");
      }
    }
    const ReducedPair pair = reduce_to_two(summands, plan);
    if (!plan.steps.empty() &&
        (pair.x != sums.back() || pair.y != carries.back())) {
      report.fail("v=" + std::to_string(value) +
                  ": reduce_to_two disagrees with instrumented replay");
    }
    const WordVec z = carry_propagate_add(pair.x, pair.y).sum;
    if (z != target) {
      report.fail("v=" + std::to_string(value) +
                  ": z differs from the summand total");
    }
    if (width <= 64 && z.to_uint64() != spec.m * value) {
      report.fail("v=" + std::to_string(value) + ": z = " +
                  std::to_string(z.to_uint64()) + ", expected " +
                  std::to_string(spec.m * value));
    }
  }
  report.note("width", std::to_string(width));
  report.note("values", std::to_string(std::uint64_t{1} << n));
  return report;
}

M1Result check_m1_central(const MultiplierSpec& spec,
                          const ReductionPlan& plan, std::int64_t k) {
  require_positive(k, "k");
  const std::int64_t depth = dependence_depth(spec);
  if (k + depth > 24) {
    throw ResourceError("window of " + std::to_string(k + depth) +
                        " bits exceeds the 24-bit enumeration limit");
  }
  M1Result result;
  result.block_position = 2 * depth;
  result.n_used = 2 * depth + k;
  result.window_low = depth;
  result.window_bits = k + depth;
  const std::int64_t n = result.n_used;
  const std::int64_t width = n + spec.d + 1;
  const std::uint64_t window_count = std::uint64_t{1}
                                     << result.window_bits;
  const std::uint64_t window_mask = (window_count - 1)
                                    << result.window_low;
  std::uint64_t active[2] = {0, 0};
  for (int fill = 0; fill <= 1; ++fill) {
    const std::uint64_t base =
        fill == 0 ? 0 : ((std::uint64_t{1} << n) - 1) & ~window_mask;
    for (std::uint64_t w = 0; w < window_count; ++w) {
      const std::uint64_t value = base | (w << result.window_low);
      const WordVec v = WordVec::from_integer(value, width);
      const ReducedPair pair =
          reduce_to_two(make_summands(v, n, spec), plan);
      if (block_active_xy(pair.x, pair.y, result.block_position, k)) {
        ++active[fill];
      }
    }
  }
  result.probability = BigRat(active[0], window_count);
  result.window_sufficient = active[0] == active[1];
  return result;
}

namespace detail {

M5Result conditional_activity(const MultiplierSpec& spec,
                              const ReductionPlan& plan, std::int64_t k,
                              std::int64_t block_a, std::int64_t block_b,
                              std::int64_t window_low,
                              std::int64_t window_bits,
                              std::int64_t n_used) {
  M5Result result;
  result.block_a = block_a;
  result.block_b = block_b;
  result.n_used = n_used;
  result.bound = BigRat(BigInt(1) << dependence_depth(spec),
                        BigInt(1) << (k + 1));
  const std::int64_t width = n_used + spec.d + 1;
  std::uint64_t count_a = 0;
  std::uint64_t count_ab = 0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << window_bits); ++w) {
    const WordVec v = WordVec::from_integer(w << window_low, width);
    const ReducedPair pair = reduce_to_two(make_summands(v, n_used, spec),
                                           plan);
    if (!block_active_xy(pair.x, pair.y, block_a, k)) continue;
    ++count_a;
    if (block_active_xy(pair.x, pair.y, block_b, k)) ++count_ab;
  }
  if (count_a == 0) {
    result.degenerate = true;
    result.conditional = 0;
    result.within_bound = true;
    return result;
  }
  result.degenerate = false;
  result.conditional = BigRat(count_ab, count_a);
  result.within_bound = result.conditional <= result.bound;
  return result;
}

}  // namespace detail

M5Result check_m5_weak_overlap(const MultiplierSpec& spec,
                               const ReductionPlan& plan, std::int64_t k) {
  require_positive(k, "k");
  const std::int64_t depth = dependence_depth(spec);
  if (2 * k + 2 * depth > 24) {
    throw ResourceError("joint window of " + std::to_string(2 * k + depth) +
                        " bits exceeds the enumeration limit");
  }
  const std::int64_t block_b = 2 * depth;
  const std::int64_t block_a = block_b + k;
  const std::int64_t n_used = 2 * depth + 2 * k;
  return detail::conditional_activity(spec, plan, k, block_a, block_b,
                                      depth, 2 * k + depth, n_used);
}

CheckReport check_duality_and_linearity(const MultiplierSpec& spec,
                                        const ReductionPlan& plan,
                                        std::int64_t n, std::uint64_t trials,
                                        std::uint64_t seed) {
  const std::int64_t depth = dependence_depth(spec);
  if (n <= 2 * depth) {
    throw RangeError("n must exceed twice the dependence depth (" +
                     std::to_string(2 * depth) + "), got " +
                     std::to_string(n));
  }
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  CheckReport report;
  report.name = "duality/linearity " + describe(spec) + " n=" +
                std::to_string(n);
  const std::int64_t width = n + spec.d + 1;
  std::uint64_t violation_count = 0;
  const auto record = [&](const std::string& message) {
    ++violation_count;
    report.fail(message);
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const WordVec v = WordVec::sample_uniform(n, width, seed, t);
    const ReducedPair base = reduce_to_two(make_summands(v, n, spec), plan);
    const WordVec vc = v.with_low_bits_complemented(n);
    const ReducedPair comp = reduce_to_two(make_summands(vc, n, spec), plan);
    for (std::int64_t l = depth; l < n; ++l) {
      if (comp.x.bit(l) == base.x.bit(l) ||
          comp.y.bit(l) == base.y.bit(l)) {
        record("trial " + std::to_string(t) + ": duality fails at l=" +
               std::to_string(l));
        break;
      }
    }
    for (std::int64_t l = depth; l < n; ++l) {
      const WordVec vf = v.with_bit_flipped(l);
      const ReducedPair flip =
          reduce_to_two(make_summands(vf, n, spec), plan);
      if (flip.x.bit(l) == base.x.bit(l)) {
        record("trial " + std::to_string(t) + ": x_" + std::to_string(l) +
               " did not flip");
      }
      if (flip.y.bit(l) != base.y.bit(l)) {
        record("trial " + std::to_string(t) + ": y_" + std::to_string(l) +
               " flipped");
      }
      if (!prefix_equal(flip.x, base.x, l) ||
          !prefix_equal(flip.y, base.y, l)) {
        record("trial " + std::to_string(t) +
               ": lower positions changed when flipping l=" +
               std::to_string(l));
      }
    }
  }
  report.note("trials", std::to_string(trials));
  report.note("violations", std::to_string(violation_count));
  return report;
}

TailComparison compare_tails(const TailDistribution& a,
                             const TailDistribution& b, std::int64_t k_min,
                             std::int64_t k_max) {
  if (a.n != b.n) {
    throw ShapeError("tail tables describe different n (" +
                     std::to_string(a.n) + " vs " + std::to_string(b.n) +
                     ")");
  }
  require_positive(k_min, "k_min");
  if (k_max < k_min) {
    throw RangeError("k_max below k_min");
  }
  TailComparison cmp;
  cmp.per_k.reserve(k_max - k_min + 1);
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    const double gap = std::abs(a.value_at(k) - b.value_at(k));
    cmp.per_k.emplace_back(k, gap);
    if (gap > cmp.sup_distance) {
      cmp.sup_distance = gap;
      cmp.argmax_k = k;
    }
  }
  if (cmp.argmax_k == 0) cmp.argmax_k = k_min;
  return cmp;
}

BlockClassification classify_blocks(std::int64_t n,
                                    const MultiplierSpec& spec,
                                    std::int64_t k) {
  require_positive(n, "n");
  require_positive(k, "k");
  if (k > n + spec.d + 1) {
    throw RangeError("no k-blocks: k exceeds the addition width");
  }
  BlockClassification blocks;
  blocks.dependence = dependence_depth(spec);
  blocks.total_blocks = n + spec.d - k + 2;
  const std::int64_t low = 2 * blocks.dependence;
  const std::int64_t high = n - k;
  blocks.central_count = std::max<std::int64_t>(0, high - low + 1);
  blocks.central_low = blocks.central_count > 0 ? low : 0;
  blocks.central_high = blocks.central_count > 0 ? high : -1;
  blocks.marginal_count = blocks.total_blocks - blocks.central_count;
  return blocks;
}

}  // namespace carrychain
