#include "carrychain/multiplier.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "carrychain/errors.hpp"

namespace carrychain {

MultiplierSpec decompose_constant(std::uint64_t m) {
  if (m < 3 || m % 2 == 0) {
    throw UnsupportedConstantError(
        "constant must be odd and at least 3, got " + std::to_string(m));
  }
  MultiplierSpec spec;
  spec.m = m;
  spec.c = std::popcount(m);
  spec.d = 63 - std::countl_zero(m);
  spec.positions.reserve(spec.c);
  for (std::uint64_t rest = m; rest != 0; rest &= rest - 1) {
    spec.positions.push_back(std::countr_zero(rest));
  }
  return spec;
}

std::string Operand::to_string() const {
  switch (kind) {
    case Kind::Input:
      return "in:" + std::to_string(index);
    case Kind::Sum:
      return "sum:" + std::to_string(index);
    case Kind::Carry:
      return "carry:" + std::to_string(index);
  }
  return {};
}

Operand Operand::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw PlanError("malformed operand '" + text + "'");
  }
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  Kind kind;
  if (head == "in") {
    kind = Kind::Input;
  } else if (head == "sum") {
    kind = Kind::Sum;
  } else if (head == "carry") {
    kind = Kind::Carry;
  } else {
    throw PlanError("unknown operand kind '" + head + "'");
  }
  std::int64_t index = 0;
  if (tail.empty() ||
      tail.find_first_not_of("0123456789") != std::string::npos) {
    throw PlanError("malformed operand index '" + tail + "'");
  }
  try {
    index = std::stoll(tail);
  } catch (const std::exception&) {
    throw PlanError("malformed operand index '" + tail + "'");
  }
  return {.kind = kind, .index = index};
}

ReductionPlan serial_plan(std::int64_t c) {
  if (c < 2) {
    throw RangeError("plan needs at least 2 summands, got " +
                     std::to_string(c));
  }
  ReductionPlan plan;
  plan.c = c;
  for (std::int64_t t = 1; t <= c - 2; ++t) {
    ReductionStep step;
    if (t == 1) {
      step.operands = {Operand{Operand::Kind::Input, 1},
                       Operand{Operand::Kind::Input, 2},
                       Operand{Operand::Kind::Input, 3}};
    } else {
      step.operands = {Operand{Operand::Kind::Sum, t - 1},
                       Operand{Operand::Kind::Carry, t - 1},
                       Operand{Operand::Kind::Input, t + 2}};
    }
    plan.steps.push_back(step);
  }
  plan.depth = plan_dependency_depth(plan);
  return plan;
}

ReductionPlan wallace_plan(std::int64_t c) {
  if (c < 2) {
    throw RangeError("plan needs at least 2 summands, got " +
                     std::to_string(c));
  }
  ReductionPlan plan;
  plan.c = c;
  std::vector<Operand> live;
  for (std::int64_t i = 1; i <= c; ++i) {
    live.push_back({Operand::Kind::Input, i});
  }
  std::int64_t t = 0;
  while (static_cast<std::int64_t>(live.size()) > 2) {
    const std::int64_t groups = static_cast<std::int64_t>(live.size()) / 3;
    std::vector<Operand> next(live.begin() + groups * 3, live.end());
    for (std::int64_t g = 0; g < groups; ++g) {
      ++t;
      plan.steps.push_back(
          {.operands = {live[g * 3], live[g * 3 + 1], live[g * 3 + 2]}});
      next.push_back({Operand::Kind::Sum, t});
      next.push_back({Operand::Kind::Carry, t});
    }
    live = std::move(next);
  }
  plan.depth = plan_dependency_depth(plan);
  return plan;
}

std::int64_t plan_dependency_depth(const ReductionPlan& plan) {
  std::vector<std::int64_t> step_depth(plan.steps.size(), 0);
  std::int64_t overall = 0;
  for (std::size_t t = 0; t < plan.steps.size(); ++t) {
    std::int64_t deepest = 0;
    for (const Operand& op : plan.steps[t].operands) {
      if (op.kind != Operand::Kind::Input && op.index >= 1 &&
          op.index <= static_cast<std::int64_t>(t)) {
        deepest = std::max(deepest, step_depth[op.index - 1]);
      }
    }
    step_depth[t] = deepest + 1;
    overall = std::max(overall, step_depth[t]);
  }
  return overall;
}

std::optional<PlanViolation> validate_plan(const ReductionPlan& plan) {
  if (plan.c < 2) {
    return PlanViolation{0, "plan must cover at least 2 summands"};
  }
  const std::int64_t steps = static_cast<std::int64_t>(plan.steps.size());
  if (steps != plan.c - 2) {
    return PlanViolation{0, "expected " + std::to_string(plan.c - 2) +
                                " steps for c = " + std::to_string(plan.c) +
                                ", got " + std::to_string(steps)};
  }
  std::map<std::pair<int, std::int64_t>, std::int64_t> consumed_by;
  for (std::int64_t t = 1; t <= steps; ++t) {
    for (const Operand& op : plan.steps[t - 1].operands) {
      if (op.kind == Operand::Kind::Input) {
        if (op.index < 1 || op.index > plan.c) {
          return PlanViolation{t, "input index " + std::to_string(op.index) +
                                      " outside 1.." + std::to_string(plan.c)};
        }
      } else {
        if (op.index < 1 || op.index >= t) {
          return PlanViolation{
              t, "operand " + op.to_string() + " not defined before step " +
                     std::to_string(t)};
        }
      }
      const auto key =
          std::make_pair(static_cast<int>(op.kind), op.index);
      if (auto [it, inserted] = consumed_by.emplace(key, t); !inserted) {
        return PlanViolation{t, "operand " + op.to_string() +
                                    " already consumed by step " +
                                    std::to_string(it->second)};
      }
    }
  }
  for (std::int64_t i = 1; i <= plan.c && steps > 0; ++i) {
    if (!consumed_by.count({static_cast<int>(Operand::Kind::Input), i})) {
      return PlanViolation{0, "input in:" + std::to_string(i) +
                                  " is never consumed"};
    }
  }
  for (std::int64_t t = 1; t < steps; ++t) {
    for (auto kind : {Operand::Kind::Sum, Operand::Kind::Carry}) {
      if (!consumed_by.count({static_cast<int>(kind), t})) {
        return PlanViolation{
            0, "intermediate " + Operand{kind, t}.to_string() +
                   " is never consumed"};
      }
    }
  }
  return std::nullopt;
}

std::vector<WordVec> make_summands(const WordVec& v, std::int64_t n,
                                   const MultiplierSpec& spec) {
  if (n < 1) {
    throw RangeError("n must be positive, got " + std::to_string(n));
  }
  if (v.width() < n) {
    throw ShapeError("value width " + std::to_string(v.width()) +
                     " is smaller than n = " + std::to_string(n));
  }
  for (std::int64_t pos = n; pos < v.width(); ++pos) {
    if (v.bit(pos)) {
      throw RangeError("value has a set bit at position " +
                       std::to_string(pos) + " >= n");
    }
  }
  const std::int64_t width = n + spec.d + 1;
  const WordVec base = v.resized(width);
  std::vector<WordVec> summands;
  summands.reserve(spec.c);
  for (std::int64_t shift : spec.positions) {
    summands.push_back(base.shifted_left(shift));
  }
  return summands;
}

ReducedPair reduce_to_two(std::span<const WordVec> summands,
                          const ReductionPlan& plan) {
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  if (static_cast<std::int64_t>(summands.size()) != plan.c) {
    throw PlanError("plan covers " + std::to_string(plan.c) +
                    " summands, got " + std::to_string(summands.size()));
  }
  for (const WordVec& w : summands) {
    if (w.width() != summands[0].width()) {
      throw ShapeError("summand widths differ");
    }
  }
  if (plan.c == 2) {
    return {summands[0], summands[1]};
  }
  std::vector<WordVec> sums(plan.steps.size());
  std::vector<WordVec> carries(plan.steps.size());
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
  for (std::size_t t = 0; t < plan.steps.size(); ++t) {
    const auto& ops = plan.steps[t].operands;
    CarrySaveResult r =
        carry_save_add(resolve(ops[0]), resolve(ops[1]), resolve(ops[2]));
    sums[t] = std::move(r.sum);
    carries[t] = std::move(r.carry);
  }
  return {sums.back(), carries.back()};
}

PipelineResult multiply_profile(const WordVec& v, std::int64_t n,
                                const MultiplierSpec& spec,
                                const ReductionPlan& plan) {
  const std::vector<WordVec> summands = make_summands(v, n, spec);
  ReducedPair pair = reduce_to_two(summands, plan);
  CarryPropagateResult add = carry_propagate_add(pair.x, pair.y);
  return {.x = std::move(pair.x),
          .y = std::move(pair.y),
          .z = std::move(add.sum),
          .profile = std::move(add.profile)};
}

std::int64_t multiply_longest(const WordVec& v, std::int64_t n,
                              const MultiplierSpec& spec,
                              const ReductionPlan& plan) {
  const std::vector<WordVec> summands = make_summands(v, n, spec);
  const ReducedPair pair = reduce_to_two(summands, plan);
  return longest_chain_length(pair.x, pair.y);
}

std::int64_t dependence_depth(const MultiplierSpec& spec) {
  return spec.d + (spec.c - 2);
}

}  // namespace carrychain
