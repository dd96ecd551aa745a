#include "carrychain/json_io.hpp"

#include <charconv>
#include <ostream>
#include <string>
#include <system_error>

#include "carrychain/errors.hpp"

namespace carrychain {
namespace {

std::string ratio_string(const BigRat& value) {
  return value.str();
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) {
    throw RangeError("cannot format double");
  }
  return std::string(buffer, ptr);
}

void to_json(nlohmann::json& j, const ChainProfile& profile) {
  std::string classes;
  classes.reserve(profile.classes.size());
  for (PositionClass c : profile.classes) {
    classes.push_back(static_cast<char>(c));
  }
  nlohmann::json chains = nlohmann::json::array();
  for (const Chain& chain : profile.chains) {
    chains.push_back({chain.start, chain.length});
  }
  j = nlohmann::json{{"width", profile.width},
                     {"classes", classes},
                     {"chains", chains},
                     {"longest", profile.longest}};
}

nlohmann::json plan_to_json(const ReductionPlan& plan) {
  nlohmann::json steps = nlohmann::json::array();
  for (const ReductionStep& step : plan.steps) {
    steps.push_back({step.operands[0].to_string(),
                     step.operands[1].to_string(),
                     step.operands[2].to_string()});
  }
  return nlohmann::json{{"c", plan.c},
                        {"steps", steps},
                        {"depth", plan.depth}};
}

ReductionPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("c") || !j.contains("steps") ||
      !j["c"].is_number_integer() || !j["steps"].is_array()) {
    throw PlanError("plan JSON must be an object with c and steps");
  }
  ReductionPlan plan;
  plan.c = j["c"].get<std::int64_t>();
  for (const auto& step_json : j["steps"]) {
    if (!step_json.is_array() || step_json.size() != 3) {
      throw PlanError("each plan step must be a triple of operands");
    }
    ReductionStep step;
    for (int i = 0; i < 3; ++i) {
      if (!step_json[i].is_string()) {
        throw PlanError("plan operands must be strings");
      }
      step.operands[i] = Operand::parse(step_json[i].get<std::string>());
    }
    plan.steps.push_back(step);
  }
  if (auto violation = validate_plan(plan)) {
    throw PlanError("invalid plan at step " +
                    std::to_string(violation->step) + ": " +
                    violation->message);
  }
  plan.depth = plan_dependency_depth(plan);
  return plan;
}

void to_json(nlohmann::json& j, const CheckReport& report) {
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& [key, value] : report.stats) {
    stats.push_back({key, value});
  }
  j = nlohmann::json{{"name", report.name},
                     {"passed", report.passed},
                     {"violations", report.violations},
                     {"stats", stats}};
}

void to_json(nlohmann::json& j, const M1Result& result) {
  j = nlohmann::json{
      {"block", result.block_position},
      {"n", result.n_used},
      {"window_low", result.window_low},
      {"window_bits", result.window_bits},
      {"probability", ratio_string(result.probability)},
      {"probability_value", result.probability.convert_to<double>()},
      {"window_sufficient", result.window_sufficient}};
}

void to_json(nlohmann::json& j, const M5Result& result) {
  j = nlohmann::json{
      {"block_a", result.block_a},
      {"block_b", result.block_b},
      {"n", result.n_used},
      {"degenerate", result.degenerate},
      {"conditional", ratio_string(result.conditional)},
      {"conditional_value", result.conditional.convert_to<double>()},
      {"bound", ratio_string(result.bound)},
      {"bound_value", result.bound.convert_to<double>()},
      {"within_bound", result.within_bound}};
}

void to_json(nlohmann::json& j, const BlockClassification& blocks) {
  j = nlohmann::json{{"total", blocks.total_blocks},
                     {"central_low", blocks.central_low},
                     {"central_high", blocks.central_high},
                     {"central_count", blocks.central_count},
                     {"marginal_count", blocks.marginal_count},
                     {"dependence", blocks.dependence}};
}

void write_analytic_tail_csv(std::ostream& os, const TailDistribution& tail) {
  const bool exact = tail.kind == TailKind::ExactRational;
  os << (exact ? "k,probability,ratio\n" : "k,probability\n");
  for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
    os << k << ',' << format_double(tail.values[k - 1]);
    if (exact) {
      os << ',' << ratio_string(tail.exact[k - 1]);
    }
    os << '\n';
  }
}

void write_estimate_tail_csv(std::ostream& os, const TailDistribution& tail) {
  os << "k,value,stderr,trials\n";
  for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
    os << k << ',' << format_double(tail.values[k - 1]) << ','
       << format_double(tail.std_error_at(k)) << ',' << tail.trials << '\n';
  }
}

}  // namespace carrychain
