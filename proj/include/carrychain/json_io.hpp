#pragma once

#include <iosfwd>

#include <json.hpp>

#include "carrychain/adders.hpp"
#include "carrychain/analytic.hpp"
#include "carrychain/experiments.hpp"
#include "carrychain/multiplier.hpp"

namespace carrychain {

// Profile object: width, classes as a string with position 0 rightmost,
// chains as [start, length] pairs, and the longest length.
void to_json(nlohmann::json& j, const ChainProfile& profile);

// Plan object: {"c": c, "steps": [["in:1","in:2","in:3"], ...]}.
nlohmann::json plan_to_json(const ReductionPlan& plan);

// Parses and validates; throws PlanError with the violation message.
ReductionPlan plan_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const CheckReport& report);
void to_json(nlohmann::json& j, const M1Result& result);
void to_json(nlohmann::json& j, const M5Result& result);
void to_json(nlohmann::json& j, const BlockClassification& blocks);

// CSV "k,probability" rows, plus a "ratio" column for exact tables.
void write_analytic_tail_csv(std::ostream& os, const TailDistribution& tail);

// CSV "k,value,stderr,trials" rows for Monte Carlo tables.
void write_estimate_tail_csv(std::ostream& os, const TailDistribution& tail);

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double value);

}  // namespace carrychain
