#include <cstdint>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "carrychain/errors.hpp"
#include "carrychain/json_io.hpp"
#include "carrychain/multiplier.hpp"
#include "carrychain/word_vec.hpp"

using namespace carrychain;

TEST_CASE("decompose_constant") {
  const MultiplierSpec three = decompose_constant(3);
  CHECK(three.d == 1);
  CHECK(three.c == 2);
  CHECK(three.positions == std::vector<std::int64_t>{0, 1});

  const MultiplierSpec m21 = decompose_constant(21);
  CHECK(m21.d == 4);
  CHECK(m21.c == 3);
  CHECK(m21.positions == std::vector<std::int64_t>{0, 2, 4});

  const MultiplierSpec big = decompose_constant(0b1011101);
  CHECK(big.m == 93);
  CHECK(big.d == 6);
  CHECK(big.c == 5);

  CHECK_THROWS_AS(decompose_constant(4), UnsupportedConstantError);
  CHECK_THROWS_AS(decompose_constant(1), UnsupportedConstantError);
  CHECK_THROWS_AS(decompose_constant(0), UnsupportedConstantError);

  SUBCASE("positions reconstruct the constant") {
    for (std::uint64_t m = 3; m < 200; m += 2) {
      const MultiplierSpec spec = decompose_constant(m);
      std::uint64_t rebuilt = 0;
      for (std::int64_t s : spec.positions) rebuilt |= std::uint64_t{1} << s;
      CHECK(rebuilt == m);
      CHECK(spec.positions.front() == 0);
      CHECK(spec.positions.back() == spec.d);
    }
  }
}

TEST_CASE("operand text form") {
  CHECK(Operand{Operand::Kind::Input, 3}.to_string() == "in:3");
  CHECK(Operand{Operand::Kind::Sum, 1}.to_string() == "sum:1");
  CHECK(Operand{Operand::Kind::Carry, 12}.to_string() == "carry:12");
  CHECK(Operand::parse("in:3") == Operand{Operand::Kind::Input, 3});
  CHECK(Operand::parse("carry:2") == Operand{Operand::Kind::Carry, 2});
  CHECK_THROWS_AS(Operand::parse("bogus"), PlanError);
  CHECK_THROWS_AS(Operand::parse("in:"), PlanError);
  CHECK_THROWS_AS(Operand::parse("in:x1"), PlanError);
  CHECK_THROWS_AS(Operand::parse("node:1"), PlanError);
}

TEST_CASE("serial plans") {
  const ReductionPlan two = serial_plan(2);
  CHECK(two.steps.empty());
  CHECK(two.depth == 0);

  const ReductionPlan three = serial_plan(3);
  REQUIRE(three.steps.size() == 1);
  CHECK(three.depth == 1);

  const ReductionPlan five = serial_plan(5);
  REQUIRE(five.steps.size() == 3);
  CHECK(five.steps[0].operands ==
        std::array<Operand, 3>{Operand{Operand::Kind::Input, 1},
                               Operand{Operand::Kind::Input, 2},
                               Operand{Operand::Kind::Input, 3}});
  CHECK(five.steps[1].operands ==
        std::array<Operand, 3>{Operand{Operand::Kind::Sum, 1},
                               Operand{Operand::Kind::Carry, 1},
                               Operand{Operand::Kind::Input, 4}});
  CHECK(five.steps[2].operands ==
        std::array<Operand, 3>{Operand{Operand::Kind::Sum, 2},
                               Operand{Operand::Kind::Carry, 2},
                               Operand{Operand::Kind::Input, 5}});
  CHECK(five.depth == 3);

  CHECK_THROWS_AS(serial_plan(1), RangeError);

  for (std::int64_t c = 2; c <= 40; ++c) {
    const ReductionPlan plan = serial_plan(c);
    CHECK(plan.depth == c - 2);
    CHECK(plan.depth == plan_dependency_depth(plan));
    CHECK_FALSE(validate_plan(plan).has_value());
  }
}

TEST_CASE("wallace plans") {
  CHECK_THROWS_AS(wallace_plan(1), RangeError);
  CHECK(wallace_plan(2).steps.empty());
  CHECK(wallace_plan(3).depth == 1);
  CHECK(wallace_plan(9).depth == 4);

  const std::vector<std::pair<std::int64_t, std::int64_t>> depths = {
      {3, 1}, {4, 2}, {5, 3}, {6, 3}, {7, 4},
      {8, 4}, {9, 4}, {16, 6}, {32, 8}};
  for (const auto& [c, depth] : depths) {
    CHECK(wallace_plan(c).depth == depth);
  }

  for (std::int64_t c = 2; c <= 60; ++c) {
    const ReductionPlan plan = wallace_plan(c);
    CHECK(static_cast<std::int64_t>(plan.steps.size()) == c - 2);
    CHECK_FALSE(validate_plan(plan).has_value());
    CHECK(plan.depth == plan_dependency_depth(plan));
    CHECK(plan.depth <= serial_plan(c).depth);
    if (c >= 6) {
      CHECK(plan.depth < serial_plan(c).depth);
    }
  }
}

TEST_CASE("validate_plan spots broken schedules") {
  CHECK_FALSE(validate_plan(serial_plan(5)).has_value());

  SUBCASE("double consumption") {
    ReductionPlan plan = serial_plan(4);
    plan.steps[1].operands[2] = Operand{Operand::Kind::Input, 1};
    const auto violation = validate_plan(plan);
    REQUIRE(violation.has_value());
    CHECK(violation->step == 2);
  }

  SUBCASE("operand referenced before definition") {
    ReductionPlan plan = serial_plan(4);
    plan.steps[0].operands[0] = Operand{Operand::Kind::Sum, 1};
    CHECK(validate_plan(plan).has_value());
  }

  SUBCASE("input index out of range") {
    ReductionPlan plan = serial_plan(4);
    plan.steps[1].operands[2] = Operand{Operand::Kind::Input, 9};
    const auto violation = validate_plan(plan);
    REQUIRE(violation.has_value());
    CHECK(violation->step == 2);
  }

  SUBCASE("wrong step count leaves values unconsumed") {
    ReductionPlan plan = serial_plan(5);
    plan.steps.pop_back();
    CHECK(validate_plan(plan).has_value());
  }

  SUBCASE("c below 2") {
    ReductionPlan plan;
    plan.c = 1;
    CHECK(validate_plan(plan).has_value());
  }
}

TEST_CASE("make_summands") {
  const MultiplierSpec three = decompose_constant(3);
  const std::vector<WordVec> w =
      make_summands(WordVec::from_integer(0b101, 3), 3, three);
  REQUIRE(w.size() == 2);
  CHECK(w[0].width() == 5);
  CHECK(w[0].to_binary_string() == "00101");
  CHECK(w[1].to_binary_string() == "01010");

  const MultiplierSpec m21 = decompose_constant(21);
  const std::vector<WordVec> w21 =
      make_summands(WordVec::from_integer(1, 1), 1, m21);
  REQUIRE(w21.size() == 3);
  CHECK(w21[0].to_binary_string() == "000001");
  CHECK(w21[1].to_binary_string() == "000100");
  CHECK(w21[2].to_binary_string() == "010000");

  for (const WordVec& zero : make_summands(WordVec::zeros(4), 4, m21)) {
    CHECK(zero.is_zero());
  }

  CHECK_THROWS_AS(make_summands(WordVec::zeros(2), 3, three), ShapeError);
  CHECK_THROWS_AS(
      make_summands(WordVec::from_integer(0b100, 3), 2, three), RangeError);
}

TEST_CASE("reduce_to_two") {
  const MultiplierSpec three = decompose_constant(3);
  const std::vector<WordVec> pair_summands =
      make_summands(WordVec::from_integer(0b11, 2), 2, three);
  const ReducedPair direct = reduce_to_two(pair_summands, serial_plan(2));
  CHECK(direct.x == pair_summands[0]);
  CHECK(direct.y == pair_summands[1]);

  const MultiplierSpec m21 = decompose_constant(21);
  const ReducedPair single = reduce_to_two(
      make_summands(WordVec::from_integer(1, 1), 1, m21), serial_plan(3));
  CHECK(single.x.to_binary_string() == "010101");
  CHECK(single.y.is_zero());
  CHECK(single.x.to_uint64() + single.y.to_uint64() == 21);

  SUBCASE("x + y conserves the summand total") {
    const MultiplierSpec m93 = decompose_constant(93);
    const std::int64_t n = 40;
    const std::uint64_t mask =
        (std::uint64_t{1} << (n + m93.d + 1)) - 1;
    for (std::uint64_t t = 0; t < 50; ++t) {
      const WordVec v = WordVec::sample_uniform(n, n, 31, t);
      const std::vector<WordVec> summands = make_summands(v, n, m93);
      for (const ReductionPlan& plan :
           {serial_plan(m93.c), wallace_plan(m93.c)}) {
        const ReducedPair r = reduce_to_two(summands, plan);
        CHECK(((r.x.to_uint64() + r.y.to_uint64()) & mask) ==
              ((93 * v.to_uint64()) & mask));
      }
    }
  }

  SUBCASE("summand count must match the plan") {
    CHECK_THROWS_AS(reduce_to_two(pair_summands, serial_plan(3)), PlanError);
  }

  SUBCASE("summand widths must agree") {
    const std::vector<WordVec> skewed = {WordVec::zeros(4), WordVec::zeros(4),
                                         WordVec::zeros(5)};
    CHECK_THROWS_AS(reduce_to_two(skewed, serial_plan(3)), ShapeError);
  }

  SUBCASE("invalid plan is rejected") {
    ReductionPlan broken = serial_plan(3);
    broken.steps[0].operands[1] = Operand{Operand::Kind::Input, 1};
    const std::vector<WordVec> summands = {
        WordVec::zeros(4), WordVec::zeros(4), WordVec::zeros(4)};
    CHECK_THROWS_AS(reduce_to_two(summands, broken), PlanError);
  }
}

TEST_CASE("multiplication pipeline") {
  const MultiplierSpec three = decompose_constant(3);
  const ReductionPlan plan2 = serial_plan(2);

  const PipelineResult r =
      multiply_profile(WordVec::from_integer(3, 2), 2, three, plan2);
  CHECK(r.x.to_binary_string() == "0011");
  CHECK(r.y.to_binary_string() == "0110");
  CHECK(r.z.to_uint64() == 9);
  REQUIRE(r.profile.classes.size() == 4);
  CHECK(r.profile.classes[0] == PositionClass::Propagate);
  CHECK(r.profile.classes[1] == PositionClass::Generate);
  CHECK(r.profile.classes[2] == PositionClass::Propagate);
  CHECK(r.profile.classes[3] == PositionClass::Kill);
  REQUIRE(r.profile.chains.size() == 1);
  CHECK(r.profile.chains[0] == Chain{.start = 1, .length = 2});
  CHECK(r.profile.longest == 2);

  const PipelineResult tiny =
      multiply_profile(WordVec::from_integer(1, 1), 1, three, plan2);
  CHECK(tiny.z.to_uint64() == 3);
  CHECK(tiny.profile.longest == 0);

  const PipelineResult zero =
      multiply_profile(WordVec::zeros(5), 5, three, plan2);
  CHECK(zero.z.is_zero());
  CHECK(zero.profile.longest == 0);

  SUBCASE("fast path agrees with the profile") {
    const MultiplierSpec m21 = decompose_constant(21);
    for (const ReductionPlan& plan : {serial_plan(3), wallace_plan(3)}) {
      for (std::uint64_t t = 0; t < 60; ++t) {
        const WordVec v = WordVec::sample_uniform(30, 30, 13, t);
        CHECK(multiply_longest(v, 30, m21, plan) ==
              multiply_profile(v, 30, m21, plan).profile.longest);
      }
    }
  }

  SUBCASE("plans agree on the product") {
    const MultiplierSpec m93 = decompose_constant(93);
    for (std::uint64_t value = 0; value < 64; ++value) {
      const WordVec v = WordVec::from_integer(value, 6);
      const WordVec serial_z =
          multiply_profile(v, 6, m93, serial_plan(5)).z;
      const WordVec wallace_z =
          multiply_profile(v, 6, m93, wallace_plan(5)).z;
      CHECK(serial_z == wallace_z);
      CHECK(serial_z.to_uint64() == 93 * value);
    }
  }
}

TEST_CASE("dependence depth") {
  CHECK(dependence_depth(decompose_constant(3)) == 1);
  CHECK(dependence_depth(decompose_constant(7)) == 3);
  CHECK(dependence_depth(decompose_constant(21)) == 5);
  CHECK(dependence_depth(decompose_constant(93)) == 9);
}

TEST_CASE("plan JSON round trip") {
  const ReductionPlan plan = wallace_plan(9);
  const nlohmann::json j = plan_to_json(plan);
  CHECK(j["c"] == 9);
  CHECK(j["depth"] == 4);
  CHECK(j["steps"].size() == 7);
  CHECK(j["steps"][0][0] == "in:1");

  const ReductionPlan back = plan_from_json(j);
  CHECK(back == plan);

  SUBCASE("depth is recomputed, not trusted") {
    nlohmann::json tampered = j;
    tampered["depth"] = 77;
    CHECK(plan_from_json(tampered).depth == 4);
  }

  SUBCASE("malformed documents are rejected") {
    CHECK_THROWS_AS(plan_from_json(nlohmann::json::array()), PlanError);
    CHECK_THROWS_AS(plan_from_json(nlohmann::json{{"c", 3}}), PlanError);
    nlohmann::json bad = plan_to_json(serial_plan(4));
    bad["steps"][0][1] = "in:1";
    CHECK_THROWS_AS(plan_from_json(bad), PlanError);
    nlohmann::json pair = plan_to_json(serial_plan(4));
    pair["steps"][0] = nlohmann::json::array({"in:1", "in:2"});
    CHECK_THROWS_AS(plan_from_json(pair), PlanError);
  }
}
