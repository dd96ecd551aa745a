#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "carrychain/analytic.hpp"
#include "carrychain/errors.hpp"
#include "carrychain/experiments.hpp"
#include "carrychain/json_io.hpp"
#include "carrychain/multiplier.hpp"

using namespace carrychain;

TEST_CASE("experiment config validation") {
  ExperimentConfig config;
  config.n = 16;
  config.trials = 100;
  CHECK_NOTHROW(validate(config));

  SUBCASE("n") {
    config.n = 0;
    CHECK_THROWS_AS(validate(config), RangeError);
  }
  SUBCASE("trials") {
    config.trials = 0;
    CHECK_THROWS_AS(validate(config), RangeError);
  }
  SUBCASE("constant") {
    config.m = 6;
    CHECK_THROWS_AS(validate(config), UnsupportedConstantError);
    config.m = 1;
    CHECK_THROWS_AS(validate(config), UnsupportedConstantError);
    config.m = 9;
    CHECK_NOTHROW(validate(config));
  }
  SUBCASE("plan") {
    config.plan = "ripple";
    CHECK_THROWS_AS(validate(config), PlanError);
    config.plan = "@plans/custom.json";
    CHECK_NOTHROW(validate(config));
  }
  SUBCASE("k range") {
    config.k_min = 0;
    CHECK_THROWS_AS(validate(config), RangeError);
    config.k_min = 4;
    config.k_max = 3;
    CHECK_THROWS_AS(validate(config), RangeError);
    config.k_max = 0;
    CHECK_NOTHROW(validate(config));
  }
}

TEST_CASE("exhaustive addition oracle") {
  const CountDistribution dist = exhaustive_addition_dist(2);
  CHECK(dist.total == 16);
  CHECK(dist.counts.at(0) == 9);
  CHECK(dist.counts.at(1) == 5);
  CHECK(dist.counts.at(2) == 2);

  const TailDistribution tail = dist.tail(2);
  CHECK(tail.exact_at(1) == BigRat(7, 16));
  CHECK(tail.exact_at(2) == BigRat(1, 8));

  const CountDistribution one = exhaustive_addition_dist(1);
  CHECK(one.counts.at(0) == 3);
  CHECK(one.counts.at(1) == 1);

  CHECK_THROWS_AS(exhaustive_addition_dist(15), ResourceError);
  CHECK_THROWS_AS(exhaustive_addition_dist(0), RangeError);

  SUBCASE("tail matches the exact law up to n = 6") {
    for (std::int64_t n = 1; n <= 6; ++n) {
      const TailDistribution t = exhaustive_addition_dist(n).tail(n);
      for (std::int64_t k = 1; k <= n; ++k) {
        CHECK(t.exact_at(k) == exact_addition_tail_dp(n, k));
      }
    }
  }
}

TEST_CASE("exhaustive multiplication oracle") {
  const MultiplierSpec three = decompose_constant(3);
  const CountDistribution two =
      exhaustive_multiplication_dist(2, three, serial_plan(2));
  CHECK(two.total == 4);
  CHECK(two.counts.at(0) == 3);
  CHECK(two.counts.at(2) == 1);
  CHECK(two.positions == 4);
  CHECK(two.tail(4).exact_at(2) == BigRat(1, 4));

  const CountDistribution one =
      exhaustive_multiplication_dist(1, three, serial_plan(2));
  CHECK(one.counts.at(0) == 2);
  CHECK(one.counts.size() == 1);

  CHECK_THROWS_AS(
      exhaustive_multiplication_dist(25, three, serial_plan(2)),
      ResourceError);

  SUBCASE("serial and wallace coincide for c = 3") {
    const MultiplierSpec m21 = decompose_constant(21);
    const CountDistribution s =
        exhaustive_multiplication_dist(6, m21, serial_plan(3));
    const CountDistribution w =
        exhaustive_multiplication_dist(6, m21, wallace_plan(3));
    CHECK(s.counts == w.counts);
  }
}

TEST_CASE("monte carlo addition tail") {
  const TailDistribution tail = mc_addition_tail(16, 4000, 11, 16);
  CHECK(tail.kind == TailKind::Estimate);
  CHECK(tail.trials == 4000);
  CHECK(tail.k_max() == 16);
  CHECK(tail.n == 16);

  SUBCASE("deterministic in the seed") {
    const TailDistribution again = mc_addition_tail(16, 4000, 11, 16);
    CHECK(again.values == tail.values);
    const TailDistribution other = mc_addition_tail(16, 4000, 12, 16);
    CHECK(other.values != tail.values);
  }

  SUBCASE("independent of the worker count") {
    setenv("CARRYCHAIN_THREADS", "3", 1);
    const TailDistribution threaded = mc_addition_tail(16, 4000, 11, 16);
    setenv("CARRYCHAIN_THREADS", "1", 1);
    const TailDistribution serial = mc_addition_tail(16, 4000, 11, 16);
    unsetenv("CARRYCHAIN_THREADS");
    CHECK(threaded.values == tail.values);
    CHECK(serial.values == tail.values);
  }

  SUBCASE("non-increasing in k with sane errors") {
    for (std::int64_t k = 1; k < tail.k_max(); ++k) {
      CHECK(tail.value_at(k) >= tail.value_at(k + 1));
    }
    for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
      const double p = tail.value_at(k);
      CHECK(tail.std_error_at(k) ==
            doctest::Approx(std::sqrt(p * (1 - p) / 4000.0)));
    }
  }

  SUBCASE("n = 1 tail is the generate probability") {
    const TailDistribution tiny = mc_addition_tail(1, 10000, 3, 1);
    CHECK(std::abs(tiny.value_at(1) - 0.25) <
          3.0 * std::sqrt(0.25 * 0.75 / 10000.0) + 1e-12);
  }

  SUBCASE("k_max caps at n and truncates otherwise") {
    CHECK(mc_addition_tail(4, 100, 1, 64).k_max() == 4);
    const TailDistribution cut = mc_addition_tail(12, 3000, 5, 2);
    CHECK(cut.k_max() == 2);
    const double exact =
        exact_addition_tail_dp(12, 2).convert_to<double>();
    CHECK(std::abs(cut.value_at(2) - exact) <
          5.0 * std::max(cut.std_error_at(2), 1e-3));
  }

  SUBCASE("agrees with the exact law at n = 64") {
    const TailDistribution mc = mc_addition_tail(64, 20000, 77, 20);
    for (std::int64_t k = 1; k <= 20; ++k) {
      const double exact =
          exact_addition_tail_dp(64, k).convert_to<double>();
      const double band =
          5.0 * std::max(mc.std_error_at(k),
                         std::sqrt(exact * (1 - exact) / 20000.0));
      CHECK(std::abs(mc.value_at(k) - exact) <= band + 1e-9);
    }
  }
}

TEST_CASE("monte carlo multiplication tail matches the oracle") {
  const MultiplierSpec three = decompose_constant(3);
  const ReductionPlan plan = serial_plan(2);
  const std::int64_t n = 12;
  const TailDistribution oracle =
      exhaustive_multiplication_dist(n, three, plan).tail(n + 2);
  const std::uint64_t trials = 30000;
  const TailDistribution mc =
      mc_multiplication_tail(n, three, plan, trials, 123, n + 2);
  CHECK(mc.positions == n + three.d + 1);
  CHECK(mc.n == n);
  for (std::int64_t k = 1; k <= n + 2; ++k) {
    const double p = oracle.value_at(k);
    const double band =
        5.0 * std::max({mc.std_error_at(k),
                        std::sqrt(p * (1 - p) / trials), 1e-4});
    CHECK(std::abs(mc.value_at(k) - p) <= band);
  }

  SUBCASE("deterministic and worker-invariant") {
    const TailDistribution again =
        mc_multiplication_tail(n, three, plan, 2000, 9, 6);
    setenv("CARRYCHAIN_THREADS", "4", 1);
    const TailDistribution threaded =
        mc_multiplication_tail(n, three, plan, 2000, 9, 6);
    unsetenv("CARRYCHAIN_THREADS");
    CHECK(again.values == threaded.values);
  }
}

TEST_CASE("a1/a2 checker") {
  const CheckReport exact = check_a1_a2(8, 3);
  CHECK(exact.passed);
  CHECK(exact.violations.empty());

  const CheckReport full = check_a1_a2(4, 2);
  CHECK(full.passed);

  const CheckReport sampled = check_a1_a2(40, 5, 20000, 9);
  CHECK(sampled.passed);

  CHECK_THROWS_AS(check_a1_a2(13, 2), ResourceError);
  CHECK_THROWS_AS(check_a1_a2(4, 5), RangeError);
  CHECK_THROWS_AS(check_a1_a2(70, 5, 1000, 1), ResourceError);
}

TEST_CASE("csa identity checker") {
  const CheckReport report = check_csa_identity(3, 128, 500, 11);
  CHECK(report.passed);
  CHECK(report.violations.empty());
}

TEST_CASE("product exactness checker") {
  for (std::uint64_t m : {3ull, 21ull, 93ull}) {
    const MultiplierSpec spec = decompose_constant(m);
    for (const ReductionPlan& plan :
         {serial_plan(spec.c), wallace_plan(spec.c)}) {
      const CheckReport report = check_product_exactness(spec, plan, 6);
      CHECK(report.passed);
      CHECK(report.violations.empty());
    }
  }
  CHECK_THROWS_AS(
      check_product_exactness(decompose_constant(3), serial_plan(2), 30),
      ResourceError);
}

TEST_CASE("m1 central block activity") {
  const M1Result m3 =
      check_m1_central(decompose_constant(3), serial_plan(2), 2);
  CHECK(m3.probability == BigRat(1, 8));
  CHECK(m3.window_sufficient);
  CHECK(m3.block_position == 2);
  CHECK(m3.n_used == 4);

  const M1Result m21 =
      check_m1_central(decompose_constant(21), wallace_plan(3), 1);
  CHECK(m21.probability == BigRat(1, 4));
  CHECK(m21.window_sufficient);

  const M1Result m7 =
      check_m1_central(decompose_constant(7), serial_plan(3), 3);
  CHECK(m7.probability == BigRat(1, 16));
  CHECK(m7.window_sufficient);

  CHECK_THROWS_AS(
      check_m1_central(decompose_constant(0xFFFFFFFFFF), serial_plan(40), 4),
      ResourceError);
}

TEST_CASE("m5 weak overlap bound") {
  const M5Result m3 =
      check_m5_weak_overlap(decompose_constant(3), serial_plan(2), 4);
  CHECK_FALSE(m3.degenerate);
  CHECK(m3.conditional == BigRat(0));
  CHECK(m3.bound == BigRat(2, 32));
  CHECK(m3.within_bound);
  CHECK(m3.block_b == 2);
  CHECK(m3.block_a == 6);

  const M5Result m21 =
      check_m5_weak_overlap(decompose_constant(21), serial_plan(3), 6);
  CHECK(m21.bound == BigRat(1, 4));
  CHECK(m21.within_bound);

  CHECK_THROWS_AS(
      check_m5_weak_overlap(decompose_constant(93), serial_plan(5), 6),
      ResourceError);
}

TEST_CASE("duality and linearity checker") {
  const MultiplierSpec m21 = decompose_constant(21);
  const CheckReport report =
      check_duality_and_linearity(m21, serial_plan(3), 64, 200, 5);
  CHECK(report.passed);
  CHECK(report.violations.empty());

  const CheckReport pair = check_duality_and_linearity(
      decompose_constant(3), serial_plan(2), 32, 100, 1);
  CHECK(pair.passed);

  CHECK_THROWS_AS(
      check_duality_and_linearity(m21, serial_plan(3), 10, 10, 0),
      RangeError);
}

TEST_CASE("tail comparison") {
  const TailDistribution exact =
      addition_tail_table(4, 4, TailKind::ExactRational);
  const TailDistribution oracle = exhaustive_addition_dist(4).tail(4);
  const TailComparison same = compare_tails(exact, oracle, 1, 4);
  CHECK(same.sup_distance == 0.0);
  CHECK(same.per_k.size() == 4);

  const TailComparison vs_poisson = compare_tails(
      addition_tail_table(4096, 20, TailKind::Float),
      poisson_tail_table(4096, 20), 1, 20);
  CHECK(vs_poisson.sup_distance < 1e-3);
  CHECK(vs_poisson.sup_distance > 0.0);
  CHECK(vs_poisson.argmax_k >= 1);

  CHECK_THROWS_AS(compare_tails(exact, poisson_tail_table(5, 4), 1, 4),
                  ShapeError);
  CHECK_THROWS_AS(compare_tails(exact, oracle, 3, 2), RangeError);
}

TEST_CASE("block classification") {
  const BlockClassification b21 =
      classify_blocks(100, decompose_constant(21), 3);
  CHECK(b21.dependence == 5);
  CHECK(b21.total_blocks == 103);
  CHECK(b21.central_low == 10);
  CHECK(b21.central_high == 97);
  CHECK(b21.central_count == 88);
  CHECK(b21.marginal_count == 15);

  const BlockClassification b3 =
      classify_blocks(1000, decompose_constant(3), 5);
  CHECK(b3.total_blocks == 1000 + 1 - 5 + 2);
  CHECK(b3.marginal_count == 3 * 1 + 1);

  SUBCASE("counts always split the total") {
    for (std::uint64_t m : {3ull, 21ull, 93ull}) {
      const MultiplierSpec spec = decompose_constant(m);
      for (std::int64_t n : {30, 100}) {
        for (std::int64_t k = 1; k <= 8; ++k) {
          const BlockClassification b = classify_blocks(n, spec, k);
          CHECK(b.total_blocks == n + spec.d - k + 2);
          CHECK(b.central_count + b.marginal_count == b.total_blocks);
          CHECK(b.central_count >= 0);
        }
      }
    }
  }

  CHECK_THROWS_AS(classify_blocks(4, decompose_constant(3), 20), RangeError);
}

TEST_CASE("report and result serialization") {
  CheckReport report;
  report.name = "demo";
  report.note("trials", "12");
  report.fail("first bad thing");
  const nlohmann::json j = report;
  CHECK(j["name"] == "demo");
  CHECK(j["passed"] == false);
  CHECK(j["violations"][0] == "first bad thing");

  const M1Result m1 =
      check_m1_central(decompose_constant(3), serial_plan(2), 2);
  const nlohmann::json mj = m1;
  CHECK(mj["probability"] == "1/8");
  CHECK(mj["window_sufficient"] == true);

  const M5Result m5 =
      check_m5_weak_overlap(decompose_constant(3), serial_plan(2), 4);
  const nlohmann::json fj = m5;
  CHECK(fj["bound"] == "1/16");
  CHECK(fj["within_bound"] == true);

  SUBCASE("csv writers") {
    std::ostringstream exact_csv;
    write_analytic_tail_csv(exact_csv,
                            addition_tail_table(4, 2, TailKind::ExactRational));
    CHECK(exact_csv.str() ==
          "k,probability,ratio\n1,0.68359375,175/256\n2,0.359375,23/64\n");

    std::ostringstream estimate_csv;
    write_estimate_tail_csv(estimate_csv, mc_addition_tail(4, 64, 2, 2));
    std::istringstream lines(estimate_csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "k,value,stderr,trials");
    std::string row;
    std::getline(lines, row);
    CHECK(row.substr(0, 2) == "1,");
    CHECK(row.substr(row.size() - 3) == ",64");
  }

  SUBCASE("format_double round trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.0) == "0");
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(3.507048075871874)) == 3.507048075871874);
  }
}
