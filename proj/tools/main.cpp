#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carrychain/adders.hpp"
#include "carrychain/analytic.hpp"
#include "carrychain/errors.hpp"
#include "carrychain/experiments.hpp"
#include "carrychain/json_io.hpp"
#include "carrychain/multiplier.hpp"
#include "carrychain/word_vec.hpp"

namespace cc = carrychain;

namespace {

struct TailOptions {
  std::int64_t n = 0;
  std::uint64_t m = 0;
  std::string plan = "serial";
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::int64_t kmin = 1;
  std::int64_t kmax = 0;
  std::string format = "csv";
  std::string out;
};

struct OracleOptions {
  std::int64_t n = 0;
  std::uint64_t m = 0;
  std::string plan = "serial";
  std::string format = "csv";
  std::string out;
};

struct AnalyticOptions {
  std::int64_t n = 0;
  std::string what;
  std::int64_t k = 0;
  std::string mode;
  std::string format = "csv";
  std::string out;
};

struct VerifyOptions {
  std::string suite;
  std::uint64_t m = 0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

struct PlanOptions {
  std::int64_t c = 0;
  std::string kind = "serial";
  bool show = false;
  std::string out;
};

int emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return 0;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw cc::ResourceError("cannot open output file '" + out_path + "'");
  }
  file << content;
  if (!file) {
    throw cc::ResourceError("cannot write output file '" + out_path + "'");
  }
  return 0;
}

cc::ReductionPlan resolve_plan(const std::string& text, std::int64_t c) {
  if (text == "serial") return cc::serial_plan(c);
  if (text == "wallace") return cc::wallace_plan(c);
  if (!text.empty() && text[0] == '@') {
    const std::string path = text.substr(1);
    std::ifstream file(path);
    if (!file) {
      throw cc::PlanError("cannot open plan file '" + path + "'");
    }
    nlohmann::json j;
    try {
      file >> j;
    } catch (const nlohmann::json::exception& e) {
      throw cc::PlanError("plan file '" + path + "' is not valid JSON: " +
                          e.what());
    }
    cc::ReductionPlan plan = cc::plan_from_json(j);
    if (plan.c != c) {
      throw cc::PlanError("plan covers c = " + std::to_string(plan.c) +
                          " summands, constant needs c = " +
                          std::to_string(c));
    }
    return plan;
  }
  throw cc::PlanError("plan must be serial, wallace, or @<file>, got '" +
                      text + "'");
}

std::int64_t effective_kmax(const TailOptions& opt, std::int64_t natural) {
  const std::int64_t kmax =
      opt.kmax != 0 ? opt.kmax : std::min<std::int64_t>(natural, 64);
  if (opt.kmin < 1 || kmax < opt.kmin) {
    throw cc::RangeError("need 1 <= kmin <= kmax");
  }
  return kmax;
}

int run_tail_command(const TailOptions& opt, bool multiplication) {
  cc::ExperimentConfig config;
  config.n = opt.n;
  if (multiplication) config.m = opt.m;
  config.plan = opt.plan;
  config.trials = opt.trials;
  config.seed = opt.seed;
  config.k_min = opt.kmin;
  config.k_max = opt.kmax;
  cc::validate(config);

  cc::TailDistribution tail;
  if (multiplication) {
    const cc::MultiplierSpec spec = cc::decompose_constant(opt.m);
    const cc::ReductionPlan plan = resolve_plan(opt.plan, spec.c);
    const std::int64_t kmax = effective_kmax(opt, opt.n + spec.d + 1);
    tail = cc::mc_multiplication_tail(opt.n, spec, plan, opt.trials,
                                      opt.seed, kmax);
  } else {
    const std::int64_t kmax = effective_kmax(opt, opt.n);
    tail = cc::mc_addition_tail(opt.n, opt.trials, opt.seed, kmax);
  }

  std::ostringstream os;
  if (opt.format == "csv") {
    os << "k,empirical,poisson,stderr\n";
    for (std::int64_t k = opt.kmin; k <= tail.k_max(); ++k) {
      os << k << ',' << cc::format_double(tail.value_at(k)) << ','
         << cc::format_double(cc::poisson_tail(opt.n, k)) << ','
         << cc::format_double(tail.std_error_at(k)) << '\n';
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (std::int64_t k = opt.kmin; k <= tail.k_max(); ++k) {
      rows.push_back({{"k", k},
                      {"empirical", tail.value_at(k)},
                      {"poisson", cc::poisson_tail(opt.n, k)},
                      {"stderr", tail.std_error_at(k)}});
    }
    nlohmann::json doc{{"n", opt.n},
                       {"trials", opt.trials},
                       {"seed", opt.seed},
                       {"rows", rows}};
    if (multiplication) {
      doc["m"] = opt.m;
      doc["plan"] = opt.plan;
    }
    os << doc.dump(2) << '\n';
  }
  return emit(opt.out, os.str());
}

int run_oracle(const OracleOptions& opt, bool multiplication) {
  cc::CountDistribution dist;
  if (multiplication) {
    const cc::MultiplierSpec spec = cc::decompose_constant(opt.m);
    const cc::ReductionPlan plan = resolve_plan(opt.plan, spec.c);
    dist = cc::exhaustive_multiplication_dist(opt.n, spec, plan);
  } else {
    dist = cc::exhaustive_addition_dist(opt.n);
  }
  std::ostringstream os;
  if (opt.format == "csv") {
    os << "value,count,probability\n";
    for (const auto& [value, count] : dist.counts) {
      os << value << ',' << count << ','
         << cc::BigRat(count, dist.total).str() << '\n';
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [value, count] : dist.counts) {
      rows.push_back({{"value", value},
                      {"count", count},
                      {"probability", cc::BigRat(count, dist.total).str()}});
    }
    nlohmann::json doc{{"n", dist.n}, {"total", dist.total}, {"rows", rows}};
    if (multiplication) doc["m"] = opt.m;
    os << doc.dump(2) << '\n';
  }
  return emit(opt.out, os.str());
}

int run_analytic(const AnalyticOptions& opt) {
  if (opt.n < 1) {
    throw cc::RangeError("n must be positive");
  }
  const std::string mode =
      !opt.mode.empty() ? opt.mode : (opt.n <= 64 ? "exact" : "float");
  if (mode == "exact" && opt.n > 128) {
    throw cc::RangeError(
        "exact mode is limited to n <= 128; use --mode float");
  }
  std::ostringstream os;
  if (opt.what == "tail") {
    const std::int64_t kmax =
        opt.k != 0 ? opt.k : std::min<std::int64_t>(opt.n, 64);
    const cc::TailDistribution tail = cc::addition_tail_table(
        opt.n, kmax,
        mode == "exact" ? cc::TailKind::ExactRational : cc::TailKind::Float);
    const bool exact = tail.kind == cc::TailKind::ExactRational;
    if (opt.format == "csv") {
      os << (exact ? "k,probability,poisson,ratio\n"
                   : "k,probability,poisson\n");
      for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
        os << k << ',' << cc::format_double(tail.values[k - 1]) << ','
           << cc::format_double(cc::poisson_tail(opt.n, k));
        if (exact) os << ',' << tail.exact[k - 1].str();
        os << '\n';
      }
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
        nlohmann::json row{{"k", k},
                           {"probability", tail.values[k - 1]},
                           {"poisson", cc::poisson_tail(opt.n, k)}};
        if (exact) row["ratio"] = tail.exact[k - 1].str();
        rows.push_back(row);
      }
      os << nlohmann::json{{"n", opt.n}, {"rows", rows}}.dump(2) << '\n';
    }
  } else if (opt.what == "mean" || opt.what == "var") {
    const std::int64_t kmax = std::min<std::int64_t>(opt.n, 96);
    std::string ratio;
    cc::Moments moments;
    if (mode == "exact") {
      const cc::TailDistribution tail = cc::addition_tail_table(
          opt.n, opt.n, cc::TailKind::ExactRational);
      const cc::ExactMoments exact = cc::exact_moments_from_tail(tail);
      const cc::BigRat& value =
          opt.what == "mean" ? exact.mean : exact.variance;
      ratio = value.str();
      moments.mean = exact.mean.convert_to<double>();
      moments.variance = exact.variance.convert_to<double>();
    } else {
      moments = cc::moments_from_tail(
          cc::addition_tail_table(opt.n, kmax, cc::TailKind::Float));
    }
    const bool mean = opt.what == "mean";
    const double dp_value = mean ? moments.mean : moments.variance;
    const double asym =
        mean ? cc::asymptotic_mean(opt.n) : cc::asymptotic_variance();
    const std::string label = mean ? "mean" : "variance";
    if (opt.format == "csv") {
      os << "name,value\n";
      os << "dp_" << label << ',' << cc::format_double(dp_value) << '\n';
      if (!ratio.empty()) {
        os << "dp_" << label << "_ratio," << ratio << '\n';
      }
      os << "asymptotic_" << label << ',' << cc::format_double(asym) << '\n';
      os << "abs_difference," << cc::format_double(std::abs(dp_value - asym))
         << '\n';
    } else {
      nlohmann::json doc{{"n", opt.n},
                         {"dp_" + label, dp_value},
                         {"asymptotic_" + label, asym},
                         {"abs_difference", std::abs(dp_value - asym)}};
      if (!ratio.empty()) doc["dp_" + label + "_ratio"] = ratio;
      os << doc.dump(2) << '\n';
    }
  } else if (opt.what == "thresholds") {
    const cc::Thresholds t = cc::thresholds(opt.n);
    if (opt.format == "csv") {
      os << "name,value\n";
      os << "k0," << t.k0 << '\n';
      os << "k1," << t.k1 << '\n';
      os << "j0," << t.j0 << '\n';
    } else {
      os << nlohmann::json{{"n", opt.n},
                           {"k0", t.k0},
                           {"k1", t.k1},
                           {"j0", t.j0}}
                .dump(2)
         << '\n';
    }
  } else {
    throw cc::RangeError("--what must be tail, mean, var, or thresholds");
  }
  return emit(opt.out, os.str());
}

std::vector<std::uint64_t> verify_constants(const VerifyOptions& opt) {
  if (opt.m != 0) return {opt.m};
  return {3, 21, 93};
}

int run_verify(const VerifyOptions& opt) {
  nlohmann::json checks = nlohmann::json::array();
  bool all_ok = true;

  const auto push_report = [&](const cc::CheckReport& report) {
    checks.push_back(report);
    all_ok = all_ok && report.passed;
  };
  const auto push_named = [&](const std::string& name, bool passed,
                              nlohmann::json detail) {
    checks.push_back(nlohmann::json{
        {"name", name}, {"passed", passed}, {"result", std::move(detail)}});
    all_ok = all_ok && passed;
  };
  const bool run_all = opt.suite == "all";

  if (run_all || opt.suite == "csa") {
    push_report(cc::check_csa_identity(4, 256, 2000, opt.seed));
    for (std::uint64_t m : verify_constants(opt)) {
      const cc::MultiplierSpec spec = cc::decompose_constant(m);
      for (const std::string kind : {"serial", "wallace"}) {
        push_report(cc::check_product_exactness(
            spec, resolve_plan(kind, spec.c), 8));
      }
    }
  }
  if (run_all || opt.suite == "a1a2") {
    for (std::int64_t n = 1; n <= 8; ++n) {
      for (std::int64_t k = 1; k <= n; ++k) {
        push_report(cc::check_a1_a2(n, k));
      }
    }
  }
  if (run_all || opt.suite == "m1") {
    std::vector<std::uint64_t> ms;
    if (opt.m != 0) {
      ms.push_back(opt.m);
    } else {
      for (std::uint64_t m = 3; m <= 63; m += 2) ms.push_back(m);
    }
    for (std::uint64_t m : ms) {
      const cc::MultiplierSpec spec = cc::decompose_constant(m);
      for (const std::string kind : {"serial", "wallace"}) {
        for (std::int64_t k = 1; k <= 6; ++k) {
          const cc::M1Result result =
              cc::check_m1_central(spec, resolve_plan(kind, spec.c), k);
          const bool passed =
              result.window_sufficient &&
              result.probability ==
                  cc::BigRat(1, cc::BigInt(1) << (k + 1));
          push_named("m1 m=" + std::to_string(m) + " k=" +
                         std::to_string(k) + " plan=" + kind,
                     passed, result);
        }
      }
    }
  }
  if (run_all || opt.suite == "m5") {
    for (std::uint64_t m : verify_constants(opt)) {
      const cc::MultiplierSpec spec = cc::decompose_constant(m);
      const std::int64_t depth = cc::dependence_depth(spec);
      for (const std::string kind : {"serial", "wallace"}) {
        for (std::int64_t k = 1; k <= 6 && 2 * k + 2 * depth <= 24; ++k) {
          const cc::M5Result result = cc::check_m5_weak_overlap(
              spec, resolve_plan(kind, spec.c), k);
          const bool passed = result.degenerate || result.within_bound;
          push_named("m5 m=" + std::to_string(m) + " k=" +
                         std::to_string(k) + " plan=" + kind,
                     passed, result);
        }
      }
    }
  }
  if (run_all || opt.suite == "duality") {
    for (std::uint64_t m : verify_constants(opt)) {
      const cc::MultiplierSpec spec = cc::decompose_constant(m);
      for (std::int64_t n : {64, 128}) {
        for (const std::string kind : {"serial", "wallace"}) {
          push_report(cc::check_duality_and_linearity(
              spec, resolve_plan(kind, spec.c), n, opt.trials, opt.seed));
        }
      }
    }
  }
  if (run_all || opt.suite == "lemma42") {
    for (double x : {1.0, 2.0, 5.0, 10.0}) {
      for (std::int64_t l = 1; l <= 6; ++l) {
        const bool passed = cc::lemma42_check(x, l);
        push_named("lemma42 x=" + cc::format_double(x) + " l=" +
                       std::to_string(l),
                   passed, nlohmann::json{{"holds", passed}});
      }
    }
  }
  if (checks.empty()) {
    throw cc::RangeError(
        "--suite must be csa, a1a2, m1, m5, duality, lemma42, or all");
  }

  const nlohmann::json doc{
      {"suite", opt.suite}, {"passed", all_ok}, {"checks", checks}};
  std::ostringstream os;
  os << doc.dump(2) << '\n';
  emit(opt.out, os.str());
  return all_ok ? 0 : 1;
}

int run_plan(const PlanOptions& opt) {
  cc::ReductionPlan plan;
  if (opt.kind == "serial") {
    plan = cc::serial_plan(opt.c);
  } else if (opt.kind == "wallace") {
    plan = cc::wallace_plan(opt.c);
  } else {
    throw cc::RangeError("--kind must be serial or wallace");
  }
  if (opt.show) {
    for (std::size_t t = 0; t < plan.steps.size(); ++t) {
      const auto& ops = plan.steps[t].operands;
      std::cerr << "step " << (t + 1) << ": " << ops[0].to_string() << " + "
                << ops[1].to_string() << " + " << ops[2].to_string() << '\n';
    }
    std::cerr << "depth " << plan.depth << '\n';
  }
  std::ostringstream os;
  os << cc::plan_to_json(plan).dump(2) << '\n';
  return emit(opt.out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carry-propagation chains in addition and in multiplication "
               "by odd constants"};
  app.require_subcommand(1);

  TailOptions add_opt;
  auto* add = app.add_subcommand(
      "add", "Monte Carlo tail of the longest chain in n-bit addition");
  add->add_option("--n", add_opt.n, "bit count")->required();
  add->add_option("--trials", add_opt.trials, "number of trials")->required();
  add->add_option("--seed", add_opt.seed, "RNG seed");
  add->add_option("--kmin", add_opt.kmin, "smallest k to report");
  add->add_option("--kmax", add_opt.kmax, "largest k to report");
  add->add_option("--format", add_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  add->add_option("--out", add_opt.out, "write output to file");

  TailOptions mul_opt;
  auto* mul = app.add_subcommand(
      "mul", "Monte Carlo tail of the final-addition chain in M*V");
  mul->add_option("--n", mul_opt.n, "bit count of V")->required();
  mul->add_option("--m", mul_opt.m, "odd constant M >= 3")->required();
  mul->add_option("--plan", mul_opt.plan, "serial, wallace, or @file.json");
  mul->add_option("--trials", mul_opt.trials, "number of trials")->required();
  mul->add_option("--seed", mul_opt.seed, "RNG seed");
  mul->add_option("--kmin", mul_opt.kmin, "smallest k to report");
  mul->add_option("--kmax", mul_opt.kmax, "largest k to report");
  mul->add_option("--format", mul_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  mul->add_option("--out", mul_opt.out, "write output to file");

  auto* oracle =
      app.add_subcommand("oracle", "exhaustive longest-chain distributions");
  oracle->require_subcommand(1);
  OracleOptions oadd_opt;
  auto* oadd = oracle->add_subcommand("add", "all 4^n addend pairs");
  oadd->add_option("--n", oadd_opt.n, "bit count (<= 14)")->required();
  oadd->add_option("--format", oadd_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  oadd->add_option("--out", oadd_opt.out, "write output to file");
  OracleOptions omul_opt;
  auto* omul = oracle->add_subcommand("mul", "all 2^n values of V");
  omul->add_option("--n", omul_opt.n, "bit count of V (<= 24)")->required();
  omul->add_option("--m", omul_opt.m, "odd constant M >= 3")->required();
  omul->add_option("--plan", omul_opt.plan, "serial, wallace, or @file.json");
  omul->add_option("--format", omul_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  omul->add_option("--out", omul_opt.out, "write output to file");

  AnalyticOptions analytic_opt;
  auto* analytic = app.add_subcommand(
      "analytic", "exact tails, moments, and threshold functions");
  analytic->add_option("--n", analytic_opt.n, "bit count")->required();
  analytic->add_option("--what", analytic_opt.what, "quantity to compute")
      ->required()
      ->check(CLI::IsMember({"tail", "mean", "var", "thresholds"}));
  analytic->add_option("--k", analytic_opt.k, "largest k for tail tables");
  analytic->add_option("--mode", analytic_opt.mode, "exact or float")
      ->check(CLI::IsMember({"exact", "float"}));
  analytic->add_option("--format", analytic_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  analytic->add_option("--out", analytic_opt.out, "write output to file");

  VerifyOptions verify_opt;
  auto* verify =
      app.add_subcommand("verify", "run verification suites, report JSON");
  verify->add_option("--suite", verify_opt.suite, "suite name")->required();
  verify->add_option("--m", verify_opt.m,
                     "restrict constant-based suites to this M");
  verify->add_option("--trials", verify_opt.trials,
                     "trials for randomized suites");
  verify->add_option("--seed", verify_opt.seed, "RNG seed");
  verify->add_option("--out", verify_opt.out, "write output to file");

  PlanOptions plan_opt;
  auto* plan =
      app.add_subcommand("plan", "emit a reduction plan as JSON");
  plan->add_option("--c", plan_opt.c, "summand count")->required();
  plan->add_option("--kind", plan_opt.kind, "serial or wallace");
  plan->add_flag("--show", plan_opt.show, "print steps to stderr");
  plan->add_option("--out", plan_opt.out, "write output to file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (add->parsed()) return run_tail_command(add_opt, false);
    if (mul->parsed()) return run_tail_command(mul_opt, true);
    if (oracle->parsed()) {
      if (oadd->parsed()) return run_oracle(oadd_opt, false);
      return run_oracle(omul_opt, true);
    }
    if (analytic->parsed()) return run_analytic(analytic_opt);
    if (verify->parsed()) return run_verify(verify_opt);
    if (plan->parsed()) return run_plan(plan_opt);
  } catch (const cc::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const cc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
