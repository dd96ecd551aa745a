#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace carrychain {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

enum class TailKind { ExactRational, Float, Estimate };

// Tail table Pr[C >= k] for k = 1..k_max. `n` is the problem size the law
// is parameterized by; `positions` is the width chains actually live in
// (equal to n for plain addition, n + d + 1 for constant multiplication).
// Entries for k > positions are zero by convention; k between k_max and
// positions is out of range. Estimate tables carry per-entry standard
// errors and the trial count.
struct TailDistribution {
  std::int64_t n = 0;
  std::int64_t positions = 0;
  TailKind kind = TailKind::Float;
  std::vector<BigRat> exact;        // k = 1..size, ExactRational only
  std::vector<double> values;       // k = 1..size, always populated
  std::vector<double> std_errors;   // Estimate only
  std::uint64_t trials = 0;         // Estimate only

  std::int64_t k_max() const {
    return static_cast<std::int64_t>(values.size());
  }
  double value_at(std::int64_t k) const;
  BigRat exact_at(std::int64_t k) const;
  double std_error_at(std::int64_t k) const;
};

// 1 - exp(-n / 2^(k+1)), the limiting tail law.
double poisson_tail(std::int64_t n, std::int64_t k);

TailDistribution poisson_tail_table(std::int64_t n, std::int64_t k_max);

// Exact Pr[C_n >= k] for addition of two uniform n-bit words, by
// inclusion-exclusion over placements of an active k-block.
BigRat exact_addition_tail_ie(std::int64_t n, std::int64_t k);

// Same quantity via the run-length automaton (states 0..k, k absorbing),
// scanned from the most significant position down, with integer weights
// over denominator 4^n.
BigRat exact_addition_tail_dp(std::int64_t n, std::int64_t k);

// Double-precision variant of the automaton for large n.
double addition_tail_dp_float(std::int64_t n, std::int64_t k);

TailDistribution addition_tail_table(std::int64_t n, std::int64_t k_max,
                                     TailKind kind);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean = sum of tail entries, E[C^2] = sum of (2k-1) * tail(k); valid when
// the table covers every k with nonzero mass.
Moments moments_from_tail(const TailDistribution& tail);

struct ExactMoments {
  BigRat mean;
  BigRat variance;
};

ExactMoments exact_moments_from_tail(const TailDistribution& tail);

// log2 n + gamma * log2 e - 3/2, up to O(1e-6) periodic wobble.
double asymptotic_mean(std::int64_t n);
// pi^2/6 * (log2 e)^2 + 1/12 + omega, a constant.
double asymptotic_variance();

struct AsymptoticConstants {
  double gamma;      // Euler's constant
  double omega;      // small additive correction in the variance constant
  double phi_bound;  // amplitude bound of the periodic term in the mean
  double psi_bound;  // amplitude bound of the periodic term in the variance
};

inline constexpr AsymptoticConstants kAsymptotics{
    .gamma = 0.5772156649015329,
    .omega = 1.2374e-12,
    .phi_bound = 1.573e-6,
    .psi_bound = 5.3573e-6,
};

struct Thresholds {
  std::int64_t k0 = 0;  // floor(log2(3n / (2 ln n - 6 ln ln n)))
  std::int64_t k1 = 0;  // ceil(2 log2 n)
  std::int64_t j0 = 0;  // ceil((2 e^2 / 3) ln n)
};

Thresholds thresholds(std::int64_t n);

// Certified numeric check of sum_{m>=1} C(m+l-1, l) x^m / m! <= (4x)^l e^x.
bool lemma42_check(double x, std::int64_t l);

}  // namespace carrychain
