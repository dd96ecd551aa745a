#include "carrychain/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
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

void require_k_in_range(std::int64_t n, std::int64_t k) {
  require_positive(n, "n");
  require_positive(k, "k");
  if (k > n) {
    throw RangeError("k = " + std::to_string(k) + " exceeds n = " +
                     std::to_string(n));
  }
}

BigInt binomial(std::int64_t top, std::int64_t bottom) {
  if (bottom < 0 || top < bottom) return 0;
  bottom = std::min(bottom, top - bottom);
  BigInt result = 1;
  for (std::int64_t i = 1; i <= bottom; ++i) {
    result *= top - bottom + i;
    result /= i;
  }
  return result;
}

}  // namespace

double TailDistribution::value_at(std::int64_t k) const {
  if (k < 1) {
    throw RangeError("tail index must be positive, got " + std::to_string(k));
  }
  if (k <= k_max()) return values[k - 1];
  if (k > positions) return 0.0;
  throw RangeError("tail table covers k <= " + std::to_string(k_max()) +
                   ", asked for k = " + std::to_string(k));
}

BigRat TailDistribution::exact_at(std::int64_t k) const {
  if (kind != TailKind::ExactRational) {
    throw RangeError("tail table holds no exact entries");
  }
  if (k < 1) {
    throw RangeError("tail index must be positive, got " + std::to_string(k));
  }
  if (k <= static_cast<std::int64_t>(exact.size())) return exact[k - 1];
  if (k > positions) return BigRat(0);
  throw RangeError("tail table covers k <= " + std::to_string(k_max()) +
                   ", asked for k = " + std::to_string(k));
}

double TailDistribution::std_error_at(std::int64_t k) const {
  if (kind != TailKind::Estimate) return 0.0;
  if (k < 1 || k > static_cast<std::int64_t>(std_errors.size())) {
    if (k >= 1 && k > positions) return 0.0;
    throw RangeError("no standard error recorded for k = " +
                     std::to_string(k));
  }
  return std_errors[k - 1];
}

double poisson_tail(std::int64_t n, std::int64_t k) {
  require_positive(n, "n");
  require_positive(k, "k");
  const int exponent =
      k >= 1100 ? -1074 : -static_cast<int>(k + 1);
  const double x = std::ldexp(static_cast<double>(n), exponent);
  return -std::expm1(-x);
}

TailDistribution poisson_tail_table(std::int64_t n, std::int64_t k_max) {
  require_positive(n, "n");
  require_positive(k_max, "k_max");
  TailDistribution tail;
  tail.n = n;
  tail.positions = n;
  tail.kind = TailKind::Float;
  const std::int64_t k_eff = std::min(k_max, n);
  tail.values.reserve(k_eff);
  for (std::int64_t k = 1; k <= k_eff; ++k) {
    tail.values.push_back(poisson_tail(n, k));
  }
  return tail;
}

BigRat exact_addition_tail_ie(std::int64_t n, std::int64_t k) {
  require_k_in_range(n, k);
  BigRat sum = 0;
  for (std::int64_t j = 0;; ++j) {
    const BigInt binom = binomial(n - j * (k - 1), j);
    if (binom == 0) break;
    BigRat term(binom, BigInt(1) << ((k + 1) * j));
    if (j % 2 == 1) term = -term;
    sum += term;
  }
  return 1 - sum;
}

BigRat exact_addition_tail_dp(std::int64_t n, std::int64_t k) {
  require_k_in_range(n, k);
  // w[s] = weight of run-length state s, scaled by 4^position; state k
  // is absorbing. Per position: Generate (weight 1) starts or restarts a
  // run, Propagate (weight 2) extends it, Kill (weight 1) resets.
  std::vector<BigInt> w(k + 1);
  w[0] = 1;
  std::vector<BigInt> next(k + 1);
  for (std::int64_t pos = 0; pos < n; ++pos) {
    BigInt acc = 0;
    for (std::int64_t s = 0; s < k; ++s) acc += w[s];
    for (auto& v : next) v = 0;
    next[0] = 2 * w[0] + acc;
    next[1] += acc;
    for (std::int64_t s = 1; s < k; ++s) next[s + 1] += 2 * w[s];
    next[k] += 4 * w[k];
    w.swap(next);
  }
  return BigRat(w[k], BigInt(1) << (2 * n));
}

double addition_tail_dp_float(std::int64_t n, std::int64_t k) {
  require_k_in_range(n, k);
  if (k == 1) {
    double live = 1.0;
    double absorbed = 0.0;
    for (std::int64_t pos = 0; pos < n; ++pos) {
      absorbed += 0.25 * live;
      live *= 0.75;
    }
    return absorbed;
  }
  std::vector<double> w(k, 0.0);
  w[0] = 1.0;
  double acc = 1.0;
  double absorbed = 0.0;
  for (std::int64_t pos = 0; pos < n; ++pos) {
    const double leak = 0.5 * w[k - 1];
    for (std::int64_t s = k - 1; s >= 2; --s) w[s] = 0.5 * w[s - 1];
    w[1] = 0.25 * acc;
    w[0] = 0.5 * w[0] + 0.25 * acc;
    absorbed += leak;
    acc -= leak;
  }
  return absorbed;
}

TailDistribution addition_tail_table(std::int64_t n, std::int64_t k_max,
                                     TailKind kind) {
  require_positive(n, "n");
  require_positive(k_max, "k_max");
  if (kind == TailKind::Estimate) {
    throw RangeError("estimate tables come from the experiments module");
  }
  TailDistribution tail;
  tail.n = n;
  tail.positions = n;
  tail.kind = kind;
  const std::int64_t k_eff = std::min(k_max, n);
  for (std::int64_t k = 1; k <= k_eff; ++k) {
    if (kind == TailKind::ExactRational) {
      tail.exact.push_back(exact_addition_tail_dp(n, k));
      tail.values.push_back(tail.exact.back().convert_to<double>());
    } else {
      tail.values.push_back(addition_tail_dp_float(n, k));
    }
  }
  return tail;
}

Moments moments_from_tail(const TailDistribution& tail) {
  double mean = 0.0;
  double second = 0.0;
  for (std::int64_t k = 1; k <= tail.k_max(); ++k) {
    const double v = tail.values[k - 1];
    mean += v;
    second += static_cast<double>(2 * k - 1) * v;
  }
  return {.mean = mean, .variance = second - mean * mean};
}

ExactMoments exact_moments_from_tail(const TailDistribution& tail) {
  if (tail.kind != TailKind::ExactRational) {
    throw RangeError("exact moments need an exact-rational tail");
  }
  BigRat mean = 0;
  BigRat second = 0;
  for (std::size_t i = 0; i < tail.exact.size(); ++i) {
    mean += tail.exact[i];
    second += BigRat(2 * static_cast<std::int64_t>(i) + 1) * tail.exact[i];
  }
  return {.mean = mean, .variance = second - mean * mean};
}

double asymptotic_mean(std::int64_t n) {
  if (n < 2) {
    throw DomainError("asymptotic mean needs n >= 2, got " +
                      std::to_string(n));
  }
  return std::log2(static_cast<double>(n)) +
         kAsymptotics.gamma * std::numbers::log2e - 1.5;
}

double asymptotic_variance() {
  const double log2e = std::numbers::log2e;
  return std::numbers::pi * std::numbers::pi / 6.0 * log2e * log2e +
         1.0 / 12.0 + kAsymptotics.omega;
}

Thresholds thresholds(std::int64_t n) {
  if (n < 2) {
    throw DomainError("thresholds need n >= 2, got " + std::to_string(n));
  }
  const double ln_n = std::log(static_cast<double>(n));
  const double denom = 2.0 * ln_n - 6.0 * std::log(ln_n);
  if (denom <= 0.0) {
    throw DomainError("k0 undefined: 2 ln n - 6 ln ln n = " +
                      std::to_string(denom) + " for n = " +
                      std::to_string(n));
  }
  Thresholds t;
  t.k0 = static_cast<std::int64_t>(
      std::floor(std::log2(3.0 * static_cast<double>(n) / denom)));
  t.k1 = static_cast<std::int64_t>(
      std::ceil(2.0 * std::log2(static_cast<double>(n))));
  t.j0 = static_cast<std::int64_t>(
      std::ceil(2.0 * std::numbers::e * std::numbers::e / 3.0 * ln_n));
  return t;
}

bool lemma42_check(double x, std::int64_t l) {
  if (!(x >= 1.0)) {
    throw DomainError("lemma check needs x >= 1");
  }
  if (l < 1) {
    throw DomainError("lemma check needs l >= 1");
  }
  const double bound = std::pow(4.0 * x, static_cast<double>(l)) * std::exp(x);
  // term(m) = C(m+l-1, l) x^m / m!; ratio term(m+1)/term(m) decreases in m,
  // so once it drops below 1/2 the remaining tail is geometrically bounded.
  double term = x;  // m = 1: C(l, l) = 1
  double sum = term;
  for (std::int64_t m = 1;; ++m) {
    const double ratio = (static_cast<double>(m + l) / m) * x / (m + 1);
    if (ratio < 0.5) {
      const double tail_bound = term * ratio / (1.0 - ratio);
      if (tail_bound < 1e-12 * bound) {
        sum += tail_bound;
        break;
      }
    }
    term *= ratio;
    sum += term;
  }
  return sum <= bound;
}

}  // namespace carrychain
