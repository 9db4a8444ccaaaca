#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sklab/sk_exact.hpp"

using namespace sklab;

namespace {

// O(2^n * n^2) brute force, no Gray code, no incremental update.
double brute_force(const DisorderSample& d, const ModelParams& p) {
  const int n = d.n;
  double best = -1e300;
  std::vector<double> logs;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = (mask >> i & 1) ? 1 : -1;
    double e = 0.0;
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) e += d.couplings[k++] * s[i] * s[j];
    double hamil = p.beta / std::sqrt(double(n)) * e;
    for (int i = 0; i < n; ++i) hamil += p.h * s[i];
    logs.push_back(hamil);
    best = std::max(best, hamil);
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - best);
  return (best + std::log(acc)) / n;
}

}  // namespace

TEST_CASE("disorder draws are deterministic in the seed") {
  const DisorderSample a = draw_disorder(6, 99);
  const DisorderSample b = draw_disorder(6, 99);
  const DisorderSample c = draw_disorder(6, 100);
  CHECK(a.couplings == b.couplings);
  CHECK(a.couplings != c.couplings);
  CHECK(a.couplings.size() == 15);
}

TEST_CASE("N = 1: no couplings, free energy is log(2 cosh h)") {
  DisorderSample d;
  d.n = 1;
  const ModelParams p{1.3, 0.7};
  CHECK(std::fabs(free_energy_one(d, p) -
                  std::log(2.0 * std::cosh(0.7))) < 1e-14);
}

TEST_CASE("N = 2: hand enumeration") {
  // states: (+,+) and (-,-) give coupling +g, fields +-2h; mixed give -g
  DisorderSample d;
  d.n = 2;
  d.couplings = {0.83};
  const ModelParams p{1.1, 0.4};
  const double a = p.beta * 0.83 / std::sqrt(2.0);
  const double expected =
      0.5 * std::log(2.0 * std::exp(a) * std::cosh(2.0 * p.h) +
                     2.0 * std::exp(-a));
  CHECK(std::fabs(free_energy_one(d, p) - expected) < 1e-14);
}

TEST_CASE("global spin flip: at h = 0 the sign of the couplings is irrelevant "
          "to the enumeration") {
  DisorderSample d = draw_disorder(7, 4242);
  DisorderSample neg = d;
  for (double& g : neg.couplings) g = -g;
  const ModelParams p{1.5, 0.0};
  // flipping one spin negates exactly the couplings touching it; the full
  // sign flip is reachable by flipping an independent set, so compare
  // against brute force rather than claiming exact equality
  CHECK(std::fabs(free_energy_one(d, p) - brute_force(d, p)) < 1e-12);
  CHECK(std::fabs(free_energy_one(neg, p) - brute_force(neg, p)) < 1e-12);
}

TEST_CASE("Gray-code enumeration matches brute force") {
  const ModelParams p{1.0, 1.0};
  for (int n : {3, 5, 10}) {
    const DisorderSample d = draw_disorder(n, 17 + n);
    CHECK(std::fabs(free_energy_one(d, p) - brute_force(d, p)) < 1e-12);
  }
}

TEST_CASE("size limit enforced") {
  DisorderSample d;
  d.n = 25;
  d.couplings.assign(25 * 24 / 2, 0.0);
  CHECK_THROWS_AS(free_energy_one(d, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("disorder averages: determinism and manual recomputation") {
  const ModelParams p{1.0, 1.0};
  const FreeEnergyEstimate a = disorder_average(8, p, 25, 314);
  const FreeEnergyEstimate b = disorder_average(8, p, 25, 314);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.n_samples == 25);
  CHECK(a.stderr_ > 0.0);
  // independent recomputation of mean/stderr from the same sub-seed stream
  std::uint64_t state = 314;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < 25; ++i) {
    const double f = free_energy_one(draw_disorder(8, splitmix64(state)), p);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / 25.0;
  CHECK(std::fabs(a.mean - mean) < 1e-15);
  const double var = (sum2 - sum * sum / 25.0) / 24.0;  // unbiased
  CHECK(std::fabs(a.stderr_ - std::sqrt(var / 25.0)) < 1e-14);
}

TEST_CASE("free energy approaches the replica-symmetric value with N") {
  const ModelParams p{1.0, 1.0};
  const double target = phi_rs(solve_q(p));
  const FreeEnergyEstimate e8 = disorder_average(8, p, 60, 2718);
  const FreeEnergyEstimate e14 = disorder_average(14, p, 60, 2718);
  CHECK(std::fabs(e14.mean - target) < std::fabs(e8.mean - target));
}
