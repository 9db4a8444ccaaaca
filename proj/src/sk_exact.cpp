#include "sklab/sk_exact.hpp"

#include <bit>
#include <random>

namespace sklab {

DisorderSample draw_disorder(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_disorder: n < 1");
  DisorderSample s;
  s.n = n;
  s.seed = seed;
  s.couplings.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& g : s.couplings) g = normal(rng);
  return s;
}

double free_energy_one(const DisorderSample& sample, const ModelParams& params) {
  params.validate();
  const int n = sample.n;
  if (n < 1 || n > 24)
    throw std::invalid_argument("free_energy_one: n must be in [1, 24]");
  if (sample.couplings.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
    throw std::invalid_argument("free_energy_one: coupling count mismatch");

  // Full symmetric matrix for O(n) flip updates.
  std::vector<double> J(static_cast<std::size_t>(n) * n, 0.0);
  {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        J[static_cast<std::size_t>(i) * n + j] = sample.couplings[idx];
        J[static_cast<std::size_t>(j) * n + i] = sample.couplings[idx];
        ++idx;
      }
  }

  const double coupling_scale = params.beta / std::sqrt(static_cast<double>(n));
  std::vector<int> spin(n, 1);
  double pair_sum = 0.0;  // sum_{i<j} g_ij s_i s_j
  for (const double g : sample.couplings) pair_sum += g;
  double mag = static_cast<double>(n);

  double energy = coupling_scale * pair_sum + params.h * mag;
  double max_e = energy;
  double acc = 1.0;  // sum of exp(E - max_e) over visited configurations

  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t c = 1; c < total; ++c) {
    const int k = std::countr_zero(c);  // Gray code: flip spin k
    double local = 0.0;
    const double* row = &J[static_cast<std::size_t>(k) * n];
    for (int j = 0; j < n; ++j) local += row[j] * spin[j];
    pair_sum -= 2.0 * spin[k] * local;
    mag -= 2.0 * spin[k];
    spin[k] = -spin[k];
    energy = coupling_scale * pair_sum + params.h * mag;
    if (energy > max_e) {
      acc = acc * std::exp(max_e - energy) + 1.0;
      max_e = energy;
    } else {
      acc += std::exp(energy - max_e);
    }
  }
  return (max_e + std::log(acc)) / static_cast<double>(n);
}

FreeEnergyEstimate disorder_average(int n, const ModelParams& params,
                                    int n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("disorder_average: n_samples must be >= 2");
  double sum = 0.0, sum2 = 0.0;
  std::uint64_t state = seed;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t sub = splitmix64(state);
    const double f = free_energy_one(draw_disorder(n, sub), params);
    sum += f;
    sum2 += f * f;
  }
  FreeEnergyEstimate est;
  est.n = n;
  est.n_samples = n_samples;
  est.mean = sum / n_samples;
  const double var =
      std::max(0.0, (sum2 - sum * sum / n_samples) / (n_samples - 1));
  est.stderr_ = std::sqrt(var / n_samples);
  return est;
}

}  // namespace sklab
