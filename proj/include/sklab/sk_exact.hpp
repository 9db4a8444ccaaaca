#pragma once

#include <cstdint>

#include "sklab/rs_core.hpp"

namespace sklab {

/// One draw of the i.i.d. standard Gaussian couplings g_{ij}, i < j,
/// stored as the upper triangle in row-major order.
struct DisorderSample {
  int n = 0;
  std::vector<double> couplings;  // n(n-1)/2 entries
  std::uint64_t seed = 0;
};

DisorderSample draw_disorder(int n, std::uint64_t seed);

struct FreeEnergyEstimate {
  int n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  int n_samples = 0;
};

/// (1/N) log sum_{sigma} exp((beta/sqrt(N)) sum g_ij s_i s_j + h sum s_i),
/// exact enumeration via Gray-code spin flips with a running log-sum-exp.
/// Requires n <= 24.
double free_energy_one(const DisorderSample& sample, const ModelParams& params);

/// Mean and standard error of free_energy_one over independent disorder
/// samples; deterministic in seed.
FreeEnergyEstimate disorder_average(int n, const ModelParams& params,
                                    int n_samples, std::uint64_t seed);

}  // namespace sklab
