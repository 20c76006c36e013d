#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qgca/timeseries.hpp"

namespace qgca {

/// Independent 64-bit engine for (seed, stream). Different streams of one seed
/// do not overlap in practice, which lets one spec seed drive inputs and noise
/// separately.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double std = 1.0;
};

struct GaussianMixtureParams {
  std::vector<GaussianComponent> components;

  void validate() const;
  double mean() const;
  double variance() const;
};

/// Stable law S(alpha, beta, gamma, delta; 1). With beta = 0 the 0- and
/// 1-parameterizations coincide.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;

  void validate() const;
};

struct UniformParams {
  double low = -1.0;
  double high = 1.0;
};

struct NoNoise {};

using NoiseParams = std::variant<NoNoise, UniformParams, GaussianMixtureParams, StableParams>;

enum class NoiseCase { Case1 = 1, Case2 = 2, Case3 = 3 };

/// Case 1: 0.5 N(4,1) + 0.5 N(-4,1). Case 2: 0.6 N(3,1) + 0.4 N(-5,1).
/// Case 3: stable [1.3, 0, 0.4, 0].
NoiseParams noise_for_case(NoiseCase noise_case);
NoiseCase parse_noise_case(int number);

std::vector<double> sample_gaussian_mixture(const GaussianMixtureParams& params, std::size_t n,
                                            std::uint64_t seed);

/// Chambers-Mallows-Stuck sampler.
std::vector<double> sample_alpha_stable(const StableParams& params, std::size_t n, std::uint64_t seed);

std::vector<double> sample_noise(const NoiseParams& params, std::size_t n, std::uint64_t seed);

enum class SyntheticKind { Regression, CausalPair };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Regression;
  std::vector<double> true_weights{2.0, 1.0};
  NoiseParams noise = NoNoise{};
  std::size_t n = 500;
  std::uint64_t seed = 0;
};

struct RegressionData {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
};

/// y_i = w*^T x_i + noise_i with x_i uniform on [-2,2]^2.
RegressionData generate_regression(const SyntheticSpec& spec);

/// x_t uniform on [-2,2], y_t = x_{t-1} + psi_t with x_{-1} taken as 0.
std::pair<TimeSeries, TimeSeries> generate_causal_pair(const SyntheticSpec& spec);

}  // namespace qgca
