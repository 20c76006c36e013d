#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qgca/quantizer.hpp"
#include "qgca/timeseries.hpp"

namespace qgca {

/// Settings shared by the entropy estimators and the fixed-point solvers.
struct CriterionConfig {
  double sigma = 0.5;     ///< Parzen kernel bandwidth (error units).
  double epsilon = 0.4;   ///< Quantization threshold; 0 reproduces the unquantized estimator.
  int max_iters = 100;    ///< Hard iteration cap K.
  double tol = 1e-8;      ///< Stop once the weight increment 2-norm drops below this; 0 runs all K.
  double ridge = 1e-10;   ///< Relative ridge (times trace/d) used only when a solve fails.

  void validate() const;
};

/// Quadratic Renyi entropy estimate. `h2 == -log(ip)`.
struct EntropyEstimate {
  double h2 = 0.0;
  double ip = 0.0;
  bool quantized = false;
  std::size_t codebook_size = 0;
};

struct QuantizedEstimate {
  EntropyEstimate estimate;
  Codebook codebook;
};

double gaussian_kernel(double a, double b, double sigma);

double parzen_density(double e, std::span<const double> samples, double sigma);

/// Full O(N^2) information potential with kernel width sqrt(2)*sigma.
EntropyEstimate information_potential(std::span<const double> errors, double sigma);

/// O(NM) information potential against the codebook quantize(errors, epsilon).
QuantizedEstimate quantized_information_potential(std::span<const double> errors,
                                                  const CriterionConfig& config);

/// Same, against a caller-supplied (possibly stale) codebook.
EntropyEstimate quantized_information_potential(std::span<const double> errors, const Codebook& codebook,
                                                double sigma);

/// Least squares on the normal equations. A ridge of `ridge * trace / d` is
/// added only when the Gram matrix is numerically singular.
LinearModel solve_mse(const LaggedDesign& design, double ridge = 1e-10);

/// Gradient of the quantized information potential with respect to w, the
/// codebook built from the residuals at w.
Eigen::VectorXd qip_gradient(const LaggedDesign& design, const Eigen::VectorXd& weights,
                             const CriterionConfig& config);

/// Gradient with the codebook held fixed (c_m and A_m treated as constants).
Eigen::VectorXd qip_gradient(const LaggedDesign& design, const Eigen::VectorXd& weights,
                             const Codebook& codebook, double sigma);

/// The kernel-weighted normal equations V w = U evaluated at one residual
/// vector. Exposed for stationarity checks.
struct FixedPointSystem {
  Eigen::MatrixXd V;
  Eigen::VectorXd U;
};

FixedPointSystem fixed_point_system(const LaggedDesign& design, const Eigen::VectorXd& weights,
                                    const CriterionConfig& config, Criterion criterion);

using IterateObserver = std::function<void(int iteration, const Eigen::VectorXd& weights)>;

/// Fixed-point iteration w_k = V^{-1} U evaluated at w_{k-1}. MEE uses the
/// full pairwise sums; QMEE rebuilds the codebook from the residuals at every
/// iteration. Without `initial` the start is whichever of the least-squares
/// solution and the zero vector has the larger information potential.
LinearModel solve_fixed_point(const LaggedDesign& design, const CriterionConfig& config, Criterion criterion,
                              const std::optional<Eigen::VectorXd>& initial = std::nullopt,
                              const IterateObserver& observer = {});

/// Fit by any criterion (MSE dispatches to solve_mse).
LinearModel fit(const LaggedDesign& design, const CriterionConfig& config, Criterion criterion);

/// Entropy estimate matching the criterion: full for MEE, quantized otherwise.
EntropyEstimate residual_entropy(std::span<const double> residuals, const CriterionConfig& config,
                                 Criterion criterion);

struct TimingRow {
  Criterion criterion = Criterion::MEE;
  std::size_t n = 0;
  int repeats = 0;
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
  double mean_iterations = 0.0;
};

/// Wall-clock solve time on synthetic regression data (case 1 noise) for each
/// sample size. Runs on the calling thread only.
std::vector<TimingRow> benchmark_solver(Criterion criterion, std::span<const std::size_t> n_grid,
                                        const CriterionConfig& config, int repeats = 3,
                                        std::uint64_t seed = 1);

}  // namespace qgca
