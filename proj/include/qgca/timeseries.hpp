#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qgca {

/// A named, uniformly sampled scalar signal. Samples are validated on
/// construction (at least two, all finite) and never change afterwards.
class TimeSeries {
 public:
  TimeSeries(std::string name, std::vector<double> samples);

  const std::string& name() const noexcept { return name_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t t) const { return samples_[t]; }

  /// Copy with the sample mean removed.
  TimeSeries centered() const;

  /// True when every sample equals the first one.
  bool is_constant() const noexcept;

 private:
  std::string name_;
  std::vector<double> samples_;
};

enum class Embedding { Autoregressive, VectorAutoregressive, Plain };

/// Regression instance y_i = w^T x_i + e_i. Row i of `regressors` is x_i.
///
/// For lag embeddings `first_time` is the 0-based sample index of the first
/// target, so row i predicts sample first_time + i. VAR designs hold the
/// target's own lags in columns [0, p) and the driver's lags in [p, 2p).
struct LaggedDesign {
  Eigen::MatrixXd regressors;
  Eigen::VectorXd targets;
  Embedding embedding = Embedding::Plain;
  int order = 0;
  std::size_t first_time = 0;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(targets.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(regressors.cols()); }
};

LaggedDesign build_ar_design(const TimeSeries& series, int order);
LaggedDesign build_var_design(const TimeSeries& target, const TimeSeries& driver, int order);

/// Wraps an arbitrary (inputs, targets) pair, e.g. the synthetic regression data.
LaggedDesign make_design(Eigen::MatrixXd regressors, Eigen::VectorXd targets);

enum class Criterion { MSE, MEE, QMEE };

std::string_view to_string(Criterion criterion) noexcept;
Criterion parse_criterion(std::string_view text);

struct LinearModel {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Criterion criterion = Criterion::MSE;
  int iterations_used = 0;
  bool converged = false;
  // Set when a ridge term had to be added to make a normal-equation solve succeed.
  bool regularized = false;
};

Eigen::VectorXd compute_residuals(const LaggedDesign& design, const Eigen::VectorXd& weights);

}  // namespace qgca
