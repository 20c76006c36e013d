#include "qgca/timeseries.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "qgca/error.hpp"

namespace qgca {

TimeSeries::TimeSeries(std::string name, std::vector<double> samples)
    : name_(std::move(name)), samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::InvalidParams,
                "time series '" + name_ + "' needs at least 2 samples");
  }
  for (std::size_t t = 0; t < samples_.size(); ++t) {
    if (!std::isfinite(samples_[t])) {
      throw Error(ErrorCode::NonFinite, "time series '" + name_ + "' has a non-finite sample at index " +
                                            std::to_string(t));
    }
  }
}

TimeSeries TimeSeries::centered() const {
  const double mean = std::accumulate(samples_.begin(), samples_.end(), 0.0) /
                      static_cast<double>(samples_.size());
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [mean](double v) { return v - mean; });
  return TimeSeries(name_, std::move(out));
}

bool TimeSeries::is_constant() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [&](double v) { return v == samples_.front(); });
}

LaggedDesign build_ar_design(const TimeSeries& series, int order) {
  const auto n = static_cast<long>(series.size());
  if (order < 1) {
    throw Error(ErrorCode::OrderTooLarge, "AR order must be at least 1");
  }
  const long rows = n - order;
  if (rows <= order) {
    throw Error(ErrorCode::OrderTooLarge, "AR order " + std::to_string(order) + " leaves " +
                                              std::to_string(std::max(rows, 0L)) + " rows for " +
                                              std::to_string(order) + " unknowns");
  }

  LaggedDesign design;
  design.embedding = Embedding::Autoregressive;
  design.order = order;
  design.first_time = static_cast<std::size_t>(order);
  design.regressors.resize(rows, order);
  design.targets.resize(rows);
  for (long i = 0; i < rows; ++i) {
    const long t = i + order;
    design.targets(i) = series[t];
    for (int lag = 1; lag <= order; ++lag) {
      design.regressors(i, lag - 1) = series[t - lag];
    }
  }
  return design;
}

LaggedDesign build_var_design(const TimeSeries& target, const TimeSeries& driver, int order) {
  if (target.size() != driver.size()) {
    throw Error(ErrorCode::LengthMismatch, "VAR channels '" + target.name() + "' and '" + driver.name() +
                                               "' differ in length");
  }
  if (order < 1) {
    throw Error(ErrorCode::OrderTooLarge, "VAR order must be at least 1");
  }
  const auto n = static_cast<long>(target.size());
  const long rows = n - order;
  // Square systems are admitted here; the solvers enforce their own row requirements.
  if (rows < 2L * order) {
    throw Error(ErrorCode::OrderTooLarge, "VAR order " + std::to_string(order) + " leaves " +
                                              std::to_string(std::max(rows, 0L)) + " rows for " +
                                              std::to_string(2 * order) + " unknowns");
  }

  LaggedDesign design;
  design.embedding = Embedding::VectorAutoregressive;
  design.order = order;
  design.first_time = static_cast<std::size_t>(order);
  design.regressors.resize(rows, 2 * order);
  design.targets.resize(rows);
  for (long i = 0; i < rows; ++i) {
    const long t = i + order;
    design.targets(i) = target[t];
    for (int lag = 1; lag <= order; ++lag) {
      design.regressors(i, lag - 1) = target[t - lag];
      design.regressors(i, order + lag - 1) = driver[t - lag];
    }
  }
  return design;
}

LaggedDesign make_design(Eigen::MatrixXd regressors, Eigen::VectorXd targets) {
  if (regressors.rows() != targets.size()) {
    throw Error(ErrorCode::LengthMismatch, "regressor rows and target count differ");
  }
  if (!regressors.allFinite() || !targets.allFinite()) {
    throw Error(ErrorCode::NonFinite, "design contains non-finite values");
  }
  LaggedDesign design;
  design.regressors = std::move(regressors);
  design.targets = std::move(targets);
  return design;
}

std::string_view to_string(Criterion criterion) noexcept {
  switch (criterion) {
    case Criterion::MSE: return "mse";
    case Criterion::MEE: return "mee";
    case Criterion::QMEE: return "qmee";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mse") return Criterion::MSE;
  if (lower == "mee") return Criterion::MEE;
  if (lower == "qmee") return Criterion::QMEE;
  throw Error(ErrorCode::InvalidParams, "unknown criterion '" + std::string(text) + "'");
}

Eigen::VectorXd compute_residuals(const LaggedDesign& design, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != design.dim()) {
    throw Error(ErrorCode::LengthMismatch, "weight vector length does not match design dimension");
  }
  return design.targets - design.regressors * weights;
}

}  // namespace qgca
