#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgca/entropy.hpp"
#include "qgca/timeseries.hpp"

namespace qgca {

enum class OrderRule { Bic, Fixed };

/// Literal: N log(H2) + i log N, undefined for H2 <= 0.
/// PotentialBased: N H2 + i log N, always defined.
enum class BicVariant { Literal, PotentialBased };

std::string_view to_string(OrderRule rule) noexcept;
std::string_view to_string(BicVariant variant) noexcept;
BicVariant parse_bic_variant(std::string_view text);

struct GcaConfig {
  Criterion criterion = Criterion::QMEE;
  CriterionConfig criterion_config;
  int p_max = 10;
  OrderRule order_rule = OrderRule::Bic;
  int fixed_order = 1;
  BicVariant bic_variant = BicVariant::PotentialBased;
  // Refit all four models at the largest independently selected order.
  bool common_order = false;

  void validate() const;
};

/// One fitted AR or VAR model together with its residual statistics.
struct ModelFit {
  LinearModel model;
  int order = 0;
  double variance = 0.0;  ///< Mean squared residual.
  EntropyEstimate entropy;
};

struct OrderSelection {
  int order = 0;
  std::vector<double> scores;  ///< scores[i - 1] is the BIC score at order i.
  BicVariant variant_used = BicVariant::PotentialBased;
  std::vector<std::string> warnings;
  ModelFit best;  ///< The fit at the selected order.
};

/// BIC score of one candidate. For MSE the entropy term is log(variance).
/// Throws BicUndefined for the literal variant when h2 <= 0.
double bic_score(const ModelFit& fit, std::size_t n, Criterion criterion, BicVariant variant);

/// Order of AR(series) under `config` (BIC scan over 1..p_max or the fixed order).
OrderSelection select_order(const TimeSeries& series, const GcaConfig& config);

/// Order of the VAR model predicting `target` from both channels.
OrderSelection select_order(const TimeSeries& target, const TimeSeries& driver, const GcaConfig& config);

ModelFit fit_ar(const TimeSeries& series, int order, const GcaConfig& config);
ModelFit fit_var(const TimeSeries& target, const TimeSeries& driver, int order, const GcaConfig& config);

struct ModelOrders {
  int p1 = 0;  ///< AR(X)
  int p2 = 0;  ///< AR(Y)
  int p3 = 0;  ///< VAR(X | X, Y)
  int p4 = 0;  ///< VAR(Y | Y, X)
};

/// Causality indexes for one channel pair. For MSE the indexes are log
/// variance ratios; for MEE/QMEE they are entropy differences. Entropy-based
/// values are reported raw (possibly slightly negative) plus zero-clamped.
struct CausalityReport {
  std::string x_name;
  std::string y_name;
  Criterion criterion = Criterion::QMEE;
  double f_xy = 0.0;
  double f_yx = 0.0;
  double f_xy_clamped = 0.0;
  double f_yx_clamped = 0.0;
  double rho = 0.0;  ///< NaN when f_xy == 0.
  ModelOrders orders;
  ModelFit ar_x;   ///< e11
  ModelFit ar_y;   ///< e21
  ModelFit var_x;  ///< e12
  ModelFit var_y;  ///< e22
  std::vector<std::string> warnings;
};

double discrimination_index(double f_xy, double f_yx);

CausalityReport analyze_pair(const TimeSeries& x, const TimeSeries& y, const GcaConfig& config);

struct DirectedIndex {
  std::size_t from = 0;
  std::size_t to = 0;
  double f = 0.0;
  double f_clamped = 0.0;
  int restricted_order = 0;  ///< AR order of the target channel.
  int full_order = 0;        ///< VAR order of the target channel.
  std::vector<std::string> warnings;
  std::optional<std::string> error;
};

struct ChannelAnalysis {
  std::vector<std::string> names;
  std::vector<DirectedIndex> pairs;          ///< Every ordered pair (from != to).
  std::vector<std::vector<double>> matrix;   ///< matrix[from][to]; NaN on the diagonal and for failed pairs.
  std::vector<CausalityReport> reports;      ///< One per unordered pair that succeeded.
};

/// Pairwise analysis of all channels. A failing pair is recorded with an
/// error marker and does not abort the others.
ChannelAnalysis analyze_channels(std::span<const TimeSeries> channels, const GcaConfig& config);

}  // namespace qgca
