#include "qgca/gca.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <functional>
#include <map>

#include "qgca/error.hpp"
#include "qgca/parallel.hpp"

namespace qgca {

namespace {

using DesignBuilder = std::function<LaggedDesign(int)>;

ModelFit fit_design(const LaggedDesign& design, int order, const GcaConfig& config) {
  ModelFit out;
  out.model = fit(design, config.criterion_config, config.criterion);
  out.order = order;
  out.variance = out.model.residuals.squaredNorm() / static_cast<double>(out.model.residuals.size());
  const std::span<const double> e(out.model.residuals.data(), static_cast<std::size_t>(out.model.residuals.size()));
  out.entropy = residual_entropy(e, config.criterion_config, config.criterion);
  return out;
}

OrderSelection scan_orders(const DesignBuilder& build, std::size_t n, const GcaConfig& config) {
  OrderSelection sel;
  if (config.order_rule == OrderRule::Fixed) {
    sel.order = config.fixed_order;
    sel.variant_used = config.bic_variant;
    sel.best = fit_design(build(config.fixed_order), config.fixed_order, config);
    return sel;
  }

  std::vector<ModelFit> fits;
  fits.reserve(static_cast<std::size_t>(config.p_max));
  for (int p = 1; p <= config.p_max; ++p) fits.push_back(fit_design(build(p), p, config));

  auto score_all = [&](BicVariant variant) {
    std::vector<double> scores;
    for (const auto& f : fits) scores.push_back(bic_score(f, n, config.criterion, variant));
    return scores;
  };
  sel.variant_used = config.bic_variant;
  try {
    sel.scores = score_all(config.bic_variant);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::BicUndefined) throw;
    sel.variant_used = BicVariant::PotentialBased;
    sel.warnings.push_back("literal BIC undefined for non-positive entropy; used potential-based BIC");
    sel.scores = score_all(BicVariant::PotentialBased);
  }
  const auto best = std::min_element(sel.scores.begin(), sel.scores.end()) - sel.scores.begin();
  sel.order = static_cast<int>(best) + 1;
  sel.best = std::move(fits[static_cast<std::size_t>(best)]);
  return sel;
}

DesignBuilder ar_builder(const TimeSeries& series) {
  return [&series](int p) { return build_ar_design(series, p); };
}

DesignBuilder var_builder(const TimeSeries& target, const TimeSeries& driver) {
  return [&target, &driver](int p) { return build_var_design(target, driver, p); };
}

void require_non_degenerate(const TimeSeries& s) {
  if (s.is_constant()) {
    throw Error(ErrorCode::DegenerateSeries, "channel '" + s.name() + "' is constant");
  }
}

double causality_index(const ModelFit& restricted, const ModelFit& full, Criterion criterion) {
  if (criterion == Criterion::MSE) return std::log(restricted.variance / full.variance);
  return restricted.entropy.h2 - full.entropy.h2;
}

void append_fit_warnings(std::vector<std::string>& out, const ModelFit& fit, const char* label) {
  if (fit.model.regularized) {
    out.push_back(std::string(label) + ": rank-deficient design regularized with ridge");
  }
  if (fit.model.criterion != Criterion::MSE && !fit.model.converged) {
    out.push_back(std::string(label) + ": fixed point did not reach tolerance within the iteration cap");
  }
}

CausalityReport assemble_report(const TimeSeries& x, const TimeSeries& y, const OrderSelection& ar_x,
                                const OrderSelection& ar_y, const OrderSelection& var_x,
                                const OrderSelection& var_y, const GcaConfig& config) {
  CausalityReport r;
  r.x_name = x.name();
  r.y_name = y.name();
  r.criterion = config.criterion;
  r.ar_x = ar_x.best;
  r.ar_y = ar_y.best;
  r.var_x = var_x.best;
  r.var_y = var_y.best;
  r.orders = {ar_x.order, ar_y.order, var_x.order, var_y.order};
  r.f_xy = causality_index(r.ar_y, r.var_y, config.criterion);
  r.f_yx = causality_index(r.ar_x, r.var_x, config.criterion);
  r.f_xy_clamped = std::max(0.0, r.f_xy);
  r.f_yx_clamped = std::max(0.0, r.f_yx);
  r.rho = discrimination_index(r.f_xy, r.f_yx);

  for (const auto* sel : {&ar_x, &ar_y, &var_x, &var_y}) {
    r.warnings.insert(r.warnings.end(), sel->warnings.begin(), sel->warnings.end());
  }
  append_fit_warnings(r.warnings, r.ar_x, "AR(X)");
  append_fit_warnings(r.warnings, r.ar_y, "AR(Y)");
  append_fit_warnings(r.warnings, r.var_x, "VAR(X|X,Y)");
  append_fit_warnings(r.warnings, r.var_y, "VAR(Y|Y,X)");
  if (r.f_xy == 0.0) r.warnings.push_back("F(X->Y) is zero; discrimination index undefined");
  return r;
}

CausalityReport analyze_with_common_order(const TimeSeries& x, const TimeSeries& y, const GcaConfig& config) {
  auto ar_x = select_order(x, config);
  auto ar_y = select_order(y, config);
  auto var_x = select_order(x, y, config);
  auto var_y = select_order(y, x, config);
  const int common = std::max({ar_x.order, ar_y.order, var_x.order, var_y.order});
  for (auto* sel : {&ar_x, &ar_y}) {
    if (sel->order != common) {
      sel->best = fit_ar(sel == &ar_x ? x : y, common, config);
      sel->order = common;
    }
  }
  if (var_x.order != common) {
    var_x.best = fit_var(x, y, common, config);
    var_x.order = common;
  }
  if (var_y.order != common) {
    var_y.best = fit_var(y, x, common, config);
    var_y.order = common;
  }
  return assemble_report(x, y, ar_x, ar_y, var_x, var_y, config);
}

void check_pair(const TimeSeries& x, const TimeSeries& y, const GcaConfig& config) {
  config.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "channels '" + x.name() + "' and '" + y.name() + "' differ in length");
  }
  require_non_degenerate(x);
  require_non_degenerate(y);
}

}  // namespace

std::string_view to_string(OrderRule rule) noexcept {
  return rule == OrderRule::Bic ? "bic" : "fixed";
}

std::string_view to_string(BicVariant variant) noexcept {
  return variant == BicVariant::Literal ? "literal" : "potential_based";
}

BicVariant parse_bic_variant(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "literal") return BicVariant::Literal;
  if (lower == "potential_based" || lower == "potential") return BicVariant::PotentialBased;
  throw Error(ErrorCode::InvalidParams, "unknown BIC variant '" + std::string(text) + "'");
}

void GcaConfig::validate() const {
  criterion_config.validate();
  if (p_max < 1) throw Error(ErrorCode::InvalidParams, "p_max must be at least 1");
  if (order_rule == OrderRule::Fixed && fixed_order < 1) {
    throw Error(ErrorCode::InvalidParams, "fixed order must be at least 1");
  }
}

double bic_score(const ModelFit& fit, std::size_t n, Criterion criterion, BicVariant variant) {
  const double nn = static_cast<double>(n);
  const double penalty = fit.order * std::log(nn);
  if (criterion == Criterion::MSE) return nn * std::log(fit.variance) + penalty;
  if (variant == BicVariant::PotentialBased) return nn * fit.entropy.h2 + penalty;
  if (!(fit.entropy.h2 > 0.0)) {
    throw Error(ErrorCode::BicUndefined, "log of non-positive entropy estimate at order " + std::to_string(fit.order));
  }
  return nn * std::log(fit.entropy.h2) + penalty;
}

ModelFit fit_ar(const TimeSeries& series, int order, const GcaConfig& config) {
  return fit_design(build_ar_design(series, order), order, config);
}

ModelFit fit_var(const TimeSeries& target, const TimeSeries& driver, int order, const GcaConfig& config) {
  return fit_design(build_var_design(target, driver, order), order, config);
}

OrderSelection select_order(const TimeSeries& series, const GcaConfig& config) {
  config.validate();
  return scan_orders(ar_builder(series), series.size(), config);
}

OrderSelection select_order(const TimeSeries& target, const TimeSeries& driver, const GcaConfig& config) {
  config.validate();
  if (target.size() != driver.size()) {
    throw Error(ErrorCode::LengthMismatch, "VAR channels differ in length");
  }
  return scan_orders(var_builder(target, driver), target.size(), config);
}

double discrimination_index(double f_xy, double f_yx) {
  if (f_xy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (f_xy - f_yx) / f_xy;
}

CausalityReport analyze_pair(const TimeSeries& x, const TimeSeries& y, const GcaConfig& config) {
  check_pair(x, y, config);
  if (config.common_order) return analyze_with_common_order(x, y, config);
  const auto ar_x = select_order(x, config);
  const auto ar_y = select_order(y, config);
  const auto var_x = select_order(x, y, config);
  const auto var_y = select_order(y, x, config);
  return assemble_report(x, y, ar_x, ar_y, var_x, var_y, config);
}

ChannelAnalysis analyze_channels(std::span<const TimeSeries> channels, const GcaConfig& config) {
  config.validate();
  if (channels.size() < 2) throw Error(ErrorCode::InvalidParams, "pairwise analysis needs at least 2 channels");
  for (const auto& c : channels) {
    if (c.size() != channels.front().size()) {
      throw Error(ErrorCode::LengthMismatch, "all channels must have equal length");
    }
  }

  const std::size_t k = channels.size();
  std::vector<std::pair<std::size_t, std::size_t>> unordered;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) unordered.emplace_back(i, j);
  }

  struct Outcome {
    std::optional<CausalityReport> report;
    std::string error;
  };
  std::vector<Outcome> outcomes(unordered.size());

  if (config.common_order) {
    parallel_for(unordered.size(), [&](std::size_t u) {
      const auto [i, j] = unordered[u];
      try {
        outcomes[u].report = analyze_pair(channels[i], channels[j], config);
      } catch (const Error& err) {
        outcomes[u].error = err.what();
      }
    });
  } else {
    // AR fits depend on one channel only, so they are shared across pairs.
    std::vector<std::optional<OrderSelection>> ar(k);
    std::vector<std::string> ar_error(k);
    parallel_for(k, [&](std::size_t i) {
      try {
        require_non_degenerate(channels[i]);
        ar[i] = select_order(channels[i], config);
      } catch (const Error& err) {
        ar_error[i] = err.what();
      }
    });

    std::vector<std::pair<std::size_t, std::size_t>> directed;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i != j && ar[i] && ar[j]) directed.emplace_back(i, j);
      }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::optional<OrderSelection>> var;
    std::map<std::pair<std::size_t, std::size_t>, std::string> var_error;
    for (const auto& key : directed) {
      var[key];
      var_error[key];
    }
    parallel_for(directed.size(), [&](std::size_t d) {
      const auto key = directed[d];
      try {
        var.at(key) = select_order(channels[key.first], channels[key.second], config);
      } catch (const Error& err) {
        var_error.at(key) = err.what();
      }
    });

    for (std::size_t u = 0; u < unordered.size(); ++u) {
      const auto [i, j] = unordered[u];
      if (!ar[i] || !ar[j]) {
        outcomes[u].error = !ar[i] ? ar_error[i] : ar_error[j];
        continue;
      }
      const auto& vx = var.at({i, j});
      const auto& vy = var.at({j, i});
      if (!vx || !vy) {
        outcomes[u].error = !vx ? var_error.at({i, j}) : var_error.at({j, i});
        continue;
      }
      outcomes[u].report = assemble_report(channels[i], channels[j], *ar[i], *ar[j], *vx, *vy, config);
    }
  }

  ChannelAnalysis out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : channels) out.names.push_back(c.name());
  out.matrix.assign(k, std::vector<double>(k, nan));
  std::map<std::pair<std::size_t, std::size_t>, DirectedIndex> by_pair;
  for (std::size_t u = 0; u < unordered.size(); ++u) {
    const auto [i, j] = unordered[u];
    DirectedIndex forward;
    forward.from = i;
    forward.to = j;
    DirectedIndex backward;
    backward.from = j;
    backward.to = i;
    if (const auto& r = outcomes[u].report) {
      forward.f = r->f_xy;
      forward.f_clamped = r->f_xy_clamped;
      forward.restricted_order = r->orders.p2;
      forward.full_order = r->orders.p4;
      backward.f = r->f_yx;
      backward.f_clamped = r->f_yx_clamped;
      backward.restricted_order = r->orders.p1;
      backward.full_order = r->orders.p3;
      forward.warnings = backward.warnings = r->warnings;
      out.matrix[i][j] = r->f_xy;
      out.matrix[j][i] = r->f_yx;
      out.reports.push_back(*r);
    } else {
      forward.f = backward.f = forward.f_clamped = backward.f_clamped = nan;
      forward.error = backward.error = outcomes[u].error;
    }
    by_pair[{i, j}] = std::move(forward);
    by_pair[{j, i}] = std::move(backward);
  }
  for (auto& [key, entry] : by_pair) out.pairs.push_back(std::move(entry));
  return out;
}

}  // namespace qgca
