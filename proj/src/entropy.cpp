#include "qgca/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qgca/error.hpp"
#include "qgca/noise.hpp"

namespace qgca {

namespace {

// Exponents below this underflow to exactly zero in double precision.
constexpr double kUnderflowExponent = 746.0;

/// Gaussian kernel of width s, with the constants hoisted.
struct Kernel {
  explicit Kernel(double width)
      : norm(1.0 / (std::sqrt(2.0 * std::numbers::pi) * width)), inv_two_var(1.0 / (2.0 * width * width)) {}

  double operator()(double diff) const { return norm * std::exp(-diff * diff * inv_two_var); }

  double norm;
  double inv_two_var;
};

Kernel entropy_kernel(double sigma) { return Kernel(std::numbers::sqrt2 * sigma); }

void require_samples(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::EmptySample, "entropy estimate needs at least one sample");
  for (double e : errors) {
    if (!std::isfinite(e)) throw Error(ErrorCode::NonFinite, "entropy estimate got a non-finite sample");
  }
}

EntropyEstimate make_estimate(double ip, bool quantized, std::size_t m) {
  return EntropyEstimate{-std::log(ip), ip, quantized, m};
}

/// Per-sample kernel sums a_i = sum_m A_m G(e_i - c_m) and g_i = sum_m A_m G(e_i - c_m) c_m.
struct KernelSums {
  Eigen::VectorXd a;
  Eigen::VectorXd g;
};

KernelSums codebook_sums(const Eigen::VectorXd& residuals, const Codebook& book, double sigma) {
  const Kernel kernel = entropy_kernel(sigma);
  const auto n = residuals.size();
  KernelSums sums{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};

  // Codewords in sorted order; those whose kernel value underflows to zero
  // are skipped, which leaves the sums unchanged up to summation order.
  std::vector<std::size_t> order(book.size());
  for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return book.codewords[l] < book.codewords[r]; });
  const auto m_count = static_cast<Eigen::Index>(order.size());
  std::vector<double> sorted(order.size());
  Eigen::ArrayXd centers(m_count);
  Eigen::ArrayXd weights(m_count);
  for (Eigen::Index k = 0; k < m_count; ++k) {
    const std::size_t m = order[static_cast<std::size_t>(k)];
    sorted[static_cast<std::size_t>(k)] = centers(k) = book.codewords[m];
    weights(k) = kernel.norm * static_cast<double>(book.counts[m]);
  }
  const double reach = std::sqrt(kUnderflowExponent / kernel.inv_two_var);

  Eigen::ArrayXd w(m_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = residuals(i);
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), e - reach) - sorted.begin();
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), e + reach) - sorted.begin();
    const auto len = static_cast<Eigen::Index>(hi - lo);
    if (len == 0) continue;
    const auto c = centers.segment(lo, len);
    auto wi = w.head(len);
    wi = weights.segment(lo, len) * (-(e - c).square() * kernel.inv_two_var).exp();
    sums.a(i) = wi.sum();
    sums.g(i) = (wi * c).sum();
  }
  return sums;
}

KernelSums pairwise_sums(const Eigen::VectorXd& residuals, double sigma) {
  const Kernel kernel = entropy_kernel(sigma);
  const auto n = residuals.size();
  const Eigen::ArrayXd e = residuals.array();
  Eigen::ArrayXd a = Eigen::ArrayXd::Constant(n, kernel.norm);
  Eigen::ArrayXd g = kernel.norm * e;
  Eigen::ArrayXd w(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto len = n - i - 1;
    const auto tail = e.segment(i + 1, len);
    auto wi = w.head(len);
    wi = kernel.norm * (-(tail - e(i)).square() * kernel.inv_two_var).exp();
    a(i) += wi.sum();
    g(i) += (wi * tail).sum();
    a.segment(i + 1, len) += wi;
    g.segment(i + 1, len) += wi * e(i);
  }
  return {a.matrix(), g.matrix()};
}

KernelSums kernel_sums(const Eigen::VectorXd& residuals, const CriterionConfig& config, Criterion criterion) {
  if (criterion == Criterion::MEE) return pairwise_sums(residuals, config.sigma);
  const auto book = quantize(std::span<const double>(residuals.data(), static_cast<std::size_t>(residuals.size())),
                             config.epsilon);
  return codebook_sums(residuals, book, config.sigma);
}

struct SpdSolution {
  Eigen::VectorXd x;
  bool regularized = false;
};

SpdSolution solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double ridge) {
  constexpr double kMinRcond = 1e-13;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) {
    return {llt.solve(b), false};
  }
  const double scale = A.trace() / static_cast<double>(A.rows());
  if (ridge > 0.0 && scale > 0.0 && std::isfinite(scale)) {
    Eigen::MatrixXd damped = A;
    damped.diagonal().array() += ridge * scale;
    llt.compute(damped);
    if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) {
      return {llt.solve(b), true};
    }
  }
  throw Error(ErrorCode::SingularDesign, "normal equations are singular even after ridge regularization");
}

Eigen::VectorXd assemble_gradient(const LaggedDesign& design, const Eigen::VectorXd& residuals,
                                  const KernelSums& sums, double sigma) {
  const double n = static_cast<double>(design.rows());
  const double width = std::numbers::sqrt2 * sigma;
  const double tau = 1.0 / (n * n * width * width);
  const Eigen::VectorXd s = sums.a.cwiseProduct(residuals) - sums.g;
  return tau * (design.regressors.transpose() * s);
}

FixedPointSystem assemble_system(const LaggedDesign& design, const KernelSums& sums) {
  const auto& X = design.regressors;
  FixedPointSystem sys;
  const Eigen::MatrixXd weighted = sums.a.asDiagonal() * X;
  sys.V.noalias() = X.transpose() * weighted;
  sys.U = X.transpose() * (sums.a.cwiseProduct(design.targets) - sums.g);
  return sys;
}

}  // namespace

void CriterionConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidParams, "sigma must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidParams, "epsilon must be non-negative");
  }
  if (max_iters < 1) throw Error(ErrorCode::InvalidParams, "max_iters must be at least 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidParams, "tol must be non-negative");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidParams, "ridge must be non-negative");
}

double gaussian_kernel(double a, double b, double sigma) {
  return Kernel(sigma)(a - b);
}

double parzen_density(double e, std::span<const double> samples, double sigma) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "Parzen density needs at least one sample");
  const Kernel kernel(sigma);
  double sum = 0.0;
  for (double s : samples) sum += kernel(e - s);
  return sum / static_cast<double>(samples.size());
}

EntropyEstimate information_potential(std::span<const double> errors, double sigma) {
  require_samples(errors);
  const Kernel kernel = entropy_kernel(sigma);
  const std::size_t n = errors.size();
  double off_diagonal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) off_diagonal += kernel(errors[i] - errors[j]);
  }
  const double total = static_cast<double>(n) * kernel.norm + 2.0 * off_diagonal;
  return make_estimate(total / (static_cast<double>(n) * static_cast<double>(n)), false, 0);
}

EntropyEstimate quantized_information_potential(std::span<const double> errors, const Codebook& codebook,
                                                double sigma) {
  require_samples(errors);
  const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(errors.data(), static_cast<Eigen::Index>(errors.size()));
  const auto sums = codebook_sums(e, codebook, sigma);
  const double n = static_cast<double>(errors.size());
  return make_estimate(sums.a.sum() / (n * n), true, codebook.size());
}

QuantizedEstimate quantized_information_potential(std::span<const double> errors,
                                                  const CriterionConfig& config) {
  require_samples(errors);
  QuantizedEstimate out;
  out.codebook = quantize(errors, config.epsilon);
  out.estimate = quantized_information_potential(errors, out.codebook, config.sigma);
  return out;
}

LinearModel solve_mse(const LaggedDesign& design, double ridge) {
  if (design.rows() < design.dim() || design.dim() == 0) {
    throw Error(ErrorCode::SingularDesign, "least squares needs at least as many rows as unknowns");
  }
  const auto& X = design.regressors;
  const Eigen::MatrixXd gram = X.transpose() * X;
  const Eigen::VectorXd rhs = X.transpose() * design.targets;
  const auto solution = solve_spd(gram, rhs, ridge);

  LinearModel model;
  model.coefficients = solution.x;
  model.residuals = design.targets - X * solution.x;
  model.criterion = Criterion::MSE;
  model.iterations_used = 0;
  model.converged = true;
  model.regularized = solution.regularized;
  return model;
}

Eigen::VectorXd qip_gradient(const LaggedDesign& design, const Eigen::VectorXd& weights, const Codebook& codebook,
                             double sigma) {
  const Eigen::VectorXd e = compute_residuals(design, weights);
  return assemble_gradient(design, e, codebook_sums(e, codebook, sigma), sigma);
}

Eigen::VectorXd qip_gradient(const LaggedDesign& design, const Eigen::VectorXd& weights,
                             const CriterionConfig& config) {
  const Eigen::VectorXd e = compute_residuals(design, weights);
  return assemble_gradient(design, e, kernel_sums(e, config, Criterion::QMEE), config.sigma);
}

FixedPointSystem fixed_point_system(const LaggedDesign& design, const Eigen::VectorXd& weights,
                                    const CriterionConfig& config, Criterion criterion) {
  const Eigen::VectorXd e = compute_residuals(design, weights);
  return assemble_system(design, kernel_sums(e, config, criterion));
}

LinearModel solve_fixed_point(const LaggedDesign& design, const CriterionConfig& config, Criterion criterion,
                              const std::optional<Eigen::VectorXd>& initial, const IterateObserver& observer) {
  config.validate();
  if (criterion == Criterion::MSE) {
    throw Error(ErrorCode::InvalidParams, "fixed-point solver handles MEE and QMEE only");
  }
  if (design.rows() <= design.dim()) {
    throw Error(ErrorCode::SingularDesign, "fixed-point solver needs more rows than unknowns");
  }

  LinearModel model;
  model.criterion = criterion;
  if (initial) {
    if (static_cast<std::size_t>(initial->size()) != design.dim()) {
      throw Error(ErrorCode::LengthMismatch, "initial weights do not match design dimension");
    }
    model.coefficients = *initial;
  } else {
    // Under impulsive noise the least-squares residuals can be so dispersed
    // that every sample is kernel-isolated, which makes the LS weights a
    // spurious fixed point. Start from whichever of LS and zero has the
    // larger information potential.
    const auto start = solve_mse(design, config.ridge);
    const double ip_ls = kernel_sums(start.residuals, config, criterion).a.sum();
    const double ip_zero = kernel_sums(design.targets, config, criterion).a.sum();
    if (ip_zero > ip_ls) {
      model.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design.dim()));
    } else {
      model.coefficients = start.coefficients;
      model.regularized = start.regularized;
    }
  }

  Eigen::VectorXd w = model.coefficients;
  for (int k = 1; k <= config.max_iters; ++k) {
    const Eigen::VectorXd e = design.targets - design.regressors * w;
    const auto sys = assemble_system(design, kernel_sums(e, config, criterion));
    const auto next = solve_spd(sys.V, sys.U, config.ridge);
    if (!next.x.allFinite()) {
      throw Error(ErrorCode::Diverged, "fixed-point iterate became non-finite at iteration " + std::to_string(k));
    }
    model.regularized = model.regularized || next.regularized;
    const double step = (next.x - w).norm();
    w = next.x;
    model.iterations_used = k;
    if (observer) observer(k, w);
    if (step < config.tol) {
      model.converged = true;
      break;
    }
  }
  model.coefficients = w;
  model.residuals = design.targets - design.regressors * w;
  return model;
}

LinearModel fit(const LaggedDesign& design, const CriterionConfig& config, Criterion criterion) {
  if (criterion == Criterion::MSE) return solve_mse(design, config.ridge);
  return solve_fixed_point(design, config, criterion);
}

EntropyEstimate residual_entropy(std::span<const double> residuals, const CriterionConfig& config,
                                 Criterion criterion) {
  if (criterion == Criterion::MEE) return information_potential(residuals, config.sigma);
  return quantized_information_potential(residuals, config).estimate;
}

std::vector<TimingRow> benchmark_solver(Criterion criterion, std::span<const std::size_t> n_grid,
                                        const CriterionConfig& config, int repeats, std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::InvalidParams, "benchmark needs at least one repeat");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw Error(ErrorCode::InvalidParams, "benchmark sample-size grid must be ascending");
  }
  std::vector<TimingRow> rows;
  for (std::size_t n : n_grid) {
    TimingRow row;
    row.criterion = criterion;
    row.n = n;
    row.repeats = repeats;
    row.min_seconds = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      SyntheticSpec spec;
      spec.kind = SyntheticKind::Regression;
      spec.noise = noise_for_case(NoiseCase::Case1);
      spec.n = n;
      spec.seed = seed + static_cast<std::uint64_t>(r);
      const auto data = generate_regression(spec);
      const auto design = make_design(data.inputs, data.targets);

      const auto start = std::chrono::steady_clock::now();
      const auto model = fit(design, config, criterion);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

      row.mean_seconds += elapsed.count();
      row.min_seconds = std::min(row.min_seconds, elapsed.count());
      row.mean_iterations += model.iterations_used;
    }
    row.mean_seconds /= repeats;
    row.mean_iterations /= repeats;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qgca
