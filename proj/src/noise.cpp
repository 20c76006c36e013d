#include "qgca/noise.hpp"

#include <cmath>
#include <numbers>

#include "qgca/error.hpp"

namespace qgca {

namespace {

constexpr std::uint64_t kInputStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double draw_stable(const StableParams& p, std::mt19937_64& engine) {
  using std::numbers::pi;
  std::uniform_real_distribution<double> angle(-pi / 2.0, pi / 2.0);
  std::exponential_distribution<double> expo(1.0);
  double v = angle(engine);
  // Keep cos(v) away from zero; the open interval can still round onto the endpoint.
  while (std::abs(v) >= pi / 2.0) v = angle(engine);
  double w = expo(engine);
  while (w <= 0.0) w = expo(engine);

  const double alpha = p.alpha;
  const double beta = p.beta;
  double x = 0.0;
  if (alpha == 1.0) {
    const double half_pi = pi / 2.0;
    const double shifted = half_pi + beta * v;
    x = (2.0 / pi) * (shifted * std::tan(v) - beta * std::log((half_pi * w * std::cos(v)) / shifted));
    return p.gamma * x + (2.0 / pi) * beta * p.gamma * std::log(p.gamma) + p.delta;
  }
  const double t = beta * std::tan(pi * alpha / 2.0);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
  x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
      std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return p.gamma * x + p.delta;
}

}  // namespace

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

void GaussianMixtureParams::validate() const {
  if (components.empty()) {
    throw Error(ErrorCode::InvalidParams, "Gaussian mixture needs at least one component");
  }
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.mean) || !(c.std > 0.0) || !std::isfinite(c.std)) {
      throw Error(ErrorCode::InvalidParams, "Gaussian mixture component has invalid weight/mean/std");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidParams, "Gaussian mixture weights must sum to 1");
  }
}

double GaussianMixtureParams::mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

double GaussianMixtureParams::variance() const {
  double second = 0.0;
  for (const auto& c : components) second += c.weight * (c.std * c.std + c.mean * c.mean);
  const double m = mean();
  return second - m * m;
}

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw Error(ErrorCode::InvalidParams, "stable alpha must lie in (0, 2]");
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "stable beta must lie in [-1, 1]");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidParams, "stable gamma must be positive");
  }
  if (!std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidParams, "stable delta must be finite");
  }
}

NoiseParams noise_for_case(NoiseCase noise_case) {
  switch (noise_case) {
    case NoiseCase::Case1:
      return GaussianMixtureParams{{{0.5, 4.0, 1.0}, {0.5, -4.0, 1.0}}};
    case NoiseCase::Case2:
      return GaussianMixtureParams{{{0.6, 3.0, 1.0}, {0.4, -5.0, 1.0}}};
    case NoiseCase::Case3:
      return StableParams{1.3, 0.0, 0.4, 0.0};
  }
  throw Error(ErrorCode::InvalidParams, "unknown noise case");
}

NoiseCase parse_noise_case(int number) {
  if (number < 1 || number > 3) {
    throw Error(ErrorCode::InvalidParams, "noise case must be 1, 2 or 3");
  }
  return static_cast<NoiseCase>(number);
}

std::vector<double> sample_gaussian_mixture(const GaussianMixtureParams& params, std::size_t n,
                                            std::uint64_t seed) {
  params.validate();
  auto engine = make_engine(seed, kNoiseStream);
  std::vector<double> weights;
  for (const auto& c : params.components) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> out(n);
  for (auto& v : out) {
    const auto& c = params.components[pick(engine)];
    v = c.mean + c.std * normal(engine);
  }
  return out;
}

std::vector<double> sample_alpha_stable(const StableParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  auto engine = make_engine(seed, kNoiseStream);
  std::vector<double> out(n);
  for (auto& v : out) {
    // Overflow is possible for very small alpha; redraw rather than emit inf.
    do {
      v = draw_stable(params, engine);
    } while (!std::isfinite(v));
  }
  return out;
}

std::vector<double> sample_noise(const NoiseParams& params, std::size_t n, std::uint64_t seed) {
  struct Visitor {
    std::size_t n;
    std::uint64_t seed;
    std::vector<double> operator()(const NoNoise&) const { return std::vector<double>(n, 0.0); }
    std::vector<double> operator()(const UniformParams& p) const {
      if (!(p.low < p.high)) throw Error(ErrorCode::InvalidParams, "uniform noise needs low < high");
      auto engine = make_engine(seed, kNoiseStream);
      std::uniform_real_distribution<double> dist(p.low, p.high);
      std::vector<double> out(n);
      for (auto& v : out) v = dist(engine);
      return out;
    }
    std::vector<double> operator()(const GaussianMixtureParams& p) const {
      return sample_gaussian_mixture(p, n, seed);
    }
    std::vector<double> operator()(const StableParams& p) const { return sample_alpha_stable(p, n, seed); }
  };
  return std::visit(Visitor{n, seed}, params);
}

RegressionData generate_regression(const SyntheticSpec& spec) {
  if (spec.kind != SyntheticKind::Regression) {
    throw Error(ErrorCode::InvalidSpec, "generate_regression needs a regression spec");
  }
  if (spec.n < 1 || spec.true_weights.size() != 2) {
    throw Error(ErrorCode::InvalidSpec, "regression spec needs n >= 1 and two true weights");
  }
  const auto n = static_cast<Eigen::Index>(spec.n);
  auto engine = make_engine(spec.seed, kInputStream);
  std::uniform_real_distribution<double> input(-2.0, 2.0);

  RegressionData data;
  data.inputs.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.inputs(i, 0) = input(engine);
    data.inputs(i, 1) = input(engine);
  }
  const auto noise = sample_noise(spec.noise, spec.n, spec.seed);
  const Eigen::Vector2d w(spec.true_weights[0], spec.true_weights[1]);
  data.targets = data.inputs * w + Eigen::Map<const Eigen::VectorXd>(noise.data(), n);
  return data;
}

std::pair<TimeSeries, TimeSeries> generate_causal_pair(const SyntheticSpec& spec) {
  if (spec.kind != SyntheticKind::CausalPair) {
    throw Error(ErrorCode::InvalidSpec, "generate_causal_pair needs a causal_pair spec");
  }
  if (spec.n < 2) {
    throw Error(ErrorCode::InvalidSpec, "causal pair needs n >= 2");
  }
  auto engine = make_engine(spec.seed, kInputStream);
  std::uniform_real_distribution<double> input(-2.0, 2.0);
  std::vector<double> x(spec.n);
  for (auto& v : x) v = input(engine);

  const auto psi = sample_noise(spec.noise, spec.n, spec.seed);
  std::vector<double> y(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) {
    y[t] = (t == 0 ? 0.0 : x[t - 1]) + psi[t];
  }
  return {TimeSeries("X", std::move(x)), TimeSeries("Y", std::move(y))};
}

}  // namespace qgca
