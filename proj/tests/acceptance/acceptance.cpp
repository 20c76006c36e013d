// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "qgca/cli.hpp"
#include "qgca/entropy.hpp"
#include "qgca/error.hpp"
#include "qgca/experiment.hpp"
#include "qgca/gca.hpp"
#include "qgca/io.hpp"
#include "qgca/noise.hpp"
#include "qgca/quantizer.hpp"

using namespace qgca;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double mean_of(const std::vector<double>& v) {
  return SummaryStats::compute(v).mean;
}

double median_of(const std::vector<double>& v) {
  return SummaryStats::compute(v).median;
}

// 1. Monte-Carlo RMSE of the three regression solvers.
Outcome table1() {
  ExperimentSpec spec;
  spec.runs = 100;
  const auto result = run_table1(spec);
  Outcome out;
  struct Band {
    const char* label;
    Criterion criterion;
    double mean;
    double tol;
  };
  const std::vector<Band> bands{{"case1", Criterion::MSE, 0.1437, 0.023},  {"case1", Criterion::MEE, 0.0414, 0.007},
                                {"case1", Criterion::QMEE, 0.0436, 0.007}, {"case2", Criterion::MSE, 0.1454, 0.022},
                                {"case2", Criterion::QMEE, 0.0428, 0.008}, {"case3", Criterion::QMEE, 0.0215, 0.004}};
  for (const auto& b : bands) {
    const auto& cell = result.cell(b.label, b.criterion);
    const double m = mean_of(cell.values("rmse"));
    out.check(cell.failures == 0 && std::abs(m - b.mean) <= b.tol,
              std::string(b.label) + " " + std::string(to_string(b.criterion)) + " mean RMSE " + fmt(m) + " in " +
                  fmt(b.mean) + " +/- " + fmt(b.tol) + " (failures " + std::to_string(cell.failures) + ")");
  }
  const double med_mse = median_of(result.cell("case3", Criterion::MSE).values("rmse"));
  const double med_qmee = median_of(result.cell("case3", Criterion::QMEE).values("rmse"));
  out.check(med_mse > 3.0 * med_qmee,
            "case3 median RMSE mse " + fmt(med_mse) + " > 3 x qmee " + fmt(med_qmee));
  return out;
}

// 2. Causality indexes for the planted pair.
Outcome table2() {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Table2;
  spec.runs = 100;
  spec.criteria = {Criterion::MSE, Criterion::QMEE};
  const auto result = run_table2(spec);
  Outcome out;
  const std::vector<std::pair<const char*, double>> f_ref{{"case1", 0.3819}, {"case2", 0.3755}, {"case3", 0.5773}};
  for (const auto& [label, ref] : f_ref) {
    for (auto c : spec.criteria) {
      const auto& cell = result.cell(label, c);
      const auto rho = cell.values("rho");
      const double mean_rho = mean_of(rho);
      const auto correct = std::count_if(rho.begin(), rho.end(), [](double r) { return r > 0.0; });
      const std::string tag = std::string(label) + " " + std::string(to_string(c));
      if (c == Criterion::MSE) {
        out.check(mean_rho >= 0.86 && mean_rho <= 1.0, tag + " mean rho " + fmt(mean_rho) + " in [0.86, 1]");
      } else {
        out.check(mean_rho >= 0.99, tag + " mean rho " + fmt(mean_rho) + " >= 0.99");
        const double f = mean_of(cell.values("f_xy"));
        out.check(std::abs(f - ref) <= 0.03, tag + " mean f_xy " + fmt(f) + " within 0.03 of " + fmt(ref));
      }
      out.check(correct >= 99, tag + " correct direction in " + std::to_string(correct) + "/100 runs");
    }
  }
  return out;
}

// 3. Solver cost against sample size at a fixed iteration count.
Outcome timing() {
  CriterionConfig cfg;
  cfg.max_iters = 10;
  cfg.tol = 0.0;
  const std::vector<std::size_t> grid{500, 1000, 2000, 4000, 8000};
  const auto mee = benchmark_solver(Criterion::MEE, grid, cfg, 3);
  const auto qmee = benchmark_solver(Criterion::QMEE, grid, cfg, 3);
  Outcome out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2000) continue;
    out.check(qmee[i].mean_seconds < mee[i].mean_seconds,
              "N=" + std::to_string(grid[i]) + " qmee " + fmt(qmee[i].mean_seconds) + " s < mee " +
                  fmt(mee[i].mean_seconds) + " s");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : mee) {
    const double x = std::log(static_cast<double>(r.n)), y = std::log(r.mean_seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(mee.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.check(slope >= 1.7 && slope <= 2.3, "mee log-log slope " + fmt(slope) + " in [1.7, 2.3]");
  return out;
}

// 4. Relative variation of the causality index under heavy-tailed noise.
Outcome rvr() {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Fig2;
  spec.runs = 50;
  spec.criteria = {Criterion::MSE, Criterion::QMEE};
  spec.alpha_grid = {2.0, 1.5, 1.0, 0.5};
  const auto curves = run_rvr_sweep(spec);
  Outcome out;
  std::map<Criterion, double> max_xi;
  for (const auto& c : curves) {
    std::string line = std::string(to_string(c.criterion)) + " xi:";
    double m = 0.0;
    for (const auto& p : c.points) {
      line += " " + fmt(p.alpha) + "=" + fmt(p.xi);
      m = std::max(m, p.xi);
    }
    max_xi[c.criterion] = m;
    out.check(c.points.front().alpha == 2.0 && c.points.front().xi == 0.0, line + " (reference exactly 0)");
  }
  out.check(max_xi[Criterion::MSE] >= 5.0 * max_xi[Criterion::QMEE],
            "max xi mse " + fmt(max_xi[Criterion::MSE]) + " >= 5 x max xi qmee " + fmt(max_xi[Criterion::QMEE]));
  return out;
}

// 5. Exhaustive properties.
Outcome properties() {
  Outcome out;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  {
    CriterionConfig cfg;
    cfg.epsilon = 0.0;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> e(1 + rng() % 300);
      const double scale = 0.1 + 5.0 * unit(rng);
      for (auto& v : e) v = scale * normal(rng);
      const double q = quantized_information_potential(e, cfg).estimate.ip;
      worst = std::max(worst, std::abs(q - information_potential(e, cfg.sigma).ip));
    }
    out.check(worst <= 1e-12, "eps=0 potential equivalence on 1000 vectors, max diff " + fmt(worst));
  }
  {
    SyntheticSpec synth;
    synth.kind = SyntheticKind::Regression;
    synth.noise = noise_for_case(NoiseCase::Case2);
    synth.n = 300;
    synth.seed = 5;
    const auto data = generate_regression(synth);
    const auto d = make_design(data.inputs, data.targets);
    CriterionConfig cfg;
    cfg.epsilon = 0.0;
    std::vector<Eigen::VectorXd> a, b;
    const auto ma = solve_fixed_point(d, cfg, Criterion::MEE, std::nullopt, [&](int, const Eigen::VectorXd& w) { a.push_back(w); });
    const auto mb = solve_fixed_point(d, cfg, Criterion::QMEE, std::nullopt, [&](int, const Eigen::VectorXd& w) { b.push_back(w); });
    double worst = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) worst = std::max(worst, (a[k] - b[k]).norm());
    out.check(worst <= 1e-10 && ma.iterations_used == mb.iterations_used,
              "mee vs qmee(eps=0) iterates: " + std::to_string(a.size()) + " steps, max diff " + fmt(worst));
  }
  {
    double worst = 0.0;
    const double sigma = 0.5, h = 1e-5;
    for (int t = 0; t < 100; ++t) {
      Eigen::MatrixXd X(20, 2);
      Eigen::VectorXd y(20);
      for (int i = 0; i < 20; ++i) {
        X(i, 0) = 4 * unit(rng) - 2;
        X(i, 1) = 4 * unit(rng) - 2;
        y(i) = 2 * X(i, 0) + X(i, 1) + 0.7 * normal(rng);
      }
      const auto d = make_design(X, y);
      const Eigen::Vector2d w(2 + 0.3 * normal(rng), 1 + 0.3 * normal(rng));
      const Eigen::VectorXd e = compute_residuals(d, w);
      const auto book = quantize(std::span<const double>(e.data(), 20), 0.4);
      auto ip = [&](const Eigen::Vector2d& v) {
        const Eigen::VectorXd r = compute_residuals(d, v);
        return quantized_information_potential(std::span<const double>(r.data(), 20), book, sigma).ip;
      };
      const Eigen::VectorXd g = qip_gradient(d, w, book, sigma);
      Eigen::Vector2d fd;
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d up = w, down = w;
        up(k) += h;
        down(k) -= h;
        fd(k) = (ip(up) - ip(down)) / (2 * h);
      }
      worst = std::max(worst, (g - fd).norm() / fd.norm());
    }
    out.check(worst < 1e-5, "gradient vs central differences on 100 instances, max rel err " + fmt(worst));
  }
  {
    bool ok = true;
    for (int t = 0; t < 1000 && ok; ++t) {
      std::vector<double> e(1 + rng() % 200);
      for (auto& v : e) v = 3.0 * normal(rng);
      std::size_t prev = e.size() + 1;
      for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
        const auto book = quantize(e, eps);
        double total = 0;
        for (auto c : book.counts) total += static_cast<double>(c);
        for (std::size_t i = 0; i < e.size(); ++i) {
          ok = ok && std::abs(e[i] - book.codewords[book.assignments[i]]) <= eps;
        }
        ok = ok && total == static_cast<double>(e.size()) && book.size() <= prev;
        prev = book.size();
      }
    }
    out.check(ok, "quantizer coverage, count conservation and monotone size on 1000 cases");
  }
  {
    SyntheticSpec synth;
    synth.kind = SyntheticKind::Regression;
    synth.noise = NoNoise{};
    synth.n = 500;
    synth.seed = 3;
    const auto data = generate_regression(synth);
    const auto d = make_design(data.inputs, data.targets);
    CriterionConfig cfg;
    double worst = 0.0;
    for (auto c : {Criterion::MSE, Criterion::MEE, Criterion::QMEE}) {
      worst = std::max(worst, (fit(d, cfg, c).coefficients - Eigen::Vector2d(2, 1)).norm());
    }
    out.check(worst <= 1e-8, "noiseless recovery by all three solvers, max error " + fmt(worst));
  }
  {
    double worst = INFINITY;
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 60 + rng() % 300;
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = normal(rng);
      y[0] = normal(rng);
      const double phi = 1.6 * unit(rng) - 0.8;
      for (std::size_t i = 1; i < n; ++i) y[i] = phi * y[i - 1] + 0.3 * unit(rng) * x[i - 1] + normal(rng);
      GcaConfig cfg;
      cfg.criterion = Criterion::MSE;
      cfg.p_max = 5;
      if (t % 2 == 0) {
        cfg.common_order = true;
      } else {
        cfg.order_rule = OrderRule::Fixed;
        cfg.fixed_order = 1 + static_cast<int>(rng() % 5);
      }
      const auto r = analyze_pair(TimeSeries("x", x), TimeSeries("y", y), cfg);
      worst = std::min({worst, r.f_xy, r.f_yx});
    }
    out.check(worst >= -1e-12, "mse index non-negativity on 200 nested pairs, min " + fmt(worst));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      std::vector<double> s(1 + rng() % 30);
      const double scale = 0.2 + 3.0 * unit(rng);
      for (auto& v : s) v = scale * normal(rng);
      const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      const double a = *lo - 10.0, b = *hi + 10.0, h = 1e-3;
      double integral = 0.0;
      double prev = parzen_density(a, s, 0.5);
      for (double x = a + h; x <= b; x += h) {
        const double cur = parzen_density(x, s, 0.5);
        integral += 0.5 * h * (prev + cur);
        prev = cur;
      }
      worst = std::max(worst, std::abs(integral - 1.0));
    }
    out.check(worst <= 1e-3, "parzen density integrates to 1 on 50 sample sets, max deviation " + fmt(worst));
  }
  return out;
}

// 6. Multichannel analysis on a chained X -> Y -> Z structure, through the CLI.
Outcome chained_channels() {
  Outcome out;
  const auto dir = fs::temp_directory_path() / "qgca_acceptance_chain";
  fs::create_directories(dir);
  int recovered = 0, shape_ok = 0;
  const int seeds = 100;
  for (int s = 1; s <= seeds; ++s) {
    SyntheticSpec first;
    first.kind = SyntheticKind::CausalPair;
    first.noise = noise_for_case(NoiseCase::Case1);
    first.seed = static_cast<std::uint64_t>(s);
    const auto [x, y] = generate_causal_pair(first);

    // Offset seed so the second link's noise is independent of the first.
    const auto psi = sample_noise(first.noise, y.size(), static_cast<std::uint64_t>(s) + 1'000'000);
    std::vector<double> z(y.size());
    z[0] = psi[0];
    for (std::size_t t = 1; t < z.size(); ++t) z[t] = y[t - 1] + psi[t];

    ChannelTable table;
    table.names = {"X", "Y", "Z"};
    table.columns = {{x.samples().begin(), x.samples().end()}, {y.samples().begin(), y.samples().end()}, z};
    const auto csv = dir / ("chain_" + std::to_string(s) + ".csv");
    write_csv(table, csv);

    std::ostringstream o, e;
    // Same model settings as the synthetic pair experiment.
    const int code = run_cli({"analyze", "--input", csv.string(), "--epsilon", "0.4", "--pmax", "10"}, o, e);
    fs::remove(csv);
    if (code != 0) continue;
    const auto doc = nlohmann::json::parse(o.str());
    std::map<std::pair<std::string, std::string>, double> f;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : doc["pairs"]) {
      const auto key = std::make_pair(p["from"].get<std::string>(), p["to"].get<std::string>());
      seen.insert(key);
      f[key] = p["f"].is_null() ? NAN : p["f"].get<double>();
    }
    if (doc["pairs"].size() == 6 && seen.size() == 6) ++shape_ok;
    if (f[{"X", "Y"}] > f[{"Y", "X"}] && f[{"Y", "Z"}] > f[{"Z", "Y"}]) ++recovered;
  }
  fs::remove_all(dir);
  out.check(shape_ok == seeds, "6 distinct directed indexes in " + std::to_string(shape_ok) + "/100 reports");
  out.check(recovered >= 95, "both planted links recovered in " + std::to_string(recovered) + "/100 seeds");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-6)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"regression RMSE", table1},     {"pairwise causality indexes", table2},
      {"solver timing vs N", timing},          {"relative variation under stable noise", rvr},
      {"property suite", properties},          {"three-channel chained analysis", chained_channels}};

  bool all = true;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o.check(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& d : o.details) std::cout << d << '\n';
    std::ostringstream line;
    line << "criterion " << id << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << " ("
         << fmt(secs) << " s)";
    std::cout << line.str() << '\n' << std::flush;
    lines.push_back(line.str());
    all = all && o.pass;
  }
  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << '\n';
  return all ? 0 : 1;
}
