#include "qgca/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "qgca/error.hpp"
#include "qgca/io.hpp"
#include "qgca/parallel.hpp"

namespace qgca {

namespace {

const Eigen::Vector2d kTrueWeights(2.0, 1.0);

std::uint64_t run_seed(const ExperimentSpec& spec, std::size_t run) {
  return spec.base_seed + static_cast<std::uint64_t>(run);
}

void summarize(CellResult& cell) {
  cell.failures = static_cast<std::size_t>(
      std::count_if(cell.runs.begin(), cell.runs.end(), [](const RunRecord& r) { return r.error.has_value(); }));
  for (const auto& name : cell.metric_names) {
    const auto v = cell.values(name);
    if (!v.empty()) cell.summary[name] = SummaryStats::compute(v);
  }
}

nlohmann::json stats_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"median", s.median},
          {"min", s.min},   {"max", s.max}, {"count", s.count}};
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  std::ofstream out;
  open_or_throw(out, path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

void write_run_rows(std::ostream& out, const std::vector<std::string>& metrics, const std::vector<RunRecord>& runs,
                    const std::string& prefix) {
  for (const auto& r : runs) {
    out << prefix << r.run << ',' << r.seed << ',' << (r.error ? "failed" : "ok");
    for (const auto& m : metrics) {
      out << ',';
      if (auto it = r.metrics.find(m); it != r.metrics.end()) out << format_number(it->second);
    }
    out << ',';
    if (r.error) {
      std::string msg = *r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << msg;
    }
    out << '\n';
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Table1: return "table1";
    case ExperimentKind::Table2: return "table2";
    case ExperimentKind::Fig1: return "fig1";
    case ExperimentKind::Fig2: return "fig2";
    case ExperimentKind::Custom: return "custom";
  }
  return "custom";
}

ExperimentKind parse_experiment(std::string_view text) {
  for (auto kind : {ExperimentKind::Table1, ExperimentKind::Table2, ExperimentKind::Fig1, ExperimentKind::Fig2,
                    ExperimentKind::Custom}) {
    if (text == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::InvalidParams, "unknown experiment '" + std::string(text) + "'");
}

std::string case_label(NoiseCase noise_case) {
  return "case" + std::to_string(static_cast<int>(noise_case));
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 40; k >= 10; --k) grid.push_back(k / 20.0);
  return grid;
}

void ExperimentSpec::validate() const {
  if (runs < 1) throw Error(ErrorCode::InvalidSpec, "runs must be at least 1");
  if (criteria.empty()) throw Error(ErrorCode::InvalidSpec, "at least one criterion is required");
  if ((experiment == ExperimentKind::Table1 || experiment == ExperimentKind::Table2) && cases.empty()) {
    throw Error(ErrorCode::InvalidSpec, "at least one noise case is required");
  }
  if (experiment == ExperimentKind::Fig1 && n_grid.empty()) {
    throw Error(ErrorCode::InvalidSpec, "timing experiment needs a non-empty N grid");
  }
  if (experiment == ExperimentKind::Fig2) {
    if (alpha_grid.empty()) throw Error(ErrorCode::InvalidSpec, "RVR sweep needs a non-empty alpha grid");
    for (double a : alpha_grid) {
      if (!(a > 0.0 && a <= 2.0)) throw Error(ErrorCode::InvalidSpec, "alpha grid values must lie in (0, 2]");
    }
    if (std::find(alpha_grid.begin(), alpha_grid.end(), 2.0) == alpha_grid.end()) {
      throw Error(ErrorCode::InvalidSpec, "alpha grid must contain the reference value 2.0");
    }
  }
  gca.validate();
}

SummaryStats SummaryStats::compute(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySample, "summary of an empty sample");
  SummaryStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

std::vector<double> CellResult::values(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : runs) {
    if (r.error) continue;
    if (auto it = r.metrics.find(metric); it != r.metrics.end() && !std::isnan(it->second)) {
      out.push_back(it->second);
    }
  }
  return out;
}

const CellResult& ExperimentResult::cell(std::string_view case_name, Criterion criterion) const {
  for (const auto& c : cells) {
    if (c.case_name == case_name && c.criterion == criterion) return c;
  }
  throw Error(ErrorCode::InvalidParams, "no result cell for " + std::string(case_name) + "/" +
                                            std::string(to_string(criterion)));
}

double rmse(std::span<const double> w_true, std::span<const double> w_est) {
  if (w_true.size() != w_est.size() || w_true.empty()) {
    throw Error(ErrorCode::LengthMismatch, "RMSE needs two non-empty vectors of equal length");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < w_true.size(); ++i) ss += (w_true[i] - w_est[i]) * (w_true[i] - w_est[i]);
  return std::sqrt(ss / static_cast<double>(w_true.size()));
}

ExperimentResult run_table1(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.experiment = ExperimentKind::Table1;
  const std::vector<std::string> metrics{"rmse", "w1", "w2", "iterations"};

  for (NoiseCase noise_case : spec.cases) {
    const auto runs = static_cast<std::size_t>(spec.runs);
    // records[run][criterion]
    std::vector<std::vector<RunRecord>> records(runs, std::vector<RunRecord>(spec.criteria.size()));
    parallel_for(runs, [&](std::size_t run) {
      SyntheticSpec synth;
      synth.kind = SyntheticKind::Regression;
      synth.true_weights = {kTrueWeights(0), kTrueWeights(1)};
      synth.noise = noise_for_case(noise_case);
      synth.n = spec.n;
      synth.seed = run_seed(spec, run);
      const auto data = generate_regression(synth);
      const auto design = make_design(data.inputs, data.targets);
      for (std::size_t c = 0; c < spec.criteria.size(); ++c) {
        auto& rec = records[run][c];
        rec.run = run;
        rec.seed = synth.seed;
        try {
          const auto model = fit(design, spec.gca.criterion_config, spec.criteria[c]);
          const std::vector<double> w(model.coefficients.data(), model.coefficients.data() + 2);
          rec.metrics["rmse"] = rmse(synth.true_weights, w);
          rec.metrics["w1"] = w[0];
          rec.metrics["w2"] = w[1];
          rec.metrics["iterations"] = model.iterations_used;
        } catch (const Error& err) {
          rec.error = err.what();
        }
      }
    });

    for (std::size_t c = 0; c < spec.criteria.size(); ++c) {
      CellResult cell;
      cell.case_name = case_label(noise_case);
      cell.criterion = spec.criteria[c];
      cell.metric_names = metrics;
      for (std::size_t run = 0; run < runs; ++run) cell.runs.push_back(records[run][c]);
      summarize(cell);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

ExperimentResult run_table2(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.experiment = ExperimentKind::Table2;
  const std::vector<std::string> metrics{"f_xy", "f_yx", "rho", "p1", "p2", "p3", "p4"};

  for (NoiseCase noise_case : spec.cases) {
    const auto runs = static_cast<std::size_t>(spec.runs);
    std::vector<std::vector<RunRecord>> records(runs, std::vector<RunRecord>(spec.criteria.size()));
    parallel_for(runs, [&](std::size_t run) {
      SyntheticSpec synth;
      synth.kind = SyntheticKind::CausalPair;
      synth.noise = noise_for_case(noise_case);
      synth.n = spec.n;
      synth.seed = run_seed(spec, run);
      const auto [x, y] = generate_causal_pair(synth);
      for (std::size_t c = 0; c < spec.criteria.size(); ++c) {
        auto& rec = records[run][c];
        rec.run = run;
        rec.seed = synth.seed;
        GcaConfig config = spec.gca;
        config.criterion = spec.criteria[c];
        try {
          const auto report = analyze_pair(x, y, config);
          rec.metrics["f_xy"] = report.f_xy;
          rec.metrics["f_yx"] = report.f_yx;
          rec.metrics["rho"] = report.rho;
          rec.metrics["p1"] = report.orders.p1;
          rec.metrics["p2"] = report.orders.p2;
          rec.metrics["p3"] = report.orders.p3;
          rec.metrics["p4"] = report.orders.p4;
        } catch (const Error& err) {
          rec.error = err.what();
        }
      }
    });

    for (std::size_t c = 0; c < spec.criteria.size(); ++c) {
      CellResult cell;
      cell.case_name = case_label(noise_case);
      cell.criterion = spec.criteria[c];
      cell.metric_names = metrics;
      for (std::size_t run = 0; run < runs; ++run) cell.runs.push_back(records[run][c]);
      summarize(cell);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::vector<RvrCurve> run_rvr_sweep(const ExperimentSpec& spec) {
  ExperimentSpec checked = spec;
  checked.experiment = ExperimentKind::Fig2;
  checked.validate();

  const auto runs = static_cast<std::size_t>(spec.runs);
  const std::size_t n_alpha = spec.alpha_grid.size();
  std::vector<RvrCurve> curves(spec.criteria.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    curves[c].criterion = spec.criteria[c];
    curves[c].runs.assign(n_alpha, std::vector<RunRecord>(runs));
  }

  parallel_for(n_alpha * runs, [&](std::size_t task) {
    const std::size_t a = task / runs;
    const std::size_t run = task % runs;
    SyntheticSpec synth;
    synth.kind = SyntheticKind::CausalPair;
    synth.noise = StableParams{spec.alpha_grid[a], 0.0, 0.4, 0.0};
    synth.n = spec.n;
    synth.seed = run_seed(spec, run);
    const auto [x, y] = generate_causal_pair(synth);
    for (std::size_t c = 0; c < curves.size(); ++c) {
      auto& rec = curves[c].runs[a][run];
      rec.run = run;
      rec.seed = synth.seed;
      GcaConfig config = spec.gca;
      config.criterion = spec.criteria[c];
      try {
        const auto report = analyze_pair(x, y, config);
        rec.metrics["alpha"] = spec.alpha_grid[a];
        rec.metrics["f_xy"] = report.f_xy;
        rec.metrics["f_yx"] = report.f_yx;
      } catch (const Error& err) {
        rec.error = err.what();
      }
    }
  });

  const auto ref = static_cast<std::size_t>(
      std::find(spec.alpha_grid.begin(), spec.alpha_grid.end(), 2.0) - spec.alpha_grid.begin());
  for (auto& curve : curves) {
    for (std::size_t a = 0; a < n_alpha; ++a) {
      RvrPoint point;
      point.alpha = spec.alpha_grid[a];
      double sum = 0.0;
      for (const auto& r : curve.runs[a]) {
        if (r.error) {
          ++point.failures;
        } else {
          sum += r.metrics.at("f_xy");
          ++point.runs_ok;
        }
      }
      point.mean_f_xy = point.runs_ok > 0 ? sum / static_cast<double>(point.runs_ok)
                                          : std::numeric_limits<double>::quiet_NaN();
      curve.points.push_back(point);
    }
    const double reference = curve.points[ref].mean_f_xy;
    if (reference == 0.0 || !std::isfinite(reference)) {
      throw Error(ErrorCode::ReferenceUndefined, "mean F(X->Y) at alpha = 2 is zero or undefined for " +
                                                     std::string(to_string(curve.criterion)));
    }
    for (auto& p : curve.points) p.xi = std::abs((p.mean_f_xy - reference) / reference);
    curve.points[ref].xi = 0.0;
  }
  return curves;
}

std::vector<TimingRow> run_fig1_timing(const ExperimentSpec& spec) {
  ExperimentSpec checked = spec;
  checked.experiment = ExperimentKind::Fig1;
  checked.validate();
  std::vector<TimingRow> rows;
  for (Criterion c : spec.criteria) {
    auto part = benchmark_solver(c, spec.n_grid, spec.gca.criterion_config, spec.timing_repeats, spec.base_seed);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["experiment"] = to_string(spec.experiment);
  j["runs"] = spec.runs;
  j["base_seed"] = spec.base_seed;
  j["n"] = spec.n;
  auto& cases = j["cases"] = nlohmann::json::array();
  for (auto c : spec.cases) cases.push_back(case_label(c));
  auto& criteria = j["criteria"] = nlohmann::json::array();
  for (auto c : spec.criteria) criteria.push_back(to_string(c));
  if (spec.experiment == ExperimentKind::Fig1) {
    j["n_grid"] = spec.n_grid;
    j["timing_repeats"] = spec.timing_repeats;
  }
  if (spec.experiment == ExperimentKind::Fig2) j["alpha_grid"] = spec.alpha_grid;
  j["config"] = config_json(spec.gca);
  return j;
}

nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  nlohmann::json doc;
  doc["spec"] = to_json(spec);
  auto& cells = doc["cells"] = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    nlohmann::json c;
    c["case"] = cell.case_name;
    c["criterion"] = to_string(cell.criterion);
    c["runs"] = cell.runs.size();
    c["failures"] = cell.failures;
    for (const auto& [name, stats] : cell.summary) c["metrics"][name] = stats_json(stats);
    cells.push_back(std::move(c));
  }
  return doc;
}

nlohmann::json summary_json(const ExperimentSpec& spec, const std::vector<RvrCurve>& curves) {
  nlohmann::json doc;
  doc["spec"] = to_json(spec);
  auto& out = doc["curves"] = nlohmann::json::array();
  for (const auto& curve : curves) {
    nlohmann::json c;
    c["criterion"] = to_string(curve.criterion);
    for (const auto& p : curve.points) {
      c["points"].push_back({{"alpha", p.alpha},
                             {"mean_f_xy", p.mean_f_xy},
                             {"xi", p.xi},
                             {"runs_ok", p.runs_ok},
                             {"failures", p.failures}});
    }
    out.push_back(std::move(c));
  }
  return doc;
}

nlohmann::json summary_json(const ExperimentSpec& spec, const std::vector<TimingRow>& rows) {
  nlohmann::json doc;
  doc["spec"] = to_json(spec);
  auto& out = doc["timings"] = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"criterion", to_string(r.criterion)},
                   {"n", r.n},
                   {"repeats", r.repeats},
                   {"mean_seconds", r.mean_seconds},
                   {"min_seconds", r.min_seconds},
                   {"mean_iterations", r.mean_iterations}});
  }
  return doc;
}

std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const ExperimentResult& result,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::string experiment(to_string(result.experiment));
  for (const auto& cell : result.cells) {
    const auto path = dir / (experiment + "_" + cell.case_name + "_" + std::string(to_string(cell.criterion)) + ".csv");
    std::ofstream out;
    open_or_throw(out, path);
    out << "run,seed,status";
    for (const auto& m : cell.metric_names) out << ',' << m;
    out << ",error\n";
    write_run_rows(out, cell.metric_names, cell.runs, "");
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  const auto summary = dir / (experiment + "_summary.json");
  write_json(summary_json(spec, result), summary);
  written.push_back(summary);
  return written;
}

std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const std::vector<RvrCurve>& curves,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::vector<std::string> metrics{"f_xy", "f_yx"};
  for (const auto& curve : curves) {
    const auto path = dir / ("fig2_stable_" + std::string(to_string(curve.criterion)) + ".csv");
    std::ofstream out;
    open_or_throw(out, path);
    out << "alpha,run,seed,status,f_xy,f_yx,error\n";
    for (std::size_t a = 0; a < curve.points.size(); ++a) {
      write_run_rows(out, metrics, curve.runs[a], format_number(curve.points[a].alpha) + ",");
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  const auto rvr = dir / "fig2_rvr.csv";
  {
    std::ofstream out;
    open_or_throw(out, rvr);
    out << "criterion,alpha,mean_f_xy,xi,runs_ok,failures\n";
    for (const auto& curve : curves) {
      for (const auto& p : curve.points) {
        out << to_string(curve.criterion) << ',' << format_number(p.alpha) << ',' << format_number(p.mean_f_xy) << ','
            << format_number(p.xi) << ',' << p.runs_ok << ',' << p.failures << '\n';
      }
    }
    written.push_back(rvr);
  }
  const auto summary = dir / "fig2_summary.json";
  write_json(summary_json(spec, curves), summary);
  written.push_back(summary);
  return written;
}

std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const std::vector<TimingRow>& rows,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "fig1_timing.csv";
  {
    std::ofstream out;
    open_or_throw(out, path);
    out << "criterion,n,repeats,mean_seconds,min_seconds,mean_iterations\n";
    for (const auto& r : rows) {
      out << to_string(r.criterion) << ',' << r.n << ',' << r.repeats << ',' << format_number(r.mean_seconds) << ','
          << format_number(r.min_seconds) << ',' << format_number(r.mean_iterations) << '\n';
    }
  }
  const auto summary = dir / "fig1_summary.json";
  write_json(summary_json(spec, rows), summary);
  return {path, summary};
}

}  // namespace qgca
