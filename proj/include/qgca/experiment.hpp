#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qgca/entropy.hpp"
#include "qgca/gca.hpp"
#include "qgca/noise.hpp"

namespace qgca {

enum class ExperimentKind { Table1, Table2, Fig1, Fig2, Custom };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment(std::string_view text);
std::string case_label(NoiseCase noise_case);

/// Monte-Carlo experiment description. Run k uses seed base_seed + k.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Table1;
  int runs = 100;
  std::uint64_t base_seed = 1;
  std::vector<NoiseCase> cases{NoiseCase::Case1, NoiseCase::Case2, NoiseCase::Case3};
  std::vector<Criterion> criteria{Criterion::MSE, Criterion::MEE, Criterion::QMEE};
  std::size_t n = 500;
  std::vector<std::size_t> n_grid{500, 1000, 2000, 4000, 8000};
  std::vector<double> alpha_grid;
  GcaConfig gca;
  int timing_repeats = 3;

  void validate() const;
};

/// Default stable-exponent sweep: 2.0 down to 0.5 in steps of 0.05.
std::vector<double> default_alpha_grid();

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  ///< Sample standard deviation (n - 1); 0 for a single value.
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  static SummaryStats compute(std::span<const double> values);
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;
  std::map<std::string, double> metrics;
};

/// All runs of one (noise case, criterion) combination.
struct CellResult {
  std::string case_name;
  Criterion criterion = Criterion::MSE;
  std::vector<std::string> metric_names;
  std::vector<RunRecord> runs;
  std::size_t failures = 0;
  std::map<std::string, SummaryStats> summary;

  std::vector<double> values(const std::string& metric) const;
};

struct ExperimentResult {
  ExperimentKind experiment = ExperimentKind::Custom;
  std::vector<CellResult> cells;

  const CellResult& cell(std::string_view case_name, Criterion criterion) const;
};

/// sqrt(|w_true - w_est|^2 / d).
double rmse(std::span<const double> w_true, std::span<const double> w_est);

/// Regression benchmark: RMSE of each criterion's estimate of w* = [2, 1].
ExperimentResult run_table1(const ExperimentSpec& spec);

/// Causal-pair benchmark: f_xy, f_yx and rho per criterion.
ExperimentResult run_table2(const ExperimentSpec& spec);

struct RvrPoint {
  double alpha = 2.0;
  double mean_f_xy = 0.0;
  double xi = 0.0;
  std::size_t runs_ok = 0;
  std::size_t failures = 0;
};

struct RvrCurve {
  Criterion criterion = Criterion::MSE;
  std::vector<RvrPoint> points;
  std::vector<std::vector<RunRecord>> runs;  ///< runs[a] holds the per-run records at alpha_grid[a].
};

/// Relative variation of mean F(X->Y) under stable noise [alpha, 0, 0.4, 0],
/// referenced to alpha = 2.
std::vector<RvrCurve> run_rvr_sweep(const ExperimentSpec& spec);

/// Solver timings for each criterion over spec.n_grid, serial.
std::vector<TimingRow> run_fig1_timing(const ExperimentSpec& spec);

nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentSpec& spec, const std::vector<RvrCurve>& curves);
nlohmann::json summary_json(const ExperimentSpec& spec, const std::vector<TimingRow>& rows);

/// Writes <experiment>_<case>_<criterion>.csv per cell plus <experiment>_summary.json.
/// Returns the paths written.
std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const ExperimentResult& result,
                                                 const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const std::vector<RvrCurve>& curves,
                                                 const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec, const std::vector<TimingRow>& rows,
                                                 const std::filesystem::path& dir);

}  // namespace qgca
