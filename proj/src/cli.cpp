#include "qgca/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "qgca/error.hpp"
#include "qgca/experiment.hpp"
#include "qgca/gca.hpp"
#include "qgca/io.hpp"

namespace qgca {

namespace {

struct ModelFlags {
  std::string criterion = "qmee";
  double sigma = 0.5;
  double epsilon = 0.4;
  int iters = 100;
  double tol = 1e-8;
  double ridge = 1e-10;
  int p_max = 10;
  int order = 0;
  std::string bic_variant = "potential_based";
  bool common_order = false;
};

void add_model_flags(CLI::App& cmd, ModelFlags& f) {
  cmd.add_option("--sigma", f.sigma, "Kernel bandwidth sigma")->capture_default_str();
  cmd.add_option("--epsilon", f.epsilon, "Quantization threshold epsilon (0 = unquantized MEE)")
      ->capture_default_str();
  cmd.add_option("--iters", f.iters, "Fixed-point iteration cap K")->capture_default_str();
  cmd.add_option("--tol", f.tol, "Stop when the weight increment norm drops below tol (0 = always run K)")
      ->capture_default_str();
  cmd.add_option("--ridge", f.ridge, "Relative ridge used only for singular normal equations")
      ->capture_default_str();
  cmd.add_option("--pmax", f.p_max, "Largest candidate model order for BIC")->capture_default_str();
  cmd.add_option("--order", f.order, "Use this fixed order for every model instead of BIC (0 = BIC)")
      ->capture_default_str();
  cmd.add_option("--bic-variant", f.bic_variant, "BIC entropy term: potential_based (N*H2) or literal (N*log H2)")
      ->check(CLI::IsMember({"potential_based", "literal"}))
      ->capture_default_str();
  cmd.add_flag("--common-order", f.common_order, "Refit all four models at the largest selected order");
}

GcaConfig make_config(const ModelFlags& f) {
  GcaConfig config;
  config.criterion = parse_criterion(f.criterion);
  config.criterion_config.sigma = f.sigma;
  config.criterion_config.epsilon = f.epsilon;
  config.criterion_config.max_iters = f.iters;
  config.criterion_config.tol = f.tol;
  config.criterion_config.ridge = f.ridge;
  config.p_max = f.p_max;
  if (f.order > 0) {
    config.order_rule = OrderRule::Fixed;
    config.fixed_order = f.order;
  }
  config.bic_variant = parse_bic_variant(f.bic_variant);
  config.common_order = f.common_order;
  config.validate();
  return config;
}

std::vector<Criterion> parse_criteria(const std::vector<std::string>& names) {
  std::vector<Criterion> out;
  for (const auto& n : names) out.push_back(parse_criterion(n));
  return out;
}

std::vector<NoiseCase> parse_cases(const std::string& text) {
  if (text == "all") return {NoiseCase::Case1, NoiseCase::Case2, NoiseCase::Case3};
  int number = 0;
  try {
    number = std::stoi(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidParams, "noise case must be 1, 2, 3 or all");
  }
  return {parse_noise_case(number)};
}

void print_cells(std::ostream& out, const ExperimentResult& result) {
  for (const auto& cell : result.cells) {
    out << cell.case_name << ' ' << to_string(cell.criterion) << " (failures " << cell.failures << ")";
    for (const auto& name : cell.metric_names) {
      if (auto it = cell.summary.find(name); it != cell.summary.end()) {
        out << "  " << name << " " << format_number(it->second.mean) << " +- " << format_number(it->second.std);
      }
    }
    out << '\n';
  }
}

void print_paths(std::ostream& out, const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) out << "wrote " << p.string() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Granger causality analysis with MSE, MEE and quantized-MEE model identification", "qgca"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Pairwise causality indexes for every channel of a CSV file");
  ModelFlags analyze_flags;
  analyze_flags.epsilon = 0.05;
  analyze_flags.p_max = 20;
  std::string input;
  std::string output = "-";
  std::string format;
  bool center = false;
  analyze->add_option("--input", input, "CSV file: header of channel names, numeric rows, '#' comments")
      ->required();
  analyze->add_option("--output", output, "Report path ('-' for stdout)")->capture_default_str();
  analyze->add_option("--format", format, "Report format json|csv (default: from the output extension, else json)")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--criterion", analyze_flags.criterion, "mse | mee | qmee")
      ->check(CLI::IsMember({"mse", "mee", "qmee"}))
      ->capture_default_str();
  add_model_flags(*analyze, analyze_flags);
  analyze->add_flag("--center", center, "Subtract each channel's mean before embedding");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo experiments on synthetic data");
  ModelFlags sim_flags;
  std::string experiment;
  std::string noise_case = "all";
  int runs = 100;
  std::uint64_t seed = 1;
  std::size_t n = 500;
  std::vector<std::string> criteria{"mse", "mee", "qmee"};
  std::vector<double> alphas;
  std::string outdir = "results";
  simulate->add_option("--experiment", experiment, "table1 | table2 | fig1 | fig2")
      ->check(CLI::IsMember({"table1", "table2", "fig1", "fig2"}))
      ->required();
  simulate->add_option("--case", noise_case, "Noise case 1, 2, 3 or all (table1/table2)")->capture_default_str();
  simulate->add_option("--runs", runs, "Monte-Carlo runs (fig2 uses 50 when not given)")->capture_default_str();
  simulate->add_option("--seed", seed, "Base seed; run k uses seed + k")->capture_default_str();
  simulate->add_option("--n", n, "Samples per run")->capture_default_str();
  simulate->add_option("--criteria", criteria, "Criteria to compare")->delimiter(',')->capture_default_str();
  simulate->add_option("--alphas", alphas, "Stable exponents for fig2 (default 2.0 down to 0.5 step 0.05)")
      ->delimiter(',');
  simulate->add_option("--outdir", outdir, "Directory for CSV/JSON results")->capture_default_str();
  add_model_flags(*simulate, sim_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "Solver wall-clock time against sample size");
  ModelFlags bench_flags;
  bench_flags.iters = 10;
  bench_flags.tol = 0.0;
  std::size_t n_min = 500;
  std::size_t n_max = 8000;
  int repeats = 3;
  std::uint64_t bench_seed = 1;
  std::vector<std::string> bench_criteria{"mee", "qmee"};
  std::string bench_outdir = "results";
  bench->add_option("--nmin", n_min, "Smallest sample size")->capture_default_str();
  bench->add_option("--nmax", n_max, "Largest sample size (grid doubles from nmin)")->capture_default_str();
  bench->add_option("--repeats", repeats, "Timed solves per grid point")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
  bench->add_option("--criteria", bench_criteria, "Criteria to time")->delimiter(',')->capture_default_str();
  bench->add_option("--outdir", bench_outdir, "Directory for CSV/JSON results")->capture_default_str();
  add_model_flags(*bench, bench_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (analyze->parsed()) {
      const auto config = make_config(analyze_flags);
      const auto table = parse_csv(input);
      if (table.names.size() < 2) throw Error(ErrorCode::InvalidParams, "analysis needs at least 2 channels");
      const auto channels = table.to_series(center);
      const auto analysis = analyze_channels(channels, config);
      nlohmann::json extra{{"center", center}, {"input", input}};
      if (table.sample_rate) extra["sample_rate"] = *table.sample_rate;

      ReportFormat fmt = ReportFormat::Json;
      if (!format.empty()) {
        fmt = parse_report_format(format);
      } else if (output != "-" && std::filesystem::path(output).extension() == ".csv") {
        fmt = ReportFormat::Csv;
      }
      if (output == "-") {
        if (analysis.pairs.empty()) throw Error(ErrorCode::InvalidParams, "no causality pairs to report");
        out << (fmt == ReportFormat::Json ? report_json(analysis, config, extra).dump(2) + "\n"
                                          : report_csv(analysis, config));
      } else {
        emit_report(analysis, config, fmt, output, extra);
        out << "wrote " << output << '\n';
      }
      bool any_failed = false;
      for (const auto& p : analysis.pairs) {
        if (p.error) {
          err << "warning: " << analysis.names[p.from] << " -> " << analysis.names[p.to] << ": " << *p.error << '\n';
          any_failed = true;
        }
      }
      return any_failed ? 1 : 0;
    }

    if (simulate->parsed()) {
      ExperimentSpec spec;
      spec.experiment = parse_experiment(experiment);
      spec.runs = runs;
      spec.base_seed = seed;
      spec.n = n;
      spec.criteria = parse_criteria(criteria);
      spec.cases = parse_cases(noise_case);
      spec.gca = make_config(sim_flags);
      switch (spec.experiment) {
        case ExperimentKind::Table1: {
          const auto result = run_table1(spec);
          print_cells(out, result);
          print_paths(out, write_results(spec, result, outdir));
          break;
        }
        case ExperimentKind::Table2: {
          const auto result = run_table2(spec);
          print_cells(out, result);
          print_paths(out, write_results(spec, result, outdir));
          break;
        }
        case ExperimentKind::Fig2: {
          if (simulate->count("--runs") == 0) spec.runs = 50;
          spec.alpha_grid = alphas.empty() ? default_alpha_grid() : alphas;
          const auto curves = run_rvr_sweep(spec);
          for (const auto& c : curves) {
            out << to_string(c.criterion) << ':';
            for (const auto& p : c.points) out << ' ' << format_number(p.alpha) << '=' << format_number(p.xi);
            out << '\n';
          }
          print_paths(out, write_results(spec, curves, outdir));
          break;
        }
        case ExperimentKind::Fig1: {
          spec.n_grid.clear();
          for (std::size_t v = n; v <= 8000; v *= 2) spec.n_grid.push_back(v);
          const auto rows = run_fig1_timing(spec);
          for (const auto& r : rows) {
            out << to_string(r.criterion) << " N=" << r.n << " " << format_number(r.mean_seconds) << " s\n";
          }
          print_paths(out, write_results(spec, rows, outdir));
          break;
        }
        case ExperimentKind::Custom: break;
      }
      return 0;
    }

    if (bench->parsed()) {
      if (n_min < 2 || n_max < n_min) throw Error(ErrorCode::InvalidParams, "bench needs 2 <= nmin <= nmax");
      ExperimentSpec spec;
      spec.experiment = ExperimentKind::Fig1;
      spec.base_seed = bench_seed;
      spec.criteria = parse_criteria(bench_criteria);
      spec.timing_repeats = repeats;
      spec.gca = make_config(bench_flags);
      spec.n_grid.clear();
      for (std::size_t v = n_min; v <= n_max; v *= 2) spec.n_grid.push_back(v);
      const auto rows = run_fig1_timing(spec);
      for (const auto& r : rows) {
        out << to_string(r.criterion) << " N=" << r.n << " mean " << format_number(r.mean_seconds) << " s\n";
      }
      print_paths(out, write_results(spec, rows, bench_outdir));
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qgca
