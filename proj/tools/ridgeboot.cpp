#include "ridgeboot/csv_io.hpp"
#include "ridgeboot/errors.hpp"
#include "ridgeboot/harness.hpp"
#include "ridgeboot/resampling.hpp"
#include "ridgeboot/suites.hpp"
#include "ridgeboot/tuning.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace ridgeboot;

namespace {

struct CvFlags {
  double grid_min = CvGridSpec{}.min_factor;
  double grid_max = CvGridSpec{}.max_factor;
  std::size_t grid_size = CvGridSpec{}.size;
  std::size_t folds = 5;

  void attach(CLI::App& app) {
    app.add_option("--cv-grid-min", grid_min, "Smallest CV penalty as a multiple of n");
    app.add_option("--cv-grid-max", grid_max, "Largest CV penalty as a multiple of n");
    app.add_option("--cv-grid-size", grid_size, "Number of log-spaced CV penalties");
    app.add_option("--cv-folds", folds, "Number of CV folds");
  }
  CvGridSpec spec() const { return {grid_min, grid_max, grid_size}; }
};

Vector parse_contrast(const std::string& text, const Matrix& X) {
  if (text.rfind("row:", 0) == 0) {
    std::size_t row = 0;
    try {
      std::size_t used = 0;
      row = std::stoul(text.substr(4), &used);
      if (used != text.size() - 4) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InputError("contrast row index must be a nonnegative integer");
    }
    if (row >= static_cast<std::size_t>(X.rows())) throw InputError("contrast row out of range");
    return X.row(static_cast<Eigen::Index>(row)).transpose();
  }
  if (text.rfind("file:", 0) == 0) {
    Vector c = read_vector_csv(text.substr(5));
    if (c.size() != X.cols()) throw InputError("contrast length must equal the column count");
    return c;
  }
  throw InputError("contrast must be row:<i> or file:<path>");
}

PenaltyPlan cv_plan(const Dataset& data, const CvFlags& flags, std::uint64_t seed) {
  Rng rng(seed_split(seed, {0}));
  return cv_select(data, make_cv_grid(static_cast<std::size_t>(data.n()), flags.spec()),
                   flags.folds, rng);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual bootstrap inference for ridge regression contrasts"};
  app.require_subcommand(1);

  // ci
  auto* ci = app.add_subcommand("ci", "Confidence interval for a contrast c'beta");
  std::string design_path;
  std::string response_path;
  std::string contrast_text;
  std::string method_text = "ridge_rb";
  double level = 0.9;
  std::size_t B = 1000;
  std::optional<double> rho;
  std::optional<double> pilot_rho;
  std::uint64_t seed = 1;
  CvFlags ci_cv;
  ci->add_option("--design", design_path, "Design matrix CSV")->required();
  ci->add_option("--response", response_path, "Response vector CSV")->required();
  ci->add_option("--contrast", contrast_text, "row:<i> or file:<c.csv>")->required();
  ci->add_option("--method", method_text, "ridge_rb, normal or ols_rb");
  ci->add_option("--level", level, "Nominal coverage");
  ci->add_option("--B", B, "Bootstrap replicates");
  ci->add_option("--rho", rho, "Inference penalty (cross-validated when absent)");
  ci->add_option("--pilot-rho", pilot_rho, "Pilot penalty (cross-validated when absent)");
  ci->add_option("--seed", seed, "Master seed");
  ci_cv.attach(*ci);

  // cv
  auto* cv = app.add_subcommand("cv", "Cross-validated penalty selection");
  CvFlags cv_flags;
  cv->add_option("--design", design_path, "Design matrix CSV")->required();
  cv->add_option("--response", response_path, "Response vector CSV")->required();
  cv->add_option("--seed", seed, "Master seed");
  cv_flags.attach(*cv);

  // simulate and generate share the study flags
  std::string config_path;
  std::string preset_name;
  std::string scale_text = "desk";
  std::optional<std::uint64_t> sim_seed;
  std::optional<unsigned> threads;
  bool cv_per_design = false;
  std::optional<double> eta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> p;
  std::optional<std::size_t> N1;
  std::optional<std::size_t> N2;
  std::optional<std::size_t> sim_B;
  std::string out_path;
  const auto study_flags = [&](CLI::App* sub) {
    auto* cfg = sub->add_option("--config", config_path, "Experiment config file");
    auto* pre = sub->add_option("--preset", preset_name, "setting1, setting2, setting3 or setting4");
    cfg->excludes(pre);
    sub->add_option("--scale", scale_text, "desk or full (with --preset)");
    sub->add_option("--seed", sim_seed, "Master seed (overrides the config)");
    sub->add_option("--eta", eta, "Eigenvalue decay exponent");
    sub->add_option("--n", n, "Rows");
    sub->add_option("--p", p, "Columns");
  };
  auto* simulate = app.add_subcommand("simulate", "Run the coverage and width study");
  study_flags(simulate);
  simulate->add_option("--out", out_path, "Results CSV (stdout when absent)");
  simulate->add_option("--threads", threads, "Worker threads");
  simulate->add_flag("--cv-per-design", cv_per_design, "Select one penalty per design");
  simulate->add_option("--N1", N1, "Designs");
  simulate->add_option("--N2", N2, "Responses per design");
  simulate->add_option("--B", sim_B, "Bootstrap replicates");

  auto* generate = app.add_subcommand("generate", "Export one simulated dataset as CSV");
  std::size_t design_index = 0;
  std::size_t response_index = 0;
  std::string out_dir = ".";
  study_flags(generate);
  generate->add_option("--design-index", design_index, "Design index");
  generate->add_option("--response-index", response_index, "Response index");
  generate->add_option("--out-dir", out_dir, "Directory for X.csv, Y.csv and beta.csv");

  // check
  auto* check = app.add_subcommand("check", "Run a verification suite");
  std::string suite;
  std::string suite_config;
  std::string report_path;
  std::uint64_t check_seed = 1;
  check->add_option("--suite", suite,
                    "theorem1, mspe-link, rates, design-events, theorem4 or appendix")
      ->required();
  check->add_option("--config", suite_config, "Suite config file");
  check->add_option("--out", report_path, "Report CSV (stdout when absent)");
  check->add_option("--seed", check_seed, "Master seed");
  check->add_option("--threads", threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  const auto study_config = [&]() {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = read_config(config_path);
    } else if (!preset_name.empty()) {
      cfg = preset(preset_name, parse_scale(scale_text));
    } else {
      throw ConfigError("one of --config or --preset is required");
    }
    if (sim_seed) cfg.seed = *sim_seed;
    if (threads) cfg.threads = *threads;
    if (cv_per_design) cfg.cv_per_design = true;
    if (eta) cfg.eta = *eta;
    if (n) cfg.n = *n;
    if (p) cfg.p = *p;
    if (N1) cfg.N1 = *N1;
    if (N2) cfg.N2 = *N2;
    if (sim_B) cfg.B = *sim_B;
    cfg.validate();
    return cfg;
  };

  try {
    if (*ci) {
      const Dataset data = Dataset::observed(read_matrix_csv(design_path),
                                             read_vector_csv(response_path));
      data.validate();
      const Vector c = parse_contrast(contrast_text, data.X);
      const CiMethod method = parse_ci_method(method_text);
      if (method == CiMethod::oracle) throw InputError("the oracle interval needs simulation mode");
      double r = rho.value_or(0.0);
      double pr = pilot_rho.value_or(0.0);
      if ((method != CiMethod::ols_rb && !rho) || (method == CiMethod::ridge_rb && !pilot_rho)) {
        const PenaltyPlan plan = cv_plan(data, ci_cv, seed);
        if (!rho) r = plan.inference_rho;
        if (!pilot_rho) pr = plan.pilot_rho;
      }
      Rng rng(seed_split(seed, {1}));
      const SpectralRidge model(data.X);
      ConfidenceInterval result;
      switch (method) {
        case CiMethod::ridge_rb:
          result = ci_ridge_rb(model, data.Y, c, r, pr, B, level, rng);
          break;
        case CiMethod::normal:
          result = ci_normal(model, data.Y, c, r, level);
          break;
        default:
          result = ci_ols_rb(model, data.Y, c, B, level, rng);
          break;
      }
      std::cout << "method,level,lower,upper,estimate\n"
                << to_string(result.method) << ',' << format_double(result.level) << ','
                << format_double(result.lower) << ',' << format_double(result.upper) << ','
                << format_double(result.estimate) << '\n';
    } else if (*cv) {
      const Dataset data = Dataset::observed(read_matrix_csv(design_path),
                                             read_vector_csv(response_path));
      data.validate();
      const PenaltyPlan plan = cv_plan(data, cv_flags, seed);
      std::cout << "# r_hat=" << format_double(plan.r_hat)
                << " pilot_rho=" << format_double(plan.pilot_rho)
                << " inference_rho=" << format_double(plan.inference_rho) << '\n'
                << "r,score\n";
      for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        std::cout << format_double(plan.grid[i]) << ',' << format_double(plan.cv_scores[i])
                  << '\n';
      }
    } else if (*simulate) {
      const ExperimentConfig cfg = study_config();
      const std::vector<Table1Result> results = {run_table1(cfg)};
      if (out_path.empty()) {
        std::cout << format_results(results, cfg);
      } else {
        write_results(results, cfg, out_path);
      }
      if (results.front().skips > 0) {
        std::cerr << "warning: " << results.front().skips << " instances skipped\n";
      }
    } else if (*generate) {
      const ExperimentConfig cfg = study_config();
      if (design_index >= cfg.N1 || response_index >= cfg.N2) {
        throw InputError("design or response index outside the study");
      }
      const DesignDraw design = draw_design(cfg, design_index);
      const Vector y = draw_response(cfg, design, design_index, response_index);
      const std::filesystem::path dir(out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw IoError("cannot create directory '" + out_dir + "'");
      write_matrix_csv((dir / "X.csv").string(), design.X);
      write_vector_csv((dir / "Y.csv").string(), y);
      write_vector_csv((dir / "beta.csv").string(), design.beta);
      std::cout << "target_row=" << design.target_row << '\n';
    } else if (*check) {
      SuiteConfig cfg = suite_config.empty() ? SuiteConfig{} : read_suite_config(suite_config);
      if (threads) cfg.threads = *threads;
      if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
      const auto reports = run_suite(suite, cfg, check_seed);
      if (report_path.empty()) {
        std::cout << format_reports(reports);
      } else {
        write_reports(reports, report_path);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
