#pragma once

#include "ridgeboot/designs.hpp"
#include "ridgeboot/linmodel.hpp"
#include "ridgeboot/resampling.hpp"
#include "ridgeboot/tuning.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ridgeboot {

/// One simulation study setting. Every field is a key of the config file.
struct ExperimentConfig {
  std::string setting = "custom";
  std::size_t n = 100;
  std::size_t p = 45;
  double eta = 0.5;
  std::size_t N1 = 20;  // designs
  std::size_t N2 = 500;  // responses per design
  std::size_t B = 500;   // bootstrap replicates
  double level = 0.9;
  double sigma = 0.1;
  NoiseFamily noise = ScaledStudentT{};
  CvGridSpec cv_grid;
  std::size_t cv_folds = 5;
  double pilot_prefactor = 5.0;
  double inference_prefactor = 0.1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool cv_per_design = false;  // one r_hat per design instead of per response

  NoiseSpec noise_spec() const { return {noise, sigma}; }
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

enum class Scale { desk, full };

Scale parse_scale(std::string_view text);

/// "setting1".."setting4": (n, p, eta) = (100,45,.5), (100,95,.5), (100,45,1), (100,95,1).
ExperimentConfig preset(std::string_view name, Scale scale);

ExperimentConfig read_config(const std::string& path);
ExperimentConfig parse_config(std::string_view text);
std::string format_config(const ExperimentConfig& config);
void write_config(const ExperimentConfig& config, const std::string& path);

/// Stable 64-bit FNV-1a hash of a setting name, the first seed-path index.
std::uint64_t setting_key(std::string_view setting);

/// Order in which methods are reported.
inline constexpr std::array<CiMethod, 4> kTable1Methods = {CiMethod::oracle, CiMethod::ridge_rb,
                                                           CiMethod::normal, CiMethod::ols_rb};

struct MethodResult {
  CiMethod method = CiMethod::oracle;
  double coverage = 0.0;
  double width = 0.0;  // mean interval width
  std::size_t covered = 0;
  std::size_t instances = 0;
};

struct Table1Result {
  std::string setting;
  std::uint64_t seed = 0;
  std::size_t skips = 0;  // responses dropped after a numerical failure
  std::vector<MethodResult> methods;  // in kTable1Methods order
};

/// One design of a study: covariance, X, beta and the highest-leverage row.
struct DesignDraw {
  CovarianceModel covariance;
  Matrix X;
  Vector beta;
  Eigen::Index target_row = 0;
};

/// Design d, drawn from seed_split(seed, {setting, d, 0, 0}).
DesignDraw draw_design(const ExperimentConfig& config, std::size_t d);

/// Response r of design d, drawn from seed_split(seed, {setting, d, r + 1, 0}).
Vector draw_response(const ExperimentConfig& config, const DesignDraw& design, std::size_t d,
                     std::size_t r);

/// Full simulation protocol: per design, N2 responses each with cross-validated
/// penalties and all four intervals for the highest-leverage row.
Table1Result run_table1(const ExperimentConfig& config);

/// Results CSV with a '#' comment header recording grid and quantile conventions.
std::string format_results(const std::vector<Table1Result>& results,
                           const ExperimentConfig& config);
void write_results(const std::vector<Table1Result>& results, const ExperimentConfig& config,
                   const std::string& path);

}  // namespace ridgeboot
