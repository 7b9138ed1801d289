#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <photon_povm/config.hpp>

namespace photon_povm {

/// Outcome of one subcommand. exit_code: 0 success, 1 threshold failure or
/// runtime error, 2 configuration error.
struct Report {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> messages;
  std::vector<std::string> warnings;
};

/// Grid, detector params (tau fitted when the grid has >= 3 shells,
/// analytic otherwise) and pixel grid for a config.
struct Setup {
  GridPtr grid;
  DetectorParams params;
  PixelGrid pixels;
};
Setup make_setup(const ExperimentConfig &config);

/// States described by the pulse.* keys.
OnePhotonState make_one_photon_state(const ExperimentConfig &config,
                                     const GridPtr &grid);
TwoPhotonState make_two_photon_state(const ExperimentConfig &config,
                                     const GridPtr &grid);

/// Comment header shared by every output file.
std::string output_header(const std::string &command,
                          const ExperimentConfig &config);

/// Error-to-exit-code mapping is done inside: ConfigError -> 2, other
/// library errors -> 1 with the message recorded.
Report run_povm_check(const ExperimentConfig &config,
                      const std::filesystem::path &out_dir);
Report run_kernel_compare(const ExperimentConfig &config,
                          const std::filesystem::path &out_dir);
Report run_simulate(const ExperimentConfig &config,
                    const std::filesystem::path &out_dir);
Report run_coincidence(const ExperimentConfig &config,
                       const std::filesystem::path &out_dir);
Report run_wavefunction(const ExperimentConfig &config,
                        const std::filesystem::path &out_dir);

/// One row of kernel_compare.csv.
struct KernelCompareRow {
  double wk_over_k0 = 0.0;
  double max_rel_error = 0.0;
  double fitted_tau = 0.0;
  double analytic_tau = 0.0;
};

/// Core of run_kernel_compare: for each bandwidth, a pulse on a line of
/// shells spaced wk / shells_per_width, scanned in time on axis.
std::vector<KernelCompareRow> kernel_compare_rows(const ExperimentConfig &config);

/// Least-squares slope of log(error) against log(bandwidth).
double log_log_slope(const std::vector<KernelCompareRow> &rows);

} // namespace photon_povm
