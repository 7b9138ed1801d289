#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <photon_povm/measurement_sim.hpp>

namespace photon_povm {

enum class PulseFamily { Gaussian, SingleMode, Spdc, Separable, Product };

/// Every experiment input. Parsed from flat "section.key = value" text;
/// the defaults below apply to absent keys.
struct ExperimentConfig {
  // grid.*
  GridSpec grid{2.0 * 3.141592653589793, 2.0 * 3.141592653589793,
                2.0 * 3.141592653589793, 20.0, 1.0,
                {-1, 1}, {-1, 1}, {-2, 2}, 0.01};
  // detector.*
  double gamma = 0.2;
  double n_index = 1.0;
  int tau_fit_half_width = 1;
  // pixels.*
  int npx = 4;
  int npy = 4;
  int time_bins = 16;
  // pulse.*
  PulseFamily family = PulseFamily::Gaussian;
  double kx0 = 0.0;
  double ky0 = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double k_center = 0.0; ///< 0 means grid.k0
  double wx = 1.0;
  double wy = 1.0;
  double wk = 1.0;
  double weight_plus = 1.0;
  double weight_minus = 0.0;
  int mode_mx = 0;
  int mode_my = 0;
  int mode_mz = 0;
  int mode_sigma = 1;
  SpdcType polarization = SpdcType::TypeII;
  double pump_width = 0.5;
  double relative_width = 0.0; ///< 0 means no envelope
  std::vector<double> bandwidths{0.04, 0.02, 0.01, 0.005};
  // kernel_compare.*
  int shells_per_width = 4;
  int half_span = 24;
  int scan_points = 801;
  // run.*
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  KernelKind kernel = KernelKind::FirstOrder;
  int quadrature_order = 32;
  double tv_bound = 0.01;
  int atoms_per_pixel = 4;
  // wavefunction.*
  int lattice_nx = 0;
  int lattice_ny = 0;
  int lattice_nt = 0;

  /// Canonical "key=value" listing of every field, sorted by key.
  std::string canonical() const;
  /// FNV-1a of canonical(), hex.
  std::string hash() const;
};

/// ConfigError (with line number and key) on unknown keys, malformed or
/// non-finite values, and values failing validation.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string &path);

/// Range checks shared by the parser and by command-line overrides.
void validate(const ExperimentConfig &config);

} // namespace photon_povm
