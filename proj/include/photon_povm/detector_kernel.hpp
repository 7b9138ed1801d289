#pragma once

#include <photon_povm/photon_states.hpp>

namespace photon_povm {

/// Thick-absorber detector constants. The absorption law is
/// alpha(k) = gamma k, and s rho_a = 4 gamma in hbar = eps0 = 1 units.
struct DetectorParams {
  double gamma = 0.05;
  double n_index = 1.0;
  double c_light = 1.0;
  double k0 = 0.0;
  double tau = 0.0; ///< detection delay; set by fit_tau

  double s_rho() const { return 4.0 * gamma; }
};

/// Validated params matched to a grid's k0 and c (tau = 0).
DetectorParams make_detector_params(double gamma, double n_index,
                                    const ModeGrid &grid);

inline double gamma_from_s_rho(double s_rho) { return s_rho / 4.0; }

/// Throws GridMismatch if params were made for a different k0 or c.
void check_compatible(const DetectorParams &params, const ModeGrid &grid);

double alpha(const DetectorParams &params, double k);

/// sqrt(k k') / (alpha_k + alpha_k' - i n (k - k')), the depth-integrated
/// factor multiplying exp(-i (k - k') c t).
cdouble exact_kernel_factor(const DetectorParams &params, double k, double kp);

/// First-order delay n / (2 c alpha_k0).
double analytic_tau(const DetectorParams &params);

/// Least-squares slope of arg(exact_kernel_factor) against (k - k') c over
/// ordered pairs of distinct shells within +-half_width shells of the shell
/// nearest k0. Stores the result in params.tau and returns it.
/// InsufficientBandwidth if the grid has fewer than 3 shells.
double fit_tau(DetectorParams &params, const ModeGrid &grid, int half_width = 1);

/// Expectation of the depth-integrated coincidence-rate operator, evaluated
/// with the full complex denominator.
double w1_exact(const DetectorParams &params, const OnePhotonState &state,
                double x, double y, double t);

/// First-order reduction: c times the number density at (x, y, 0, t - tau).
double w1_first_order(const DetectorParams &params, const OnePhotonState &state,
                      double x, double y, double t);

/// Two-photon coincidence rate c^2 sum |psi_{s,s'}|^2 at delayed times.
double w2(const DetectorParams &params, const TwoPhotonState &state, double x,
          double y, double t, double xp, double yp, double tp);

/// Clamp for values that a positive semidefinite form produced: negatives
/// down to -1e-10 are round-off and become 0; lower throws NegativeKernel.
double clamp_nonnegative(double value);

} // namespace photon_povm
