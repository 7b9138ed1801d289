#include <photon_povm/detector_kernel.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <photon_povm/format.hpp>

namespace photon_povm {

DetectorParams make_detector_params(double gamma, double n_index,
                                    const ModeGrid &grid) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(n_index >= 1.0) || !std::isfinite(n_index))
    throw Error(ErrorCode::InvalidArgument, "n_index must be >= 1");
  DetectorParams p;
  p.gamma = gamma;
  p.n_index = n_index;
  p.c_light = grid.c_light();
  p.k0 = grid.k0();
  return p;
}

void check_compatible(const DetectorParams &params, const ModeGrid &grid) {
  if (params.k0 != grid.k0() || params.c_light != grid.c_light())
    throw Error(ErrorCode::GridMismatch,
                "detector params built for k0=" + format_double(params.k0) +
                    ", c=" + format_double(params.c_light));
}

double alpha(const DetectorParams &params, double k) {
  if (!(k > 0.0))
    throw Error(ErrorCode::NonPositiveK, "alpha needs k > 0, got " + format_double(k));
  return params.gamma * k;
}

cdouble exact_kernel_factor(const DetectorParams &params, double k, double kp) {
  const cdouble denom(alpha(params, k) + alpha(params, kp),
                      -params.n_index * (k - kp));
  return std::sqrt(k * kp) / denom;
}

double analytic_tau(const DetectorParams &params) {
  return params.n_index / (2.0 * params.c_light * alpha(params, params.k0));
}

double fit_tau(DetectorParams &params, const ModeGrid &grid, int half_width) {
  check_compatible(params, grid);
  const auto shells = grid.shells();
  if (shells.size() < 3)
    throw Error(ErrorCode::InsufficientBandwidth,
                "fit_tau needs >= 3 distinct k, grid has " +
                    std::to_string(shells.size()));
  half_width = std::max(half_width, 1);

  const auto nearest = std::min_element(
      shells.begin(), shells.end(), [&](double a, double b) {
        return std::abs(a - params.k0) < std::abs(b - params.k0);
      });
  const int n = static_cast<int>(shells.size());
  const int width = std::min(2 * half_width + 1, n);
  int lo = static_cast<int>(nearest - shells.begin()) - half_width;
  lo = std::clamp(lo, 0, n - width);

  double num = 0.0, den = 0.0;
  for (int i = lo; i < lo + width; ++i) {
    for (int j = lo; j < lo + width; ++j) {
      if (i == j)
        continue;
      const double k = shells[static_cast<std::size_t>(i)];
      const double kp = shells[static_cast<std::size_t>(j)];
      const double phase = std::arg(exact_kernel_factor(params, k, kp));
      const double dw = (k - kp) * params.c_light;
      num += phase * dw;
      den += dw * dw;
    }
  }
  params.tau = num / den;
  return params.tau;
}

double clamp_nonnegative(double value) {
  if (value >= 0.0)
    return value;
  if (value < -1e-10)
    throw Error(ErrorCode::NegativeKernel,
                "positive form evaluated to " + format_double(value));
  return 0.0;
}

double w1_exact(const DetectorParams &params, const OnePhotonState &state,
                double x, double y, double t) {
  const auto &grid = state.grid();
  check_compatible(params, grid);
  const auto shells = grid.shells();
  const std::size_t ns = shells.size();

  // Per-shell partial sums: the denominator depends on |k| only.
  std::vector<cdouble> shell_sum(2 * ns);
  const Eigen::VectorXcd e = mode_phases(grid, {x, y, 0.0, t});
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::size_t s = grid.shell_of(m);
    const auto em = e(static_cast<Eigen::Index>(m));
    shell_sum[2 * s] += state.amplitude(m, Helicity::Plus) * em;
    shell_sum[2 * s + 1] += state.amplitude(m, Helicity::Minus) * em;
  }

  cdouble acc{};
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t s2 = 0; s2 < ns; ++s2) {
      const cdouble f = exact_kernel_factor(params, shells[s], shells[s2]);
      acc += f * (std::conj(shell_sum[2 * s]) * shell_sum[2 * s2] +
                  std::conj(shell_sum[2 * s + 1]) * shell_sum[2 * s2 + 1]);
    }
  }
  const double pref = params.s_rho() * params.c_light / (2.0 * grid.volume());
  return clamp_nonnegative(pref * acc.real());
}

double w1_first_order(const DetectorParams &params, const OnePhotonState &state,
                      double x, double y, double t) {
  check_compatible(params, state.grid());
  return flux_density(state, x, y, t - params.tau);
}

double w2(const DetectorParams &params, const TwoPhotonState &state, double x,
          double y, double t, double xp, double yp, double tp) {
  check_compatible(params, state.grid());
  const Eigen::Matrix2cd psi = two_photon_wave_function(
      state, {x, y, 0.0, t - params.tau}, {xp, yp, 0.0, tp - params.tau});
  const double c = params.c_light;
  return c * c * psi.squaredNorm();
}

} // namespace photon_povm
