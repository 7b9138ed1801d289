#pragma once

#include <memory>
#include <numbers>
#include <random>

#include <photon_povm/measurement_sim.hpp>

namespace support {

using namespace photon_povm;
constexpr double two_pi = 2.0 * std::numbers::pi;

/// Lx = Ly = T = 2 pi, mx, my in [-r, r], mz in [-z, z].
inline GridSpec box_spec(double k0, int r, int z, double paraxial = 0.01) {
  return {two_pi, two_pi, two_pi, k0, 1.0, {-r, r}, {-r, r}, {-z, z}, paraxial};
}

/// The 45-mode example grid. Its outer modes sit at (kx^2 + ky^2)/k^2
/// = 2/64, so the default 0.01 limit is raised.
inline GridSpec grid45_spec() { return box_spec(10.0, 1, 2, 0.05); }

inline GridPtr make_grid(const GridSpec &spec) {
  return std::make_shared<const ModeGrid>(build_mode_grid(spec));
}

inline Eigen::VectorXcd random_amplitudes(std::mt19937_64 &rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXcd c(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c(i) = {n(rng), n(rng)};
  return c / c.norm();
}

inline OnePhotonState random_state(std::mt19937_64 &rng, const GridPtr &grid) {
  return OnePhotonState(grid, random_amplitudes(rng, grid->dim()));
}

inline TwoPhotonState random_two_photon(std::mt19937_64 &rng, const GridPtr &grid) {
  const auto d = static_cast<Eigen::Index>(grid->dim());
  Eigen::MatrixXcd raw(d, d);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      raw(i, j) = {n(rng), n(rng)};
  return TwoPhotonState::symmetrized(grid, raw);
}

} // namespace support
