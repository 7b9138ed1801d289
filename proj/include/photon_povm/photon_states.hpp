#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include <photon_povm/mode_space.hpp>

namespace photon_povm {

using GridPtr = std::shared_ptr<const ModeGrid>;

/// Normalized one-photon pure state sum c_{k,s} |k, s>.
/// Amplitudes are indexed by ModeGrid::basis_index.
class OnePhotonState {
public:
  /// Takes amplitudes as given; throws NotNormalized unless sum |c|^2 = 1
  /// within 1e-12.
  OnePhotonState(GridPtr grid, Eigen::VectorXcd amplitudes);

  /// Rescales to unit norm; DegeneratePulse if the vector is zero.
  static OnePhotonState normalized(GridPtr grid, Eigen::VectorXcd amplitudes);

  const ModeGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  const Eigen::VectorXcd &amplitudes() const { return amplitudes_; }
  cdouble amplitude(std::size_t mode, Helicity h) const {
    return amplitudes_(static_cast<Eigen::Index>(ModeGrid::basis_index(mode, h)));
  }

  OnePhotonState with_global_phase(double phase) const;

private:
  GridPtr grid_;
  Eigen::VectorXcd amplitudes_;
};

/// Two-photon state with exchange-symmetric amplitudes c_{i;j}, i and j
/// running over (mode x helicity). Normalized as sum |c|^2 = 1.
class TwoPhotonState {
public:
  /// Throws NotSymmetric unless c = c^T within 1e-14 and NotNormalized
  /// unless sum |c|^2 = 1 within 1e-12.
  TwoPhotonState(GridPtr grid, Eigen::MatrixXcd amplitudes);

  /// Symmetrizes (c + c^T)/2 and rescales; DegeneratePulse if zero.
  static TwoPhotonState symmetrized(GridPtr grid, const Eigen::MatrixXcd &raw);

  const ModeGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  const Eigen::MatrixXcd &amplitudes() const { return amplitudes_; }

private:
  GridPtr grid_;
  Eigen::MatrixXcd amplitudes_;
};

struct GaussianPulse {
  double kx0 = 0.0;
  double ky0 = 0.0;
  double x0 = 0.0; ///< transverse centre of the packet at t = 0
  double y0 = 0.0;
  double k_center = 0.0;
  double wx = 1.0;
  double wy = 1.0;
  double wk = 1.0;
  cdouble weight_plus{1.0, 0.0};
  cdouble weight_minus{0.0, 0.0};
};

/// c ~ exp(-(kx-kx0)^2/4wx^2 - (ky-ky0)^2/4wy^2 - (k-kc)^2/4wk^2) * w_s,
/// times exp(i (kx x0 + ky y0)) to move the packet to (x0, y0).
OnePhotonState make_gaussian_one_photon(GridPtr grid, const GaussianPulse &pulse);

OnePhotonState make_single_mode(GridPtr grid, std::size_t mode, Helicity h);

enum class SpdcType { TypeI, TypeII };

/// Down-converted pair: Gaussian in the summed transverse momentum with
/// pump_width, optional envelopes in the transverse momentum difference
/// and in each photon's k about k_center (infinite widths disable them).
struct SpdcPulse {
  double pump_width = 1.0;
  double relative_width = std::numeric_limits<double>::infinity();
  double k_center = 0.0;
  double wk = std::numeric_limits<double>::infinity();
  SpdcType type = SpdcType::TypeII;
};

TwoPhotonState make_correlated_two_photon(GridPtr grid, const SpdcPulse &pulse);

/// Separable counterpart of a pair state: amplitudes a_i a_j with
/// a_i = sqrt(sum_j |c_ij|^2), restricted to the same helicity rule.
TwoPhotonState make_matched_separable(const TwoPhotonState &state, SpdcType type);

/// Symmetrized, normalized product a (x) b.
TwoPhotonState make_product_two_photon(const OnePhotonState &a,
                                       const OnePhotonState &b);

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;
};

using HelicityPair = std::array<cdouble, 2>;

/// Plane-wave factors exp(-i k.r + i k c t) for every mode (no 1/sqrt(V)).
Eigen::VectorXcd mode_phases(const ModeGrid &grid, const SpaceTimePoint &p);

/// psi_s(r, t) = sum_k c_{k,s} exp(-i k.r + i k c t) / sqrt(V), by direct
/// mode summation. Index 0 is s = +1.
HelicityPair wave_function(const OnePhotonState &state, const SpaceTimePoint &p);

/// Symmetric two-photon wave function
/// psi_{s,s'} = 1/(sqrt2 V) sum (c_{ks;k's'} + c_{k's';ks}) e_k(r) e_k'(r').
Eigen::Matrix2cd two_photon_wave_function(const TwoPhotonState &state,
                                          const SpaceTimePoint &p,
                                          const SpaceTimePoint &q);

/// c sum_s |psi_s(x, y, 0, t)|^2.
double flux_density(const OnePhotonState &state, double x, double y, double t);

/// psi_s sampled on the uniform (x, y, t) lattice at z = 0 with
/// x_a = a Lx/nx, y_b = b Ly/ny, t_j = j T/nt. Row-major (a, b, j).
struct WaveFunctionLattice {
  int nx = 0;
  int ny = 0;
  int nt = 0;
  double Lx = 0.0;
  double Ly = 0.0;
  double T = 0.0;
  std::vector<HelicityPair> values;

  std::size_t size() const { return values.size(); }
  std::size_t flat(int a, int b, int j) const {
    return (static_cast<std::size_t>(a) * ny + b) * nt + j;
  }
  SpaceTimePoint point(int a, int b, int j) const {
    return {Lx * a / nx, Ly * b / ny, 0.0, T * j / nt};
  }
};

/// Smallest lattice dual to the grid: (#mx, #my, #mz) points. Larger
/// dimensions may be requested; zero means the minimum.
struct LatticeShape {
  int nx = 0;
  int ny = 0;
  int nt = 0;
};

WaveFunctionLattice wave_function_lattice_direct(const OnePhotonState &state,
                                                 LatticeShape shape = {});
WaveFunctionLattice wave_function_lattice_fft(const OnePhotonState &state,
                                              LatticeShape shape = {});

/// sum_lattice conj(a) b (V / #points): equals <a|b> on a dual lattice.
cdouble lattice_inner_product(const WaveFunctionLattice &a,
                              const WaveFunctionLattice &b, double volume);

/// CSV: header "mx,my,mz,sigma,re,im", one row per basis state, %.17g.
void write_state_csv(std::ostream &os, const OnePhotonState &state);
OnePhotonState read_state_csv(std::istream &is, GridPtr grid);

} // namespace photon_povm
