#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <photon_povm/error.hpp>

namespace photon_povm {

using cdouble = std::complex<double>;
using Vec3c = std::array<cdouble, 3>;
using Vec3 = std::array<double, 3>;

/// Photon helicity. The numeric value is the spin projection on k.
enum class Helicity : int { Plus = +1, Minus = -1 };

constexpr int sign(Helicity h) { return static_cast<int>(h); }
constexpr std::size_t helicity_slot(Helicity h) {
  return h == Helicity::Plus ? 0 : 1;
}
constexpr Helicity helicity_from_slot(std::size_t slot) {
  return slot == 0 ? Helicity::Plus : Helicity::Minus;
}
inline constexpr std::array<Helicity, 2> kHelicities{Helicity::Plus,
                                                     Helicity::Minus};

/// Inclusive integer index range [lo, hi].
struct IndexRange {
  int lo = 0;
  int hi = 0;

  int size() const { return hi - lo + 1; }
  bool empty() const { return hi < lo; }
  bool operator==(const IndexRange &) const = default;
};

/// Inputs to build_mode_grid. Units: hbar = eps0 = 1, c configurable.
struct GridSpec {
  double Lx = 0.0;
  double Ly = 0.0;
  double T = 0.0;
  double k0 = 0.0;
  double c_light = 1.0;
  IndexRange mx;
  IndexRange my;
  IndexRange mz;
  double paraxial_limit = 0.01;

  bool operator==(const GridSpec &) const = default;
};

struct Mode {
  int mx = 0;
  int my = 0;
  int mz = 0;
  double kx = 0.0;
  double ky = 0.0;
  double k = 0.0;  ///< wavenumber magnitude
  double Ek = 0.0; ///< field normalization sqrt(k c / 2V)

  double kz() const;
  double theta() const; ///< polar angle of k, exact
  double phi() const;   ///< azimuth of k in [0, 2pi)
  Vec3 unit_vector() const;

  bool operator==(const Mode &) const = default;
};

/// Discrete paraxial wave-vector lattice with periodic boundaries over
/// V = c T Lx Ly. Immutable after construction.
///
/// One-photon basis index: 2 * mode_index + helicity_slot.
class ModeGrid {
public:
  const GridSpec &spec() const { return spec_; }
  double Lx() const { return spec_.Lx; }
  double Ly() const { return spec_.Ly; }
  double T() const { return spec_.T; }
  double k0() const { return spec_.k0; }
  double c_light() const { return spec_.c_light; }
  double area() const { return spec_.Lx * spec_.Ly; }
  double volume() const { return volume_; }

  const std::vector<Mode> &modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  /// Dimension of the one-photon (mode x helicity) space.
  std::size_t dim() const { return 2 * modes_.size(); }

  static std::size_t basis_index(std::size_t mode, Helicity h) {
    return 2 * mode + helicity_slot(h);
  }
  std::optional<std::size_t> find(int mx, int my, int mz) const;

  /// Distinct wavenumber magnitudes, ascending (one per mz value).
  std::vector<double> shells() const;
  /// Shell index of each mode (position of its k in shells()).
  std::size_t shell_of(std::size_t mode) const {
    return static_cast<std::size_t>(modes_[mode].mz - spec_.mz.lo);
  }

  bool operator==(const ModeGrid &other) const { return spec_ == other.spec_; }

private:
  friend ModeGrid build_mode_grid(const GridSpec &spec);
  GridSpec spec_;
  double volume_ = 0.0;
  std::vector<Mode> modes_;
};

/// Builds the lattice; every requested index triple must be a propagating
/// paraxial mode, otherwise NonPropagatingMode / ParaxialViolation is thrown
/// naming the triple.
ModeGrid build_mode_grid(const GridSpec &spec);

/// E_k = sqrt(k c / (2 V)).
double field_normalization(double k, double c_light, double volume);

enum class ChiConvention { CP, LP };

/// Transverse unit polarization vector for direction (theta, phi).
/// CP: (theta_hat + i sigma phi_hat)/sqrt2. LP: the chi = -phi rotated pair
/// combined into the linear basis that reduces to x (sigma=+1) and
/// y (sigma=-1) on axis.
Vec3c polarization_vector(double theta, double phi, Helicity sigma,
                          ChiConvention convention);
Vec3c polarization_vector(const Mode &mode, Helicity sigma,
                          ChiConvention convention);

} // namespace photon_povm
