#include <photon_povm/mode_space.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace photon_povm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string triple(int mx, int my, int mz) {
  std::ostringstream os;
  os << "(mx=" << mx << ", my=" << my << ", mz=" << mz << ")";
  return os.str();
}

} // namespace

double Mode::kz() const {
  return std::sqrt(std::max(0.0, k * k - kx * kx - ky * ky));
}

double Mode::theta() const { return std::atan2(std::hypot(kx, ky), kz()); }

double Mode::phi() const {
  double p = std::atan2(ky, kx);
  return p < 0.0 ? p + kTwoPi : p;
}

Vec3 Mode::unit_vector() const { return {kx / k, ky / k, kz() / k}; }

double field_normalization(double k, double c_light, double volume) {
  return std::sqrt(k * c_light / (2.0 * volume));
}

std::optional<std::size_t> ModeGrid::find(int mx, int my, int mz) const {
  const auto &s = spec_;
  if (mx < s.mx.lo || mx > s.mx.hi || my < s.my.lo || my > s.my.hi ||
      mz < s.mz.lo || mz > s.mz.hi)
    return std::nullopt;
  // Lexicographic (mx, my, mz) order over the full box.
  const auto i = static_cast<std::size_t>(mx - s.mx.lo);
  const auto j = static_cast<std::size_t>(my - s.my.lo);
  const auto l = static_cast<std::size_t>(mz - s.mz.lo);
  return (i * s.my.size() + j) * s.mz.size() + l;
}

std::vector<double> ModeGrid::shells() const {
  std::vector<double> out;
  out.reserve(spec_.mz.size());
  for (int mz = spec_.mz.lo; mz <= spec_.mz.hi; ++mz)
    out.push_back(spec_.k0 + kTwoPi * mz / (spec_.c_light * spec_.T));
  return out;
}

ModeGrid build_mode_grid(const GridSpec &spec) {
  if (!(spec.Lx > 0.0) || !(spec.Ly > 0.0) || !(spec.T > 0.0) ||
      !(spec.k0 > 0.0) || !(spec.c_light > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "Lx, Ly, T, k0 and c must be positive");
  if (spec.mx.empty() || spec.my.empty() || spec.mz.empty())
    throw Error(ErrorCode::InvalidArgument, "index ranges must be nonempty");
  if (!(spec.paraxial_limit > 0.0))
    throw Error(ErrorCode::InvalidArgument, "paraxial_limit must be positive");

  ModeGrid grid;
  grid.spec_ = spec;
  grid.volume_ = spec.c_light * spec.T * spec.Lx * spec.Ly;
  grid.modes_.reserve(static_cast<std::size_t>(spec.mx.size()) *
                      spec.my.size() * spec.mz.size());

  for (int mx = spec.mx.lo; mx <= spec.mx.hi; ++mx) {
    for (int my = spec.my.lo; my <= spec.my.hi; ++my) {
      for (int mz = spec.mz.lo; mz <= spec.mz.hi; ++mz) {
        Mode m;
        m.mx = mx;
        m.my = my;
        m.mz = mz;
        m.kx = kTwoPi * mx / spec.Lx;
        m.ky = kTwoPi * my / spec.Ly;
        m.k = spec.k0 + kTwoPi * mz / (spec.c_light * spec.T);
        if (!(m.k > 0.0))
          throw Error(ErrorCode::NonPositiveK,
                      "k <= 0 at " + triple(mx, my, mz));
        const double kt2 = m.kx * m.kx + m.ky * m.ky;
        if (kt2 >= m.k * m.k)
          throw Error(ErrorCode::NonPropagatingMode,
                      "kx^2 + ky^2 >= k^2 at " + triple(mx, my, mz));
        if (kt2 / (m.k * m.k) > spec.paraxial_limit) {
          std::ostringstream os;
          os << "(kx^2 + ky^2)/k^2 = " << kt2 / (m.k * m.k) << " > "
             << spec.paraxial_limit << " at " << triple(mx, my, mz);
          throw Error(ErrorCode::ParaxialViolation, os.str());
        }
        m.Ek = field_normalization(m.k, spec.c_light, grid.volume_);
        grid.modes_.push_back(m);
      }
    }
  }
  return grid;
}

Vec3c polarization_vector(double theta, double phi, Helicity sigma,
                          ChiConvention convention) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const Vec3 theta_hat{ct * cp, ct * sp, -st};
  const Vec3 phi_hat{-sp, cp, 0.0};
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  auto circular = [&](int s) {
    Vec3c e;
    for (int a = 0; a < 3; ++a)
      e[a] = cdouble(theta_hat[a], s * phi_hat[a]) * inv_sqrt2;
    return e;
  };

  if (convention == ChiConvention::CP)
    return circular(sign(sigma));

  // chi = -phi: e^(chi)_s = exp(i s phi) e^(0)_s, then recombined into the
  // linear pair. The phases cancel into (theta_hat, phi_hat) rotated by phi.
  const cdouble ph_plus = std::polar(1.0, phi);
  const cdouble ph_minus = std::polar(1.0, -phi);
  const Vec3c ep = circular(+1), em = circular(-1);
  Vec3c e;
  for (int a = 0; a < 3; ++a) {
    const cdouble p = ph_plus * ep[a], m = ph_minus * em[a];
    e[a] = sigma == Helicity::Plus ? (p + m) * inv_sqrt2
                                   : (p - m) / cdouble(0.0, std::numbers::sqrt2);
  }
  return e;
}

Vec3c polarization_vector(const Mode &mode, Helicity sigma,
                          ChiConvention convention) {
  return polarization_vector(mode.theta(), mode.phi(), sigma, convention);
}

} // namespace photon_povm
