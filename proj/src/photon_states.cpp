#include <photon_povm/photon_states.hpp>

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fftw3.h>

#include <photon_povm/format.hpp>

namespace photon_povm {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-14;

void require_grid(const GridPtr &grid) {
  if (!grid)
    throw Error(ErrorCode::InvalidArgument, "state needs a grid");
}

double gaussian_exponent(double u, double u0, double w) {
  if (std::isinf(w))
    return 0.0;
  const double d = u - u0;
  return -d * d / (4.0 * w * w);
}

} // namespace

OnePhotonState::OnePhotonState(GridPtr grid, Eigen::VectorXcd amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  require_grid(grid_);
  if (static_cast<std::size_t>(amplitudes_.size()) != grid_->dim())
    throw Error(ErrorCode::GridMismatch, "amplitude count != 2 * modes");
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw Error(ErrorCode::NotNormalized,
                "sum |c|^2 = " + format_double(n2));
}

OnePhotonState OnePhotonState::normalized(GridPtr grid,
                                          Eigen::VectorXcd amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::DegeneratePulse,
                "all amplitudes vanish on this grid");
  amplitudes /= n;
  return OnePhotonState(std::move(grid), std::move(amplitudes));
}

OnePhotonState OnePhotonState::with_global_phase(double phase) const {
  return OnePhotonState(grid_, amplitudes_ * std::polar(1.0, phase));
}

TwoPhotonState::TwoPhotonState(GridPtr grid, Eigen::MatrixXcd amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  require_grid(grid_);
  const auto d = static_cast<Eigen::Index>(grid_->dim());
  if (amplitudes_.rows() != d || amplitudes_.cols() != d)
    throw Error(ErrorCode::GridMismatch, "amplitude matrix is not dim x dim");
  const double asym = (amplitudes_ - amplitudes_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance)
    throw Error(ErrorCode::NotSymmetric,
                "max |c - c^T| = " + format_double(asym));
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw Error(ErrorCode::NotNormalized, "sum |c|^2 = " + format_double(n2));
}

TwoPhotonState TwoPhotonState::symmetrized(GridPtr grid,
                                           const Eigen::MatrixXcd &raw) {
  Eigen::MatrixXcd sym = 0.5 * (raw + raw.transpose());
  const double n = sym.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::DegeneratePulse,
                "all two-photon amplitudes vanish on this grid");
  sym /= n;
  return TwoPhotonState(std::move(grid), std::move(sym));
}

OnePhotonState make_gaussian_one_photon(GridPtr grid, const GaussianPulse &p) {
  require_grid(grid);
  if (!(p.wx > 0.0) || !(p.wy > 0.0) || !(p.wk > 0.0))
    throw Error(ErrorCode::InvalidArgument, "pulse widths must be positive");
  if (p.weight_plus == cdouble{} && p.weight_minus == cdouble{})
    throw Error(ErrorCode::InvalidArgument,
                "at least one helicity weight must be nonzero");

  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid->dim()));
  const auto &modes = grid->modes();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto &mode = modes[m];
    const double e = gaussian_exponent(mode.kx, p.kx0, p.wx) +
                     gaussian_exponent(mode.ky, p.ky0, p.wy) +
                     gaussian_exponent(mode.k, p.k_center, p.wk);
    const cdouble env = std::polar(std::exp(e), mode.kx * p.x0 + mode.ky * p.y0);
    c(static_cast<Eigen::Index>(ModeGrid::basis_index(m, Helicity::Plus))) = env * p.weight_plus;
    c(static_cast<Eigen::Index>(ModeGrid::basis_index(m, Helicity::Minus))) = env * p.weight_minus;
  }
  return OnePhotonState::normalized(std::move(grid), std::move(c));
}

OnePhotonState make_single_mode(GridPtr grid, std::size_t mode, Helicity h) {
  require_grid(grid);
  if (mode >= grid->size())
    throw Error(ErrorCode::InvalidArgument, "mode index out of range");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid->dim()));
  c(static_cast<Eigen::Index>(ModeGrid::basis_index(mode, h))) = 1.0;
  return OnePhotonState(std::move(grid), std::move(c));
}

TwoPhotonState make_correlated_two_photon(GridPtr grid, const SpdcPulse &p) {
  require_grid(grid);
  if (!(p.pump_width > 0.0) || !(p.relative_width > 0.0) || !(p.wk > 0.0))
    throw Error(ErrorCode::InvalidArgument, "SPDC widths must be positive");

  const auto &modes = grid->modes();
  const auto d = static_cast<Eigen::Index>(grid->dim());
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const auto &ma = modes[a];
      const auto &mb = modes[b];
      // Anti-correlated transverse momenta; relative momentum and each
      // photon's k are optional envelopes.
      double e = gaussian_exponent(ma.kx + mb.kx, 0.0, p.pump_width) +
                 gaussian_exponent(ma.ky + mb.ky, 0.0, p.pump_width);
      e += gaussian_exponent(0.5 * (ma.kx - mb.kx), 0.0, p.relative_width) +
           gaussian_exponent(0.5 * (ma.ky - mb.ky), 0.0, p.relative_width);
      e += gaussian_exponent(ma.k, p.k_center, p.wk) +
           gaussian_exponent(mb.k, p.k_center, p.wk);
      const double amp = std::exp(e);
      for (Helicity s : kHelicities) {
        for (Helicity s2 : kHelicities) {
          const bool keep = p.type == SpdcType::TypeI ? s == s2 : s != s2;
          if (!keep)
            continue;
          raw(static_cast<Eigen::Index>(ModeGrid::basis_index(a, s)),
              static_cast<Eigen::Index>(ModeGrid::basis_index(b, s2))) = amp;
        }
      }
    }
  }
  return TwoPhotonState::symmetrized(std::move(grid), raw);
}

TwoPhotonState make_matched_separable(const TwoPhotonState &state,
                                      SpdcType type) {
  const auto &c = state.amplitudes();
  const Eigen::VectorXd a = c.cwiseAbs2().rowwise().sum().cwiseSqrt();
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const bool same = (i % 2) == (j % 2);
      if (same == (type == SpdcType::TypeI))
        raw(i, j) = a(i) * a(j);
    }
  }
  return TwoPhotonState::symmetrized(state.grid_ptr(), raw);
}

TwoPhotonState make_product_two_photon(const OnePhotonState &a,
                                       const OnePhotonState &b) {
  if (!(a.grid() == b.grid()))
    throw Error(ErrorCode::GridMismatch, "product of states on different grids");
  const Eigen::MatrixXcd raw = a.amplitudes() * b.amplitudes().transpose();
  return TwoPhotonState::symmetrized(a.grid_ptr(), raw);
}

Eigen::VectorXcd mode_phases(const ModeGrid &grid, const SpaceTimePoint &p) {
  const auto &modes = grid.modes();
  const double c = grid.c_light();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto &mode = modes[m];
    const double phase =
        -(mode.kx * p.x + mode.ky * p.y + mode.kz() * p.z) + mode.k * c * p.t;
    out(static_cast<Eigen::Index>(m)) = std::polar(1.0, phase);
  }
  return out;
}

HelicityPair wave_function(const OnePhotonState &state, const SpaceTimePoint &p) {
  const auto &grid = state.grid();
  const Eigen::VectorXcd e = mode_phases(grid, p);
  const auto &c = state.amplitudes();
  HelicityPair psi{};
  for (Eigen::Index m = 0; m < e.size(); ++m) {
    psi[0] += c(2 * m) * e(m);
    psi[1] += c(2 * m + 1) * e(m);
  }
  const double inv_sqrt_v = 1.0 / std::sqrt(grid.volume());
  psi[0] *= inv_sqrt_v;
  psi[1] *= inv_sqrt_v;
  return psi;
}

Eigen::Matrix2cd two_photon_wave_function(const TwoPhotonState &state,
                                          const SpaceTimePoint &p,
                                          const SpaceTimePoint &q) {
  const auto &grid = state.grid();
  const Eigen::VectorXcd ep = mode_phases(grid, p);
  const Eigen::VectorXcd eq = mode_phases(grid, q);
  const auto &c = state.amplitudes();
  const Eigen::Index nm = ep.size();

  Eigen::Matrix2cd psi = Eigen::Matrix2cd::Zero();
  for (int s = 0; s < 2; ++s) {
    for (int s2 = 0; s2 < 2; ++s2) {
      cdouble acc{};
      for (Eigen::Index a = 0; a < nm; ++a) {
        cdouble row{};
        for (Eigen::Index b = 0; b < nm; ++b)
          row += (c(2 * a + s, 2 * b + s2) + c(2 * b + s2, 2 * a + s)) * eq(b);
        acc += row * ep(a);
      }
      psi(s, s2) = acc;
    }
  }
  return psi / (std::numbers::sqrt2 * grid.volume());
}

double flux_density(const OnePhotonState &state, double x, double y, double t) {
  const auto psi = wave_function(state, {x, y, 0.0, t});
  return state.grid().c_light() * (std::norm(psi[0]) + std::norm(psi[1]));
}

namespace {

LatticeShape resolve_shape(const ModeGrid &grid, LatticeShape shape) {
  const auto &s = grid.spec();
  LatticeShape out{shape.nx ? shape.nx : s.mx.size(),
                   shape.ny ? shape.ny : s.my.size(),
                   shape.nt ? shape.nt : s.mz.size()};
  if (out.nx < s.mx.size() || out.ny < s.my.size() || out.nt < s.mz.size())
    throw Error(ErrorCode::InvalidArgument,
                "lattice smaller than the mode index span aliases modes");
  return out;
}

WaveFunctionLattice empty_lattice(const ModeGrid &grid, LatticeShape shape) {
  WaveFunctionLattice lat;
  lat.nx = shape.nx;
  lat.ny = shape.ny;
  lat.nt = shape.nt;
  lat.Lx = grid.Lx();
  lat.Ly = grid.Ly();
  lat.T = grid.T();
  lat.values.assign(static_cast<std::size_t>(shape.nx) * shape.ny * shape.nt,
                    HelicityPair{});
  return lat;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

} // namespace

WaveFunctionLattice wave_function_lattice_direct(const OnePhotonState &state,
                                                 LatticeShape shape) {
  const auto &grid = state.grid();
  shape = resolve_shape(grid, shape);
  auto lat = empty_lattice(grid, shape);
  for (int a = 0; a < lat.nx; ++a)
    for (int b = 0; b < lat.ny; ++b)
      for (int j = 0; j < lat.nt; ++j)
        lat.values[lat.flat(a, b, j)] = wave_function(state, lat.point(a, b, j));
  return lat;
}

WaveFunctionLattice wave_function_lattice_fft(const OnePhotonState &state,
                                              LatticeShape shape) {
  const auto &grid = state.grid();
  shape = resolve_shape(grid, shape);
  auto lat = empty_lattice(grid, shape);
  const std::size_t n = lat.size();

  fftw_complex *buf = fftw_alloc_complex(n);
  if (!buf)
    throw Error(ErrorCode::InvalidArgument, "FFT buffer allocation failed");
  fftw_plan plan = fftw_plan_dft_3d(lat.nx, lat.ny, lat.nt, buf, buf,
                                    FFTW_FORWARD, FFTW_ESTIMATE);

  const double inv_sqrt_v = 1.0 / std::sqrt(grid.volume());
  const double k0c = grid.k0() * grid.c_light();
  const auto &modes = grid.modes();
  for (std::size_t slot = 0; slot < 2; ++slot) {
    for (std::size_t i = 0; i < n; ++i)
      buf[i][0] = buf[i][1] = 0.0;
    // exp(+i 2pi mz j/nt) under a forward transform: store mz at -mz.
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto &mode = modes[m];
      const std::size_t idx = lat.flat(wrap(mode.mx, lat.nx),
                                       wrap(mode.my, lat.ny),
                                       wrap(-mode.mz, lat.nt));
      const cdouble c = state.amplitude(m, helicity_from_slot(slot));
      buf[idx][0] += c.real();
      buf[idx][1] += c.imag();
    }
    fftw_execute(plan);
    for (int a = 0; a < lat.nx; ++a) {
      for (int b = 0; b < lat.ny; ++b) {
        for (int j = 0; j < lat.nt; ++j) {
          const std::size_t idx = lat.flat(a, b, j);
          const cdouble carrier = std::polar(inv_sqrt_v, k0c * lat.point(a, b, j).t);
          lat.values[idx][slot] = cdouble(buf[idx][0], buf[idx][1]) * carrier;
        }
      }
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return lat;
}

cdouble lattice_inner_product(const WaveFunctionLattice &a,
                              const WaveFunctionLattice &b, double volume) {
  if (a.nx != b.nx || a.ny != b.ny || a.nt != b.nt)
    throw Error(ErrorCode::GridMismatch, "lattices differ in shape");
  cdouble acc{};
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::conj(a.values[i][0]) * b.values[i][0] +
           std::conj(a.values[i][1]) * b.values[i][1];
  return acc * (volume / static_cast<double>(a.size()));
}

void write_state_csv(std::ostream &os, const OnePhotonState &state) {
  os << "mx,my,mz,sigma,re,im\n";
  const auto &modes = state.grid().modes();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (Helicity h : kHelicities) {
      const cdouble c = state.amplitude(m, h);
      os << modes[m].mx << ',' << modes[m].my << ',' << modes[m].mz << ','
         << sign(h) << ',' << format_double(c.real()) << ','
         << format_double(c.imag()) << '\n';
    }
  }
}

OnePhotonState read_state_csv(std::istream &is, GridPtr grid) {
  require_grid(grid);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "mx,my,mz,sigma,re,im")
    throw Error(ErrorCode::IoError, "state CSV: missing header");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid->dim()));
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 6)
      throw Error(ErrorCode::IoError,
                  "state CSV line " + std::to_string(lineno) + ": expected 6 fields");
    try {
      const int mx = std::stoi(f[0]), my = std::stoi(f[1]), mz = std::stoi(f[2]);
      const int s = std::stoi(f[3]);
      if (s != 1 && s != -1)
        throw Error(ErrorCode::IoError, "sigma must be +1 or -1");
      const auto mode = grid->find(mx, my, mz);
      if (!mode)
        throw Error(ErrorCode::GridMismatch,
                    "state CSV line " + std::to_string(lineno) + ": mode not on grid");
      c(static_cast<Eigen::Index>(ModeGrid::basis_index(*mode, static_cast<Helicity>(s)))) =
          cdouble(std::stod(f[4]), std::stod(f[5]));
    } catch (const std::logic_error &) {
      throw Error(ErrorCode::IoError,
                  "state CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return OnePhotonState(std::move(grid), std::move(c));
}

} // namespace photon_povm
