#include <photon_povm/povm.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <photon_povm/format.hpp>
#include <photon_povm/parallel.hpp>

namespace photon_povm {

PixelGrid::PixelGrid(int npx, int npy, int time_bins, double Lx, double Ly,
                     double T)
    : npx_(npx), npy_(npy), bins_(time_bins), Lx_(Lx), Ly_(Ly), T_(T) {
  if (npx < 1 || npy < 1)
    throw Error(ErrorCode::InvalidArgument, "pixel counts must be >= 1");
  if (time_bins < 1)
    throw Error(ErrorCode::InvalidArgument, "time bins must be >= 1");
  if (!(Lx > 0.0) || !(Ly > 0.0) || !(T > 0.0))
    throw Error(ErrorCode::InvalidArgument, "detector extent must be positive");
}

Rect PixelGrid::pixel(int n) const {
  if (n < 0 || n >= pixel_count())
    throw Error(ErrorCode::PixelOutOfRange,
                "pixel " + std::to_string(n) + " not in [0, " +
                    std::to_string(pixel_count()) + ")");
  const auto [ix, iy] = coord(n);
  // Edges from integer fractions so neighbours share exact boundaries.
  return {Lx_ * ix / npx_, Lx_ * (ix + 1) / npx_, Ly_ * iy / npy_,
          Ly_ * (iy + 1) / npy_};
}

TimeWindow PixelGrid::bin(int b) const {
  if (b < 0 || b >= bins_)
    throw Error(ErrorCode::PixelOutOfRange,
                "time bin " + std::to_string(b) + " out of range");
  const double t0 = T_ * b / bins_;
  const double t1 = T_ * (b + 1) / bins_;
  return {t0, t1 - t0};
}

PixelGrid make_pixel_grid(const ModeGrid &grid, int npx, int npy,
                          int time_bins) {
  return PixelGrid(npx, npy, time_bins, grid.Lx(), grid.Ly(), grid.T());
}

cdouble interval_integral(double delta, double a, double b) {
  const double len = b - a;
  const double half = 0.5 * delta * len;
  // exp(i delta mid) * len * sin(half)/half
  double sinc;
  if (std::abs(delta * len) < 1e-8)
    sinc = 1.0 - half * half / 6.0;
  else
    sinc = std::sin(half) / half;
  return std::polar(len * sinc, 0.5 * delta * (a + b));
}

namespace {

/// Transverse overlap of plane waves over a rectangle, helicity diagonal,
/// without the c/V prefactor.
Eigen::MatrixXcd transverse_matrix(const ModeGrid &grid, const Rect &r) {
  const auto &modes = grid.modes();
  const auto nm = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(2 * nm, 2 * nm);
  parallel_for(modes.size(), [&](std::size_t a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const cdouble v =
          interval_integral(modes[a].kx - modes[b].kx, r.x0, r.x1) *
          interval_integral(modes[a].ky - modes[b].ky, r.y0, r.y1);
      const auto i = static_cast<Eigen::Index>(2 * a);
      const auto j = static_cast<Eigen::Index>(2 * b);
      X(i, j) = v;
      X(i + 1, j + 1) = v;
    }
  });
  return X;
}

/// Per shell pair: the time integral of the kernel over the window,
/// including the weight relative to c/V.
Eigen::MatrixXcd shell_time_factors(const DetectorParams &params,
                                    const ModeGrid &grid,
                                    const TimeWindow &w, KernelKind kernel) {
  const auto shells = grid.shells();
  const auto ns = static_cast<Eigen::Index>(shells.size());
  const double c = params.c_light;
  Eigen::MatrixXcd out(ns, ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    for (Eigen::Index s2 = 0; s2 < ns; ++s2) {
      const double k = shells[static_cast<std::size_t>(s)];
      const double kp = shells[static_cast<std::size_t>(s2)];
      const double dw = -(k - kp) * c;
      if (kernel == KernelKind::FirstOrder) {
        out(s, s2) = interval_integral(dw, w.t0 - params.tau, w.t1() - params.tau);
      } else {
        // s_rho c/(2V) F relative to c/V.
        const cdouble weight = 0.5 * params.s_rho() * exact_kernel_factor(params, k, kp);
        out(s, s2) = weight * interval_integral(dw, w.t0, w.t1());
      }
    }
  }
  return out;
}

Eigen::MatrixXcd assemble(const DetectorParams &params, const ModeGrid &grid,
                          const Eigen::MatrixXcd &X, const TimeWindow &w,
                          KernelKind kernel) {
  const Eigen::MatrixXcd Tf = shell_time_factors(params, grid, w, kernel);
  const double pref = params.c_light / grid.volume();
  Eigen::MatrixXcd M(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto si = static_cast<Eigen::Index>(grid.shell_of(static_cast<std::size_t>(i / 2)));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const auto sj = static_cast<Eigen::Index>(grid.shell_of(static_cast<std::size_t>(j / 2)));
      M(i, j) = pref * X(i, j) * Tf(si, sj);
    }
  }
  return M;
}

void check_window(const TimeWindow &w) {
  if (!(w.dt > 0.0))
    throw Error(ErrorCode::NonPositiveWindow,
                "window length " + format_double(w.dt) + " must be positive");
}

} // namespace

PovmElement povm_element(const DetectorParams &params, const ModeGrid &grid,
                         const Rect &region, const TimeWindow &window,
                         KernelKind kernel) {
  check_compatible(params, grid);
  check_window(window);
  PovmElement e;
  e.grid_spec = grid.spec();
  e.region = region;
  e.window = window;
  e.kernel = kernel;
  e.matrix = assemble(params, grid, transverse_matrix(grid, region), window, kernel);
  return e;
}

PovmElement povm_element(const DetectorParams &params, const ModeGrid &grid,
                         const PixelGrid &pixels, int pixel,
                         const TimeWindow &window, KernelKind kernel) {
  auto e = povm_element(params, grid, pixels.pixel(pixel), window, kernel);
  e.pixel = pixel;
  return e;
}

double probability(const PovmElement &element, const OnePhotonState &state) {
  if (!(element.grid_spec == state.grid().spec()))
    throw Error(ErrorCode::GridMismatch, "element and state grids differ");
  const auto &c = state.amplitudes();
  const cdouble v = c.dot(element.matrix * c); // conj(c) . (M c)
  return clamp_nonnegative(v.real());
}

double completeness_residual(const DetectorParams &params, const ModeGrid &grid,
                             const PixelGrid &pixels, KernelKind kernel) {
  const auto d = static_cast<Eigen::Index>(grid.dim());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < pixels.pixel_count(); ++n)
    for (int b = 0; b < pixels.time_bins(); ++b)
      sum += povm_element(params, grid, pixels, n, pixels.bin(b), kernel).matrix;
  sum -= Eigen::MatrixXcd::Identity(d, d);
  return sum.cwiseAbs().maxCoeff();
}

ElementDiagnostics diagnose(const PovmElement &element) {
  const auto &M = element.matrix;
  ElementDiagnostics out;
  out.hermiticity_error = (M - M.adjoint()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  return out;
}

void write_element_csv(std::ostream &os, const PovmElement &element) {
  os << "# pixel=" << element.pixel << " region=[" << format_double(element.region.x0)
     << ',' << format_double(element.region.x1) << "]x["
     << format_double(element.region.y0) << ',' << format_double(element.region.y1)
     << "] window=[" << format_double(element.window.t0) << ','
     << format_double(element.window.t1()) << "] kernel="
     << (element.kernel == KernelKind::Exact ? "exact" : "first_order") << '\n';
  os << "row,col,re,im\n";
  const auto &M = element.matrix;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      os << i << ',' << j << ',' << format_double(M(i, j).real()) << ','
         << format_double(M(i, j).imag()) << '\n';
}

namespace {

/// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace

QuadratureRule gauss_legendre(int order) {
  if (order < 1)
    throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
  QuadratureRule rule;
  const auto n = static_cast<std::size_t>(order);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

TwoPhotonTable::TwoPhotonTable(int pixels, int bins)
    : pixels_(pixels), bins_(bins),
      probs_(static_cast<std::size_t>(bins) * (bins + 1) / 2 *
                 static_cast<std::size_t>(pixels) * pixels,
             0.0) {}

std::size_t TwoPhotonTable::flat(int pixel, int bin, int pixel2, int bin2) const {
  if (pixel < 0 || pixel >= pixels_ || pixel2 < 0 || pixel2 >= pixels_ ||
      bin < 0 || bin >= bins_ || bin2 < 0 || bin2 > bin)
    throw Error(ErrorCode::PixelOutOfRange, "two-photon outcome out of range");
  const auto pair = static_cast<std::size_t>(bin) * (bin + 1) / 2 +
                    static_cast<std::size_t>(bin2);
  return (pair * pixels_ + static_cast<std::size_t>(pixel)) * pixels_ +
         static_cast<std::size_t>(pixel2);
}

double &TwoPhotonTable::at(int pixel, int bin, int pixel2, int bin2) {
  return probs_[flat(pixel, bin, pixel2, bin2)];
}

double TwoPhotonTable::at(int pixel, int bin, int pixel2, int bin2) const {
  return probs_[flat(pixel, bin, pixel2, bin2)];
}

TwoPhotonTable::Outcome TwoPhotonTable::outcome(std::size_t f) const {
  const auto np = static_cast<std::size_t>(pixels_);
  const int pixel2 = static_cast<int>(f % np);
  f /= np;
  const int pixel = static_cast<int>(f % np);
  std::size_t pair = f / np;
  int bin = 0;
  while (static_cast<std::size_t>(bin + 1) * (bin + 2) / 2 <= pair)
    ++bin;
  const int bin2 = static_cast<int>(pair - static_cast<std::size_t>(bin) * (bin + 1) / 2);
  return {pixel, bin, pixel2, bin2};
}

double TwoPhotonTable::total() const {
  double s = 0.0;
  for (double p : probs_)
    s += p;
  return s;
}

std::vector<double> TwoPhotonTable::pixel_pair_matrix() const {
  std::vector<double> m(static_cast<std::size_t>(pixels_) * pixels_, 0.0);
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    const auto o = outcome(f);
    m[static_cast<std::size_t>(o.pixel) * pixels_ + o.pixel2] += probs_[f];
  }
  return m;
}

namespace {

/// First-order two-photon integrals. The pixel density kernel factors as
/// A_n(t) = sum_{s,s'} conj(u_s(t)) u_s'(t) X_n o E_ss', with u_s the shell
/// carrier and E_ss' the (shell s, shell s') block mask, so every pair
/// probability is a contraction of the time-independent coupling
///   L_{n,n'}[ss', rr'] = sum((c^H (X_n o E_ss') c) o X_n' o E_rr')
/// with shell-only time weights.
class TwoPhotonEngine {
public:
  TwoPhotonEngine(const DetectorParams &params, const TwoPhotonState &state,
                  const PixelGrid &pixels)
      : params_(params), grid_(state.grid()), c_(state.amplitudes()),
        shells_(grid_.shells()) {
    check_compatible(params, grid_);
    if (pixels.Lx() != grid_.Lx() || pixels.Ly() != grid_.Ly() ||
        pixels.T() != grid_.T())
      throw Error(ErrorCode::GridMismatch, "pixel grid does not match detector");
    const double pref = params.c_light / grid_.volume();
    const auto d = c_.rows();
    shell_idx_.resize(static_cast<std::size_t>(d));
    members_.resize(shells_.size());
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto s = grid_.shell_of(static_cast<std::size_t>(i / 2));
      shell_idx_[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(s);
      members_[s].push_back(i);
    }
    X_.resize(static_cast<std::size_t>(pixels.pixel_count()));
    for (int n = 0; n < pixels.pixel_count(); ++n)
      X_[static_cast<std::size_t>(n)] = pref * transverse_matrix(grid_, pixels.pixel(n));
  }

  Eigen::Index shells() const { return static_cast<Eigen::Index>(shells_.size()); }
  Eigen::Index pairs() const { return shells() * shells(); }

  /// T[s,s'] = int_w exp(-i (k_s - k_s') c (t - tau)) dt, flattened s*S + s'.
  Eigen::VectorXcd window_weights(double t0, double t1) const {
    const Eigen::Index S = shells();
    Eigen::VectorXcd v(S * S);
    for (Eigen::Index s = 0; s < S; ++s)
      for (Eigen::Index s2 = 0; s2 < S; ++s2)
        v(s * S + s2) = interval_integral(-(shell(s) - shell(s2)) * params_.c_light,
                                          t0 - params_.tau, t1 - params_.tau);
    return v;
  }

  /// Q[ss', rr'] = int_w dt conj(u_s(t)) u_s'(t) T_[t0, t][rr'], outer
  /// integral by Gauss-Legendre, inner in closed form.
  Eigen::MatrixXcd triangle_weights(const TimeWindow &w,
                                    const QuadratureRule &rule) const {
    const Eigen::Index S = shells();
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(S * S, S * S);
    const double half = 0.5 * w.dt;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
      const double ta = w.t0 + half * (rule.nodes[a] + 1.0);
      Eigen::VectorXcd outer(S * S);
      for (Eigen::Index s = 0; s < S; ++s)
        for (Eigen::Index s2 = 0; s2 < S; ++s2)
          outer(s * S + s2) = std::polar(
              half * rule.weights[a],
              -(shell(s) - shell(s2)) * params_.c_light * (ta - params_.tau));
      Q.noalias() += outer * window_weights(w.t0, ta).transpose();
    }
    return Q;
  }

  /// L_{n,n'} for every n' in `earlier`.
  std::vector<Eigen::MatrixXcd> coupling(int n, const std::vector<int> &earlier) const {
    const Eigen::Index S = shells();
    const auto &X = X_[static_cast<std::size_t>(n)];
    std::vector<Eigen::MatrixXcd> L(earlier.size(), Eigen::MatrixXcd::Zero(S * S, S * S));
    for (Eigen::Index s = 0; s < S; ++s) {
      const auto &rs = members_[static_cast<std::size_t>(s)];
      const Eigen::MatrixXcd Cs = c_(rs, Eigen::all);
      for (Eigen::Index s2 = 0; s2 < S; ++s2) {
        const auto &rs2 = members_[static_cast<std::size_t>(s2)];
        const Eigen::MatrixXcd K =
            Cs.adjoint() * (X(rs, rs2) * c_(rs2, Eigen::all));
        for (std::size_t e = 0; e < earlier.size(); ++e) {
          const auto &Xp = X_[static_cast<std::size_t>(earlier[e])];
          auto row = L[e].row(s * S + s2);
          for (Eigen::Index j = 0; j < K.rows(); ++j)
            for (Eigen::Index l = 0; l < K.cols(); ++l)
              row(shell_idx_[static_cast<std::size_t>(j)] * S +
                  shell_idx_[static_cast<std::size_t>(l)]) += K(j, l) * Xp(j, l);
        }
      }
    }
    return L;
  }

  /// 2 Re sum(L o Q).
  static double contract(const Eigen::MatrixXcd &L, const Eigen::MatrixXcd &Q) {
    return 2.0 * (L.array() * Q.array()).sum().real();
  }

private:
  double shell(Eigen::Index s) const { return shells_[static_cast<std::size_t>(s)]; }

  const DetectorParams &params_;
  const ModeGrid &grid_;
  const Eigen::MatrixXcd &c_;
  std::vector<double> shells_;
  std::vector<Eigen::Index> shell_idx_;
  std::vector<std::vector<Eigen::Index>> members_;
  std::vector<Eigen::MatrixXcd> X_;
};

/// Triangle weights at the requested order, checked against twice the order.
Eigen::MatrixXcd converged_weights(const TwoPhotonEngine &engine,
                                   const TimeWindow &w,
                                   const QuadratureOptions &opt,
                                   Eigen::MatrixXcd *check) {
  Eigen::MatrixXcd Q = engine.triangle_weights(w, gauss_legendre(opt.order));
  if (opt.check_convergence)
    *check = engine.triangle_weights(w, gauss_legendre(2 * opt.order));
  return Q;
}

void require_converged(double worst, const QuadratureOptions &opt) {
  if (worst > opt.tolerance)
    throw Error(ErrorCode::QuadratureNotConverged,
                "order " + std::to_string(opt.order) + " vs " +
                    std::to_string(2 * opt.order) + " differ by " +
                    format_double(worst));
}

} // namespace

double two_photon_probability(const DetectorParams &params,
                              const TwoPhotonState &state,
                              const PixelGrid &pixels, int n, int np,
                              const TimeWindow &window,
                              const QuadratureOptions &options) {
  check_window(window);
  pixels.pixel(n);
  pixels.pixel(np);
  TwoPhotonEngine engine(params, state, pixels);
  Eigen::MatrixXcd check;
  const auto Q = converged_weights(engine, window, options, &check);
  const auto L = engine.coupling(n, {np}).front();
  const double p = TwoPhotonEngine::contract(L, Q);
  if (options.check_convergence)
    require_converged(std::abs(p - TwoPhotonEngine::contract(L, check)), options);
  return clamp_nonnegative(p);
}

TwoPhotonTable two_photon_table(const DetectorParams &params,
                                const TwoPhotonState &state,
                                const PixelGrid &pixels,
                                const QuadratureOptions &options) {
  TwoPhotonEngine engine(params, state, pixels);
  const int N = pixels.pixel_count();
  const int B = pixels.time_bins();
  TwoPhotonTable table(N, B);

  std::vector<int> all(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    all[static_cast<std::size_t>(n)] = n;

  // Distinct bins factorise into one-photon window weights; equal bins need
  // the time-ordered triangle.
  const Eigen::Index SS = engine.pairs();
  Eigen::MatrixXcd Tw(SS, B);
  std::vector<Eigen::MatrixXcd> Q(static_cast<std::size_t>(B)), Qc(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    const auto w = pixels.bin(b);
    Tw.col(b) = engine.window_weights(w.t0, w.t1());
    Q[static_cast<std::size_t>(b)] =
        converged_weights(engine, w, options, &Qc[static_cast<std::size_t>(b)]);
  }

  std::vector<double> worst(static_cast<std::size_t>(N), 0.0);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t n) {
    const auto L = engine.coupling(static_cast<int>(n), all);
    for (int np = 0; np < N; ++np) {
      const auto &Lp = L[static_cast<std::size_t>(np)];
      const Eigen::MatrixXcd V = Tw.transpose() * Lp * Tw; // [b, b2]
      for (int b = 0; b < B; ++b) {
        for (int b2 = 0; b2 < b; ++b2)
          table.at(static_cast<int>(n), b, np, b2) = clamp_nonnegative(2.0 * V(b, b2).real());
        const auto bs = static_cast<std::size_t>(b);
        const double p = TwoPhotonEngine::contract(Lp, Q[bs]);
        if (options.check_convergence)
          worst[n] = std::max(worst[n], std::abs(p - TwoPhotonEngine::contract(Lp, Qc[bs])));
        table.at(static_cast<int>(n), b, np, b) = clamp_nonnegative(p);
      }
    }
  });
  if (options.check_convergence)
    require_converged(*std::max_element(worst.begin(), worst.end()), options);
  return table;
}

} // namespace photon_povm
