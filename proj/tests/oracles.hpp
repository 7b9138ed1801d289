#pragma once

// Reference computations for the tests. Everything here is written from the
// defining formulas, using only GridSpec numbers, so it shares no code path
// with the library beyond the state amplitudes it is handed.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <photon_povm/mode_space.hpp>

namespace oracle {

using cd = std::complex<double>;
using photon_povm::GridSpec;
constexpr double pi = std::numbers::pi;

struct PlaneMode {
  double kx, ky, k;
};

/// Modes in (mx, my, mz) lexicographic order.
inline std::vector<PlaneMode> modes(const GridSpec &g) {
  std::vector<PlaneMode> out;
  for (int mx = g.mx.lo; mx <= g.mx.hi; ++mx)
    for (int my = g.my.lo; my <= g.my.hi; ++my)
      for (int mz = g.mz.lo; mz <= g.mz.hi; ++mz)
        out.push_back({2 * pi * mx / g.Lx, 2 * pi * my / g.Ly,
                       g.k0 + 2 * pi * mz / (g.c_light * g.T)});
  return out;
}

inline double volume(const GridSpec &g) { return g.c_light * g.T * g.Lx * g.Ly; }

/// exp(-i k.r + i k c t) without normalization.
inline cd phase(const PlaneMode &m, double c, double x, double y, double z, double t) {
  const double kz = std::sqrt(m.k * m.k - m.kx * m.kx - m.ky * m.ky);
  return std::exp(cd(0.0, -(m.kx * x + m.ky * y + kz * z) + m.k * c * t));
}

/// psi_sigma(r, t), amplitudes at 2 * mode + slot.
inline std::array<cd, 2> psi(const GridSpec &g, const Eigen::VectorXcd &amp,
                             double x, double y, double z, double t) {
  const auto ms = modes(g);
  std::array<cd, 2> out{};
  for (std::size_t m = 0; m < ms.size(); ++m) {
    const cd e = phase(ms[m], g.c_light, x, y, z, t);
    out[0] += amp(static_cast<Eigen::Index>(2 * m)) * e;
    out[1] += amp(static_cast<Eigen::Index>(2 * m + 1)) * e;
  }
  const double s = 1.0 / std::sqrt(volume(g));
  return {out[0] * s, out[1] * s};
}

inline double flux(const GridSpec &g, const Eigen::VectorXcd &amp, double x,
                   double y, double t) {
  const auto p = psi(g, amp, x, y, 0.0, t);
  return g.c_light * (std::norm(p[0]) + std::norm(p[1]));
}

/// Tensor Gauss-Legendre integral of f(x, y, t) over a box, N nodes per
/// axis (Boost tables).
template <unsigned N>
double box_integral(const std::function<double(double, double, double)> &f,
                    double x0, double x1, double y0, double y1, double t0, double t1) {
  using GL = boost::math::quadrature::gauss<double, N>;
  // Boost stores nonnegative abscissae only; expand to the full rule.
  std::vector<double> xs, ws;
  const auto &a = GL::abscissa();
  const auto &w = GL::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    xs.push_back(a[i]);
    ws.push_back(w[i]);
    if (a[i] != 0.0) {
      xs.push_back(-a[i]);
      ws.push_back(w[i]);
    }
  }
  auto map = [](double u, double lo, double hi) { return lo + 0.5 * (hi - lo) * (u + 1.0); };
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      for (std::size_t l = 0; l < xs.size(); ++l)
        acc += ws[i] * ws[j] * ws[l] *
               f(map(xs[i], x0, x1), map(xs[j], y0, y1), map(xs[l], t0, t1));
  return acc * 0.125 * (x1 - x0) * (y1 - y0) * (t1 - t0);
}

/// Boost Gauss-Legendre on [a, b] for a complex integrand.
template <unsigned N>
cd line_integral(const std::function<cd(double)> &f, double a, double b) {
  const auto re = boost::math::quadrature::gauss<double, N>::integrate(
      [&](double u) { return f(u).real(); }, a, b);
  const auto im = boost::math::quadrature::gauss<double, N>::integrate(
      [&](double u) { return f(u).imag(); }, a, b);
  return {re, im};
}

/// Radical inverse in base b (Halton component).
inline double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

/// Quasi-Monte Carlo mean of f over a box times its measure, Halton(2,3,5).
inline double halton_integral(const std::function<double(double, double, double)> &f,
                              std::size_t points, double x0, double x1, double y0,
                              double y1, double t0, double t1) {
  double acc = 0.0;
  for (std::size_t i = 1; i <= points; ++i)
    acc += f(x0 + (x1 - x0) * radical_inverse(i, 2), y0 + (y1 - y0) * radical_inverse(i, 3),
             t0 + (t1 - t0) * radical_inverse(i, 5));
  return acc / static_cast<double>(points) * (x1 - x0) * (y1 - y0) * (t1 - t0);
}

/// int_a^b exp(i d u) du as a difference of exponentials.
inline cd segment(double d, double a, double b) {
  if (d == 0.0)
    return b - a;
  return (std::exp(cd(0.0, d * b)) - std::exp(cd(0.0, d * a))) / cd(0.0, d);
}

/// First-order one-photon POVM matrix from its definition:
/// (c/V) int_rect int_window conj(e_i) e_j at t - tau, helicity diagonal.
inline Eigen::MatrixXcd povm_matrix(const GridSpec &g, double tau, double x0,
                                    double x1, double y0, double y1, double t0,
                                    double t1) {
  const auto ms = modes(g);
  const auto d = static_cast<Eigen::Index>(2 * ms.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  const double c = g.c_light;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = 0; j < ms.size(); ++j) {
      // conj(e_i) e_j = exp(i (kx_i - kx_j) x + ... - i (k_i - k_j) c t)
      const cd v = segment(ms[i].kx - ms[j].kx, x0, x1) *
                   segment(ms[i].ky - ms[j].ky, y0, y1) *
                   segment(-(ms[i].k - ms[j].k) * c, t0 - tau, t1 - tau) * c /
                   volume(g);
      M(2 * i, 2 * j) = v;
      M(2 * i + 1, 2 * j + 1) = v;
    }
  }
  return M;
}

/// Normal-ordered pair density <:n(r) n(r'):> for the state
/// sum c_ij a_i^dag a_j^dag |0> (c need not be symmetric; normalized here),
/// by explicit Wick contraction.
inline double pair_density(const GridSpec &g, const Eigen::MatrixXcd &c, double x,
                           double y, double t, double xp, double yp, double tp) {
  const auto ms = modes(g);
  const auto d = c.rows();
  // a_j a_i |psi> = (c_ij + c_ji) |0>; <psi|psi> = sum conj(c_ij) (c_ij + c_ji)
  const Eigen::MatrixXcd pair = c + c.transpose();
  const double norm = (c.conjugate().array() * pair.array()).sum().real();
  const double V = volume(g);
  double acc = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      cd amp{};
      for (Eigen::Index i = s; i < d; i += 2)
        for (Eigen::Index j = sp; j < d; j += 2)
          amp += pair(i, j) * phase(ms[static_cast<std::size_t>(i / 2)], g.c_light, x, y, 0, t) *
                 phase(ms[static_cast<std::size_t>(j / 2)], g.c_light, xp, yp, 0, tp);
      acc += std::norm(amp) / (V * V);
    }
  }
  return acc / norm;
}

/// Probability of later photon in (M_later) and earlier in (M_earlier) for
/// windows that do not overlap: 2 sum conj(c_ij) c_kl M[i,k] M'[j,l], by an
/// explicit four-index loop. c symmetric and unit-norm.
inline double disjoint_pair_probability(const Eigen::MatrixXcd &c,
                                        const Eigen::MatrixXcd &M,
                                        const Eigen::MatrixXcd &Mp) {
  const auto d = c.rows();
  cd acc{};
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (c(i, j) == 0.0)
        continue;
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l)
          acc += std::conj(c(i, j)) * c(k, l) * M(i, k) * Mp(j, l);
    }
  return 2.0 * acc.real();
}

/// Same-window ordered pair probability: outer time by 50-point Boost GL,
/// inner window [t0, t] in closed form via povm_matrix, rate density at t
/// from the pixel overlap times the temporal phase.
inline double same_window_pair_probability(const GridSpec &g, double tau,
                                           const Eigen::MatrixXcd &c,
                                           const std::array<double, 4> &later,
                                           const std::array<double, 4> &earlier,
                                           double t0, double t1) {
  const auto ms = modes(g);
  const auto d = c.rows();
  auto rate = [&](double t) {
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = 0; j < ms.size(); ++j) {
        const cd v = segment(ms[i].kx - ms[j].kx, later[0], later[1]) *
                     segment(ms[i].ky - ms[j].ky, later[2], later[3]) *
                     std::exp(cd(0.0, -(ms[i].k - ms[j].k) * g.c_light * (t - tau))) *
                     g.c_light / volume(g);
        R(2 * i, 2 * j) = v;
        R(2 * i + 1, 2 * j + 1) = v;
      }
    return R;
  };
  return boost::math::quadrature::gauss<double, 50>::integrate(
      [&](double t) {
        const auto W = povm_matrix(g, tau, earlier[0], earlier[1], earlier[2],
                                   earlier[3], t0, t);
        return disjoint_pair_probability(c, rate(t), W);
      },
      t0, t1);
}

/// First-order Taylor delay of arg(sqrt(kk') / (a k + a k' - i n (k - k')))
/// in (k - k') c at k = k' = k0: n / (2 c gamma k0).
inline double taylor_tau(double gamma, double n, double c, double k0) {
  return n / (2.0 * c * gamma * k0);
}

} // namespace oracle
