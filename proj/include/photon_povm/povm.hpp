#pragma once

#include <iosfwd>
#include <vector>

#include <photon_povm/detector_kernel.hpp>

namespace photon_povm {

struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
};

struct TimeWindow {
  double t0 = 0.0;
  double dt = 0.0;

  double t1() const { return t0 + dt; }
};

struct PixelCoord {
  int ix = 0;
  int iy = 0;
};

/// Equal rectangular pixels tiling [0, Lx] x [0, Ly] and equal time bins
/// tiling [0, T]. Pixel index n = iy * npx + ix.
class PixelGrid {
public:
  PixelGrid(int npx, int npy, int time_bins, double Lx, double Ly, double T);

  int npx() const { return npx_; }
  int npy() const { return npy_; }
  int time_bins() const { return bins_; }
  int pixel_count() const { return npx_ * npy_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  double T() const { return T_; }

  Rect pixel(int n) const;
  PixelCoord coord(int n) const { return {n % npx_, n / npx_}; }
  int index(PixelCoord p) const { return p.iy * npx_ + p.ix; }
  TimeWindow bin(int b) const;
  TimeWindow full_window() const { return {0.0, T_}; }

private:
  int npx_, npy_, bins_;
  double Lx_, Ly_, T_;
};

/// Pixel grid covering the detector of a mode grid.
PixelGrid make_pixel_grid(const ModeGrid &grid, int npx, int npy, int time_bins);

enum class KernelKind { Exact, FirstOrder };

/// Hermitian matrix on the (mode x helicity) space with
/// <psi|P|psi> = c^H M c.
struct PovmElement {
  GridSpec grid_spec;
  int pixel = -1; ///< -1 for an arbitrary region
  Rect region;
  TimeWindow window;
  KernelKind kernel = KernelKind::FirstOrder;
  Eigen::MatrixXcd matrix;
};

/// int_a^b exp(i delta u) du, with the series branch for |delta (b-a)| < 1e-8.
cdouble interval_integral(double delta, double a, double b);

PovmElement povm_element(const DetectorParams &params, const ModeGrid &grid,
                         const Rect &region, const TimeWindow &window,
                         KernelKind kernel);
PovmElement povm_element(const DetectorParams &params, const ModeGrid &grid,
                         const PixelGrid &pixels, int pixel,
                         const TimeWindow &window, KernelKind kernel);

/// c^H M c. GridMismatch if the state lives on another grid.
double probability(const PovmElement &element, const OnePhotonState &state);

/// Max-norm of (sum over pixels and time bins of M) - identity.
double completeness_residual(const DetectorParams &params, const ModeGrid &grid,
                             const PixelGrid &pixels, KernelKind kernel);

struct ElementDiagnostics {
  double hermiticity_error = 0.0; ///< max |M - M^H|
  double min_eigenvalue = 0.0;
};

ElementDiagnostics diagnose(const PovmElement &element);

/// "# pixel=..." header then row,col,re,im for every entry.
void write_element_csv(std::ostream &os, const PovmElement &element);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int order);

struct QuadratureOptions {
  int order = 32;
  double tolerance = 1e-6; ///< max change when the order doubles
  bool check_convergence = true;
};

/// Probability that one photon lands in pixel n at t in the window and the
/// other in pixel np at an earlier t' in [t0, t]:
///   int dt int_An int_{t0}^{t} dt' int_Anp w2.
/// QuadratureNotConverged if doubling the order moves it by > tolerance.
double two_photon_probability(const DetectorParams &params,
                              const TwoPhotonState &state,
                              const PixelGrid &pixels, int n, int np,
                              const TimeWindow &window,
                              const QuadratureOptions &options = {});

/// Joint distribution over time-ordered outcomes: the later photon in
/// (pixel, bin), the earlier one in (pixel2, bin2) with bin2 <= bin.
class TwoPhotonTable {
public:
  TwoPhotonTable(int pixels, int bins);

  int pixels() const { return pixels_; }
  int bins() const { return bins_; }
  std::size_t outcome_count() const { return probs_.size(); }

  double &at(int pixel, int bin, int pixel2, int bin2);
  double at(int pixel, int bin, int pixel2, int bin2) const;

  struct Outcome {
    int pixel, bin, pixel2, bin2;
  };
  Outcome outcome(std::size_t flat) const;
  const std::vector<double> &probabilities() const { return probs_; }

  double total() const;
  /// Summed over bins: matrix[pixel][pixel2] (later, earlier).
  std::vector<double> pixel_pair_matrix() const;

private:
  std::size_t flat(int pixel, int bin, int pixel2, int bin2) const;
  int pixels_, bins_;
  std::vector<double> probs_;
};

TwoPhotonTable two_photon_table(const DetectorParams &params,
                                const TwoPhotonState &state,
                                const PixelGrid &pixels,
                                const QuadratureOptions &options = {});

} // namespace photon_povm
