#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <photon_povm/povm.hpp>

namespace photon_povm {

/// Counter-based generator: every draw is a pure function of
/// (seed, trial, draw), so results do not depend on worker count.
struct CounterRng {
  static constexpr const char *kName = "splitmix64-ctr/1";

  static std::uint64_t mix(std::uint64_t x);
  static std::uint64_t bits(std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t draw);
  /// Uniform in [0, 1) with 53 random bits.
  static double uniform(std::uint64_t seed, std::uint64_t trial,
                        std::uint64_t draw);
};

/// Index i with cdf[i-1] <= u * total < cdf[i]; zero-probability outcomes
/// are never returned.
std::size_t sample_index(std::span<const double> cumulative, double u);

struct DetectionEvent {
  int pixel_x = 0;
  int pixel_y = 0;
  int time_bin = 0;

  auto operator<=>(const DetectionEvent &) const = default;
};

/// Sampled outcomes. Events of trial t occupy
/// [t * photons_per_trial, (t + 1) * photons_per_trial), earliest first.
struct DetectionRecord {
  std::uint64_t seed = 0;
  int photons_per_trial = 1;
  std::size_t trials = 0;
  std::vector<DetectionEvent> events;
  /// Outcome (flat categorical index) -> count.
  std::map<std::size_t, std::size_t> counts;

  std::span<const DetectionEvent> trial(std::size_t t) const {
    return std::span<const DetectionEvent>(events).subspan(
        t * static_cast<std::size_t>(photons_per_trial),
        static_cast<std::size_t>(photons_per_trial));
  }
  bool operator==(const DetectionRecord &) const = default;
};

/// Exact one-photon probabilities per (pixel, bin), index pixel * B + bin.
std::vector<double> one_photon_probabilities(const OnePhotonState &state,
                                             const PixelGrid &pixels,
                                             const DetectorParams &params,
                                             KernelKind kernel);

/// ProbabilityDeficit if the probabilities do not sum to 1 within 1e-6.
DetectionRecord sample_one_photon(const OnePhotonState &state,
                                  const PixelGrid &pixels,
                                  const DetectorParams &params,
                                  KernelKind kernel, std::size_t trials,
                                  std::uint64_t seed);

/// Samples from a precomputed one-photon distribution.
DetectionRecord sample_one_photon(std::span<const double> probabilities,
                                  const PixelGrid &pixels, std::size_t trials,
                                  std::uint64_t seed);

/// ProbabilityDeficit if the joint table does not sum to 1 within 1e-4.
DetectionRecord sample_two_photon(const TwoPhotonState &state,
                                  const PixelGrid &pixels,
                                  const DetectorParams &params,
                                  std::size_t trials, std::uint64_t seed,
                                  const QuadratureOptions &options = {});

DetectionRecord sample_two_photon(const TwoPhotonTable &table,
                                  const PixelGrid &pixels, std::size_t trials,
                                  std::uint64_t seed);

/// Total variation distance between counts/trials and exact probabilities.
double total_variation(const DetectionRecord &record,
                       std::span<const double> probabilities);

enum class PhotonSector { Vacuum };

/// One detected photon: uniform superposition over 2N (helicity, atom)
/// labels of the firing pixel, amplitude 1/sqrt(2N).
struct CollapseFactor {
  int pixel_x = 0;
  int pixel_y = 0;
  int atoms = 1;
  std::uint64_t labels() const { return 2 * static_cast<std::uint64_t>(atoms); }
  double amplitude() const;
};

struct CollapseLabel {
  int sigma = 1;
  int atom = 0;
};

struct CollapseRecord {
  std::vector<CollapseFactor> factors;
  PhotonSector photon_sector = PhotonSector::Vacuum;

  /// Exact squared norm as numerator/denominator: prod(2N) / prod(2N).
  std::pair<std::uint64_t, std::uint64_t> squared_norm_rational() const;
  /// Floating-point squared norm from the stored amplitudes.
  double squared_norm() const;
  std::vector<CollapseLabel> labels(std::size_t factor) const;
};

/// EmptyRecord if no photon was detected; InvalidArgument if N < 1.
CollapseRecord collapse_state(std::span<const DetectionEvent> events,
                              int atoms_per_pixel);
CollapseRecord collapse_state(const DetectionRecord &record, std::size_t trial,
                              int atoms_per_pixel);

/// CSV: comment header (generator, seed, config hash), then
/// trial,photon,pixel_x,pixel_y,time_bin.
void write_record_csv(std::ostream &os, const DetectionRecord &record,
                      const std::string &config_hash);

} // namespace photon_povm
