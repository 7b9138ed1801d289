#include <photon_povm/measurement_sim.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include <photon_povm/format.hpp>
#include <photon_povm/parallel.hpp>

namespace photon_povm {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t seed, std::uint64_t trial,
                               std::uint64_t draw) {
  return mix(mix(mix(seed) ^ trial) ^ draw);
}

double CounterRng::uniform(std::uint64_t seed, std::uint64_t trial,
                           std::uint64_t draw) {
  return static_cast<double>(bits(seed, trial, draw) >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

namespace {

constexpr double kOnePhotonDeficit = 1e-6;
constexpr double kTwoPhotonDeficit = 1e-4;

std::vector<double> cumulative_of(std::span<const double> p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  return cdf;
}

void check_sum(std::span<const double> p, double tol) {
  double total = 0.0;
  for (double v : p)
    total += v;
  if (std::abs(total - 1.0) > tol)
    throw Error(ErrorCode::ProbabilityDeficit,
                "outcome probabilities sum to " + format_double(total) +
                    " (deficit " + format_double(1.0 - total) + ")");
}

/// Draws one outcome per trial; counts merged after the parallel pass.
std::vector<std::size_t> draw_outcomes(std::span<const double> p,
                                       std::size_t trials, std::uint64_t seed) {
  const auto cdf = cumulative_of(p);
  std::vector<std::size_t> out(trials);
  parallel_for(trials, [&](std::size_t t) {
    out[t] = sample_index(cdf, CounterRng::uniform(seed, t, 0));
  });
  return out;
}

DetectionEvent event_of(const PixelGrid &pixels, int pixel, int bin) {
  const auto c = pixels.coord(pixel);
  return {c.ix, c.iy, bin};
}

} // namespace

std::vector<double> one_photon_probabilities(const OnePhotonState &state,
                                             const PixelGrid &pixels,
                                             const DetectorParams &params,
                                             KernelKind kernel) {
  const int B = pixels.time_bins();
  std::vector<double> p(static_cast<std::size_t>(pixels.pixel_count()) * B);
  for (int n = 0; n < pixels.pixel_count(); ++n)
    for (int b = 0; b < B; ++b)
      p[static_cast<std::size_t>(n) * B + b] = probability(
          povm_element(params, state.grid(), pixels, n, pixels.bin(b), kernel), state);
  return p;
}

DetectionRecord sample_one_photon(std::span<const double> probabilities,
                                  const PixelGrid &pixels, std::size_t trials,
                                  std::uint64_t seed) {
  check_sum(probabilities, kOnePhotonDeficit);
  const int B = pixels.time_bins();
  DetectionRecord rec;
  rec.seed = seed;
  rec.photons_per_trial = 1;
  rec.trials = trials;
  const auto outcomes = draw_outcomes(probabilities, trials, seed);
  rec.events.reserve(trials);
  for (std::size_t o : outcomes) {
    rec.events.push_back(event_of(pixels, static_cast<int>(o / B), static_cast<int>(o % B)));
    ++rec.counts[o];
  }
  return rec;
}

DetectionRecord sample_one_photon(const OnePhotonState &state,
                                  const PixelGrid &pixels,
                                  const DetectorParams &params,
                                  KernelKind kernel, std::size_t trials,
                                  std::uint64_t seed) {
  const auto p = one_photon_probabilities(state, pixels, params, kernel);
  return sample_one_photon(p, pixels, trials, seed);
}

DetectionRecord sample_two_photon(const TwoPhotonTable &table,
                                  const PixelGrid &pixels, std::size_t trials,
                                  std::uint64_t seed) {
  const auto &p = table.probabilities();
  check_sum(p, kTwoPhotonDeficit);
  DetectionRecord rec;
  rec.seed = seed;
  rec.photons_per_trial = 2;
  rec.trials = trials;
  const auto outcomes = draw_outcomes(p, trials, seed);
  rec.events.reserve(2 * trials);
  for (std::size_t o : outcomes) {
    const auto oc = table.outcome(o);
    rec.events.push_back(event_of(pixels, oc.pixel2, oc.bin2)); // earlier
    rec.events.push_back(event_of(pixels, oc.pixel, oc.bin));
    ++rec.counts[o];
  }
  return rec;
}

DetectionRecord sample_two_photon(const TwoPhotonState &state,
                                  const PixelGrid &pixels,
                                  const DetectorParams &params,
                                  std::size_t trials, std::uint64_t seed,
                                  const QuadratureOptions &options) {
  const auto table = two_photon_table(params, state, pixels, options);
  return sample_two_photon(table, pixels, trials, seed);
}

double total_variation(const DetectionRecord &record,
                       std::span<const double> probabilities) {
  if (record.trials == 0)
    throw Error(ErrorCode::EmptyRecord, "no trials");
  double tv = 0.0;
  const double n = static_cast<double>(record.trials);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const auto it = record.counts.find(i);
    const double f = it == record.counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    tv += std::abs(f - probabilities[i]);
  }
  return 0.5 * tv;
}

double CollapseFactor::amplitude() const {
  return 1.0 / std::sqrt(static_cast<double>(labels()));
}

std::pair<std::uint64_t, std::uint64_t> CollapseRecord::squared_norm_rational() const {
  // Each factor: labels * (1/sqrt(labels))^2 = labels / labels.
  std::uint64_t num = 1, den = 1;
  for (const auto &f : factors) {
    num *= f.labels();
    den *= f.labels();
  }
  return {num, den};
}

double CollapseRecord::squared_norm() const {
  double n = 1.0;
  for (const auto &f : factors) {
    const double a = f.amplitude();
    n *= static_cast<double>(f.labels()) * a * a;
  }
  return n;
}

std::vector<CollapseLabel> CollapseRecord::labels(std::size_t factor) const {
  const auto &f = factors.at(factor);
  std::vector<CollapseLabel> out;
  out.reserve(f.labels());
  for (int sigma : {+1, -1})
    for (int atom = 0; atom < f.atoms; ++atom)
      out.push_back({sigma, atom});
  return out;
}

CollapseRecord collapse_state(std::span<const DetectionEvent> events,
                              int atoms_per_pixel) {
  if (events.empty())
    throw Error(ErrorCode::EmptyRecord, "no detected photon to collapse on");
  if (atoms_per_pixel < 1)
    throw Error(ErrorCode::InvalidArgument, "atoms per pixel must be >= 1");
  CollapseRecord rec;
  for (const auto &e : events)
    rec.factors.push_back({e.pixel_x, e.pixel_y, atoms_per_pixel});
  return rec;
}

CollapseRecord collapse_state(const DetectionRecord &record, std::size_t trial,
                              int atoms_per_pixel) {
  if (trial >= record.trials)
    throw Error(ErrorCode::EmptyRecord, "trial " + std::to_string(trial) + " not in record");
  return collapse_state(record.trial(trial), atoms_per_pixel);
}

void write_record_csv(std::ostream &os, const DetectionRecord &record,
                      const std::string &config_hash) {
  os << "# generator=" << CounterRng::kName << '\n';
  os << "# seed=" << record.seed << '\n';
  os << "# config_hash=" << config_hash << '\n';
  os << "trial,photon,pixel_x,pixel_y,time_bin\n";
  for (std::size_t t = 0; t < record.trials; ++t) {
    const auto ev = record.trial(t);
    for (std::size_t j = 0; j < ev.size(); ++j)
      os << t << ',' << j << ',' << ev[j].pixel_x << ',' << ev[j].pixel_y << ','
         << ev[j].time_bin << '\n';
  }
}

} // namespace photon_povm
