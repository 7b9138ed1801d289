#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <photon_povm/experiments.hpp>

#include "support.hpp"

using namespace photon_povm;
using support::make_grid;
using support::two_pi;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

double frequency(const DetectionRecord &r, std::size_t outcome) {
  const auto it = r.counts.find(outcome);
  return it == r.counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(r.trials);
}

bool within_3_sigma(double f, double p, std::size_t n) {
  return std::abs(f - p) <= 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

DetectorParams fitted(const ModeGrid &grid) {
  auto p = make_detector_params(0.2, 1.0, grid);
  fit_tau(p, grid);
  return p;
}

} // namespace

TEST_CASE("counter RNG") {
  CHECK(std::string(CounterRng::kName) == "splitmix64-ctr/1");
  // Reference splitmix64 output for state 0 after one increment.
  CHECK(CounterRng::mix(0) == 0xe220a8397b1dcdafULL);
  CHECK(CounterRng::bits(1, 2, 3) == CounterRng::bits(1, 2, 3));
  CHECK(CounterRng::bits(1, 2, 3) != CounterRng::bits(1, 3, 2));
  CHECK(CounterRng::bits(1, 2, 3) != CounterRng::bits(2, 2, 3));
  double mean = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = CounterRng::uniform(9, static_cast<std::uint64_t>(i), 0);
    CHECK_FALSE((u < 0.0 || u >= 1.0));
    mean += u;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("sample_index") {
  const std::vector<double> cdf{0.25, 0.25, 0.75, 1.0};
  CHECK(sample_index(cdf, 0.0) == 0);
  CHECK(sample_index(cdf, 0.2499) == 0);
  CHECK(sample_index(cdf, 0.25) == 2); // outcome 1 has zero weight
  CHECK(sample_index(cdf, 0.7) == 2);
  CHECK(sample_index(cdf, 0.9999999) == 3);
  const std::vector<double> scaled{0.5, 1.0, 2.0};
  CHECK(sample_index(scaled, 0.6) == 2);
}

TEST_CASE("single mode on 2x2 pixels is uniform") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 2, 2, 1);
  const auto s = make_single_mode(grid, 22, Helicity::Plus);
  const std::size_t N = 100000;
  const auto rec = sample_one_photon(s, px, p, KernelKind::FirstOrder, N, 5);
  CHECK(rec.events.size() == N);
  for (std::size_t o = 0; o < 4; ++o)
    CHECK(within_3_sigma(frequency(rec, o), 0.25, N));
}

TEST_CASE("a localized pulse fires its pixel") {
  // Broad transverse spectrum, phases shifting the packet to the centre of
  // pixel (1, 1).
  GridSpec spec{two_pi, two_pi, two_pi, 100.0, 1.0, {-4, 4}, {-4, 4}, {0, 0}, 0.01};
  const auto grid = make_grid(spec);
  const auto p = make_detector_params(0.2, 1.0, *grid);
  const double x0 = 1.5 * std::numbers::pi, y0 = 1.5 * std::numbers::pi;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid->dim()));
  for (std::size_t m = 0; m < grid->size(); ++m) {
    const auto &mode = grid->modes()[m];
    const double env = std::exp(-(mode.kx * mode.kx + mode.ky * mode.ky) / (4.0 * 2.0 * 2.0));
    c(static_cast<Eigen::Index>(2 * m)) = env * std::polar(1.0, mode.kx * x0 + mode.ky * y0);
  }
  const auto s = OnePhotonState::normalized(grid, c);
  const auto px = make_pixel_grid(*grid, 2, 2, 1);
  const auto probs = one_photon_probabilities(s, px, p, KernelKind::FirstOrder);
  const int target = px.index({1, 1});
  CHECK(probs[static_cast<std::size_t>(target)] > 0.9);
  const auto rec = sample_one_photon(probs, px, 20000, 3);
  CHECK(frequency(rec, static_cast<std::size_t>(target)) > 0.9);
}

TEST_CASE("records are deterministic and independent of worker count") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 4, 4, 4);
  std::mt19937_64 rng(8);
  const auto s = support::random_state(rng, grid);
  const auto probs = one_photon_probabilities(s, px, p, KernelKind::FirstOrder);

  ::setenv("PHOTON_POVM_THREADS", "1", 1);
  const auto a = sample_one_photon(probs, px, 50000, 77);
  ::setenv("PHOTON_POVM_THREADS", "7", 1);
  const auto b = sample_one_photon(probs, px, 50000, 77);
  ::unsetenv("PHOTON_POVM_THREADS");
  const auto c = sample_one_photon(probs, px, 50000, 77);
  CHECK(a == b);
  CHECK(a == c);
  CHECK_FALSE(a == sample_one_photon(probs, px, 50000, 78));

  // A prefix of trials is unchanged by asking for more.
  const auto longer = sample_one_photon(probs, px, 60000, 77);
  CHECK(std::equal(a.events.begin(), a.events.end(), longer.events.begin()));

  std::ostringstream x, y;
  write_record_csv(x, a, "abc");
  write_record_csv(y, b, "abc");
  CHECK(x.str() == y.str());
}

TEST_CASE("probability deficit") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 2, 2, 1);
  std::vector<double> probs{0.25, 0.25, 0.25, 0.2499};
  CHECK(code_of([&] { sample_one_photon(probs, px, 10, 1); }) == ErrorCode::ProbabilityDeficit);
  probs.back() = 0.25 - 1e-8;
  CHECK_NOTHROW(sample_one_photon(probs, px, 10, 1));

  // A detector shorter than the period misses part of the pulse.
  const PixelGrid short_window(2, 2, 1, two_pi, two_pi, 0.5 * two_pi);
  const auto s = make_single_mode(grid, 0, Helicity::Plus);
  CHECK(code_of([&] { sample_one_photon(s, short_window, p, KernelKind::FirstOrder, 10, 1); }) ==
        ErrorCode::ProbabilityDeficit);

  TwoPhotonTable t(1, 1);
  t.at(0, 0, 0, 0) = 0.99;
  CHECK(code_of([&] { sample_two_photon(t, PixelGrid(1, 1, 1, 1, 1, 1), 10, 1); }) ==
        ErrorCode::ProbabilityDeficit);
}

TEST_CASE("two-photon records: two events per trial, earliest first") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 2, 2, 3);
  std::mt19937_64 rng(21);
  const auto s = support::random_two_photon(rng, grid);
  const auto rec = sample_two_photon(s, px, p, 20000, 4);
  CHECK(rec.photons_per_trial == 2);
  CHECK(rec.events.size() == 2 * rec.trials);
  for (std::size_t t = 0; t < rec.trials; ++t) {
    const auto ev = rec.trial(t);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].time_bin <= ev[1].time_bin);
  }
  CHECK(rec == sample_two_photon(s, px, p, 20000, 4));
}

TEST_CASE("opposite-helicity product pair: pixel pairs follow the marginals") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 2, 2, 1);
  const auto a = make_single_mode(grid, 10, Helicity::Plus);
  const auto b = make_single_mode(grid, 33, Helicity::Minus);
  const auto s = make_product_two_photon(a, b);
  const auto table = two_photon_table(p, s, px);
  const std::size_t N = 100000;
  const auto rec = sample_two_photon(table, px, N, 12);
  // Each photon is uniform over the four pixels and they are independent.
  for (std::size_t o = 0; o < table.outcome_count(); ++o) {
    CHECK(std::abs(table.probabilities()[o] - 1.0 / 16.0) < 1e-8);
    CHECK(within_3_sigma(frequency(rec, o), 1.0 / 16.0, N));
  }
}

TEST_CASE("correlated pairs coincide more often than separable ones") {
  const auto grid = make_grid(support::grid45_spec());
  const auto p = fitted(*grid);
  const auto px = make_pixel_grid(*grid, 4, 4, 1);
  SpdcPulse pulse;
  pulse.pump_width = 0.3;
  pulse.wk = 0.6;
  pulse.k_center = 10.0;
  const auto corr = make_correlated_two_photon(grid, pulse);
  const auto sep = make_matched_separable(corr, SpdcType::TypeII);
  const std::size_t N = 100000;

  auto near = [&](const TwoPhotonTable &t, const DetectionRecord &r) {
    double exact = 0.0, seen = 0.0;
    for (std::size_t o = 0; o < t.outcome_count(); ++o) {
      const auto oc = t.outcome(o);
      const auto c1 = px.coord(oc.pixel), c2 = px.coord(oc.pixel2);
      if (std::abs(c1.ix - c2.ix) + std::abs(c1.iy - c2.iy) <= 1) {
        exact += t.probabilities()[o];
        seen += frequency(r, o);
      }
    }
    return std::pair{exact, seen};
  };
  const auto tc = two_photon_table(p, corr, px);
  const auto ts = two_photon_table(p, sep, px);
  const auto [ec, fc] = near(tc, sample_two_photon(tc, px, N, 1));
  const auto [es, fs] = near(ts, sample_two_photon(ts, px, N, 2));
  CHECK(within_3_sigma(fc, ec, N));
  CHECK(within_3_sigma(fs, es, N));
  CHECK(ec > es);
  const double sigma = std::sqrt(ec * (1 - ec) / N + es * (1 - es) / N);
  CHECK(std::abs((fc - fs) - (ec - es)) <= 3.0 * sigma);
}

TEST_CASE("total variation at 10^5 trials") {
  const ExperimentConfig cfg;
  const auto setup = make_setup(cfg);
  const auto s = make_one_photon_state(cfg, setup.grid);
  const auto probs = one_photon_probabilities(s, setup.pixels, setup.params, KernelKind::FirstOrder);
  const auto rec = sample_one_photon(probs, setup.pixels, 100000, cfg.seed);
  CHECK(total_variation(rec, probs) < 0.01);
  DetectionRecord empty;
  CHECK(code_of([&] { total_variation(empty, probs); }) == ErrorCode::EmptyRecord);
}

TEST_CASE("collapse onto the vacuum") {
  const std::vector<DetectionEvent> one{{1, 0, 3}};
  const auto c1 = collapse_state(one, 4);
  REQUIRE(c1.factors.size() == 1);
  CHECK(c1.factors[0].labels() == 8);
  CHECK(c1.factors[0].amplitude() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));
  const auto [num, den] = c1.squared_norm_rational();
  CHECK(num == den);
  CHECK(std::abs(c1.squared_norm() - 1.0) < 1e-15);
  CHECK(c1.photon_sector == PhotonSector::Vacuum);
  const auto labels = c1.labels(0);
  CHECK(labels.size() == 8);
  CHECK(std::count_if(labels.begin(), labels.end(), [](auto l) { return l.sigma == 1; }) == 4);

  const std::vector<DetectionEvent> two{{0, 0, 1}, {1, 1, 2}};
  const auto c2 = collapse_state(two, 3);
  CHECK(c2.factors.size() == 2);
  CHECK(c2.factors[1].pixel_x == 1);
  const auto [n2, d2] = c2.squared_norm_rational();
  CHECK(n2 == 36);
  CHECK(d2 == 36);
  CHECK(std::abs(c2.squared_norm() - 1.0) < 1e-15);
  CHECK(c2.photon_sector == PhotonSector::Vacuum);

  CHECK(code_of([] { collapse_state(std::span<const DetectionEvent>{}, 2); }) ==
        ErrorCode::EmptyRecord);
  CHECK(code_of([&] { collapse_state(one, 0); }) == ErrorCode::InvalidArgument);

  DetectionRecord rec;
  rec.trials = 1;
  rec.events = one;
  CHECK(collapse_state(rec, 0, 2).factors.size() == 1);
  CHECK(code_of([&] { collapse_state(rec, 1, 2); }) == ErrorCode::EmptyRecord);
}

TEST_CASE("record CSV") {
  DetectionRecord rec;
  rec.seed = 42;
  rec.photons_per_trial = 2;
  rec.trials = 2;
  rec.events = {{0, 1, 0}, {1, 1, 3}, {2, 0, 1}, {2, 0, 1}};
  std::ostringstream os;
  write_record_csv(os, rec, "0123456789abcdef");
  CHECK(os.str() == "# generator=splitmix64-ctr/1\n"
                    "# seed=42\n"
                    "# config_hash=0123456789abcdef\n"
                    "trial,photon,pixel_x,pixel_y,time_bin\n"
                    "0,0,0,1,0\n"
                    "0,1,1,1,3\n"
                    "1,0,2,0,1\n"
                    "1,1,2,0,1\n");
}
