#include <photon_povm/experiments.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <photon_povm/format.hpp>

namespace photon_povm {

namespace {

[[noreturn]] void config_error(const std::string &msg) {
  throw Error(ErrorCode::ConfigError, msg);
}

class OutputFile {
public:
  OutputFile(Report &report, const std::filesystem::path &dir,
             const std::string &name)
      : path_(dir / name), os_(path_, std::ios::binary | std::ios::trunc) {
    if (!os_)
      throw Error(ErrorCode::IoError, "cannot write '" + path_.string() + "'");
    report.files.push_back(path_);
  }
  std::ofstream &os() { return os_; }

private:
  std::filesystem::path path_;
  std::ofstream os_;
};

template <class Fn>
Report guarded(const std::filesystem::path &out_dir, Fn &&fn) {
  Report report;
  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
      throw Error(ErrorCode::IoError,
                  "cannot create '" + out_dir.string() + "': " + ec.message());
    fn(report);
  } catch (const Error &e) {
    report.exit_code = e.code() == ErrorCode::ConfigError ? 2 : 1;
    report.messages.emplace_back(e.what());
  }
  return report;
}

std::size_t shell_count(const GridSpec &g) {
  return static_cast<std::size_t>(g.mz.size());
}

double pulse_center(const ExperimentConfig &c) {
  return c.k_center > 0.0 ? c.k_center : c.grid.k0;
}

bool is_one_photon(PulseFamily f) {
  return f == PulseFamily::Gaussian || f == PulseFamily::SingleMode;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

} // namespace

Setup make_setup(const ExperimentConfig &config) {
  validate(config);
  auto grid = std::make_shared<const ModeGrid>(build_mode_grid(config.grid));
  auto params = make_detector_params(config.gamma, config.n_index, *grid);
  if (shell_count(config.grid) >= 3)
    fit_tau(params, *grid, config.tau_fit_half_width);
  else
    params.tau = analytic_tau(params);
  auto pixels = make_pixel_grid(*grid, config.npx, config.npy, config.time_bins);
  return {std::move(grid), params, pixels};
}

OnePhotonState make_one_photon_state(const ExperimentConfig &c,
                                     const GridPtr &grid) {
  switch (c.family) {
  case PulseFamily::Gaussian: {
    GaussianPulse p;
    p.kx0 = c.kx0;
    p.ky0 = c.ky0;
    p.x0 = c.x0;
    p.y0 = c.y0;
    p.k_center = pulse_center(c);
    p.wx = c.wx;
    p.wy = c.wy;
    p.wk = c.wk;
    p.weight_plus = c.weight_plus;
    p.weight_minus = c.weight_minus;
    return make_gaussian_one_photon(grid, p);
  }
  case PulseFamily::SingleMode: {
    const auto m = grid->find(c.mode_mx, c.mode_my, c.mode_mz);
    if (!m)
      config_error("pulse.mx/my/mz = (" + std::to_string(c.mode_mx) + ", " +
                   std::to_string(c.mode_my) + ", " + std::to_string(c.mode_mz) +
                   ") is not on the grid");
    return make_single_mode(grid, *m,
                            c.mode_sigma > 0 ? Helicity::Plus : Helicity::Minus);
  }
  default:
    config_error("pulse.family must be gaussian or single_mode for this command");
  }
}

TwoPhotonState make_two_photon_state(const ExperimentConfig &c,
                                     const GridPtr &grid) {
  SpdcPulse spdc;
  spdc.pump_width = c.pump_width;
  if (c.relative_width > 0.0)
    spdc.relative_width = c.relative_width;
  spdc.k_center = pulse_center(c);
  spdc.wk = c.wk;
  spdc.type = c.polarization;
  switch (c.family) {
  case PulseFamily::Spdc:
    return make_correlated_two_photon(grid, spdc);
  case PulseFamily::Separable:
    return make_matched_separable(make_correlated_two_photon(grid, spdc),
                                  c.polarization);
  case PulseFamily::Product: {
    ExperimentConfig one = c;
    one.family = PulseFamily::Gaussian;
    const auto a = make_one_photon_state(one, grid);
    return make_product_two_photon(a, a);
  }
  default:
    config_error("pulse.family must be spdc, separable or product for this command");
  }
}

std::string output_header(const std::string &command,
                          const ExperimentConfig &config) {
  return "# photon-povm " + command + "\n# config_hash=" + config.hash() +
         "\n# seed=" + std::to_string(config.seed) + "\n";
}

Report run_povm_check(const ExperimentConfig &config,
                      const std::filesystem::path &out_dir) {
  return guarded(out_dir, [&](Report &report) {
    const auto s = make_setup(config);
    const auto &grid = *s.grid;
    const int P = s.pixels.pixel_count();
    const int B = s.pixels.time_bins();

    OutputFile diag(report, out_dir, "povm_check.csv");
    diag.os() << output_header("povm-check", config)
              << "kernel,pixel_x,pixel_y,time_bin,hermiticity_error,min_eigenvalue\n";
    double fo_min_eig = 0.0, fo_herm = 0.0;
    bool first = true;
    for (KernelKind kind : {KernelKind::FirstOrder, KernelKind::Exact}) {
      const char *name = kind == KernelKind::Exact ? "exact" : "first_order";
      for (int n = 0; n < P; ++n) {
        for (int b = 0; b < B; ++b) {
          const auto el = povm_element(s.params, grid, s.pixels, n, s.pixels.bin(b), kind);
          const auto d = diagnose(el);
          const auto pc = s.pixels.coord(n);
          diag.os() << name << ',' << pc.ix << ',' << pc.iy << ',' << b << ','
                    << format_double(d.hermiticity_error) << ','
                    << format_double(d.min_eigenvalue) << '\n';
          if (kind == KernelKind::FirstOrder) {
            fo_min_eig = first ? d.min_eigenvalue : std::min(fo_min_eig, d.min_eigenvalue);
            fo_herm = std::max(fo_herm, d.hermiticity_error);
            first = false;
          }
          if (kind == KernelKind::FirstOrder && n == 0 && b == 0) {
            OutputFile elf(report, out_dir, "povm_element_0.csv");
            elf.os() << output_header("povm-check", config);
            write_element_csv(elf.os(), el);
          }
        }
      }
    }

    const double fo_res = completeness_residual(s.params, grid, s.pixels, KernelKind::FirstOrder);
    const double ex_res = completeness_residual(s.params, grid, s.pixels, KernelKind::Exact);
    OutputFile summary(report, out_dir, "povm_check_summary.csv");
    summary.os() << output_header("povm-check", config)
                 << "kernel,completeness_residual\n"
                 << "first_order," << format_double(fo_res) << '\n'
                 << "exact," << format_double(ex_res) << '\n';

    const bool ok_res = fo_res < 1e-10;
    const bool ok_eig = fo_min_eig >= -1e-12;
    report.messages.push_back(pass_fail(ok_res) + " first-order completeness residual " +
                              format_double(fo_res) + " (bound 1e-10)");
    report.messages.push_back(pass_fail(ok_eig) + " first-order min eigenvalue " +
                              format_double(fo_min_eig) + " (bound -1e-12)");
    report.messages.push_back("info max hermiticity error " + format_double(fo_herm) +
                              ", exact-kernel residual " + format_double(ex_res));
    report.exit_code = ok_res && ok_eig ? 0 : 1;
  });
}

std::vector<KernelCompareRow> kernel_compare_rows(const ExperimentConfig &c) {
  validate(c);
  if (c.bandwidths.size() < 2)
    config_error("pulse.bandwidths needs at least 2 entries to fit a slope");
  std::vector<KernelCompareRow> rows;
  for (double frac : c.bandwidths) {
    const double wk = frac * c.grid.k0;
    GridSpec g = c.grid;
    g.T = 2.0 * std::numbers::pi * c.shells_per_width / (g.c_light * wk);
    g.mx = {0, 0};
    g.my = {0, 0};
    g.mz = {-c.half_span, c.half_span};
    auto grid = std::make_shared<const ModeGrid>(build_mode_grid(g));

    GaussianPulse pulse;
    pulse.k_center = g.k0;
    pulse.wk = wk;
    pulse.weight_plus = c.weight_plus;
    pulse.weight_minus = c.weight_minus;
    const auto state = make_gaussian_one_photon(grid, pulse);

    auto params = make_detector_params(c.gamma, c.n_index, *grid);
    const double tau = fit_tau(params, *grid, c.tau_fit_half_width);

    const double span = 6.0 / (g.c_light * wk);
    double max_diff = 0.0, max_exact = 0.0;
    for (int i = 0; i < c.scan_points; ++i) {
      const double t = tau - span + 2.0 * span * i / (c.scan_points - 1);
      const double ex = w1_exact(params, state, 0.0, 0.0, t);
      const double fo = w1_first_order(params, state, 0.0, 0.0, t);
      max_diff = std::max(max_diff, std::abs(fo - ex));
      max_exact = std::max(max_exact, ex);
    }
    rows.push_back({frac, max_diff / max_exact, tau, analytic_tau(params)});
  }
  return rows;
}

double log_log_slope(const std::vector<KernelCompareRow> &rows) {
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto &r : rows) {
    const double x = std::log(r.wk_over_k0);
    const double y = std::log(r.max_rel_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Report run_kernel_compare(const ExperimentConfig &config,
                          const std::filesystem::path &out_dir) {
  return guarded(out_dir, [&](Report &report) {
    const auto rows = kernel_compare_rows(config);
    const double slope = log_log_slope(rows);

    OutputFile out(report, out_dir, "kernel_compare.csv");
    out.os() << output_header("kernel-compare", config)
             << "# log_log_slope=" << format_double(slope) << '\n'
             << "wk_over_k0,max_rel_error,fitted_tau,analytic_tau\n";
    bool tau_ok = true;
    for (const auto &r : rows) {
      out.os() << format_double(r.wk_over_k0) << ',' << format_double(r.max_rel_error)
               << ',' << format_double(r.fitted_tau) << ','
               << format_double(r.analytic_tau) << '\n';
      tau_ok = tau_ok && std::abs(r.fitted_tau - r.analytic_tau) <= 0.05 * r.analytic_tau;
    }
    const bool slope_ok = slope >= 1.7 && slope <= 2.3;
    report.messages.push_back(pass_fail(slope_ok) + " log-log error slope " +
                              format_double(slope) + " (range [1.7, 2.3])");
    report.messages.push_back(pass_fail(tau_ok) +
                              " fitted tau within 5% of analytic for every bandwidth");
    report.exit_code = slope_ok && tau_ok ? 0 : 1;
  });
}

namespace {

/// Summary of the post-measurement state of the first trial.
std::string collapse_message(const DetectionRecord &rec, int atoms) {
  const auto c = collapse_state(rec, 0, atoms);
  std::string pixels;
  for (const auto &f : c.factors)
    pixels += " (" + std::to_string(f.pixel_x) + "," + std::to_string(f.pixel_y) + ")";
  const auto [num, den] = c.squared_norm_rational();
  return "info collapse of trial 0: pixels" + pixels + ", " +
         std::to_string(c.factors.front().labels()) + " labels per photon at amplitude " +
         format_double(c.factors.front().amplitude()) + ", squared norm " +
         std::to_string(num) + "/" + std::to_string(den) + ", photon field in vacuum";
}

} // namespace

Report run_simulate(const ExperimentConfig &config,
                    const std::filesystem::path &out_dir) {
  return guarded(out_dir, [&](Report &report) {
    if (config.trials == 0)
      config_error("run.trials must be > 0");
    if (!is_one_photon(config.family))
      config_error("simulate needs pulse.family = gaussian or single_mode");
    const auto s = make_setup(config);
    const auto state = make_one_photon_state(config, s.grid);
    const auto probs = one_photon_probabilities(state, s.pixels, s.params, config.kernel);
    const auto rec = sample_one_photon(probs, s.pixels, config.trials, config.seed);
    const double tv = total_variation(rec, probs);

    {
      OutputFile out(report, out_dir, "simulate_record.csv");
      out.os() << "# photon-povm simulate\n";
      write_record_csv(out.os(), rec, config.hash());
    }
    OutputFile hist(report, out_dir, "simulate_histogram.csv");
    hist.os() << output_header("simulate", config)
              << "pixel_x,pixel_y,time_bin,count,exact_probability\n";
    const int B = s.pixels.time_bins();
    for (std::size_t o = 0; o < probs.size(); ++o) {
      const auto pc = s.pixels.coord(static_cast<int>(o / B));
      const auto it = rec.counts.find(o);
      hist.os() << pc.ix << ',' << pc.iy << ',' << o % B << ','
                << (it == rec.counts.end() ? 0 : it->second) << ','
                << format_double(probs[o]) << '\n';
    }
    const bool ok = tv < config.tv_bound;
    report.messages.push_back(pass_fail(ok) + " total variation " + format_double(tv) +
                              " (bound " + format_double(config.tv_bound) + ")");
    report.messages.push_back(collapse_message(rec, config.atoms_per_pixel));
    report.exit_code = ok ? 0 : 1;
  });
}

Report run_coincidence(const ExperimentConfig &config,
                       const std::filesystem::path &out_dir) {
  return guarded(out_dir, [&](Report &report) {
    if (config.trials == 0)
      config_error("run.trials must be > 0");
    if (is_one_photon(config.family))
      config_error("coincidence needs pulse.family = spdc, separable or product");
    const auto s = make_setup(config);
    const auto state = make_two_photon_state(config, s.grid);
    QuadratureOptions q;
    q.order = config.quadrature_order;
    const auto table = two_photon_table(s.params, state, s.pixels, q);
    const auto rec = sample_two_photon(table, s.pixels, config.trials, config.seed);

    const int P = s.pixels.pixel_count();
    const auto matrix = table.pixel_pair_matrix();
    std::vector<std::size_t> pair_counts(matrix.size(), 0);
    for (const auto &[o, count] : rec.counts) {
      const auto oc = table.outcome(o);
      pair_counts[static_cast<std::size_t>(oc.pixel) * P + oc.pixel2] += count;
    }

    OutputFile out(report, out_dir, "coincidence_matrix.csv");
    out.os() << output_header("coincidence", config)
             << "# total_probability=" << format_double(table.total()) << '\n'
             << "pixel_x,pixel_y,pixel2_x,pixel2_y,probability,count\n";
    double same = 0.0;
    for (int n = 0; n < P; ++n) {
      for (int m = 0; m < P; ++m) {
        const auto idx = static_cast<std::size_t>(n) * P + m;
        const auto a = s.pixels.coord(n);
        const auto b = s.pixels.coord(m);
        out.os() << a.ix << ',' << a.iy << ',' << b.ix << ',' << b.iy << ','
                 << format_double(matrix[idx]) << ',' << pair_counts[idx] << '\n';
        if (n == m)
          same += matrix[idx];
      }
    }
    {
      OutputFile r(report, out_dir, "coincidence_record.csv");
      r.os() << "# photon-povm coincidence\n";
      write_record_csv(r.os(), rec, config.hash());
    }
    report.messages.push_back("info total ordered pair probability " +
                              format_double(table.total()));
    report.messages.push_back("info same-pixel probability " + format_double(same));
    report.messages.push_back(collapse_message(rec, config.atoms_per_pixel));
    if (same > 0.05)
      report.warnings.push_back("same-pixel double-hit probability " + format_double(same) +
                                " exceeds 0.05; pixels are too coarse for this state");
    report.exit_code = 0;
  });
}

Report run_wavefunction(const ExperimentConfig &config,
                        const std::filesystem::path &out_dir) {
  return guarded(out_dir, [&](Report &report) {
    if (!is_one_photon(config.family))
      config_error("wavefunction needs pulse.family = gaussian or single_mode");
    const auto s = make_setup(config);
    const auto state = make_one_photon_state(config, s.grid);
    const auto lat = wave_function_lattice_fft(
        state, {config.lattice_nx, config.lattice_ny, config.lattice_nt});

    OutputFile out(report, out_dir, "wavefunction.csv");
    out.os() << output_header("wavefunction", config)
             << "x,y,t,re_plus,im_plus,re_minus,im_minus\n";
    for (int a = 0; a < lat.nx; ++a) {
      for (int b = 0; b < lat.ny; ++b) {
        for (int j = 0; j < lat.nt; ++j) {
          const auto p = lat.point(a, b, j);
          const auto &v = lat.values[lat.flat(a, b, j)];
          out.os() << format_double(p.x) << ',' << format_double(p.y) << ','
                   << format_double(p.t) << ',' << format_double(v[0].real()) << ','
                   << format_double(v[0].imag()) << ',' << format_double(v[1].real())
                   << ',' << format_double(v[1].imag()) << '\n';
        }
      }
    }
    report.messages.push_back("info lattice " + std::to_string(lat.nx) + "x" +
                              std::to_string(lat.ny) + "x" + std::to_string(lat.nt));
  });
}

} // namespace photon_povm
