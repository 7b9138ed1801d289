#include <photon_povm/config.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <photon_povm/format.hpp>

namespace photon_povm {

namespace {

double parse_double(std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception &) {
    throw std::invalid_argument("not a number");
  }
  if (used != s.size())
    throw std::invalid_argument("trailing characters");
  if (!std::isfinite(out))
    throw std::invalid_argument("value must be finite");
  return out;
}

long long parse_int(std::string_view v) {
  long long out = 0;
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("not an integer");
  return out;
}

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("not a nonnegative integer");
  return out;
}

int parse_i32(std::string_view v) {
  const long long x = parse_int(v);
  if (x < -1000000000LL || x > 1000000000LL)
    throw std::invalid_argument("integer out of range");
  return static_cast<int>(x);
}

std::vector<double> parse_list(std::string_view v) {
  std::vector<double> out;
  for (const auto &item : split(v, ','))
    out.push_back(parse_double(trim(item)));
  return out;
}

std::string list_to_string(const std::vector<double> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ',';
    s += format_double(v[i]);
  }
  return s;
}

struct Field {
  std::string_view key;
  std::function<void(ExperimentConfig &, std::string_view)> set;
  std::function<std::string(const ExperimentConfig &)> get;
};

#define PP_DOUBLE(KEY, MEMBER)                                                 \
  Field {                                                                      \
    KEY, [](ExperimentConfig &c, std::string_view v) { c.MEMBER = parse_double(v); }, \
        [](const ExperimentConfig &c) { return format_double(c.MEMBER); }      \
  }
#define PP_INT(KEY, MEMBER)                                                    \
  Field {                                                                      \
    KEY, [](ExperimentConfig &c, std::string_view v) { c.MEMBER = parse_i32(v); }, \
        [](const ExperimentConfig &c) { return std::to_string(c.MEMBER); }     \
  }
#define PP_U64(KEY, MEMBER)                                                    \
  Field {                                                                      \
    KEY, [](ExperimentConfig &c, std::string_view v) { c.MEMBER = parse_u64(v); }, \
        [](const ExperimentConfig &c) { return std::to_string(c.MEMBER); }     \
  }

const std::vector<Field> &fields() {
  static const std::vector<Field> table = {
      PP_DOUBLE("grid.Lx", grid.Lx),
      PP_DOUBLE("grid.Ly", grid.Ly),
      PP_DOUBLE("grid.T", grid.T),
      PP_DOUBLE("grid.k0", grid.k0),
      PP_DOUBLE("grid.c", grid.c_light),
      PP_INT("grid.mx_min", grid.mx.lo),
      PP_INT("grid.mx_max", grid.mx.hi),
      PP_INT("grid.my_min", grid.my.lo),
      PP_INT("grid.my_max", grid.my.hi),
      PP_INT("grid.mz_min", grid.mz.lo),
      PP_INT("grid.mz_max", grid.mz.hi),
      PP_DOUBLE("grid.paraxial_limit", grid.paraxial_limit),
      PP_DOUBLE("detector.gamma", gamma),
      PP_DOUBLE("detector.n_index", n_index),
      PP_INT("detector.tau_fit_half_width", tau_fit_half_width),
      PP_INT("pixels.npx", npx),
      PP_INT("pixels.npy", npy),
      PP_INT("pixels.time_bins", time_bins),
      Field{"pulse.family",
            [](ExperimentConfig &c, std::string_view v) {
              if (v == "gaussian") c.family = PulseFamily::Gaussian;
              else if (v == "single_mode") c.family = PulseFamily::SingleMode;
              else if (v == "spdc") c.family = PulseFamily::Spdc;
              else if (v == "separable") c.family = PulseFamily::Separable;
              else if (v == "product") c.family = PulseFamily::Product;
              else throw std::invalid_argument(
                  "expected gaussian|single_mode|spdc|separable|product");
            },
            [](const ExperimentConfig &c) -> std::string {
              switch (c.family) {
              case PulseFamily::Gaussian: return "gaussian";
              case PulseFamily::SingleMode: return "single_mode";
              case PulseFamily::Spdc: return "spdc";
              case PulseFamily::Separable: return "separable";
              case PulseFamily::Product: return "product";
              }
              return "?";
            }},
      PP_DOUBLE("pulse.kx0", kx0),
      PP_DOUBLE("pulse.ky0", ky0),
      PP_DOUBLE("pulse.x0", x0),
      PP_DOUBLE("pulse.y0", y0),
      PP_DOUBLE("pulse.k_center", k_center),
      PP_DOUBLE("pulse.wx", wx),
      PP_DOUBLE("pulse.wy", wy),
      PP_DOUBLE("pulse.wk", wk),
      PP_DOUBLE("pulse.weight_plus", weight_plus),
      PP_DOUBLE("pulse.weight_minus", weight_minus),
      PP_INT("pulse.mx", mode_mx),
      PP_INT("pulse.my", mode_my),
      PP_INT("pulse.mz", mode_mz),
      PP_INT("pulse.sigma", mode_sigma),
      Field{"pulse.polarization",
            [](ExperimentConfig &c, std::string_view v) {
              if (v == "typeI") c.polarization = SpdcType::TypeI;
              else if (v == "typeII") c.polarization = SpdcType::TypeII;
              else throw std::invalid_argument("expected typeI|typeII");
            },
            [](const ExperimentConfig &c) -> std::string {
              return c.polarization == SpdcType::TypeI ? "typeI" : "typeII";
            }},
      PP_DOUBLE("pulse.pump_width", pump_width),
      PP_DOUBLE("pulse.relative_width", relative_width),
      Field{"pulse.bandwidths",
            [](ExperimentConfig &c, std::string_view v) { c.bandwidths = parse_list(v); },
            [](const ExperimentConfig &c) { return list_to_string(c.bandwidths); }},
      PP_INT("kernel_compare.shells_per_width", shells_per_width),
      PP_INT("kernel_compare.half_span", half_span),
      PP_INT("kernel_compare.scan_points", scan_points),
      PP_U64("run.trials", trials),
      PP_U64("run.seed", seed),
      Field{"run.kernel",
            [](ExperimentConfig &c, std::string_view v) {
              if (v == "first_order") c.kernel = KernelKind::FirstOrder;
              else if (v == "exact") c.kernel = KernelKind::Exact;
              else throw std::invalid_argument("expected first_order|exact");
            },
            [](const ExperimentConfig &c) -> std::string {
              return c.kernel == KernelKind::Exact ? "exact" : "first_order";
            }},
      PP_INT("run.quadrature_order", quadrature_order),
      PP_DOUBLE("run.tv_bound", tv_bound),
      PP_INT("run.atoms_per_pixel", atoms_per_pixel),
      PP_INT("wavefunction.nx", lattice_nx),
      PP_INT("wavefunction.ny", lattice_ny),
      PP_INT("wavefunction.nt", lattice_nt),
  };
  return table;
}

#undef PP_DOUBLE
#undef PP_INT
#undef PP_U64

[[noreturn]] void config_error(const std::string &msg) {
  throw Error(ErrorCode::ConfigError, msg);
}

} // namespace

void validate(const ExperimentConfig &c) {
  const auto &g = c.grid;
  if (!(g.Lx > 0) || !(g.Ly > 0) || !(g.T > 0))
    config_error("grid.Lx, grid.Ly and grid.T must be positive");
  if (!(g.k0 > 0))
    config_error("grid.k0 must be positive");
  if (!(g.c_light > 0))
    config_error("grid.c must be positive");
  if (g.mx.empty() || g.my.empty() || g.mz.empty())
    config_error("grid index ranges must be nonempty (min <= max)");
  if (!(g.paraxial_limit > 0))
    config_error("grid.paraxial_limit must be positive");
  if (!(c.gamma > 0))
    config_error("gamma must be positive");
  if (!(c.n_index >= 1))
    config_error("n_index must be >= 1");
  if (c.tau_fit_half_width < 1)
    config_error("detector.tau_fit_half_width must be >= 1");
  if (c.npx < 1 || c.npy < 1)
    config_error("pixels.npx and pixels.npy must be >= 1 to tile the detector");
  if (c.time_bins < 1)
    config_error("pixels.time_bins must be >= 1");
  if (!(c.wx > 0) || !(c.wy > 0) || !(c.wk > 0))
    config_error("pulse widths must be positive");
  if (c.mode_sigma != 1 && c.mode_sigma != -1)
    config_error("pulse.sigma must be +1 or -1");
  if (!(c.pump_width > 0))
    config_error("pulse.pump_width must be positive");
  if (c.relative_width < 0)
    config_error("pulse.relative_width must be >= 0");
  for (double b : c.bandwidths)
    if (!(b > 0))
      config_error("pulse.bandwidths entries must be positive");
  if (c.shells_per_width < 1 || c.half_span < 1 || c.scan_points < 2)
    config_error("kernel_compare settings out of range");
  if (c.quadrature_order < 1)
    config_error("run.quadrature_order must be >= 1");
  if (!(c.tv_bound > 0))
    config_error("run.tv_bound must be positive");
  if (c.atoms_per_pixel < 1)
    config_error("run.atoms_per_pixel must be >= 1");
  if (c.lattice_nx < 0 || c.lattice_ny < 0 || c.lattice_nt < 0)
    config_error("wavefunction lattice sizes must be >= 0");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<std::string_view> seen;
  int lineno = 0;
  for (const auto &raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string_view::npos)
      config_error(where + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto &table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field &f) { return f.key == key; });
    if (it == table.end())
      config_error(where + ": unknown key '" + std::string(key) + "'");
    if (std::find(seen.begin(), seen.end(), it->key) != seen.end())
      config_error(where + ": duplicate key '" + std::string(key) + "'");
    seen.push_back(it->key);
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument &e) {
      config_error(where + ": key '" + std::string(key) + "': " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string ExperimentConfig::canonical() const {
  std::vector<std::pair<std::string_view, std::string>> kv;
  for (const auto &f : fields())
    kv.emplace_back(f.key, f.get(*this));
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto &[k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(canonical())); }

} // namespace photon_povm
