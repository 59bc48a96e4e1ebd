#include "crosskerr/config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crosskerr/effective.hpp"
#include "crosskerr/floquet.hpp"
#include "crosskerr/protocols.hpp"
#include "crosskerr/random.hpp"
#include "crosskerr/tomography.hpp"

namespace crosskerr {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      cfg.set(section, "", "");  // ensure the section exists
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    cfg.set(section, key, value);
  }
  return cfg;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  for (auto& [name, entries] : sections_) {
    if (name == section) {
      if (key.empty()) return;
      for (auto& [k, v] : entries) {
        if (k == key) {
          v = value;
          return;
        }
      }
      entries.emplace_back(key, value);
      return;
    }
  }
  sections_.push_back({section, {}});
  if (!key.empty()) sections_.back().second.emplace_back(key, value);
}

const std::string* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries) {
      if (k == key) return &v;
    }
  }
  return nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) {
    throw ConfigError("config: missing required key [" + section + "] " + key);
  }
  return *v;
}

std::string ConfigFile::get_string_or(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  const std::string text = get_string(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key [" + section + "] " + key +
                      " is not a number: '" + text + "'");
  }
}

double ConfigFile::get_double_or(const std::string& section,
                                 const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

double ConfigFile::get_angle_rad(const std::string& section,
                                 const std::string& key) const {
  const std::string text = get_string(section, key);
  try {
    return parse_angle(text);
  } catch (const std::exception&) {
    throw ConfigError("config: key [" + section + "] " + key +
                      " is not an angle: '" + text + "'");
  }
}

long ConfigFile::get_int(const std::string& section,
                         const std::string& key) const {
  const std::string text = get_string(section, key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key [" + section + "] " + key +
                      " is not an integer: '" + text + "'");
  }
}

long ConfigFile::get_int_or(const std::string& section, const std::string& key,
                            long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key [" + section + "] " + key +
                    " is not a boolean: '" + v + "'");
}

void ConfigFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    set(key.substr(0, dot), key.substr(dot + 1), value);
    return;
  }
  // Bare key: must match exactly one existing key across sections.
  std::vector<std::string> matches;
  for (const auto& [name, entries] : sections_) {
    for (const auto& [k, v] : entries) {
      if (k == key) matches.push_back(name);
    }
  }
  if (matches.size() == 1) {
    set(matches.front(), key, value);
    return;
  }
  if (matches.empty()) {
    throw ConfigError("override '" + key + "': key not present in any section");
  }
  throw ConfigError("override '" + key + "': ambiguous, qualify with section.");
}

std::string ConfigFile::serialize() const {
  std::ostringstream out;
  for (const auto& [name, entries] : sections_) {
    out << "[" << name << "]\n";
    for (const auto& [k, v] : entries) {
      out << k << " = " << v << "\n";
    }
    out << "\n";
  }
  return out.str();
}

double parse_angle(const std::string& text) {
  std::string t = trim(text);
  double sign = 1.0;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    if (t[0] == '-') sign = -1.0;
    t = t.substr(1);
  }
  const auto pi_pos = t.find("pi");
  if (pi_pos == std::string::npos) {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(text);
    return sign * v;
  }
  double factor = 1.0;
  const std::string before = trim(t.substr(0, pi_pos));
  if (!before.empty()) {
    std::size_t pos = 0;
    factor = std::stod(before, &pos);
    if (pos != before.size()) throw std::invalid_argument(text);
  }
  double divisor = 1.0;
  const std::string after = trim(t.substr(pi_pos + 2));
  if (!after.empty()) {
    if (after[0] != '/') throw std::invalid_argument(text);
    std::size_t pos = 0;
    divisor = std::stod(trim(after.substr(1)), &pos);
  }
  return sign * factor * M_PI / divisor;
}

DeviceParams device_from_config(const ConfigFile& config) {
  const std::string preset = config.get_string_or("device", "preset", "fig3-bias");
  DeviceParams p;
  if (preset == "fig3-bias") {
    p = fig3_bias();
  } else if (preset == "fig2-bias") {
    p = fig2_bias();
  } else {
    throw ConfigError("config: [device] preset must be fig2-bias or fig3-bias, got '" +
                      preset + "'");
  }
  if (config.get_bool_or("device", "ramsey_driven_coherences", false)) {
    use_ramsey_driven_coherences(p);
  }
  auto opt = [&](const char* key, double& field) {
    field = config.get_double_or("device", key, field);
  };
  opt("omega_a_MHz", p.omega_a_MHz);
  opt("omega_b_MHz", p.omega_b_MHz);
  opt("omega_c_MHz", p.omega_c_MHz);
  opt("kerr_a_MHz", p.kerr_a_MHz);
  opt("kerr_b_MHz", p.kerr_b_MHz);
  opt("kerr_ab_MHz", p.kerr_ab_MHz);
  opt("anharmonicity_MHz", p.anharmonicity_MHz);
  opt("chi_a_MHz", p.chi_a_MHz);
  opt("chi_b_MHz", p.chi_b_MHz);
  opt("ej1_GHz", p.ej1_GHz);
  opt("ej2_GHz", p.ej2_GHz);
  opt("ec_GHz", p.ec_GHz);
  opt("flux", p.flux);
  opt("g_ac_MHz", p.g_ac_MHz);
  opt("g_bc_MHz", p.g_bc_MHz);
  for (const char* mode : {"a", "b", "c"}) {
    auto& c = p.coherences[mode];
    c.idle.t1_us = config.get_double_or(
        "device", std::string("t1_idle_") + mode + "_us", c.idle.t1_us);
    c.idle.tphi_us = config.get_double_or(
        "device", std::string("tphi_idle_") + mode + "_us", c.idle.tphi_us);
    c.driven.t1_us = config.get_double_or(
        "device", std::string("t1_driven_") + mode + "_us", c.driven.t1_us);
    c.driven.tphi_us = config.get_double_or(
        "device", std::string("tphi_driven_") + mode + "_us",
        c.driven.tphi_us);
  }
  p.validate();
  return p;
}

int resolve_workers(int cli_value) {
  if (cli_value > 0) return cli_value;
  if (const char* env = std::getenv("CROSSKERR_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw ConfigError("config: point counts must be >= 1");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  }
  return v;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out_ << format_number(values[i]) << (i + 1 < values.size() ? "," : "\n");
    }
  }
  void row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
    }
  }

 private:
  std::ofstream out_;
};

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

Vector named_two_mode_state(const ModeSystem& sys, const std::string& name) {
  const double s = std::sqrt(0.5);
  if (name == "00") return basis_ket(sys, {0, 0});
  if (name == "11") return basis_ket(sys, {1, 1});
  if (name == "++" || name == "plus-plus") {
    return superposition_ket(sys, {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
                             {0.5, 0.5, 0.5, 0.5});
  }
  if (name == "+0" || name == "plus-zero") {
    return superposition_ket(sys, {{0, 0}, {1, 0}}, {s, s});
  }
  if (name == "1+" || name == "one-plus") {
    return superposition_ket(sys, {{1, 0}, {1, 1}}, {s, s});
  }
  if (name == "bell") {
    return superposition_ket(sys, {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
                             {0.5, 0.5, 0.5, -0.5});
  }
  if (name == "plus02-two") {
    return superposition_ket(sys, {{0, 2}, {2, 2}}, {s, s});
  }
  if (name == "plus02-plus02") {
    return superposition_ket(sys, {{0, 0}, {0, 2}, {2, 0}, {2, 2}},
                             {0.5, 0.5, 0.5, 0.5});
  }
  throw ConfigError("config: unknown state name '" + name + "'");
}

// -- Experiment runners ---------------------------------------------------------

json run_chevron(const ConfigFile& cfg, const std::filesystem::path& dir,
                 int workers, std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  const double g1 = cfg.get_double("drive", "g1_MHz");
  const auto deltas =
      linspace(cfg.get_double("sweep", "delta_min_MHz"),
               cfg.get_double("sweep", "delta_max_MHz"),
               int(cfg.get_int("sweep", "delta_points")));
  const auto times = linspace(0.0, cfg.get_double("sweep", "t_max_us"),
                              int(cfg.get_int("sweep", "t_points")));
  const bool decoherence = cfg.get_bool_or("drive", "decoherence", true);
  const double ramp = cfg.get_double_or("drive", "ramp_us", 0.0);

  ChevronResult all;
  all.deltas_MHz = deltas;
  all.times_us = times;
  all.p_alice_vacuum.resize(deltas.size(), times.size());
  all.p_bob_vacuum.resize(deltas.size(), times.size());
  all.p_coupler_excited.resize(deltas.size(), times.size());

  const int nw = std::max(1, workers);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t d = next.fetch_add(1); d < deltas.size();
         d = next.fetch_add(1)) {
      const ChevronResult one =
          chevron_scan(params, g1, {deltas[d]}, times, decoherence, ramp);
      all.p_alice_vacuum.row(d) = one.p_alice_vacuum.row(0);
      all.p_bob_vacuum.row(d) = one.p_bob_vacuum.row(0);
      all.p_coupler_excited.row(d) = one.p_coupler_excited.row(0);
    }
  };
  for (int w = 0; w < nw; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  CsvWriter csv(dir / "chevron.csv",
                {"delta_MHz", "t_us", "p_alice_vac", "p_bob_vac", "p_coupler_e"});
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (std::size_t t = 0; t < times.size(); ++t) {
      csv.row({deltas[d], times[t], all.p_alice_vacuum(d, t),
               all.p_bob_vacuum(d, t), all.p_coupler_excited(d, t)});
    }
  }
  files.push_back(dir / "chevron.csv");

  json summary;
  summary["experiment"] = "chevron";
  summary["g1_MHz"] = g1;
  double max_pe = 0.0;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    max_pe = std::max(max_pe, all.p_coupler_excited.row(d).maxCoeff());
  }
  summary["max_coupler_excited"] = max_pe;
  return summary;
}

json run_crosskerr_sweep(const ConfigFile& cfg,
                         const std::filesystem::path& dir, int /*workers*/,
                         std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  const int dim_a = int(cfg.get_int_or("truncation", "dim_a", 4));
  const int dim_b = int(cfg.get_int_or("truncation", "dim_b", 4));
  const int dim_c = int(cfg.get_int_or("truncation", "dim_c", 12));
  const double eps = cfg.get_double("drive", "eps_MHz");
  const auto deltas = linspace(cfg.get_double("sweep", "delta_min_MHz"),
                               cfg.get_double("sweep", "delta_max_MHz"),
                               int(cfg.get_int("sweep", "delta_points")));
  const long max_flagged = cfg.get_int_or("sweep", "max_flagged", 0);

  const FloquetEngine engine(params, three_mode_system(dim_a, dim_b, dim_c));
  FloquetOptions opt;
  opt.initial_steps = int(cfg.get_int_or("sweep", "initial_steps", 4));
  opt.convergence_tol_MHz =
      cfg.get_double_or("sweep", "convergence_tol_MHz", 1e-4);
  const auto points = crosskerr_sweep(engine, eps, deltas, opt);

  CsvWriter csv(dir / "crosskerr_sweep.csv",
                {"delta_MHz", "g_ab_kHz", "confidence", "flags"});
  long flagged = 0;
  for (const auto& pt : points) {
    flagged += pt.flagged ? 1 : 0;
    csv.row({pt.delta_MHz, 1e3 * pt.g_ab_MHz, pt.confidence,
             pt.flagged ? 1.0 : 0.0});
  }
  files.push_back(dir / "crosskerr_sweep.csv");

  json summary;
  summary["experiment"] = "crosskerr-sweep";
  summary["eps_MHz"] = eps;
  summary["flagged_points"] = flagged;
  summary["static_kerr_ab_kHz"] = 1e3 * engine.dressed_params().kerr_ab_MHz;
  if (flagged > max_flagged) {
    throw FlaggedPointsError("crosskerr-sweep: " + std::to_string(flagged) +
                             " flagged points exceed the budget of " +
                             std::to_string(max_flagged));
  }
  return summary;
}

json run_ramsey(const ConfigFile& cfg, const std::filesystem::path& dir,
                int /*workers*/, std::vector<std::filesystem::path>& files) {
  const double g_ab = cfg.get_double("gate", "g_ab_MHz");
  const int control = int(cfg.get_int_or("gate", "control_photons", 1));
  const auto times = linspace(0.0, cfg.get_double("sweep", "t_max_us"),
                              int(cfg.get_int("sweep", "t_points")));
  const RamseyResult res = ramsey_crosskerr_effective(g_ab, control, times);

  // Simulated probe-coherence phases for the data product.
  const ModeSystem sys = two_mode_system(2, std::max(2, control + 1));
  const Operator h = build_effective_crosskerr(sys, g_ab);
  auto phases_for = [&](int nb) {
    const Vector psi =
        superposition_ket(sys, {{0, nb}, {1, nb}},
                          {std::sqrt(0.5), std::sqrt(0.5)});
    EvolveOptions opts;
    opts.store_states = true;
    const Trajectory traj =
        evolve_lindblad(LindbladModel::closed(h),
                        DensityMatrix::from_state(sys, psi), times, {}, opts);
    std::vector<double> phases;
    for (const auto& state : traj.states) {
      phases.push_back(std::arg(state.matrix()(sys.basis_index({0, nb}),
                                               sys.basis_index({1, nb}))));
    }
    return phases;
  };
  const auto phi0 = phases_for(0);
  const auto phi1 = phases_for(control);

  CsvWriter csv(dir / "ramsey.csv",
                {"t_us", "phase_control0_rad", "phase_control_rad"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    csv.row({times[i], phi0[i], phi1[i]});
  }
  files.push_back(dir / "ramsey.csv");

  json summary;
  summary["experiment"] = "ramsey";
  summary["g_ab_recovered_MHz"] = res.g_ab_MHz;
  summary["frame_slope_MHz"] = res.frame_slope_MHz;
  return summary;
}

json run_cz_gate(const ConfigFile& cfg, const std::filesystem::path& dir,
                 int /*workers*/, std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  const double g_ab = cfg.get_double("gate", "g_ab_MHz");
  const double phase = cfg.get_angle_rad("gate", "target_phase");
  const int n_a = int(cfg.get_int_or("gate", "n_a", 1));
  const int n_b = int(cfg.get_int_or("gate", "n_b", 1));
  const std::string initial = cfg.get_string_or("gate", "initial", "++");
  const bool decoherence = cfg.get_bool_or("gate", "decoherence", false);

  const int dim = std::max({2, n_a + 1, n_b + 1});
  const ModeSystem sys = two_mode_system(dim, dim);
  const Vector psi0 = named_two_mode_state(sys, initial);
  const auto collapse = decoherence
                            ? collapse_set(params, sys, true)
                            : std::vector<std::pair<Operator, double>>{};
  const DensityMatrix out = cphase_gate(DensityMatrix::from_state(sys, psi0),
                                        g_ab, phase, n_a, n_b, collapse);
  const Matrix u_ideal = expm_unitary(
      build_effective_crosskerr(sys, g_ab).matrix(),
      gate_time(g_ab, n_a, n_b, phase));
  const Vector target = u_ideal * psi0;

  json summary;
  summary["experiment"] = "cz-gate";
  summary["gate_time_us"] = gate_time(g_ab, n_a, n_b, phase);
  summary["fidelity"] = fidelity_to_pure(out, target);
  summary["state"] = matrix_to_json(out.matrix());

  const PauliBars bars = pauli_bars(out, {0, n_a}, {0, n_b});
  CsvWriter csv(dir / "pauli_bars.csv", {"label", "value"});
  for (std::size_t i = 0; i < 16; ++i) {
    csv.row_mixed({PauliBars::labels()[i], format_number(bars.values[i])});
  }
  files.push_back(dir / "pauli_bars.csv");
  return summary;
}

json run_repeated_gates(const ConfigFile& cfg,
                        const std::filesystem::path& dir, int /*workers*/,
                        std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  const double g_ab = cfg.get_double("gate", "g_ab_MHz");
  const double phase = cfg.get_angle_rad("gate", "target_phase");
  const int gates = int(cfg.get_int("gate", "gates"));
  const std::string initial = cfg.get_string_or("gate", "initial", "++");
  const bool idle_control = cfg.get_bool_or("gate", "idle_control", false);

  const ModeSystem sys = two_mode_system(2, 2);
  const Vector psi0 = named_two_mode_state(sys, initial);
  GateDecayResult res;
  if (idle_control) {
    res = idle_wait_fidelity(psi0, sys, gates, gate_time(g_ab, 1, 1, phase),
                             collapse_set(params, sys, false));
  } else {
    res = repeated_gate_fidelity(psi0, sys, gates, g_ab, phase, 1, 1,
                                 collapse_set(params, sys, true));
  }

  CsvWriter csv(dir / "repeated_gates.csv", {"n_gates", "fidelity"});
  for (std::size_t n = 0; n < res.fidelities.size(); ++n) {
    csv.row({double(n), res.fidelities[n]});
  }
  files.push_back(dir / "repeated_gates.csv");

  json summary;
  summary["experiment"] = "repeated-gates";
  summary["per_gate_infidelity"] = res.per_gate_infidelity;
  summary["intercept"] = res.intercept;
  return summary;
}

json run_bell_state(const ConfigFile& cfg, const std::filesystem::path& dir,
                    int /*workers*/,
                    std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  const double g_ab = cfg.get_double_or("gate", "g_ab_MHz", 0.09535);
  const bool decoherence = cfg.get_bool_or("gate", "decoherence", true);

  const ModeSystem sys = two_mode_system(2, 2);
  const Vector psi0 = named_two_mode_state(sys, "++");
  const auto collapse = decoherence
                            ? collapse_set(params, sys, true)
                            : std::vector<std::pair<Operator, double>>{};
  const DensityMatrix out = cphase_gate(DensityMatrix::from_state(sys, psi0),
                                        g_ab, M_PI, 1, 1, collapse);
  const Vector bell = named_two_mode_state(sys, "bell");

  const PauliBars bars = pauli_bars(out, {0, 1}, {0, 1});
  CsvWriter csv(dir / "pauli_bars.csv", {"label", "value"});
  for (std::size_t i = 0; i < 16; ++i) {
    csv.row_mixed({PauliBars::labels()[i], format_number(bars.values[i])});
  }
  files.push_back(dir / "pauli_bars.csv");

  json summary;
  summary["experiment"] = "bell-state";
  summary["bell_fidelity"] = fidelity_to_pure(out, bell);
  summary["gate_time_us"] = gate_time(g_ab, 1, 1, M_PI);
  return summary;
}

// Rebuilds a displacement plan and the per-point probabilities from the
// counts interchange schema. Rows must form a product grid in first-seen
// order of the per-mode displacements.
std::pair<DisplacementPlan, std::vector<double>> read_counts_csv(
    const std::filesystem::path& path, int dim, double* total_events) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tomography: cannot open counts file '" +
                             path.string() + "'");
  std::string line;
  std::getline(in, line);
  DisplacementPlan plan;
  plan.dim_a = plan.dim_b = dim;
  std::vector<Complex> seen_a, seen_b;
  std::vector<double> probs;
  *total_events = 0.0;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 8) {
      throw ConfigError("tomography: counts row needs 8 columns");
    }
    const Complex aa(v[0], v[1]), ab(v[2], v[3]);
    if (first) {
      plan.photon_a = int(v[4]);
      plan.photon_b = int(v[5]);
      first = false;
    }
    auto note = [](std::vector<Complex>& set, Complex a) {
      for (const Complex& s : set) {
        if (std::abs(s - a) < 1e-12) return;
      }
      set.push_back(a);
    };
    note(seen_a, aa);
    note(seen_b, ab);
    if (v[6] <= 0) throw ConfigError("tomography: counts row with no shots");
    probs.push_back(v[7] / v[6]);
    *total_events += v[6];
  }
  plan.alphas_a = seen_a;
  plan.alphas_b = seen_b;
  if (plan.size() != probs.size()) {
    throw ConfigError(
        "tomography: counts rows do not form a product displacement grid");
  }
  return {plan, probs};
}

json run_tomography(const ConfigFile& cfg, const std::filesystem::path& dir,
                    int /*workers*/,
                    std::vector<std::filesystem::path>& files) {
  const std::string encoding = cfg.get_string_or("tomography", "encoding", "0/1");
  int dim = 2, pairs = 25;
  if (encoding == "0/2") {
    dim = 3;
    pairs = 100;
  } else if (encoding != "0/1") {
    throw ConfigError("config: [tomography] encoding must be 0/1 or 0/2");
  }
  const std::uint64_t seed =
      std::uint64_t(cfg.get_int("experiment", "seed"));
  const long shots = cfg.get_int_or("tomography", "shots", 500);
  const bool confusion = cfg.get_bool_or("tomography", "readout_errors", true);
  const std::string target_name =
      cfg.get_string_or("tomography", "target", dim == 2 ? "bell" : "plus02-two");
  const int retained = int(cfg.get_int_or("tomography", "retained", 1 << 10));
  const int thinning = int(cfg.get_int_or("tomography", "thinning", 1 << 7));

  DisplacementPlan plan;
  std::vector<double> probs;
  double n_events = 0.0;
  if (cfg.has("tomography", "counts_csv")) {
    // Measured-data path: the plan comes from the file itself.
    std::tie(plan, probs) = read_counts_csv(
        cfg.get_string("tomography", "counts_csv"), dim, &n_events);
  } else {
    plan = optimize_displacements(dim, pairs, seed);
    const DensityMatrix rho_sim = DensityMatrix::from_state(
        plan.reconstruction_system(),
        named_two_mode_state(plan.reconstruction_system(), target_name));
    if (shots <= 0) {
      probs = exact_probabilities(rho_sim, plan);
    } else {
      probs = simulate_measurement(
          rho_sim, plan, shots,
          confusion ? std::make_optional(
                          std::make_pair(alice_confusion(), bob_confusion()))
                    : std::nullopt,
          seed + 1);
    }
    n_events = double(shots > 0 ? shots : 1000000) * plan.size();

    CsvWriter counts(dir / "counts.csv",
                     {"alpha_a_re", "alpha_a_im", "alpha_b_re", "alpha_b_im",
                      "n_a", "n_b", "shots", "successes"});
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto [aa, ab] = plan.pair(i);
      const long total = shots > 0 ? shots : 1000000;
      const double clipped = std::clamp(probs[i], 0.0, 1.0);
      counts.row({aa.real(), aa.imag(), ab.real(), ab.imag(),
                  double(plan.photon_a), double(plan.photon_b), double(total),
                  std::round(clipped * total)});
    }
    files.push_back(dir / "counts.csv");
  }

  const ModeSystem sys = plan.reconstruction_system();
  const Vector target = named_two_mode_state(sys, target_name);
  const DensityMatrix rho_true = DensityMatrix::from_state(sys, target);

  const DensityMatrix rho_ls = linear_inversion(probs, plan);
  const PosteriorSummary post =
      bayesian_refine(rho_ls, n_events, retained, thinning, seed + 2);

  json summary;
  summary["experiment"] = "tomography";
  summary["encoding"] = encoding;
  summary["target"] = target_name;
  summary["fidelity_ls"] = fidelity_to_pure(rho_ls, target);
  summary["fidelity_bme"] = uhlmann_fidelity(post.rho_bme, rho_true);
  summary["acceptance_rate"] = post.acceptance_rate;
  summary["retained"] = post.retained;
  summary["thinning"] = post.thinning;
  summary["sigma_min"] = build_measurement_matrix(plan).sigma_min;
  summary["rho_bme"] = matrix_to_json(post.rho_bme.matrix());
  summary["rho_ls"] = matrix_to_json(rho_ls.matrix());
  return summary;
}

json run_parity_check(const ConfigFile& cfg, const std::filesystem::path& dir,
                      int /*workers*/,
                      std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  ParityCheckOptions opt;
  opt.t1_us = cfg.get_double_or("protocol", "t1_us", 750.0);
  opt.g_ab_MHz = cfg.get_double_or("protocol", "g_ab_MHz", 0.0953);
  opt.ideal_snap = cfg.get_bool_or("protocol", "ideal_snap", true);
  opt.ideal_readout = cfg.get_bool_or("protocol", "ideal_readout", true);
  const auto delays = linspace(0.0, cfg.get_double("protocol", "delay_max_us"),
                               int(cfg.get_int("protocol", "delay_points")));
  const ParityCheckResult res = parity_check_protocol(params, delays, opt);

  CsvWriter csv(dir / "parity_check.csv",
                {"delay_us", "p_odd", "p2_unconditioned", "p2_post_selected",
                 "herald_probability"});
  for (std::size_t i = 0; i < delays.size(); ++i) {
    csv.row({delays[i], res.p_odd[i], res.p2_unconditioned[i],
             res.p2_post_selected[i], res.herald_probability[i]});
  }
  files.push_back(dir / "parity_check.csv");

  json summary;
  summary["experiment"] = "parity-check";
  summary["t1_unconditioned_us"] = res.t1_unconditioned_us;
  summary["t1_post_selected_us"] = res.t1_post_selected_us;
  summary["lifetime_gain"] =
      res.t1_post_selected_us / std::max(1e-12, res.t1_unconditioned_us);
  return summary;
}

json run_error_budget(const ConfigFile& cfg, const std::filesystem::path& dir,
                      int /*workers*/,
                      std::vector<std::filesystem::path>& files) {
  const DeviceParams params = device_from_config(cfg);
  ErrorBudgetConfig budget;
  budget.g_ab_MHz = cfg.get_double_or("budget", "g_ab_MHz", budget.g_ab_MHz);
  budget.g1_MHz = cfg.get_double_or("budget", "g1_MHz", budget.g1_MHz);
  budget.delta_MHz = cfg.get_double_or("budget", "delta_MHz", budget.delta_MHz);
  budget.seed = std::uint64_t(cfg.get_int("experiment", "seed"));
  std::vector<std::string> states;
  std::istringstream in(
      cfg.get_string_or("budget", "states", "++, +0, 1+"));
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) states.push_back(token);
  }
  const auto entries = error_budget(params, states, budget);

  CsvWriter csv(dir / "error_budget.csv",
                {"state", "spam", "coupler_population", "alice_decoherence",
                 "bob_decoherence", "total"});
  json rows = json::array();
  for (const auto& e : entries) {
    csv.row_mixed({e.state, format_number(e.spam),
                   format_number(e.coupler_population),
                   format_number(e.alice_decoherence),
                   format_number(e.bob_decoherence),
                   format_number(e.total())});
    rows.push_back({{"state", e.state},
                    {"spam", e.spam},
                    {"coupler_population", e.coupler_population},
                    {"alice_decoherence", e.alice_decoherence},
                    {"bob_decoherence", e.bob_decoherence},
                    {"total", e.total()}});
  }
  files.push_back(dir / "error_budget.csv");

  json summary;
  summary["experiment"] = "error-budget";
  summary["entries"] = rows;
  return summary;
}

}  // namespace

RunResult run_experiment(const ConfigFile& config,
                         const std::filesystem::path& out_dir, int workers) {
  RunResult result;
  const std::string type = config.get_string("experiment", "type");
  if (!config.has("experiment", "seed")) {
    throw ConfigError("config: missing required key [experiment] seed");
  }
  std::filesystem::create_directories(out_dir);

  json summary;
  std::vector<std::filesystem::path>& files = result.files;
  if (type == "chevron") {
    summary = run_chevron(config, out_dir, workers, files);
  } else if (type == "crosskerr-sweep") {
    summary = run_crosskerr_sweep(config, out_dir, workers, files);
  } else if (type == "ramsey") {
    summary = run_ramsey(config, out_dir, workers, files);
  } else if (type == "cz-gate") {
    summary = run_cz_gate(config, out_dir, workers, files);
  } else if (type == "repeated-gates") {
    summary = run_repeated_gates(config, out_dir, workers, files);
  } else if (type == "bell-state") {
    summary = run_bell_state(config, out_dir, workers, files);
  } else if (type == "tomography") {
    summary = run_tomography(config, out_dir, workers, files);
  } else if (type == "parity-check") {
    summary = run_parity_check(config, out_dir, workers, files);
  } else if (type == "error-budget") {
    summary = run_error_budget(config, out_dir, workers, files);
  } else {
    throw ConfigError("config: unknown experiment type '" + type + "'");
  }

  summary["seed"] = config.get_int("experiment", "seed");

  std::ofstream summary_file(out_dir / "summary.json");
  result.summary_json = summary.dump(2);
  summary_file << result.summary_json << "\n";
  result.files.push_back(out_dir / "summary.json");

  std::ofstream resolved(out_dir / "resolved.cfg");
  resolved << config.serialize();
  result.files.push_back(out_dir / "resolved.cfg");
  return result;
}

}  // namespace crosskerr
