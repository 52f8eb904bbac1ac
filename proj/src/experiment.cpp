#include "dkr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "dkr/classical.hpp"
#include "dkr/error.hpp"
#include "dkr/floquet.hpp"
#include "dkr/quantum.hpp"
#include "dkr/wigner.hpp"

#ifndef DKR_VERSION
#define DKR_VERSION "unknown"
#endif

namespace dkr {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::classical: return "classical";
    case Mode::quantum: return "quantum";
    case Mode::floquet: return "floquet";
    case Mode::wigner: return "wigner";
    case Mode::mc_wavefunction: return "mc-wavefunction";
    case Mode::compare: return "compare";
  }
  return "unknown";
}

std::string_view to_string(DecoherenceKind kind) {
  switch (kind) {
    case DecoherenceKind::none: return "none";
    case DecoherenceKind::spontaneous_emission: return "spontaneous";
    case DecoherenceKind::anti_zeno: return "anti-zeno";
  }
  return "unknown";
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Plain numbers, optionally followed by "pi" ("3.6pi", "pi").
double parse_real(const std::string& field, std::string text) {
  text = trim(text);
  double factor = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    factor = kPi;
    text = trim(std::string_view(text).substr(0, text.size() - 2));
    if (!text.empty() && text.back() == '*') text = trim(std::string_view(text).substr(0, text.size() - 1));
    if (text.empty()) return kPi;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ValidationError(field, "expected a number, got '" + text + "'");
  }
  return value * factor;
}

template <typename Int>
Int parse_integer(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(field, "expected an integer, got '" + text + "'");
  }
  return value;
}

Mode parse_mode(const std::string& text) {
  static const std::map<std::string, Mode> names{
      {"classical", Mode::classical}, {"quantum", Mode::quantum},
      {"floquet", Mode::floquet},     {"wigner", Mode::wigner},
      {"mc-wavefunction", Mode::mc_wavefunction}, {"compare", Mode::compare}};
  const auto it = names.find(trim(text));
  if (it == names.end()) throw ValidationError("experiment.mode", "unknown mode '" + trim(text) + "'");
  return it->second;
}

DecoherenceKind parse_decoherence(const std::string& text) {
  const std::string t = trim(text);
  if (t == "none") return DecoherenceKind::none;
  if (t == "spontaneous") return DecoherenceKind::spontaneous_emission;
  if (t == "anti-zeno") return DecoherenceKind::anti_zeno;
  throw ValidationError("quantum.decoherence", "expected none, spontaneous or anti-zeno");
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(ExperimentSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      {"experiment", "mode", [](auto& s, auto&, auto& v) { s.mode = parse_mode(v); },
       [](auto& s) { return std::string(to_string(s.mode)); }},
      {"experiment", "kicks", [](auto& s, auto& f, auto& v) { s.kicks = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.kicks); }},
      {"experiment", "seed", [](auto& s, auto& f, auto& v) { s.seed = parse_integer<std::uint64_t>(f, v); },
       [](auto& s) { return std::to_string(s.seed); }},
      {"experiment", "output", [](auto& s, auto&, auto& v) { s.output = trim(v); },
       [](auto& s) { return s.output; }},
      {"config", "K", [](auto& s, auto& f, auto& v) { s.config.K = parse_real(f, v); },
       [](auto& s) { return num(s.config.K); }},
      {"config", "alpha", [](auto& s, auto& f, auto& v) { s.config.alpha = parse_real(f, v); },
       [](auto& s) { return num(s.config.alpha); }},
      {"config", "delta", [](auto& s, auto& f, auto& v) { s.config.delta = parse_real(f, v); },
       [](auto& s) { return num(s.config.delta); }},
      {"config", "hbar", [](auto& s, auto& f, auto& v) { s.config.hbar = parse_real(f, v); },
       [](auto& s) { return num(s.config.hbar); }},
      {"config", "sigma_p", [](auto& s, auto& f, auto& v) { s.config.sigma_p = parse_real(f, v); },
       [](auto& s) { return num(s.config.sigma_p); }},
      {"classical", "ensemble", [](auto& s, auto& f, auto& v) { s.ensemble = parse_integer<std::size_t>(f, v); },
       [](auto& s) { return std::to_string(s.ensemble); }},
      {"classical", "poincare_orbits",
       [](auto& s, auto& f, auto& v) { s.poincare_orbits = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.poincare_orbits); }},
      {"classical", "poincare_periods",
       [](auto& s, auto& f, auto& v) { s.poincare_periods = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.poincare_periods); }},
      {"classical", "fit_t_min", [](auto& s, auto& f, auto& v) { s.fit_window.t_min = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.fit_window.t_min); }},
      {"classical", "fit_t_max", [](auto& s, auto& f, auto& v) { s.fit_window.t_max = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.fit_window.t_max); }},
      {"quantum", "N", [](auto& s, auto& f, auto& v) { s.basis_size = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.basis_size); }},
      {"quantum", "decoherence", [](auto& s, auto&, auto& v) { s.decoherence = parse_decoherence(v); },
       [](auto& s) { return std::string(to_string(s.decoherence)); }},
      {"quantum", "eta", [](auto& s, auto& f, auto& v) { s.eta = parse_real(f, v); },
       [](auto& s) { return num(s.eta); }},
      {"quantum", "realizations", [](auto& s, auto& f, auto& v) { s.realizations = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.realizations); }},
      {"quantum", "q_grid", [](auto& s, auto& f, auto& v) { s.q_grid = parse_integer<int>(f, v); },
       [](auto& s) { return std::to_string(s.q_grid); }},
  };
  return table;
}

const Key& find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys()) {
    if (section == k.section && name == k.name) return k;
  }
  throw ValidationError(section + "." + name, "unknown key");
}

struct Assignment {
  const Key* key;
  std::string field;
  std::vector<std::string> values;
};

std::vector<Assignment> read_assignments(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config", std::string("malformed file: ") + e.message());
  }
  std::vector<Assignment> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError(section, "keys must live inside a [section]");
    for (const auto& [name, value] : body) {
      const Key& key = find_key(section, name);
      Assignment a{&key, section + "." + name, {}};
      std::stringstream items(value.data());
      std::string item;
      while (std::getline(items, item, ',')) a.values.push_back(trim(item));
      if (a.values.empty() || std::any_of(a.values.begin(), a.values.end(), [](auto& v) { return v.empty(); })) {
        throw ValidationError(a.field, "empty value");
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output handling

class OutputWriter {
 public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(path);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  void discard() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  const std::vector<OutputFile>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> written_;
  std::vector<OutputFile> files_;
};

std::string series_csv(const std::vector<double>& values) {
  std::string s = "kick,value\n";
  for (std::size_t t = 0; t < values.size(); ++t) s += std::to_string(t) + "," + num(values[t]) + "\n";
  return s;
}

std::string distribution_csv(const std::vector<std::vector<double>>& probabilities, const MomentumBasis& basis) {
  std::string s = "kick,n,probability\n";
  for (std::size_t t = 0; t < probabilities.size(); ++t) {
    for (int i = 0; i < basis.N; ++i) {
      s += std::to_string(t) + "," + std::to_string(basis.label(i)) + "," + num(probabilities[t][i]) + "\n";
    }
  }
  return s;
}

json fit_json(const DiffusionFit& fit, double K) {
  return {{"K", K},
          {"F", fit.F},
          {"a", fit.a},
          {"window", {fit.window.t_min, fit.window.t_max}},
          {"residual", fit.residual},
          {"n_dropped", fit.n_dropped},
          {"n_near_equilibrium", fit.n_near_equilibrium},
          {"n_used", fit.n_used},
          {"accepted", fit.accepted},
          {"small_rate", fit.small_rate}};
}

MomentumBasis basis_of(const ExperimentSpec& spec) { return {spec.basis_size, spec.config.hbar, 0.0}; }

DecoherenceModel model_of(const ExperimentSpec& spec) { return {spec.decoherence, spec.eta}; }

void run_classical(const ExperimentSpec& spec, OutputWriter& out) {
  const auto ensemble = sample_initial(spec.config, spec.ensemble, spec.seed);
  const auto result = propagate_ensemble(ensemble, spec.config, spec.kicks);

  std::string hist = "kick";
  for (int b = 0; b < HistogramBinning::kBins; ++b) {
    hist += "," + num(0.5 * (result.histogram.bin_edges[b] + result.histogram.bin_edges[b + 1]));
  }
  hist += "\n";
  for (std::size_t t = 0; t < result.histogram.counts.size(); ++t) {
    hist += std::to_string(t);
    for (long c : result.histogram.counts[t]) hist += "," + std::to_string(c);
    hist += "\n";
  }
  out.write("histogram.csv", hist);
  out.write("outside_fraction.csv", series_csv(result.outside_fraction));

  json fit = {{"K", spec.config.K}, {"accepted", false}};
  if (result.outside_fraction.size() >= 10) fit = fit_json(fit_flux(result.outside_fraction, spec.fit_window), spec.config.K);
  fit["outer_crossings"] = result.outer_crossings;
  out.write("flux_fit.json", fit.dump(2) + "\n");

  if (spec.poincare_orbits > 0) {
    const auto points = poincare_section(spec.config, spec.poincare_orbits, spec.poincare_periods, spec.seed);
    std::string s = "phi,p\n";
    for (const auto& pt : points) s += num(pt.phi) + "," + num(pt.p) + "\n";
    out.write("poincare.csv", s);
  }
}

void run_quantum(const ExperimentSpec& spec, OutputWriter& out) {
  const auto basis = basis_of(spec);
  const auto U = build_period_operator(spec.config, basis);
  const auto ev = run_decohered(initial_density(spec.config, basis), U, model_of(spec), spec.kicks);
  out.write("momentum_distribution.csv", distribution_csv(ev.probabilities, basis));
  out.write("outside_fraction.csv", series_csv(ev.outside_fraction));
  double edge = 0.0;
  for (const auto& p : ev.probabilities) {
    double e = 0.0;
    for (int i = 0; i < 8; ++i) e += p[i] + p[basis.N - 1 - i];
    edge = std::max(edge, e);
  }
  const json diag = {{"N", basis.N},
                     {"hbar", basis.hbar},
                     {"q", basis.q},
                     {"K", spec.config.K},
                     {"decoherence", to_string(spec.decoherence)},
                     {"eta", spec.eta},
                     {"unitarity_defect", U.unitarity_defect()},
                     {"edge_population_max", edge},
                     {"final_trace", ev.final_state.trace()}};
  out.write("operator.json", diag.dump(2) + "\n");
}

void run_floquet(const ExperimentSpec& spec, OutputWriter& out) {
  const auto basis = basis_of(spec);
  const auto U = build_period_operator(spec.config, basis);
  const auto dec = decompose(U);
  std::string qe = "j,quasi_energy,eigenvalue_re,eigenvalue_im\n";
  for (Eigen::Index j = 0; j < dec.quasi_energies.size(); ++j) {
    qe += std::to_string(j) + "," + num(dec.quasi_energies(j)) + "," + num(dec.eigenvalues(j).real()) + "," +
          num(dec.eigenvalues(j).imag()) + "\n";
  }
  out.write("quasi_energies.csv", qe);

  const auto A = asymptotic_matrix(dec);
  auto grid = [&](bool log_scale) {
    std::string s = "n\\n0";
    for (int i = 0; i < basis.N; ++i) s += "," + std::to_string(basis.label(i));
    s += "\n";
    for (int r = 0; r < basis.N; ++r) {
      s += std::to_string(basis.label(r));
      for (int c = 0; c < basis.N; ++c) {
        s += "," + num(log_scale ? std::log10(std::max(A(r, c), 1e-300)) : A(r, c));
      }
      s += "\n";
    }
    return s;
  };
  out.write("asymptotic.csv", grid(false));
  out.write("asymptotic_log10.csv", grid(true));
  json clusters = json::array();
  for (const auto& c : dec.degenerate_clusters) clusters.push_back(c);
  const json info = {{"K", spec.config.K},
                     {"N", basis.N},
                     {"unitarity_defect", U.unitarity_defect()},
                     {"reconstruction_residual", dec.reconstruction_residual(U.U)},
                     {"degenerate", dec.degenerate()},
                     {"degenerate_clusters", clusters}};
  out.write("floquet.json", info.dump(2) + "\n");
}

std::string grid_csv(const Eigen::MatrixXd& m, const std::function<double(int)>& x,
                     const std::function<double(int)>& p) {
  std::string s = "P\\X";
  for (Eigen::Index c = 0; c < m.cols(); ++c) s += "," + num(x(static_cast<int>(c)));
  s += "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += num(p(static_cast<int>(r)));
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += "," + num(m(r, c));
    s += "\n";
  }
  return s;
}

void run_wigner(const ExperimentSpec& spec, OutputWriter& out) {
  const auto basis = basis_of(spec);
  const auto U = build_period_operator(spec.config, basis);
  const auto ev = run_decohered(initial_density(spec.config, basis), U, model_of(spec), spec.kicks);
  const auto grid = wigner_transform(ev.final_state);
  out.write("wigner_coarse.csv", grid_csv(grid.coarse, [&](int c) { return grid.coarse_position(c); },
                                          [&](int i) { return grid.coarse_momentum(i); }));
  out.write("wigner_raw.csv", grid_csv(grid.raw, [&](int k) { return grid.raw_position(k); },
                                       [&](int r) { return grid.raw_momentum(r); }));
  const double S = strangeness(grid);
  const double eta = spec.decoherence == DecoherenceKind::spontaneous_emission ? spec.eta : 0.0;
  out.write("strangeness.csv", "K,eta,S\n" + num(spec.config.K) + "," + num(eta) + "," + num(S) + "\n");
  const json info = {{"K", spec.config.K},      {"decoherence", to_string(spec.decoherence)},
                     {"eta", spec.eta},         {"kicks", spec.kicks},
                     {"S", S},                  {"scale", grid.scale},
                     {"max_imaginary", grid.max_imaginary}};
  out.write("wigner.json", info.dump(2) + "\n");
}

void run_mc(const ExperimentSpec& spec, OutputWriter& out) {
  const auto basis = basis_of(spec);
  McOptions options;
  options.realizations = spec.realizations;
  options.seed = spec.seed;
  options.q_grid = spec.q_grid;
  const auto mc = mc_wavefunction_run(spec.config, basis, spec.eta, spec.kicks, options);
  std::string s = "kick,value,stderr,realizations\n";
  for (std::size_t t = 0; t < mc.outside_mean.size(); ++t) {
    s += std::to_string(t) + "," + num(mc.outside_mean[t]) + "," + num(mc.outside_stderr[t]) + "," +
         std::to_string(mc.realizations) + "\n";
  }
  out.write("outside_fraction.csv", s);
  out.write("momentum_distribution.csv", distribution_csv(mc.probabilities, basis));
  const json info = {{"K", spec.config.K}, {"eta", spec.eta},         {"realizations", mc.realizations},
                     {"emissions", mc.emissions}, {"q_grid", spec.q_grid}};
  out.write("mc.json", info.dump(2) + "\n");
}

void run_compare(const ExperimentSpec& spec, OutputWriter& out) {
  const auto ensemble = sample_initial(spec.config, spec.ensemble, spec.seed);
  const auto classical = propagate_ensemble(ensemble, spec.config, spec.kicks);
  const auto basis = basis_of(spec);
  const auto U = build_period_operator(spec.config, basis);
  const auto rho0 = initial_density(spec.config, basis);
  const auto coherent = run_decohered(rho0, U, {DecoherenceKind::none, 0.0}, spec.kicks);
  const auto se2 = run_decohered(rho0, U, {DecoherenceKind::spontaneous_emission, 0.02}, spec.kicks);
  const auto se5 = run_decohered(rho0, U, {DecoherenceKind::spontaneous_emission, 0.05}, spec.kicks);
  const auto az = run_decohered(rho0, U, {DecoherenceKind::anti_zeno, 0.0}, spec.kicks);
  std::string s = "kick,classical,coherent,eta_0.02,eta_0.05,anti_zeno\n";
  for (int t = 0; t <= spec.kicks; ++t) {
    s += std::to_string(t) + "," + num(classical.outside_fraction[t]) + "," + num(coherent.outside_fraction[t]) +
         "," + num(se2.outside_fraction[t]) + "," + num(se5.outside_fraction[t]) + "," +
         num(az.outside_fraction[t]) + "\n";
  }
  out.write("compare.csv", s);
}

}  // namespace

void ExperimentSpec::validate() const {
  try {
    config.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("config." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (kicks < 1) throw ValidationError("experiment.kicks", "must be >= 1");
  const bool classical_mode = mode == Mode::classical || mode == Mode::compare;
  if (classical_mode && ensemble < 1) throw ValidationError("classical.ensemble", "must be >= 1");
  if (mode == Mode::classical) {
    if (poincare_orbits < 0) throw ValidationError("classical.poincare_orbits", "must be >= 0");
    if (poincare_orbits > 0 && poincare_periods < 1) {
      throw ValidationError("classical.poincare_periods", "must be >= 1 when orbits are requested");
    }
    if (fit_window.t_min < 0 || fit_window.t_max < fit_window.t_min) {
      throw ValidationError("classical.fit_t_max", "fit window must satisfy 0 <= t_min <= t_max");
    }
  }
  if (mode != Mode::classical) {
    if (basis_size < 4 || basis_size % 2 != 0) throw ValidationError("quantum.N", "must be even and >= 4");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("quantum.eta", "must lie in [0, 1]");
  if (mode == Mode::mc_wavefunction) {
    if (realizations < 1) throw ValidationError("quantum.realizations", "must be >= 1");
    if (q_grid < 2 || q_grid % 2 != 0) throw ValidationError("quantum.q_grid", "must be even and >= 2");
  }
  if (decoherence == DecoherenceKind::spontaneous_emission && !(mode == Mode::quantum || mode == Mode::wigner)) {
    throw ValidationError("quantum.decoherence", "only quantum and wigner modes take a decoherence model");
  }
}

ExperimentSpec parse_spec(std::string_view text) {
  ExperimentSpec spec;
  for (const auto& a : read_assignments(text)) {
    if (a.values.size() != 1) throw ValidationError(a.field, "lists are only allowed in sweeps");
    a.key->set(spec, a.field, a.values.front());
  }
  spec.validate();
  return spec;
}

std::vector<ExperimentSpec> parse_sweep(std::string_view text) {
  const auto assignments = read_assignments(text);
  std::vector<ExperimentSpec> specs{ExperimentSpec{}};
  for (const auto& a : assignments) {
    std::vector<ExperimentSpec> next;
    next.reserve(specs.size() * a.values.size());
    for (const auto& base : specs) {
      for (const auto& v : a.values) {
        ExperimentSpec s = base;
        a.key->set(s, a.field, v);
        next.push_back(std::move(s));
      }
    }
    specs = std::move(next);
  }
  for (const auto& s : specs) s.validate();
  return specs;
}

std::string serialize(const ExperimentSpec& spec) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    const std::string value = k.get(spec);
    if (value.empty()) continue;
    out += std::string(k.name) + " = " + value + "\n";
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

std::string RunManifest::to_json() const {
  json files = json::array();
  for (const auto& f : outputs) files.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  const json j = {{"mode", mode},
                  {"spec", spec_text},
                  {"version", version},
                  {"wall_seconds", wall_seconds},
                  {"seeds", seeds},
                  {"outputs", files}};
  return j.dump(2) + "\n";
}

RunManifest run(const ExperimentSpec& spec, const fs::path& out_dir) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  OutputWriter out(out_dir);
  try {
    switch (spec.mode) {
      case Mode::classical: run_classical(spec, out); break;
      case Mode::quantum: run_quantum(spec, out); break;
      case Mode::floquet: run_floquet(spec, out); break;
      case Mode::wigner: run_wigner(spec, out); break;
      case Mode::mc_wavefunction: run_mc(spec, out); break;
      case Mode::compare: run_compare(spec, out); break;
    }
    RunManifest m;
    m.spec_text = serialize(spec);
    m.mode = std::string(to_string(spec.mode));
    m.version = DKR_VERSION;
    m.seeds = {spec.seed};
    m.outputs = out.files();
    m.directory = out_dir;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.write("manifest.json", m.to_json());
    return m;
  } catch (...) {
    out.discard();
    throw;
  }
}

std::string SweepReport::to_json() const {
  json runs = json::array();
  for (const auto& m : manifests) runs.push_back({{"directory", m.directory.filename().string()}, {"mode", m.mode}});
  json fails = json::array();
  for (const auto& f : failures) fails.push_back({{"index", f.index}, {"field", f.field}, {"message", f.message}});
  return json{{"runs", runs}, {"failures", fails}}.dump(2) + "\n";
}

SweepReport sweep(const std::vector<ExperimentSpec>& specs, const fs::path& out_dir, int workers) {
  if (specs.empty()) throw ValidationError("sweep", "no experiments to run");
  workers = std::max(1, workers);
  fs::create_directories(out_dir);

  std::vector<std::optional<RunManifest>> results(specs.size());
  std::vector<std::optional<SweepFailure>> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      try {
        results[i] = run(specs[i], out_dir / name);
      } catch (const ValidationError& e) {
        errors[i] = SweepFailure{i, e.field(), e.what()};
      } catch (const std::exception& e) {
        errors[i] = SweepFailure{i, "", e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(workers, static_cast<int>(specs.size()));
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepReport report;
  std::string flux = "K,F,a,residual,accepted\n";
  std::string strange = "K,eta,S\n";
  bool any_flux = false;
  bool any_strange = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (errors[i]) {
      report.failures.push_back(*errors[i]);
      continue;
    }
    report.manifests.push_back(*results[i]);
    const fs::path dir = results[i]->directory;
    if (specs[i].mode == Mode::classical) {
      const auto fit = json::parse(read_text(dir / "flux_fit.json"));
      flux += num(specs[i].config.K) + "," + num(fit.value("F", 0.0)) + "," + num(fit.value("a", 0.0)) + "," +
              num(fit.value("residual", 0.0)) + "," + (fit.value("accepted", false) ? "1" : "0") + "\n";
      any_flux = true;
    } else if (specs[i].mode == Mode::wigner) {
      const std::string row = read_text(dir / "strangeness.csv");
      strange += row.substr(row.find('\n') + 1);
      any_strange = true;
    }
  }
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream(out_dir / name, std::ios::binary) << content;
  };
  if (any_flux) write("flux_vs_K.csv", flux);
  if (any_strange) write("strangeness.csv", strange);
  write("sweep_manifest.json", report.to_json());
  return report;
}

}  // namespace dkr
