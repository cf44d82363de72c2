#include "kglab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace kglab::config {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

harness::ExperimentConfig RunConfig::experiment_config() const {
  harness::ExperimentConfig ec;
  ec.params = params;
  ec.grid = grid;
  ec.v0 = v0;
  ec.K = K;
  ec.wkb_levels = wkb_levels;
  ec.T0_factor = T0_factor;
  ec.psi.radius = psi_radius;
  ec.phi1_radius = phi1_radius;
  ec.h_factor = h_factor;
  ec.c_dt = c_dt;
  ec.record_count = record_count;
  ec.fit_lo = fit_lo;
  ec.fit_hi = fit_hi;
  ec.slope_band_lo = slope_band_lo;
  ec.slope_band_hi = slope_band_hi;
  ec.min_amplification = min_amplification;
  ec.dealias = dealias;
  ec.twin_reference = twin_reference;
  return ec;
}

json RunConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["model"] = {{"theta0", params.theta0},
                {"alpha0", params.alpha0},
                {"omega0", params.omega0},
                {"epsilon", params.epsilon},
                {"allow_outside_regime", params.allow_outside_regime}};
  j["interaction"] = {{"tol_zero", tol_zero},
                      {"nonzero_threshold", nonzero_threshold},
                      {"pmax", pmax}};
  j["wkb"] = {{"grid", {{"length", grid.length}, {"n_points", grid.n_points}}},
              {"v0", {{"height", v0.height}, {"width", v0.width}, {"center", v0.center}}},
              {"cutoff", cutoff},
              {"levels", wkb_levels},
              {"transport_horizon", transport_horizon}};
  j["symflow"] = {{"h_factor", h_factor},
                  {"phi1_radius", phi1_radius},
                  {"T1", T1},
                  {"envelope_samples", envelope_samples}};
  j["solver"] = {{"c_dt", c_dt}, {"t_end", t_end}, {"dealias", dealias}, {"nonlinear", nonlinear}};
  j["harness"] = {{"K", K},
                  {"T0_factor", T0_factor},
                  {"psi_radius", psi_radius},
                  {"record_count", record_count},
                  {"fit_lo", fit_lo},
                  {"fit_hi", fit_hi},
                  {"slope_band_lo", slope_band_lo},
                  {"slope_band_hi", slope_band_hi},
                  {"min_amplification", min_amplification},
                  {"epsilons", epsilons},
                  {"twin_reference", twin_reference}};
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, {"schema_version", "model", "interaction", "wkb", "symflow", "solver",
                     "harness"},
                 "root");
  get_if(j, "schema_version", c.schema_version);
  if (c.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"theta0", "alpha0", "omega0", "epsilon", "allow_outside_regime"}, "model");
    get_if(m, "theta0", c.params.theta0);
    get_if(m, "alpha0", c.params.alpha0);
    get_if(m, "omega0", c.params.omega0);
    get_if(m, "epsilon", c.params.epsilon);
    get_if(m, "allow_outside_regime", c.params.allow_outside_regime);
  }
  if (j.contains("interaction")) {
    const auto& m = j.at("interaction");
    reject_unknown(m, {"tol_zero", "nonzero_threshold", "pmax"}, "interaction");
    get_if(m, "tol_zero", c.tol_zero);
    get_if(m, "nonzero_threshold", c.nonzero_threshold);
    get_if(m, "pmax", c.pmax);
  }
  if (j.contains("wkb")) {
    const auto& m = j.at("wkb");
    reject_unknown(m, {"grid", "v0", "cutoff", "levels", "transport_horizon"}, "wkb");
    if (m.contains("grid")) {
      const auto& g = m.at("grid");
      reject_unknown(g, {"length", "n_points"}, "wkb.grid");
      get_if(g, "length", c.grid.length);
      get_if(g, "n_points", c.grid.n_points);
    }
    if (m.contains("v0")) {
      const auto& g = m.at("v0");
      reject_unknown(g, {"height", "width", "center"}, "wkb.v0");
      get_if(g, "height", c.v0.height);
      get_if(g, "width", c.v0.width);
      get_if(g, "center", c.v0.center);
    }
    get_if(m, "cutoff", c.cutoff);
    get_if(m, "levels", c.wkb_levels);
    get_if(m, "transport_horizon", c.transport_horizon);
  }
  if (j.contains("symflow")) {
    const auto& m = j.at("symflow");
    reject_unknown(m, {"h_factor", "phi1_radius", "T1", "envelope_samples"}, "symflow");
    get_if(m, "h_factor", c.h_factor);
    get_if(m, "phi1_radius", c.phi1_radius);
    get_if(m, "T1", c.T1);
    get_if(m, "envelope_samples", c.envelope_samples);
  }
  if (j.contains("solver")) {
    const auto& m = j.at("solver");
    reject_unknown(m, {"c_dt", "t_end", "dealias", "nonlinear"}, "solver");
    get_if(m, "c_dt", c.c_dt);
    get_if(m, "t_end", c.t_end);
    get_if(m, "dealias", c.dealias);
    get_if(m, "nonlinear", c.nonlinear);
  }
  if (j.contains("harness")) {
    const auto& m = j.at("harness");
    reject_unknown(m,
                   {"K", "T0_factor", "psi_radius", "record_count", "fit_lo", "fit_hi",
                    "slope_band_lo", "slope_band_hi", "min_amplification", "epsilons",
                    "twin_reference"},
                   "harness");
    get_if(m, "K", c.K);
    get_if(m, "T0_factor", c.T0_factor);
    get_if(m, "psi_radius", c.psi_radius);
    get_if(m, "record_count", c.record_count);
    get_if(m, "fit_lo", c.fit_lo);
    get_if(m, "fit_hi", c.fit_hi);
    get_if(m, "slope_band_lo", c.slope_band_lo);
    get_if(m, "slope_band_hi", c.slope_band_hi);
    get_if(m, "min_amplification", c.min_amplification);
    if (m.contains("epsilons")) c.epsilons = m.at("epsilons").get<std::vector<Real>>();
    get_if(m, "twin_reference", c.twin_reference);
  }
  c.validate();
  return c;
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like section.key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json j = to_json();
  json* node = &j;
  std::istringstream ps(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ps, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]))
      throw std::invalid_argument("override: unknown path segment '" + parts[i] + "'");
    node = &(*node)[parts[i]];
  }
  if (!node->contains(parts.back()))
    throw std::invalid_argument("override: unknown key '" + parts.back() + "'");
  (*node)[parts.back()] = json::parse(value);
  *this = from_json(j);
}

void RunConfig::validate() const {
  params.validate();
  grid.validate();
  if (pmax < 6) throw std::invalid_argument("config: interaction.pmax must be >= 6");
  if (!(K > 0.75)) throw std::invalid_argument("config: harness.K must exceed 3/4");
  if (!(T0_factor > 0.0 && T0_factor <= 1.0))
    throw std::invalid_argument("config: harness.T0_factor must lie in (0,1]");
  if (!(fit_lo >= 0.0 && fit_lo < fit_hi && fit_hi <= 1.0))
    throw std::invalid_argument("config: harness fit window must satisfy 0 <= lo < hi <= 1");
  if (epsilons.empty()) throw std::invalid_argument("config: harness.epsilons must be non-empty");
  for (Real e : epsilons)
    if (!(e > 0.0 && e < 1.0))
      throw std::invalid_argument("config: harness.epsilons entries must lie in (0,1)");
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = cfg.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  return RunConfig::from_json(j);
}

}  // namespace kglab::config
