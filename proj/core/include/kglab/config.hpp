#pragma once

#include "kglab/harness.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace kglab::config {

using nlohmann::json;

/// Structured run configuration mirroring the module inputs. Parsing is
/// strict: unknown keys are rejected, physical values are validated through
/// the module preconditions.
struct RunConfig {
  int schema_version = 1;

  // model
  model::ModelParams params;

  // interaction
  Real tol_zero = 1e-12;
  Real nonzero_threshold = 1e-3;
  int pmax = 6;

  // wkb
  Grid1D grid{8.0, 16384};
  harness::V0Spec v0;
  int cutoff = 6;
  int wkb_levels = 2;
  Real transport_horizon = 1.0;

  // symflow
  Real h_factor = 0.1;
  Real phi1_radius = 2.5;
  Real T1 = 1.0;
  int envelope_samples = 200;

  // solver
  Real c_dt = 0.1;
  Real t_end = 1.0;
  bool dealias = true;
  bool nonlinear = true;

  // harness
  Real K = 1.45;
  Real T0_factor = 0.9;
  Real psi_radius = 0.5;
  int record_count = 160;
  Real fit_lo = 0.3;
  Real fit_hi = 0.9;
  Real slope_band_lo = 0.6;
  Real slope_band_hi = 1.4;
  Real min_amplification = 10.0;
  std::vector<Real> epsilons{1e-2, 3e-3, 1e-3};
  bool twin_reference = false;

  harness::ExperimentConfig experiment_config() const;

  json to_json() const;
  static RunConfig from_json(const json& j);

  /// Applies a dotted-path override like "harness.K=1.5"; the value is parsed
  /// as JSON.
  void apply_override(const std::string& assignment);

  void validate() const;
};

/// FNV-1a hash of the canonical serialized form; stable across runs.
std::string config_hash(const RunConfig& cfg);

RunConfig load_config(const std::string& path);

}  // namespace kglab::config
