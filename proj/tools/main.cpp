#include "kglab/config.hpp"
#include "kglab/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

using namespace kglab;
namespace fs = std::filesystem;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool quiet = false;
};

config::RunConfig make_config(const CliOptions& opt) {
  config::RunConfig cfg;
  if (!opt.config_path.empty()) cfg = config::load_config(opt.config_path);
  for (const auto& ov : opt.overrides) cfg.apply_override(ov);
  cfg.validate();
  return cfg;
}

fs::path prepare_bundle(const config::RunConfig& cfg, const CliOptions& opt,
                        const std::string& name) {
  const fs::path dir = fs::path(opt.out_dir) / name;
  io::ensure_dir(dir);
  nlohmann::json j = cfg.to_json();
  j["config_hash"] = config::config_hash(cfg);
  io::write_json(dir / "config.json", j);
  return dir;
}

void log(const CliOptions& opt, const std::string& msg) {
  if (!opt.quiet) std::cout << msg << "\n";
}

interaction::ResonanceAudit run_audit_for(const config::RunConfig& cfg) {
  const auto phase = model::solve_phase(cfg.params);
  const Vec3Grid v0 = harness::build_v0(cfg.v0, cfg.grid, phase, cfg.params);
  const ArrayXc g3_0 = ArrayXc::Zero(cfg.grid.n_points);  // u_{0,3}(0) = 0 by preparation
  return interaction::run_audit(v0, g3_0, phase, cfg.params, cfg.tol_zero,
                                cfg.nonzero_threshold);
}

int cmd_analyze(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "analyze");
  const auto audit = run_audit_for(cfg);
  io::write_json(dir / "audit.json", io::audit_to_json(audit));
  log(opt, "phase: omega=" + std::to_string(audit.phase.omega) +
               " k=" + std::to_string(audit.phase.k));
  log(opt, "Gamma1=" + std::to_string(audit.Gamma1) + " Gamma=" + std::to_string(audit.Gamma));
  log(opt, std::string("classification: ") +
               (audit.matches_expected_classification ? "expected" : "UNEXPECTED"));
  return audit.matches_expected_classification ? 0 : 3;
}

int cmd_wkb(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "wkb");
  const auto phase = model::solve_phase(cfg.params);
  const Vec3Grid v0 = harness::build_v0(cfg.v0, cfg.grid, phase, cfg.params);
  wkb::WKBSolution sol = wkb::cascade_init(cfg.grid, cfg.params, phase, v0);

  const Real vmax =
      std::max(std::abs(model::group_velocity(Family::L, 3.0 * phase.k, cfg.params)),
               std::abs(model::group_velocity(Family::M, phase.k, cfg.params)));
  const Real dt_cfl = 0.5 * cfg.grid.dx() / vmax;
  const int snapshots = 5;
  std::vector<std::vector<Real>> norms;
  for (int s = 0; s <= snapshots; ++s) {
    const Real target = cfg.transport_horizon * s / snapshots;
    if (s > 0) {
      const Real span = target - sol.t;
      const int n = std::max(1, static_cast<int>(std::ceil(span / dt_cfl)));
      wkb::transport_advance(sol, span / n, n);
    }
    norms.push_back({sol.t, wkb::leading_l2(sol), sol.g.abs().maxCoeff(), sol.f.abs().maxCoeff()});
    const auto ps = wkb::assemble_level1(sol);
    nlohmann::json header;
    header["t"] = sol.t;
    header["epsilon"] = cfg.params.epsilon;
    header["phase"] = {{"omega", phase.omega}, {"k", phase.k}};
    header["order"] = 0;
    io::write_profile_snapshot(dir / ("leading_u_" + std::to_string(s)), cfg.grid, ps.u0, header);
    io::write_profile_snapshot(dir / ("leading_v_" + std::to_string(s)), cfg.grid, ps.v0, header);
  }
  io::write_csv(dir / "norms.csv", {"t", "l2_gf", "max_g", "max_f"}, norms);
  log(opt, "wkb bundle written to " + dir.string());
  return 0;
}

int cmd_symflow(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "symflow");
  const auto phase = model::solve_phase(cfg.params);
  const auto sel = interaction::select_xi0(phase, cfg.params);
  const Vec3Grid v0 = harness::build_v0(cfg.v0, cfg.grid, phase, cfg.params);
  const ArrayXc dtg0 = interaction::dt_g_at_zero(v0, phase, cfg.params);

  Eigen::Index imax = 0;
  dtg0.abs().maxCoeff(&imax);
  const Real x0 = cfg.grid.x(static_cast<int>(imax));

  symflow::FlowProblem prob;
  prob.params = cfg.params;
  prob.phase = phase;
  prob.kind = symflow::FlowKind::PlusPlus;
  prob.window = symflow::make_window(prob.kind, sel, phase, cfg.h_factor);
  prob.phi1 = {x0, cfg.phi1_radius};
  const Grid1D grid = cfg.grid;
  ArrayXc dtg_copy = dtg0;
  prob.dtg0 = [grid, dtg_copy](Real x) {
    const Real fi = (x - grid.x(0)) / grid.dx();
    const int i = std::clamp(static_cast<int>(std::lround(fi)), 0, grid.n_points - 1);
    return dtg_copy(i);
  };

  const auto samples = symflow::stratified_samples(prob, cfg.envelope_samples);
  const auto report = symflow::growth_envelope_audit(prob, samples, cfg.T1);

  std::vector<std::vector<Real>> rows;
  for (const auto& s : report.samples)
    rows.push_back({s.x, s.xi, static_cast<Real>(static_cast<int>(s.regime)), s.fitted_quadratic,
                    s.fitted_linear, report.gamma_plus, s.pass_gamma_plus ? 1.0 : 0.0,
                    s.pass_rough ? 1.0 : 0.0});
  io::write_csv(dir / "envelope.csv",
                {"x", "xi", "regime", "fitted_a", "fitted_b", "gamma_plus", "pass", "pass_rough"},
                rows);
  log(opt, "gamma_plus=" + std::to_string(report.gamma_plus) +
               " b_plus=" + std::to_string(report.b_plus) +
               " all_pass=" + std::to_string(report.all_pass));
  return report.all_pass ? 0 : 4;
}

int cmd_simulate(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "simulate");
  const auto phase = model::solve_phase(cfg.params);
  model::ModelParams params = cfg.params;
  params.epsilon = wkb::snap_epsilon(cfg.params.epsilon, phase, cfg.grid);
  const Vec3Grid v0 = harness::build_v0(cfg.v0, cfg.grid, phase, params);
  wkb::WKBSolution sol = wkb::cascade_init(cfg.grid, params, phase, v0);
  solver::FieldState init = wkb::evaluate_wkb(sol, params.epsilon, cfg.wkb_levels);
  init.t = 0.0;

  solver::SolverConfig scfg;
  scfg.grid = cfg.grid;
  scfg.c_dt = cfg.c_dt;
  scfg.t_end = cfg.t_end;
  scfg.dealias = cfg.dealias;
  scfg.nonlinear = cfg.nonlinear;

  solver::KgSolver ks(cfg.grid, params);
  const Real dt = cfg.c_dt * params.epsilon;
  const long n_steps = std::lround(std::ceil(cfg.t_end / dt));
  const int stride = std::max(1L, n_steps / std::max(1, cfg.record_count));
  const auto run = ks.run(init, scfg, stride);

  std::vector<std::vector<Real>> rows;
  for (const auto& o : run.series) rows.push_back({o.t, o.l2, o.linf});
  io::write_csv(dir / "timeseries.csv", {"t", "l2", "linf"}, rows);
  if (!run.completed) {
    log(opt, "run failed: " + run.failure);
    return 5;
  }
  const Real drift = std::abs(run.series.back().l2 - run.series.front().l2) /
                     std::max(run.series.front().l2, 1e-300);
  log(opt, "final t=" + std::to_string(run.series.back().t) +
               " l2 drift=" + std::to_string(drift));
  return 0;
}

int cmd_experiment(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "experiment");
  const auto ec = cfg.experiment_config();
  const auto audit = run_audit_for(cfg);
  io::write_json(dir / "audit.json", io::audit_to_json(audit));
  if (!audit.matches_expected_classification) {
    log(opt, "audit failed; aborting experiment");
    return 3;
  }
  const auto res = harness::instability_experiment(ec, cfg.params.epsilon);
  std::vector<std::vector<Real>> rows;
  for (const auto& p : res.series)
    rows.push_back({p.t, p.deviation, p.deviation_window, p.l2});
  io::write_csv(dir / "timeseries.csv", {"t", "deviation", "deviation_window", "l2"}, rows);
  io::write_json(dir / "ratefit.json", io::ratefit_to_json(res.fit));
  log(opt, "slope=" + std::to_string(res.fit.slope_fitted) +
               " Gamma1=" + std::to_string(res.fit.Gamma1_predicted) +
               " amplification=" + std::to_string(res.fit.amplification_factor) +
               " verdict=" + (res.fit.verdict ? "pass" : "fail"));
  return res.fit.verdict ? 0 : 6;
}

int cmd_sweep(const CliOptions& opt) {
  const auto cfg = make_config(opt);
  const fs::path dir = prepare_bundle(cfg, opt, "sweep");
  const auto ec = cfg.experiment_config();
  const auto sweep = harness::epsilon_sweep(ec, cfg.epsilons);
  std::vector<std::vector<Real>> rows;
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& r : sweep.reports) {
    rows.push_back({r.epsilon_nominal, r.epsilon, r.Gamma1_predicted, r.slope_fitted,
                    r.amplification_factor, r.verdict ? 1.0 : 0.0});
    fits.push_back(io::ratefit_to_json(r));
  }
  io::write_csv(dir / "sweep.csv",
                {"epsilon_nominal", "epsilon", "Gamma1", "slope", "amplification", "verdict"},
                rows);
  io::write_json(dir / "ratefit.json",
                 {{"reports", fits}, {"trend_ok", sweep.trend_ok},
                  {"all_verdicts", sweep.all_verdicts}});
  log(opt, std::string("sweep trend_ok=") + (sweep.trend_ok ? "yes" : "no"));
  return (sweep.trend_ok && sweep.all_verdicts) ? 0 : 6;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Klein-Gordon WKB instability laboratory"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration");
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--override", opt.overrides, "Dotted-path override, e.g. harness.K=1.5");
  app.add_flag("--quiet", opt.quiet, "Suppress progress output");

  auto* analyze = app.add_subcommand("analyze", "Resonance and transparency audit");
  auto* wkbcmd = app.add_subcommand("wkb", "Build and transport the WKB solution");
  auto* symflow = app.add_subcommand("symflow", "Symbolic-flow growth envelope audit");
  auto* simulate = app.add_subcommand("simulate", "Direct stiff solve from WKB data");
  auto* experiment = app.add_subcommand("experiment", "Instability experiment with rate fit");
  auto* sweep = app.add_subcommand("sweep", "Epsilon sweep of instability experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(opt);
    if (wkbcmd->parsed()) return cmd_wkb(opt);
    if (symflow->parsed()) return cmd_symflow(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (experiment->parsed()) return cmd_experiment(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
