#include "kglab/io.hpp"

#include <fstream>
#include <iomanip>

namespace kglab::io {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Real>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

void write_profile_snapshot(const std::filesystem::path& stem, const Grid1D& grid,
                            const Profile& profile, const json& header) {
  write_json(stem.string() + ".json", header);

  std::ofstream out(stem.string() + ".txt");
  if (!out) throw std::runtime_error("cannot open " + stem.string() + ".txt");
  out << std::setprecision(17);
  out << "x";
  std::vector<int> stored;
  for (int p = -profile.cutoff(); p <= profile.cutoff(); ++p) {
    if (!profile.has(p)) continue;
    stored.push_back(p);
    for (int c = 0; c < 3; ++c)
      out << ",re_p" << p << "_c" << c << ",im_p" << p << "_c" << c;
  }
  out << "\n";
  for (int i = 0; i < grid.n_points; ++i) {
    out << grid.x(i);
    for (int p : stored) {
      const Vec3c v = profile.at(p).at(i);
      for (int c = 0; c < 3; ++c) out << "," << v(c).real() << "," << v(c).imag();
    }
    out << "\n";
  }
}

json audit_to_json(const interaction::ResonanceAudit& audit) {
  json j;
  j["phase"] = {{"omega", audit.phase.omega}, {"k", audit.phase.k}};
  j["xi"] = {{"xi0", audit.xi0.xi0},
             {"xi0r", audit.xi0.xi0r},
             {"xi2", audit.xi0.xi2},
             {"xi3", audit.xi0.xi3}};
  j["gamma1_xi0"] = audit.gamma1_xi0;
  j["Gamma"] = audit.Gamma;
  j["Gamma1"] = audit.Gamma1;
  j["weak_transparency"] = audit.weak_transparency;
  j["max_weak_residual"] = audit.max_weak_residual;
  j["matches_expected_classification"] = audit.matches_expected_classification;
  json table = json::array();
  for (const auto& r : audit.table) {
    json e;
    e["spec"] = r.spec.label();
    e["bilinear"] = to_string(r.bilinear);
    e["points"] = r.points;
    e["coefficient_norms"] = r.coefficient_norms_at_points;
    e["verdict"] = r.verdict == interaction::Verdict::Transparent ? "transparent"
                   : r.verdict == interaction::Verdict::NonTransparent ? "non-transparent"
                                                                       : "empty-set";
    table.push_back(e);
  }
  j["transparency_table"] = table;
  return j;
}

json ratefit_to_json(const harness::RateFitReport& fit) {
  json j;
  j["epsilon"] = fit.epsilon;
  j["epsilon_nominal"] = fit.epsilon_nominal;
  j["Gamma1_predicted"] = fit.Gamma1_predicted;
  j["slope_fitted"] = fit.slope_fitted;
  j["intercept"] = fit.intercept;
  j["fit_window"] = {fit.fit_window_lo, fit.fit_window_hi};
  j["amplification_factor"] = fit.amplification_factor;
  j["horizon"] = fit.horizon;
  j["saturated"] = fit.saturated;
  j["verdict"] = fit.verdict;
  j["metric"] = fit.metric;
  return j;
}

}  // namespace kglab::io
