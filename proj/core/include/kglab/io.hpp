#pragma once

#include "kglab/harness.hpp"
#include "kglab/interaction.hpp"
#include "kglab/profile.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace kglab::io {

using nlohmann::json;

void ensure_dir(const std::filesystem::path& dir);

/// CSV with a fixed header row; numbers printed with max_digits10 so reruns
/// are byte-identical.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Real>>& rows);

void write_json(const std::filesystem::path& path, const json& j);

/// Columnar text snapshot of a profile (x, Re/Im of each stored harmonic
/// component) plus a JSON side file describing phase, epsilon, time and order.
void write_profile_snapshot(const std::filesystem::path& stem, const Grid1D& grid,
                            const Profile& profile, const json& header);

json audit_to_json(const interaction::ResonanceAudit& audit);
json ratefit_to_json(const harness::RateFitReport& fit);

}  // namespace kglab::io
