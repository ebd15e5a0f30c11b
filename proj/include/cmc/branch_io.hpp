#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>

#include "cmc/continuation.hpp"
#include "cmc/profile_geometry.hpp"
#include "cmc/shooting.hpp"

namespace cmc {

/// Locale-independent float formatting with 17 significant digits, so
/// identical runs serialize byte-identically and values round-trip.
std::string format_double(double v);

/// Published solution points of the family (Z1..Z10); throws DomainError
/// for unknown names.
ShootingPoint preset_point(const std::string& name);
std::span<const std::pair<const char*, ShootingPoint>> preset_table();

/// One JSON object per line, one line per branch point:
/// {"index":..,"s":..,"a":..,"H":..,"T":..,"r_f1":..,"r_theta":..,
///  "tangent":[..],"min_f2":..,"min_f3":..,"embedded":..}
std::string branch_jsonl(const Branch& branch);

/// {"events":[{"kind":"HZero","s":..,"a":..,"H":..,"T":..}, ...]}
std::string events_json(std::span<const BranchEvent> events);

/// CSV with columns exactly (t, f1, f2, theta, f3).
void write_profile_csv(std::ostream& os, const ClosedProfile& profile);

/// CSV with columns (s, a, H, T) for the spatial branch curve.
void write_branch_csv(std::ostream& os, const Branch& branch);

/// Flat key = value file; '#' starts a comment.  Returns the pairs in file
/// order; unknown keys are the caller's concern.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace cmc
