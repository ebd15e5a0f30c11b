#pragma once

#include <string>
#include <vector>

#include "cmc/linalg.hpp"
#include "cmc/profile_geometry.hpp"
#include "cmc/shooting.hpp"
#include "cmc/types.hpp"

namespace cmc {

struct BranchPoint {
    ShootingPoint Z;
    double s = 0.0;        // accumulated arc length along the branch
    Vec3 tangent{};        // unit, orientation-continuous
    double r_f1 = 0.0;
    double r_theta = 0.0;
    double min_f2 = 0.0;
    double min_f3 = 0.0;
    bool embedded = false;
    int profile_id = -1;   // index into Branch::profiles
};

enum class BranchEventKind {
    HZero,
    HMin,
    HMax,
    EmbeddedToNonembedded,
    SingularLimitM,
    SingularLimitMf
};

struct BranchEvent {
    BranchEventKind kind;
    ShootingPoint Z_at;
    double s_at;
};

const char* to_string(BranchEventKind kind);

/// Why a trace stopped at one of its ends.
enum class BranchTerminus {
    None,          // interior end (seed side of a one-directional trace)
    SingularM,     // profile approached the piecewise-CMC generator
    SingularMf,    // profile approached the singular minimal generator
    LeftOmega,
    MaxPoints,
    Stalled
};

struct ContinuationConfig {
    double ds_init = 1e-3;
    double ds_min = 1e-5;
    double ds_max = 5e-2;
    double grow = 1.3;
    int max_points = 20000;
    /// min_f2 / min_f3 level at which a corrected point is declared a
    /// singular endpoint of the family.  The smooth members hug the singular
    /// generators very tightly (min f3 at the published point nearest the
    /// piecewise-CMC limit is already ~4e-5), so the level sits a decade
    /// above the integrator floors instead.
    double endpoint_f_floor = 1e-5;
    int profile_samples_per_half = 2000;
    NewtonConfig newton{};
    IntegratorConfig integrator{};
};

struct Branch {
    std::vector<BranchPoint> points;      // ordered by s
    std::vector<ClosedProfile> profiles;  // indexed by BranchPoint::profile_id
    BranchTerminus start_terminus = BranchTerminus::None;
    BranchTerminus end_terminus = BranchTerminus::None;
};

struct SeedInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StallAtDsMin : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotBracketed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unit vector perpendicular to both constraint gradients (normalized
/// cross product), sign-aligned with `previous` when supplied.  Without a
/// previous tangent the sign is canonical: positive H component (positive
/// a component when the H component vanishes).
Vec3 tangent_at(const ModelParams& params, const ShootingPoint& Z,
                const NewtonConfig& ncfg = {}, const IntegratorConfig& icfg = {},
                const Vec3* previous = nullptr);

/// Predictor-corrector continuation from a seed solution in one direction
/// (+1: increasing H at the seed; -1: decreasing).  The seed is corrected
/// first.  Terminates at a singular endpoint (min_f2 or min_f3 below the
/// endpoint floor), when a leaves (0,1), or at max_points.  Embeddedness
/// flags are classified in a parallel pass after the sequential trace.
Branch trace(const ModelParams& params, const ShootingPoint& seed,
             int initial_direction, const ContinuationConfig& config = {});

/// Both directions from the seed merged into one branch ordered from the
/// piecewise-CMC end (s = 0 at the terminal point nearest Z0).
Branch trace_full(const ModelParams& params, const ShootingPoint& seed,
                  const ContinuationConfig& config = {});

/// H = 0 crossings, interior H extrema, the embedded/non-embedded
/// transition and the singular endpoints, each refined to a true solution
/// of the closure system.
std::vector<BranchEvent> detect_events(const ModelParams& params,
                                       const Branch& branch,
                                       const ContinuationConfig& config = {});

/// Solution with H exactly H_target, seeded from the occurrence-th
/// bracketing pair along the branch (occurrences count from s = 0).
ShootingPoint locate_by_H(const ModelParams& params, const Branch& branch,
                          double H_target, int occurrence,
                          const ContinuationConfig& config = {});

/// Closed profile of an arbitrary solution (shoot + periodic extension).
ClosedProfile closed_profile_for(const ModelParams& params,
                                 const ShootingPoint& Z,
                                 const ContinuationConfig& config = {});

}  // namespace cmc
