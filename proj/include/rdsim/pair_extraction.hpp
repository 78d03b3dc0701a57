#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rdsim/dataset.hpp"
#include "rdsim/scenes_io.hpp"
#include "rdsim/sim_engine.hpp"

namespace rdsim {

struct FilterConfig {
    double heading_max_deg = 15.0;
    double bearing_max_deg = 15.0;
    double lateral_offset_max_m = 1.0;
    /// Lateral margin added to half the wider vehicle's width when looking for VRUs.
    double vru_corridor_margin_m = 2.0;
    double min_follow_duration_s = 1.0;
    std::set<ObjectKind> follower_kinds{ObjectKind::Car, ObjectKind::Van};
    std::set<ObjectKind> lead_kinds{ObjectKind::Car, ObjectKind::Van, ObjectKind::Truck, ObjectKind::Bus,
                                    ObjectKind::Trailer};
    /// Drop non-qualifying followers before pairing. Produces the same output as the
    /// late type filter; lead kinds are always checked last because they affect step 6.
    bool early_follower_type_filter = false;
};

void validate(const FilterConfig& cfg);

/// Position of `other` in the follower's heading frame.
struct RelativeGeometry {
    double longitudinal_m;  // along the follower's heading
    double lateral_m;       // left of the follower's heading is positive
    double bearing_deg;     // atan2(lateral, longitudinal), in (-180, 180]
    double heading_diff_deg;
};

RelativeGeometry relative_geometry(const ObjectSample& follower, const ObjectSample& other);

struct CandidatePair {
    const ObjectSample* follower;
    const ObjectSample* lead;
};

struct FollowingPair {
    int follower_id = 0;
    int lead_id = 0;
    int frame = 0;
    /// Center-to-center distance projected on the follower's heading.
    double longitudinal_gap_m = 0.0;
    double follower_speed_mps = 0.0;
    double lead_speed_mps = 0.0;
    double follower_length_m = 0.0;
    double lead_length_m = 0.0;
    ObjectKind follower_kind = ObjectKind::Other;
    ObjectKind lead_kind = ObjectKind::Other;

    bool operator==(const FollowingPair&) const = default;
};

FollowingPair make_following_pair(const ObjectSample& follower, const ObjectSample& lead);

/// Step 1: all ordered pairs of distinct non-VRU samples.
std::vector<CandidatePair> candidate_pairs(std::span<const ObjectSample> frame_samples);

/// Steps 2-4: heading difference, bearing and lateral offset.
bool geometric_filter(const ObjectSample& follower, const ObjectSample& lead, const FilterConfig& cfg);

/// Step 5: true (keep) unless a VRU lies in the corridor from the follower's rear to the lead's front.
bool vru_proximity_filter(const ObjectSample& follower, const ObjectSample& lead,
                          std::span<const ObjectSample> frame_samples, const FilterConfig& cfg);

/// Step 6: smallest longitudinal gap; ties go to the lower lead id.
std::optional<FollowingPair> select_closest_lead(std::span<const FollowingPair> pairs_of_one_follower);

/// Steps 7-8 for one (follower, lead) key. `timeline` must be sorted by frame; a missing
/// frame splits runs. A run survives when frames / frame_rate >= min_follow_duration_s.
std::vector<FollowingPair> duration_and_type_filter(std::span<const FollowingPair> timeline, double frame_rate_hz,
                                                    const FilterConfig& cfg);

/// Steps 1-6 for a single frame.
std::vector<FollowingPair> filter_frame(std::span<const ObjectSample> frame_samples, const FilterConfig& cfg);

struct ExtractionStats {
    std::size_t frames = 0;
    std::size_t candidates = 0;
    std::size_t after_geometry = 0;
    std::size_t after_vru = 0;
    std::size_t after_closest = 0;
    std::size_t emitted = 0;
    std::size_t degenerate = 0;
};

/// Full pipeline. Output is ordered by (frame, follower id).
std::vector<FollowingPair> extract_pairs(const Recording& rec, const FilterConfig& cfg,
                                         ExtractionStats* stats = nullptr);

/// Follower at 0, lead at the projected center distance. Throws ProjectionDegenerate if the
/// resulting bumper gap is <= 0.
StartScene to_start_scene(const FollowingPair& pair, const std::string& recording_id);

std::string scene_id_for(const std::string& recording_id, const FollowingPair& pair);

/// extract_pairs followed by to_start_scene; degenerate projections are dropped and counted.
std::vector<SceneRecord> extract_scenes(const Recording& rec, const FilterConfig& cfg,
                                        ExtractionStats* stats = nullptr);

}  // namespace rdsim
