#include "rdsim/pair_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <utility>

#include "rdsim/error.hpp"

namespace rdsim {

void validate(const FilterConfig& cfg) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(cfg.heading_max_deg >= 0.0, "heading threshold must be >= 0");
    require(cfg.bearing_max_deg >= 0.0, "bearing threshold must be >= 0");
    require(cfg.lateral_offset_max_m >= 0.0, "lateral offset threshold must be >= 0");
    require(cfg.vru_corridor_margin_m >= 0.0, "VRU margin must be >= 0");
    require(cfg.min_follow_duration_s >= 0.0, "minimum follow duration must be >= 0");
    require(!cfg.follower_kinds.empty() && !cfg.lead_kinds.empty(), "kind sets must be non-empty");
}

RelativeGeometry relative_geometry(const ObjectSample& follower, const ObjectSample& other) {
    const double h = follower.heading_deg * std::numbers::pi / 180.0;
    const double dx = other.x_m - follower.x_m;
    const double dy = other.y_m - follower.y_m;
    RelativeGeometry g;
    g.longitudinal_m = dx * std::cos(h) + dy * std::sin(h);
    g.lateral_m = -dx * std::sin(h) + dy * std::cos(h);
    g.bearing_deg = std::atan2(g.lateral_m, g.longitudinal_m) * 180.0 / std::numbers::pi;
    g.heading_diff_deg = angular_distance_deg(follower.heading_deg, other.heading_deg);
    return g;
}

FollowingPair make_following_pair(const ObjectSample& follower, const ObjectSample& lead) {
    FollowingPair p;
    p.follower_id = follower.track_id;
    p.lead_id = lead.track_id;
    p.frame = follower.frame;
    p.longitudinal_gap_m = relative_geometry(follower, lead).longitudinal_m;
    p.follower_speed_mps = follower.speed_mps;
    p.lead_speed_mps = lead.speed_mps;
    p.follower_length_m = follower.length_m;
    p.lead_length_m = lead.length_m;
    p.follower_kind = follower.kind;
    p.lead_kind = lead.kind;
    return p;
}

std::vector<CandidatePair> candidate_pairs(std::span<const ObjectSample> samples) {
    std::vector<CandidatePair> out;
    for (const auto& f : samples) {
        if (is_vru(f.kind)) continue;
        for (const auto& l : samples) {
            if (&f == &l || is_vru(l.kind)) continue;
            out.push_back({&f, &l});
        }
    }
    return out;
}

bool geometric_filter(const ObjectSample& follower, const ObjectSample& lead, const FilterConfig& cfg) {
    const RelativeGeometry g = relative_geometry(follower, lead);
    return g.heading_diff_deg <= cfg.heading_max_deg && g.longitudinal_m > 0.0 &&
           std::abs(g.bearing_deg) <= cfg.bearing_max_deg && std::abs(g.lateral_m) <= cfg.lateral_offset_max_m;
}

bool vru_proximity_filter(const ObjectSample& follower, const ObjectSample& lead,
                          std::span<const ObjectSample> samples, const FilterConfig& cfg) {
    const double rear = -0.5 * follower.length_m;
    const double front = relative_geometry(follower, lead).longitudinal_m + 0.5 * lead.length_m;
    const double half_width = 0.5 * std::max(follower.width_m, lead.width_m) + cfg.vru_corridor_margin_m;
    for (const auto& s : samples) {
        if (!is_vru(s.kind)) continue;
        const RelativeGeometry g = relative_geometry(follower, s);
        if (g.longitudinal_m >= rear && g.longitudinal_m <= front && std::abs(g.lateral_m) <= half_width) {
            return false;
        }
    }
    return true;
}

std::optional<FollowingPair> select_closest_lead(std::span<const FollowingPair> pairs) {
    if (pairs.empty()) return std::nullopt;
    const auto best = std::min_element(pairs.begin(), pairs.end(), [](const FollowingPair& a, const FollowingPair& b) {
        if (a.longitudinal_gap_m != b.longitudinal_gap_m) return a.longitudinal_gap_m < b.longitudinal_gap_m;
        return a.lead_id < b.lead_id;
    });
    return *best;
}

std::vector<FollowingPair> duration_and_type_filter(std::span<const FollowingPair> timeline, double frame_rate_hz,
                                                    const FilterConfig& cfg) {
    std::vector<FollowingPair> out;
    const double min_frames = cfg.min_follow_duration_s * frame_rate_hz - 1e-9;
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= timeline.size(); ++i) {
        if (i < timeline.size() && timeline[i].frame == timeline[i - 1].frame + 1) continue;
        const std::size_t run_len = i - run_start;
        if (static_cast<double>(run_len) >= min_frames) {
            for (std::size_t k = run_start; k < i; ++k) {
                const FollowingPair& p = timeline[k];
                if (cfg.follower_kinds.count(p.follower_kind) && cfg.lead_kinds.count(p.lead_kind)) {
                    out.push_back(p);
                }
            }
        }
        run_start = i;
    }
    return out;
}

namespace {

std::vector<FollowingPair> filter_frame_impl(std::span<const ObjectSample> samples, const FilterConfig& cfg,
                                             ExtractionStats* stats) {
    std::map<int, std::vector<FollowingPair>> by_follower;
    for (const CandidatePair& c : candidate_pairs(samples)) {
        if (cfg.early_follower_type_filter && !cfg.follower_kinds.count(c.follower->kind)) continue;
        if (stats) ++stats->candidates;
        if (!geometric_filter(*c.follower, *c.lead, cfg)) continue;
        if (stats) ++stats->after_geometry;
        if (!vru_proximity_filter(*c.follower, *c.lead, samples, cfg)) continue;
        if (stats) ++stats->after_vru;
        by_follower[c.follower->track_id].push_back(make_following_pair(*c.follower, *c.lead));
    }
    std::vector<FollowingPair> out;
    for (const auto& [id, pairs] : by_follower) {
        if (auto best = select_closest_lead(pairs)) out.push_back(*best);
    }
    if (stats) stats->after_closest += out.size();
    return out;
}

}  // namespace

std::vector<FollowingPair> filter_frame(std::span<const ObjectSample> samples, const FilterConfig& cfg) {
    return filter_frame_impl(samples, cfg, nullptr);
}

std::vector<FollowingPair> extract_pairs(const Recording& rec, const FilterConfig& cfg, ExtractionStats* stats) {
    validate(cfg);
    ExtractionStats local;
    std::map<std::pair<int, int>, std::vector<FollowingPair>> timelines;
    for (int f = 0; f < rec.frame_count(); ++f) {
        ++local.frames;
        for (FollowingPair& p : filter_frame_impl(rec.frame_view(f), cfg, &local)) {
            timelines[{p.follower_id, p.lead_id}].push_back(std::move(p));
        }
    }
    std::vector<FollowingPair> out;
    for (const auto& [key, timeline] : timelines) {
        auto kept = duration_and_type_filter(timeline, rec.frame_rate_hz(), cfg);
        out.insert(out.end(), kept.begin(), kept.end());
    }
    std::sort(out.begin(), out.end(), [](const FollowingPair& a, const FollowingPair& b) {
        return std::tie(a.frame, a.follower_id) < std::tie(b.frame, b.follower_id);
    });
    local.emitted = out.size();
    if (stats) *stats = local;
    return out;
}

std::string scene_id_for(const std::string& recording_id, const FollowingPair& pair) {
    return recording_id + ":" + std::to_string(pair.follower_id) + ":" + std::to_string(pair.lead_id) + ":" +
           std::to_string(pair.frame);
}

StartScene to_start_scene(const FollowingPair& pair, const std::string& recording_id) {
    StartScene scene;
    scene.scene_id = scene_id_for(recording_id, pair);
    scene.follower = {0.0, pair.follower_speed_mps, pair.follower_length_m};
    scene.lead = {pair.longitudinal_gap_m, pair.lead_speed_mps, pair.lead_length_m};
    if (!(gap(scene.lead, scene.follower) > 0.0)) {
        throw Error(ErrorCode::ProjectionDegenerate,
                    "projected bumper gap " + std::to_string(gap(scene.lead, scene.follower)) + " <= 0 for " +
                        scene.scene_id);
    }
    return scene;
}

std::vector<SceneRecord> extract_scenes(const Recording& rec, const FilterConfig& cfg, ExtractionStats* stats) {
    ExtractionStats local;
    const auto pairs = extract_pairs(rec, cfg, &local);
    std::vector<SceneRecord> out;
    out.reserve(pairs.size());
    for (const FollowingPair& p : pairs) {
        try {
            out.push_back({to_start_scene(p, rec.recording_id()), p.follower_id, p.lead_id, p.frame});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ProjectionDegenerate) throw;
            ++local.degenerate;
        }
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace rdsim
