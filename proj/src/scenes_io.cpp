#include "rdsim/scenes_io.hpp"

#include <sstream>

#include "csv.hpp"
#include "rdsim/error.hpp"

namespace rdsim {

namespace {

constexpr const char* kHeader =
    "scene_id,follower_id,lead_id,frame,gap_m,follower_speed_mps,lead_speed_mps,lead_length_m,follower_length_m";

}  // namespace

std::string scenes_csv(std::span<const SceneRecord> scenes) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const SceneRecord& r : scenes) {
        const StartScene& s = r.scene;
        out << csv::quote_if_needed(s.scene_id) << ',' << r.follower_id << ',' << r.lead_id << ',' << r.frame << ','
            << csv::format_double(gap(s.lead, s.follower)) << ',' << csv::format_double(s.follower.speed_mps) << ','
            << csv::format_double(s.lead.speed_mps) << ',' << csv::format_double(s.lead.length_m) << ','
            << csv::format_double(s.follower.length_m) << '\n';
    }
    return out.str();
}

void write_scenes_csv(const std::string& path, std::span<const SceneRecord> scenes) {
    auto out = csv::open_output(path);
    out << scenes_csv(scenes);
    csv::close_output(out, path);
}

std::vector<SceneRecord> read_scenes_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    const std::size_t c_id = t.require_column("scene_id");
    const std::size_t c_fid = t.require_column("follower_id");
    const std::size_t c_lid = t.require_column("lead_id");
    const std::size_t c_frame = t.require_column("frame");
    const std::size_t c_gap = t.require_column("gap_m");
    const std::size_t c_fv = t.require_column("follower_speed_mps");
    const std::size_t c_lv = t.require_column("lead_speed_mps");
    const std::size_t c_ll = t.require_column("lead_length_m");
    const std::size_t c_fl = t.require_column("follower_length_m");

    std::vector<SceneRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        SceneRecord r;
        r.scene.scene_id = csv::field(t, row, c_id);
        r.follower_id = csv::to_int(t, row, c_fid);
        r.lead_id = csv::to_int(t, row, c_lid);
        r.frame = csv::to_int(t, row, c_frame);
        const double g = csv::to_double(t, row, c_gap);
        r.scene.follower = {0.0, csv::to_double(t, row, c_fv), csv::to_double(t, row, c_fl)};
        r.scene.lead.speed_mps = csv::to_double(t, row, c_lv);
        r.scene.lead.length_m = csv::to_double(t, row, c_ll);
        r.scene.lead.position_m = g + 0.5 * (r.scene.lead.length_m + r.scene.follower.length_m);
        try {
            validate(r.scene);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidScene, path + ":" + std::to_string(row.line) + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<StartScene> scenes_only(std::span<const SceneRecord> records) {
    std::vector<StartScene> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.scene);
    return out;
}

}  // namespace rdsim
