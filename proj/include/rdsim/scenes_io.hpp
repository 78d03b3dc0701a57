#pragma once

#include <span>
#include <string>
#include <vector>

#include "rdsim/sim_engine.hpp"

namespace rdsim {

/// A start scene plus its provenance. Synthetic scenes carry -1 ids.
struct SceneRecord {
    StartScene scene;
    long long follower_id = -1;
    long long lead_id = -1;
    long long frame = -1;
};

/// Columns: scene_id,follower_id,lead_id,frame,gap_m,follower_speed_mps,lead_speed_mps,
/// lead_length_m,follower_length_m. Numbers use the shortest exact representation.
void write_scenes_csv(const std::string& path, std::span<const SceneRecord> scenes);
std::string scenes_csv(std::span<const SceneRecord> scenes);

/// Rebuilds scenes with the follower at 0 and the lead at gap + mean length.
/// Throws MissingColumn, MalformedRow, InvalidScene, IoFailure.
std::vector<SceneRecord> read_scenes_csv(const std::string& path);

std::vector<StartScene> scenes_only(std::span<const SceneRecord> records);

}  // namespace rdsim
