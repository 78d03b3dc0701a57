#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdsim {

enum class ObjectKind { Car, Van, Truck, Bus, Trailer, Pedestrian, Bicycle, Motorcycle, Other };

const char* to_string(ObjectKind kind) noexcept;
/// Case-insensitive; uniD's combined "truck_bus" class maps to Truck. Unknown strings map to Other.
ObjectKind parse_object_kind(std::string_view text);
/// Pedestrians, bicycles, motorcycles.
bool is_vru(ObjectKind kind) noexcept;

struct ObjectSample {
    int track_id = 0;
    int frame = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double heading_deg = 0.0;  // [0, 360)
    double speed_mps = 0.0;
    double length_m = 0.0;
    double width_m = 0.0;
    ObjectKind kind = ObjectKind::Other;

    bool operator==(const ObjectSample&) const = default;
};

struct TrackMeta {
    ObjectKind kind = ObjectKind::Other;
    double length_m = 0.0;
    double width_m = 0.0;
    int first_frame = 0;
    int last_frame = 0;

    bool operator==(const TrackMeta&) const = default;
};

/// Maps ObjectSample fields onto source column names. Loaded from a `key = value` file;
/// an empty value marks an optional column as absent.
struct ColumnMap {
    std::string recording_id = "recording";
    double frame_rate_hz = 25.0;
    std::string speed_unit = "mps";    // mps | kmh
    std::string heading_unit = "deg";  // deg | rad

    std::string track_id = "trackId";
    std::string frame = "frame";
    std::string x = "xCenter";
    std::string y = "yCenter";
    std::string heading = "heading";
    std::string speed;  // when empty, speed is |(vx, vy)|
    std::string vx = "xVelocity";
    std::string vy = "yVelocity";
    std::string length;  // optional per-sample length, checked against the metadata
    std::string width;

    std::string meta_track_id = "trackId";
    std::string meta_class = "class";
    std::string meta_length = "length";
    std::string meta_width = "width";
    std::string meta_first_frame = "initialFrame";
    std::string meta_last_frame = "finalFrame";

    /// Default mapping for uniD/levelX-style drone recordings.
    static ColumnMap drone_default() { return {}; }
    /// Starts from drone_default() and applies the file's overrides.
    static ColumnMap load(const std::string& path);
    /// Parses `key = value` lines; '#' starts a comment.
    static ColumnMap parse(std::string_view text, const std::string& origin = "<string>");
};

class Recording {
public:
    Recording() = default;
    Recording(std::string recording_id, double frame_rate_hz, std::map<int, TrackMeta> tracks,
              std::vector<std::vector<ObjectSample>> frames);

    const std::string& recording_id() const noexcept { return recording_id_; }
    double frame_rate_hz() const noexcept { return frame_rate_hz_; }
    int frame_count() const noexcept { return static_cast<int>(frames_.size()); }
    const std::map<int, TrackMeta>& tracks() const noexcept { return tracks_; }
    double time_of(int frame) const noexcept { return frame / frame_rate_hz_; }

    /// Samples present at `frame`, ordered by track id. Throws FrameOutOfRange.
    std::span<const ObjectSample> frame_view(int frame) const;

    bool operator==(const Recording&) const = default;

private:
    std::string recording_id_;
    double frame_rate_hz_ = 25.0;
    std::map<int, TrackMeta> tracks_;
    std::vector<std::vector<ObjectSample>> frames_;
};

/// Throws MissingColumn, MalformedRow (with line number), InconsistentMeta, EmptyRecording, IoFailure.
Recording load_recording(const std::string& tracks_path, const std::string& meta_path, const ColumnMap& columns);

/// Writes a recording in the schema described by `columns`.
void save_recording(const Recording& rec, const std::string& tracks_path, const std::string& meta_path,
                    const ColumnMap& columns);

/// Maps any angle to [0, 360).
double normalize_heading_deg(double deg) noexcept;
/// Shortest angular distance in degrees, in [0, 180].
double angular_distance_deg(double a_deg, double b_deg) noexcept;

}  // namespace rdsim
