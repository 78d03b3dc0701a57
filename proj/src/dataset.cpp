#include "rdsim/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "rdsim/error.hpp"

namespace rdsim {

const char* to_string(ObjectKind kind) noexcept {
    switch (kind) {
        case ObjectKind::Car: return "car";
        case ObjectKind::Van: return "van";
        case ObjectKind::Truck: return "truck";
        case ObjectKind::Bus: return "bus";
        case ObjectKind::Trailer: return "trailer";
        case ObjectKind::Pedestrian: return "pedestrian";
        case ObjectKind::Bicycle: return "bicycle";
        case ObjectKind::Motorcycle: return "motorcycle";
        case ObjectKind::Other: return "other";
    }
    return "other";
}

ObjectKind parse_object_kind(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    static const std::unordered_map<std::string, ObjectKind> kinds{
        {"car", ObjectKind::Car},           {"van", ObjectKind::Van},
        {"truck", ObjectKind::Truck},       {"truck_bus", ObjectKind::Truck},
        {"bus", ObjectKind::Bus},           {"trailer", ObjectKind::Trailer},
        {"pedestrian", ObjectKind::Pedestrian}, {"bicycle", ObjectKind::Bicycle},
        {"motorcycle", ObjectKind::Motorcycle}, {"other", ObjectKind::Other},
    };
    auto it = kinds.find(s);
    return it == kinds.end() ? ObjectKind::Other : it->second;
}

bool is_vru(ObjectKind kind) noexcept {
    return kind == ObjectKind::Pedestrian || kind == ObjectKind::Bicycle || kind == ObjectKind::Motorcycle;
}

double normalize_heading_deg(double deg) noexcept {
    double h = std::fmod(deg, 360.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h = 0.0;
    return h;
}

double angular_distance_deg(double a, double b) noexcept {
    const double d = std::abs(normalize_heading_deg(a) - normalize_heading_deg(b));
    return d > 180.0 ? 360.0 - d : d;
}

// ---------------------------------------------------------------------------
// ColumnMap

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

ColumnMap ColumnMap::parse(std::string_view text, const std::string& origin) {
    ColumnMap map = drone_default();
    std::unordered_map<std::string, std::string*> strings{
        {"recording_id", &map.recording_id},
        {"speed_unit", &map.speed_unit},
        {"heading_unit", &map.heading_unit},
        {"tracks.track_id", &map.track_id},
        {"tracks.frame", &map.frame},
        {"tracks.x", &map.x},
        {"tracks.y", &map.y},
        {"tracks.heading", &map.heading},
        {"tracks.speed", &map.speed},
        {"tracks.vx", &map.vx},
        {"tracks.vy", &map.vy},
        {"tracks.length", &map.length},
        {"tracks.width", &map.width},
        {"meta.track_id", &map.meta_track_id},
        {"meta.class", &map.meta_class},
        {"meta.length", &map.meta_length},
        {"meta.width", &map.meta_width},
        {"meta.first_frame", &map.meta_first_frame},
        {"meta.last_frame", &map.meta_last_frame},
    };

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw Error(ErrorCode::MalformedRow, where + ": expected 'key = value'");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key == "frame_rate_hz") {
            double rate = 0.0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rate);
            if (ec != std::errc() || ptr != value.data() + value.size() || !(rate > 0.0)) {
                throw Error(ErrorCode::MalformedRow, where + ": frame_rate_hz must be a positive number");
            }
            map.frame_rate_hz = rate;
            continue;
        }
        auto it = strings.find(key);
        if (it == strings.end()) throw Error(ErrorCode::MalformedRow, where + ": unknown key '" + key + "'");
        *it->second = value;
    }
    if (map.speed_unit != "mps" && map.speed_unit != "kmh") {
        throw Error(ErrorCode::MalformedRow, origin + ": speed_unit must be mps or kmh");
    }
    if (map.heading_unit != "deg" && map.heading_unit != "rad") {
        throw Error(ErrorCode::MalformedRow, origin + ": heading_unit must be deg or rad");
    }
    return map;
}

ColumnMap ColumnMap::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Recording

Recording::Recording(std::string recording_id, double frame_rate_hz, std::map<int, TrackMeta> tracks,
                     std::vector<std::vector<ObjectSample>> frames)
    : recording_id_(std::move(recording_id)),
      frame_rate_hz_(frame_rate_hz),
      tracks_(std::move(tracks)),
      frames_(std::move(frames)) {}

std::span<const ObjectSample> Recording::frame_view(int frame) const {
    if (frame < 0 || frame >= frame_count()) {
        throw Error(ErrorCode::FrameOutOfRange,
                    "frame " + std::to_string(frame) + " outside [0, " + std::to_string(frame_count()) + ")");
    }
    return frames_[static_cast<std::size_t>(frame)];
}

namespace {

constexpr double kKmhToMps = 1.0 / 3.6;

std::string at(const csv::Table& t, const csv::Row& row) {
    return t.path + ":" + std::to_string(row.line);
}

bool close_enough(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

}  // namespace

Recording load_recording(const std::string& tracks_path, const std::string& meta_path, const ColumnMap& cm) {
    const csv::Table meta = csv::read_file(meta_path);
    const csv::Table tracks = csv::read_file(tracks_path);

    // Metadata first: kind and dimensions are per track.
    const std::size_t m_id = meta.require_column(cm.meta_track_id);
    const std::size_t m_class = meta.require_column(cm.meta_class);
    const std::size_t m_len = meta.require_column(cm.meta_length);
    const std::size_t m_wid = meta.require_column(cm.meta_width);
    constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    const std::size_t m_first = cm.meta_first_frame.empty() ? kAbsent : meta.require_column(cm.meta_first_frame);
    const std::size_t m_last = cm.meta_last_frame.empty() ? kAbsent : meta.require_column(cm.meta_last_frame);

    std::map<int, TrackMeta> metas;
    for (const auto& row : meta.rows) {
        const int id = static_cast<int>(csv::to_int(meta, row, m_id));
        TrackMeta tm;
        tm.kind = parse_object_kind(csv::field(meta, row, m_class));
        tm.length_m = csv::to_double(meta, row, m_len);
        tm.width_m = csv::to_double(meta, row, m_wid);
        tm.first_frame = m_first != kAbsent ? static_cast<int>(csv::to_int(meta, row, m_first)) : -1;
        tm.last_frame = m_last != kAbsent ? static_cast<int>(csv::to_int(meta, row, m_last)) : -1;
        if (!(tm.length_m > 0.0) || !(tm.width_m > 0.0)) {
            throw Error(ErrorCode::MalformedRow, at(meta, row) + ": track dimensions must be > 0");
        }
        auto [it, inserted] = metas.emplace(id, tm);
        if (!inserted && !(it->second == tm)) {
            throw Error(ErrorCode::InconsistentMeta, at(meta, row) + ": conflicting metadata for track " +
                                                         std::to_string(id));
        }
    }

    const std::size_t c_id = tracks.require_column(cm.track_id);
    const std::size_t c_frame = tracks.require_column(cm.frame);
    const std::size_t c_x = tracks.require_column(cm.x);
    const std::size_t c_y = tracks.require_column(cm.y);
    const std::size_t c_heading = tracks.require_column(cm.heading);
    std::optional<std::size_t> c_speed, c_vx, c_vy, c_len, c_wid;
    if (!cm.speed.empty()) {
        c_speed = tracks.require_column(cm.speed);
    } else {
        c_vx = tracks.require_column(cm.vx);
        c_vy = tracks.require_column(cm.vy);
    }
    if (!cm.length.empty()) c_len = tracks.require_column(cm.length);
    if (!cm.width.empty()) c_wid = tracks.require_column(cm.width);

    const double speed_scale = cm.speed_unit == "kmh" ? kKmhToMps : 1.0;
    const double heading_scale = cm.heading_unit == "rad" ? 180.0 / std::numbers::pi : 1.0;

    std::map<int, std::vector<ObjectSample>> by_track;
    for (const auto& row : tracks.rows) {
        ObjectSample s;
        s.track_id = static_cast<int>(csv::to_int(tracks, row, c_id));
        s.frame = static_cast<int>(csv::to_int(tracks, row, c_frame));
        s.x_m = csv::to_double(tracks, row, c_x);
        s.y_m = csv::to_double(tracks, row, c_y);
        s.heading_deg = normalize_heading_deg(csv::to_double(tracks, row, c_heading) * heading_scale);
        if (c_speed) {
            s.speed_mps = std::abs(csv::to_double(tracks, row, *c_speed)) * speed_scale;
        } else {
            s.speed_mps = std::hypot(csv::to_double(tracks, row, *c_vx), csv::to_double(tracks, row, *c_vy)) *
                          speed_scale;
        }
        if (s.frame < 0) throw Error(ErrorCode::MalformedRow, at(tracks, row) + ": negative frame index");
        if (!std::isfinite(s.x_m) || !std::isfinite(s.y_m) || !std::isfinite(s.speed_mps)) {
            throw Error(ErrorCode::MalformedRow, at(tracks, row) + ": non-finite value");
        }

        auto m = metas.find(s.track_id);
        if (m == metas.end()) {
            throw Error(ErrorCode::InconsistentMeta,
                        at(tracks, row) + ": track " + std::to_string(s.track_id) + " has no metadata");
        }
        s.kind = m->second.kind;
        s.length_m = m->second.length_m;
        s.width_m = m->second.width_m;
        if (c_len && !close_enough(csv::to_double(tracks, row, *c_len), s.length_m)) {
            throw Error(ErrorCode::InconsistentMeta, at(tracks, row) + ": length disagrees with metadata");
        }
        if (c_wid && !close_enough(csv::to_double(tracks, row, *c_wid), s.width_m)) {
            throw Error(ErrorCode::InconsistentMeta, at(tracks, row) + ": width disagrees with metadata");
        }
        by_track[s.track_id].push_back(s);
    }
    if (by_track.empty()) throw Error(ErrorCode::EmptyRecording, tracks_path + " contains no samples");

    int frame_count = 0;
    for (auto& [id, samples] : by_track) {
        std::sort(samples.begin(), samples.end(),
                  [](const ObjectSample& a, const ObjectSample& b) { return a.frame < b.frame; });
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (samples[i].frame == samples[i - 1].frame) {
                throw Error(ErrorCode::InconsistentMeta, "track " + std::to_string(id) + " has two samples at frame " +
                                                             std::to_string(samples[i].frame));
            }
            if (samples[i].frame != samples[i - 1].frame + 1) {
                throw Error(ErrorCode::InconsistentMeta, "track " + std::to_string(id) + " skips frames after " +
                                                             std::to_string(samples[i - 1].frame));
            }
        }
        TrackMeta& tm = metas.at(id);
        const int first = samples.front().frame;
        const int last = samples.back().frame;
        if ((tm.first_frame >= 0 && tm.first_frame != first) || (tm.last_frame >= 0 && tm.last_frame != last)) {
            throw Error(ErrorCode::InconsistentMeta,
                        "track " + std::to_string(id) + " frame span disagrees with metadata");
        }
        tm.first_frame = first;
        tm.last_frame = last;
        frame_count = std::max(frame_count, last + 1);
    }
    for (const auto& [id, tm] : metas) {
        if (!by_track.count(id)) {
            throw Error(ErrorCode::InconsistentMeta, "track " + std::to_string(id) + " has metadata but no samples");
        }
    }

    std::vector<std::vector<ObjectSample>> frames(static_cast<std::size_t>(frame_count));
    for (const auto& [id, samples] : by_track) {  // map order keeps each frame sorted by track id
        for (const auto& s : samples) frames[static_cast<std::size_t>(s.frame)].push_back(s);
    }
    return Recording(cm.recording_id, cm.frame_rate_hz, std::move(metas), std::move(frames));
}

void save_recording(const Recording& rec, const std::string& tracks_path, const std::string& meta_path,
                    const ColumnMap& cm) {
    const double speed_scale = cm.speed_unit == "kmh" ? 3.6 : 1.0;
    const double heading_scale = cm.heading_unit == "rad" ? std::numbers::pi / 180.0 : 1.0;
    {
        auto out = csv::open_output(meta_path);
        out << cm.meta_track_id << ',' << cm.meta_class << ',' << cm.meta_length << ',' << cm.meta_width;
        if (!cm.meta_first_frame.empty()) out << ',' << cm.meta_first_frame;
        if (!cm.meta_last_frame.empty()) out << ',' << cm.meta_last_frame;
        out << '\n';
        for (const auto& [id, tm] : rec.tracks()) {
            out << id << ',' << to_string(tm.kind) << ',' << csv::format_double(tm.length_m) << ','
                << csv::format_double(tm.width_m);
            if (!cm.meta_first_frame.empty()) out << ',' << tm.first_frame;
            if (!cm.meta_last_frame.empty()) out << ',' << tm.last_frame;
            out << '\n';
        }
        csv::close_output(out, meta_path);
    }
    auto out = csv::open_output(tracks_path);
    out << cm.track_id << ',' << cm.frame << ',' << cm.x << ',' << cm.y << ',' << cm.heading;
    if (!cm.speed.empty()) {
        out << ',' << cm.speed;
    } else {
        out << ',' << cm.vx << ',' << cm.vy;
    }
    if (!cm.length.empty()) out << ',' << cm.length;
    if (!cm.width.empty()) out << ',' << cm.width;
    out << '\n';
    for (int f = 0; f < rec.frame_count(); ++f) {
        for (const auto& s : rec.frame_view(f)) {
            out << s.track_id << ',' << s.frame << ',' << csv::format_double(s.x_m) << ','
                << csv::format_double(s.y_m) << ',' << csv::format_double(s.heading_deg * heading_scale);
            const double v = s.speed_mps * speed_scale;
            if (!cm.speed.empty()) {
                out << ',' << csv::format_double(v);
            } else {
                const double h = s.heading_deg * std::numbers::pi / 180.0;
                out << ',' << csv::format_double(v * std::cos(h)) << ',' << csv::format_double(v * std::sin(h));
            }
            if (!cm.length.empty()) out << ',' << csv::format_double(s.length_m);
            if (!cm.width.empty()) out << ',' << csv::format_double(s.width_m);
            out << '\n';
        }
    }
    csv::close_output(out, tracks_path);
}

}  // namespace rdsim
