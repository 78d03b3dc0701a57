#!/usr/bin/env python3
"""Regenerates the recordings under tests/data.

golden_*: six moving tracks plus one crossing car over 200 frames at 25 Hz.
pair_*: one car following another for 100 frames.
velocity_*: a single frame whose velocity is (3, 4).
malformed_*: pair_* with the x value of one row removed.
golden_expected_pairs.csv: the following pairs the golden recording must yield.
"""

import os
import sys

TRACK_HEADER = ("recordingId,trackId,frame,trackLifetime,xCenter,yCenter,heading,width,length,"
                "xVelocity,yVelocity,xAcceleration,yAcceleration")
META_HEADER = "recordingId,trackId,initialFrame,finalFrame,numFrames,width,length,class"


def fmt(v):
    r = f"{v:.5f}".rstrip("0").rstrip(".")
    return "0" if r in ("-0", "") else r


def write(path, header, rows):
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")


def build(tracks):
    """tracks: list of (id, cls, length, width, first, last, x(f), y(f), heading, vx, vy)."""
    rows, meta = [], []
    for tid, cls, length, width, first, last, xf, yf, heading, vx, vy in tracks:
        meta.append(["0", str(tid), str(first), str(last), str(last - first + 1), fmt(width), fmt(length), cls])
        for f in range(first, last + 1):
            rows.append(["0", str(tid), str(f), str(f - first), fmt(xf(f)), fmt(yf(f)), fmt(heading),
                         fmt(width), fmt(length), fmt(vx), fmt(vy), "0", "0"])
    rows.sort(key=lambda r: (int(r[2]), int(r[1])))
    return rows, meta


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)

    golden = [
        (1, "car", 5, 2, 0, 199, lambda f: 10 + 0.4 * f, lambda f: 0.0, 0, 10, 0),
        (2, "car", 5, 2, 0, 199, lambda f: 30 + 0.4 * f, lambda f: 0.0, 0, 10, 0),
        (3, "truck_bus", 10, 2.5, 0, 199, lambda f: 60 + 0.4 * f, lambda f: 0.3, 0, 10, 0),
        (4, "bicycle", 2, 0.8, 50, 79, lambda f: 20 + 0.4 * f, lambda f: 0.0, 0, 10, 0),
        (5, "van", 5, 2, 100, 119, lambda f: -5 + 0.4 * f, lambda f: 0.0, 0, 10, 0),
        (6, "car", 5, 2, 0, 199, lambda f: 200 - 0.4 * f, lambda f: 5.0, 180, -10, 0),
        (7, "car", 5, 2, 0, 199, lambda f: 45 + 0.4 * f, lambda f: 3.5, 0, 10, 0),
    ]
    rows, meta = build(golden)
    write(os.path.join(out_dir, "golden_tracks.csv"), TRACK_HEADER, rows)
    write(os.path.join(out_dir, "golden_tracksMeta.csv"), META_HEADER, meta)

    # 1 follows 2 except while the bicycle rides between them; 2 follows the truck throughout.
    # The van's 20 frames are under 1 s, 7 is a lane over, 6 is oncoming.
    expected = []
    for f in range(200):
        if f < 50 or f >= 80:
            expected.append([str(f), "1", "2", "20", "car", "car"])
        expected.append([str(f), "2", "3", "30", "car", "truck"])
    write(os.path.join(out_dir, "golden_expected_pairs.csv"),
          "frame,follower_id,lead_id,center_gap_m,follower_kind,lead_kind", expected)

    pair = [
        (1, "car", 5, 2, 0, 99, lambda f: 0.4 * f, lambda f: 0.0, 0, 10, 0),
        (2, "car", 5, 2, 0, 99, lambda f: 20 + 0.4 * f, lambda f: 0.0, 0, 10, 0),
    ]
    rows, meta = build(pair)
    write(os.path.join(out_dir, "pair_tracks.csv"), TRACK_HEADER, rows)
    write(os.path.join(out_dir, "pair_tracksMeta.csv"), META_HEADER, meta)

    bad = [list(r) for r in rows]
    bad[41][4] = ""
    write(os.path.join(out_dir, "malformed_tracks.csv"), TRACK_HEADER, bad)
    write(os.path.join(out_dir, "malformed_tracksMeta.csv"), META_HEADER, meta)

    vel = [(1, "car", 4.5, 1.8, 0, 0, lambda f: 1.0, lambda f: 2.0, 53.13010235415598, 3, 4)]
    rows, meta = build(vel)
    write(os.path.join(out_dir, "velocity_tracks.csv"), TRACK_HEADER, rows)
    write(os.path.join(out_dir, "velocity_tracksMeta.csv"), META_HEADER, meta)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "data"))
