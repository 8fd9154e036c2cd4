#pragma once

#include <cstdint>
#include <string>

#include <racer/dataset.hpp>
#include <racer/sim.hpp>
#include <racer/track.hpp>

namespace racer {

struct ExpertConfig {
    float lookahead_base = 0.5f;   // m
    float lookahead_gain = 0.3f;   // s (times current speed)
    float lookahead_min = 0.5f;    // m
    float lookahead_max = 2.0f;    // m
    float a_lat_max = 4.0f;        // m/s^2, lateral acceleration cap
    float preview_time = 1.2f;     // s, curvature preview horizon
    float preview_min = 2.0f;      // m
};

// Pure-pursuit centerline follower with curvature-capped speed. Deterministic
// and stateless across ticks. Throws on a centerline with < 3 waypoints.
Policy expert_policy(const Track& track, ExpertConfig cfg = {});

// Curvature of the circumcircle through three points (0 for collinear).
float three_point_curvature(float x0, float y0, float x1, float y1, float x2, float y2);

struct CollectResult {
    Dataset dataset;
    bool complete = false;  // false if the expert crashed; partial data kept
    int laps_done = 0;
};

// Drives the expert for n_laps from waypoint 0, recording one sample per
// control tick with episode noise active. Labels come from the expert's
// commands through the normalized-label mapping.
CollectResult collect(const Track& track, int n_laps, uint64_t seed);

}  // namespace racer
