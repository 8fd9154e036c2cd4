#pragma once

#include <vector>

#include <racer/tensor.hpp>

namespace racer {

// LiDAR geometry shared by the simulator and the models: 1081 beams spanning
// 270 degrees (0.25 degree steps), centered on the heading, 10 m max range.
inline constexpr int kScanBeams = 1081;
inline constexpr float kScanFovDeg = 270.0f;
inline constexpr float kScanMaxRange = 10.0f;

// Control output conventions. Outputs are normalized: steering in [-1, 1]
// scaled by the steering limit, speed in [-0.1, 1] scaled by 5 m/s.
inline constexpr float kSteerLimitRad = 0.4189f;
inline constexpr float kSpeedScale = 5.0f;
inline constexpr float kSpeedMin = -0.5f;
inline constexpr float kSpeedMax = 5.0f;

// Raw ranges in meters -> network input in [0, 1]:
//   1. replace invalid beams (non-finite or <= 0) by linear interpolation
//      between the nearest valid neighbors (nearest valid value at the edges);
//      a scan with no valid beam at all is rejected
//   2. median filter, window 5, truncated at the edges
//   3. clip to [0, 10] and divide by 10
std::vector<float> preprocess_scan(const std::vector<float>& ranges_m);

// Keep indices 0, f, 2f, ... Factor must be 1, 2 or 4; input length 1081.
std::vector<float> downsample_scan(const std::vector<float>& scan, int factor);

struct Command {
    float steering_norm = 0.0f;  // [-1, 1]
    float steering_rad = 0.0f;   // steering_norm * 0.4189
    float speed_mps = 0.0f;      // [-0.5, 5]
    bool fault = false;          // non-finite network output; command is a safe stop
};

// Network output [o0, o1] -> actuator command. Values are clamped into range;
// non-finite outputs give a zero command with fault set.
Command map_output(float o0, float o1);

// Expert command -> training target [steering_norm, speed_norm]. Exact inverse
// of map_output on in-range commands; throws on out-of-range input (1e-6 slop).
void map_labels(float steering_rad, float speed_mps, float* steering_norm, float* speed_norm);

}  // namespace racer
