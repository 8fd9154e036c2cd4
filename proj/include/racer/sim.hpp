#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <racer/rng.hpp>
#include <racer/track.hpp>

namespace racer {

inline constexpr float kControlHz = 40.0f;
inline constexpr float kControlDt = 1.0f / 40.0f;
inline constexpr float kWheelbase = 0.33f;
inline constexpr float kFootprintLength = 0.5f;  // m, along heading
inline constexpr float kFootprintWidth = 0.3f;   // m
inline constexpr float kSpeedLagTau = 0.3f;      // s, first-order speed response
inline constexpr float kSteerLagTau = 0.1f;      // s

struct VehicleState {
    float x = 0.0f;
    float y = 0.0f;
    float heading = 0.0f;   // rad
    float speed = 0.0f;     // m/s, actual
    float steering = 0.0f;  // rad, actual
};

struct ActionPair {
    float steering_rad = 0.0f;  // command, clamped to |0.4189|
    float speed_mps = 0.0f;     // command, clamped to [-0.5, 5]
};

// Distance from (x, y) along direction angle to the first occupied cell, by
// DDA grid traversal. Free all the way (or starting outside the map) clips to
// max_range.
float raycast(const OccupancyGrid& grid, float x, float y, float angle, float max_range);

// Full 1081-beam scan spanning heading-135 deg .. heading+135 deg.
std::vector<float> scan_lidar(const OccupancyGrid& grid, const VehicleState& s);

// Per-beam zero-mean Gaussian, then re-clip to [0, 10]. Sigma is chosen per
// episode (uniform in [0, 0.5]); pass it in so the caller owns that draw.
void add_scan_noise(std::vector<float>& scan, float sigma, Pcg32& rng);

// Kinematic bicycle with first-order actuator lags, integrated by RK4 over dt.
VehicleState step_vehicle(const VehicleState& s, const ActionPair& cmd, float dt = kControlDt);

// True if any sampled point of the 0.5 x 0.3 m footprint rectangle around the
// pose lies in an occupied cell.
bool footprint_collides(const OccupancyGrid& grid, const VehicleState& s);

enum class Outcome { LapComplete, Collision, Timeout };
const char* outcome_name(Outcome o);

struct TickRecord {
    double t = 0.0;  // s since episode start, tick * 0.025
    VehicleState state;
    ActionPair action;     // command issued this tick
    uint32_t scan_crc = 0; // checksum of the preprocessed scan fed to the policy
};

struct EpisodeLog {
    Outcome outcome = Outcome::Timeout;
    float lap_time_s = 0.0f;  // valid only when outcome == LapComplete
    float progress_pct = 0.0f;
    std::vector<TickRecord> ticks;
};

// Policy sees the preprocessed scan (1081 values in [0, 1]) plus the state.
using Policy = std::function<ActionPair(const std::vector<float>& scan, const VehicleState& s)>;

// Optional per-tick hook, called with the preprocessed scan and the action the
// policy returned (after clamping). Used by data collection.
using TickSink =
    std::function<void(const std::vector<float>& scan, const ActionPair& cmd, const VehicleState& s)>;

// Runs one 40 Hz episode: raycast -> noise -> preprocess -> policy -> step.
// Terminates on collision, lap completion (full centerline arc covered,
// tracked by a windowed waypoint walker), or timeout. Fully reproducible from
// (track, policy, start, seed). Throws if the start pose already collides.
EpisodeLog run_episode(const Track& track, const Policy& policy, const VehicleState& start,
                       uint64_t seed, float timeout_s, const TickSink& sink = nullptr);

// Start pose at a centerline waypoint, heading along the tangent.
VehicleState start_at_waypoint(const Track& track, size_t waypoint);

// Progress of an arbitrary trajectory over the track centerline: max unwrapped
// arc length from the trajectory's starting waypoint, as a percentage.
float trajectory_progress(const Track& track, const std::vector<float>& xs,
                          const std::vector<float>& ys);

uint32_t scan_crc32(const std::vector<float>& scan);

}  // namespace racer
