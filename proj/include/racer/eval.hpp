#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <racer/sim.hpp>
#include <racer/track.hpp>

namespace racer {

struct TrialSummary {
    int trial = 0;
    size_t start_waypoint = 0;
    Outcome outcome = Outcome::Timeout;
    float lap_time_s = 0.0f;  // valid iff outcome == LapComplete
    float progress_pct = 0.0f;
};

struct EvalReport {
    std::string model;
    std::string track;
    std::vector<TrialSummary> trials;
    std::optional<float> avg_lap_time_s;  // over successes; empty if none
    float avg_progress_pct = 0.0f;        // over all trials
    float success_rate = 0.0f;
};

struct EvalConfig {
    int n_trials = 10;
    uint64_t seed = 0;
    float timeout_s = 60.0f;
    int workers = 1;
};

// Random-start trials (uniform over centerline waypoints, heading tangent).
// Each trial's noise stream is derived from (seed, trial). Aggregation is by
// trial index, so worker count does not affect the report.
EvalReport evaluate(const Policy& policy, const Track& track, const EvalConfig& cfg,
                    const std::string& model_name = "", const std::string& track_name = "");

// Table: human-readable summary. CSV: one row per trial plus a summary row;
// lap-time cells are "N/A" when there is no successful trial.
std::string report_table(const EvalReport& r);
std::string report_csv(const EvalReport& r);

// Single episode from a given start waypoint; returns the log. The trace CSV
// has header t,x,y,v,steer,speed_cmd with one row per tick (spacing 0.025 s);
// steer and speed_cmd are the commanded values.
EpisodeLog trace_episode(const Policy& policy, const Track& track, size_t start_waypoint,
                         uint64_t seed, float timeout_s = 60.0f);
void save_trace_csv(const EpisodeLog& log, const std::string& path);

// Mean absolute per-tick change in commanded steering (rad per tick). A proxy
// for trajectory wobble. Throws on traces shorter than 3 ticks.
float wobble_metric(const EpisodeLog& log);

}  // namespace racer
