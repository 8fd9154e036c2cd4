#include <racer/eval.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace racer {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

EvalReport evaluate(const Policy& policy, const Track& track, const EvalConfig& cfg,
                    const std::string& model_name, const std::string& track_name) {
    if (cfg.n_trials < 1) throw std::invalid_argument("evaluate: need at least one trial");
    EvalReport r;
    r.model = model_name;
    r.track = track_name.empty() ? track.name : track_name;
    r.trials.resize(size_t(cfg.n_trials));

    // all start draws come first so the worker count cannot affect them
    Pcg32 start_rng(mix_seed(cfg.seed, 0x57A7), 3);
    std::vector<size_t> starts(size_t(cfg.n_trials));
    for (auto& s : starts) s = start_rng.below(uint32_t(track.waypoint_count()));

    auto run_trial = [&](int i, const Policy& pol) {
        const VehicleState start = start_at_waypoint(track, starts[size_t(i)]);
        const EpisodeLog log =
            run_episode(track, pol, start, mix_seed(cfg.seed, 100 + uint64_t(i)), cfg.timeout_s);
        TrialSummary t;
        t.trial = i;
        t.start_waypoint = starts[size_t(i)];
        t.outcome = log.outcome;
        t.lap_time_s = log.lap_time_s;
        t.progress_pct = log.progress_pct;
        r.trials[size_t(i)] = t;
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (int i = 0; i < cfg.n_trials; ++i) run_trial(i, policy);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                Policy own = policy;  // stateful policies get a private copy
                for (int i = w; i < cfg.n_trials; i += workers) run_trial(i, own);
            });
        }
        for (auto& th : pool) th.join();
    }

    double progress_sum = 0.0;
    double lap_sum = 0.0;
    int successes = 0;
    for (const auto& t : r.trials) {
        progress_sum += t.progress_pct;
        if (t.outcome == Outcome::LapComplete) {
            lap_sum += t.lap_time_s;
            ++successes;
        }
    }
    r.avg_progress_pct = float(progress_sum / cfg.n_trials);
    r.success_rate = float(successes) / float(cfg.n_trials);
    if (successes > 0) r.avg_lap_time_s = float(lap_sum / successes);
    return r;
}

std::string report_table(const EvalReport& r) {
    std::string out;
    out += "model: " + r.model + "  track: " + r.track + "\n";
    out += "trial  start_wp  outcome       lap_time_s  progress_pct\n";
    char buf[128];
    for (const auto& t : r.trials) {
        std::string lap = t.outcome == Outcome::LapComplete ? fmt_g(double(t.lap_time_s)) : "N/A";
        std::snprintf(buf, sizeof buf, "%5d  %8zu  %-12s  %10s  %12.2f\n", t.trial,
                      t.start_waypoint, outcome_name(t.outcome), lap.c_str(),
                      double(t.progress_pct));
        out += buf;
    }
    std::string avg_lap = r.avg_lap_time_s ? fmt_g(double(*r.avg_lap_time_s)) : "N/A";
    std::snprintf(buf, sizeof buf,
                  "avg_lap_time_s=%s avg_progress_pct=%.2f success_rate=%.2f\n", avg_lap.c_str(),
                  double(r.avg_progress_pct), double(r.success_rate));
    out += buf;
    return out;
}

std::string report_csv(const EvalReport& r) {
    std::string out = "model,track,trial,start_waypoint,outcome,lap_time_s,progress_pct\n";
    for (const auto& t : r.trials) {
        out += r.model + "," + r.track + "," + std::to_string(t.trial) + "," +
               std::to_string(t.start_waypoint) + "," + outcome_name(t.outcome) + ",";
        out += t.outcome == Outcome::LapComplete ? fmt_g(double(t.lap_time_s)) : "N/A";
        out += "," + fmt_g(double(t.progress_pct)) + "\n";
    }
    out += "# summary avg_lap_time_s=";
    out += r.avg_lap_time_s ? fmt_g(double(*r.avg_lap_time_s)) : "N/A";
    out += " avg_progress_pct=" + fmt_g(double(r.avg_progress_pct));
    out += " success_rate=" + fmt_g(double(r.success_rate)) + "\n";
    return out;
}

EpisodeLog trace_episode(const Policy& policy, const Track& track, size_t start_waypoint,
                         uint64_t seed, float timeout_s) {
    const VehicleState start = start_at_waypoint(track, start_waypoint);
    return run_episode(track, policy, start, seed, timeout_s);
}

void save_trace_csv(const EpisodeLog& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "t,x,y,v,steer,speed_cmd\n";
    for (const auto& rec : log.ticks) {
        f << fmt_g(rec.t) << "," << fmt_g(double(rec.state.x)) << "," << fmt_g(double(rec.state.y))
          << "," << fmt_g(double(rec.state.speed)) << "," << fmt_g(double(rec.action.steering_rad))
          << "," << fmt_g(double(rec.action.speed_mps)) << "\n";
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

float wobble_metric(const EpisodeLog& log) {
    if (log.ticks.size() < 3) throw std::invalid_argument("wobble_metric: trace too short");
    double sum = 0.0;
    for (size_t i = 1; i < log.ticks.size(); ++i)
        sum += std::abs(double(log.ticks[i].action.steering_rad) -
                        double(log.ticks[i - 1].action.steering_rad));
    return float(sum / double(log.ticks.size() - 1));
}

}  // namespace racer
