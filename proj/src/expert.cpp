#include <racer/expert.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <racer/scan.hpp>

namespace racer {

float three_point_curvature(float x0, float y0, float x1, float y1, float x2, float y2) {
    const float ax = x1 - x0, ay = y1 - y0;
    const float bx = x2 - x1, by = y2 - y1;
    const float cx = x2 - x0, cy = y2 - y0;
    const float cross = ax * by - ay * bx;
    const float la = std::sqrt(ax * ax + ay * ay);
    const float lb = std::sqrt(bx * bx + by * by);
    const float lc = std::sqrt(cx * cx + cy * cy);
    const float denom = la * lb * lc;
    if (denom < 1e-9f) return 0.0f;
    return 2.0f * std::abs(cross) / denom;
}

namespace {

float wrap_angle(float a) {
    const float pi = std::numbers::pi_v<float>;
    while (a > pi) a -= 2.0f * pi;
    while (a < -pi) a += 2.0f * pi;
    return a;
}

float waypoint_curvature(const Track& t, size_t i) {
    const size_t n = t.waypoint_count();
    const size_t p = (i + n - 1) % n;
    const size_t q = (i + 1) % n;
    return three_point_curvature(t.center_x[p], t.center_y[p], t.center_x[i], t.center_y[i],
                                 t.center_x[q], t.center_y[q]);
}

// Point a given arc distance ahead of waypoint `from`, interpolating between
// waypoints.
void point_ahead(const Track& t, size_t from, float dist, float* px, float* py) {
    const size_t n = t.waypoint_count();
    size_t i = from;
    float remain = dist;
    for (size_t guard = 0; guard < 2 * n; ++guard) {
        const size_t j = (i + 1) % n;
        const float dx = t.center_x[j] - t.center_x[i];
        const float dy = t.center_y[j] - t.center_y[i];
        const float seg = std::sqrt(dx * dx + dy * dy);
        if (remain <= seg || seg <= 0.0f) {
            const float u = seg > 0.0f ? remain / seg : 0.0f;
            *px = t.center_x[i] + u * dx;
            *py = t.center_y[i] + u * dy;
            return;
        }
        remain -= seg;
        i = j;
    }
    *px = t.center_x[i];
    *py = t.center_y[i];
}

}  // namespace

Policy expert_policy(const Track& track, ExpertConfig cfg) {
    if (track.waypoint_count() < 3)
        throw std::invalid_argument("expert: centerline needs at least 3 waypoints");
    const Track* t = &track;
    return [t, cfg](const std::vector<float>&, const VehicleState& s) -> ActionPair {
        const size_t near = nearest_waypoint(*t, s.x, s.y);

        // steering: pure pursuit toward a speed-scaled lookahead point
        const float ld = std::clamp(cfg.lookahead_base + cfg.lookahead_gain * s.speed,
                                    cfg.lookahead_min, cfg.lookahead_max);
        float tx = 0.0f, ty = 0.0f;
        point_ahead(*t, near, ld, &tx, &ty);
        const float dx = tx - s.x;
        const float dy = ty - s.y;
        const float dist = std::max(std::sqrt(dx * dx + dy * dy), 1e-3f);
        const float alpha = wrap_angle(std::atan2(dy, dx) - s.heading);
        const float steer = std::atan(2.0f * kWheelbase * std::sin(alpha) / dist);

        // speed: cap lateral acceleration over the upcoming preview window
        const float preview = std::max(cfg.preview_min, s.speed * cfg.preview_time);
        const size_t n = t->waypoint_count();
        float kappa_max = 0.0f;
        float walked = 0.0f;
        size_t i = near;
        while (walked <= preview) {
            kappa_max = std::max(kappa_max, waypoint_curvature(*t, i));
            const size_t j = (i + 1) % n;
            const float sx = t->center_x[j] - t->center_x[i];
            const float sy = t->center_y[j] - t->center_y[i];
            walked += std::sqrt(sx * sx + sy * sy);
            i = j;
            if (i == near) break;
        }
        float v_cmd = kSpeedMax;
        if (kappa_max > 1e-6f)
            v_cmd = std::min(kSpeedMax, std::sqrt(cfg.a_lat_max / kappa_max));

        return ActionPair{std::clamp(steer, -kSteerLimitRad, kSteerLimitRad), v_cmd};
    };
}

CollectResult collect(const Track& track, int n_laps, uint64_t seed) {
    if (n_laps < 1) throw std::invalid_argument("collect: need at least one lap");
    CollectResult res;
    const Policy expert = expert_policy(track);
    const size_t n_wp = track.waypoint_count();
    Pcg32 start_rng(mix_seed(seed, 0x5EED), 7);
    for (int lap = 0; lap < n_laps; ++lap) {
        // rotate starts so acceleration transients are spread around the track,
        // and perturb the pose so the dataset contains recovery behavior
        const size_t start_wp = (size_t(lap) * n_wp) / size_t(n_laps);
        VehicleState start = start_at_waypoint(track, start_wp);
        float lateral = float(start_rng.uniform(-0.6, 0.6));
        float dheading = float(start_rng.uniform(-0.45, 0.45));
        for (int attempt = 0; attempt < 8; ++attempt) {
            VehicleState cand = start;
            cand.x += -std::sin(start.heading) * lateral;
            cand.y += std::cos(start.heading) * lateral;
            cand.heading += dheading;
            if (!footprint_collides(track.grid, cand)) {
                start = cand;
                break;
            }
            lateral *= 0.5f;
            dheading *= 0.5f;
        }
        auto sink = [&res](const std::vector<float>& scan, const ActionPair& cmd,
                           const VehicleState&) {
            float steer_norm = 0.0f, speed_norm = 0.0f;
            map_labels(cmd.steering_rad, cmd.speed_mps, &steer_norm, &speed_norm);
            res.dataset.scans.push_back(scan);
            res.dataset.steering.push_back(steer_norm);
            res.dataset.speed.push_back(speed_norm);
        };
        EpisodeLog log = run_episode(track, expert, start, mix_seed(seed, uint64_t(lap)), 120.0f, sink);
        if (log.outcome != Outcome::LapComplete) {
            res.complete = false;
            return res;
        }
        ++res.laps_done;
    }
    res.complete = true;
    return res;
}

}  // namespace racer
