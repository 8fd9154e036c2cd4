#include <racer/sim.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <racer/scan.hpp>

namespace racer {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::LapComplete: return "lap_complete";
        case Outcome::Collision: return "collision";
        case Outcome::Timeout: return "timeout";
    }
    return "unknown";
}

float raycast(const OccupancyGrid& g, float x, float y, float angle, float max_range) {
    const float dirx = std::cos(angle);
    const float diry = std::sin(angle);
    const float gx = (x - g.origin_x) / g.resolution;
    const float gy = (y - g.origin_y) / g.resolution;
    int cx = int(std::floor(gx));
    int cy = int(std::floor(gy));
    if (g.is_occupied(cx, cy)) return 0.0f;

    const float inf = std::numeric_limits<float>::infinity();
    const int step_x = dirx > 0.0f ? 1 : -1;
    const int step_y = diry > 0.0f ? 1 : -1;
    // distance along the ray (meters) to the next x/y cell boundary, and per cell
    const float adx = std::abs(dirx);
    const float ady = std::abs(diry);
    float t_max_x = adx > 0.0f
                        ? (dirx > 0.0f ? (float(cx) + 1.0f - gx) : (gx - float(cx))) * g.resolution / adx
                        : inf;
    float t_max_y = ady > 0.0f
                        ? (diry > 0.0f ? (float(cy) + 1.0f - gy) : (gy - float(cy))) * g.resolution / ady
                        : inf;
    const float t_delta_x = adx > 0.0f ? g.resolution / adx : inf;
    const float t_delta_y = ady > 0.0f ? g.resolution / ady : inf;

    float t = 0.0f;
    while (true) {
        if (t_max_x < t_max_y) {
            cx += step_x;
            t = t_max_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t = t_max_y;
            t_max_y += t_delta_y;
        }
        if (t > max_range) return max_range;
        if (g.is_occupied(cx, cy)) return t;
    }
}

std::vector<float> scan_lidar(const OccupancyGrid& g, const VehicleState& s) {
    std::vector<float> out(static_cast<size_t>(kScanBeams));
    const float fov = kScanFovDeg * std::numbers::pi_v<float> / 180.0f;
    const float step = fov / float(kScanBeams - 1);
    const float start = s.heading - fov * 0.5f;
    for (int i = 0; i < kScanBeams; ++i)
        out[size_t(i)] = raycast(g, s.x, s.y, start + step * float(i), kScanMaxRange);
    return out;
}

void add_scan_noise(std::vector<float>& scan, float sigma, Pcg32& rng) {
    if (sigma < 0.0f) throw std::invalid_argument("scan noise sigma must be >= 0");
    if (sigma == 0.0f) return;
    for (auto& v : scan)
        v = std::clamp(v + sigma * float(rng.normal()), 0.0f, kScanMaxRange);
}

namespace {

struct Deriv {
    float dx, dy, dh, dv, dd;
};

Deriv dynamics(const VehicleState& s, const ActionPair& c) {
    Deriv d;
    d.dx = s.speed * std::cos(s.heading);
    d.dy = s.speed * std::sin(s.heading);
    d.dh = s.speed / kWheelbase * std::tan(s.steering);
    d.dv = (c.speed_mps - s.speed) / kSpeedLagTau;
    d.dd = (c.steering_rad - s.steering) / kSteerLagTau;
    return d;
}

VehicleState advance(const VehicleState& s, const Deriv& d, float h) {
    VehicleState r = s;
    r.x += d.dx * h;
    r.y += d.dy * h;
    r.heading += d.dh * h;
    r.speed += d.dv * h;
    r.steering += d.dd * h;
    return r;
}

ActionPair clamp_action(const ActionPair& a) {
    ActionPair c;
    c.steering_rad = std::clamp(a.steering_rad, -kSteerLimitRad, kSteerLimitRad);
    c.speed_mps = std::clamp(a.speed_mps, kSpeedMin, kSpeedMax);
    return c;
}

// Monotone arc-length tracker along the centerline loop.
struct ArcWalker {
    const Track* track;
    size_t wp;
    double unwrapped = 0.0;
    double max_unwrapped = 0.0;

    ArcWalker(const Track& t, float x, float y) : track(&t) { wp = nearest_waypoint(t, x, y); }

    void update(float x, float y) {
        const Track& t = *track;
        size_t cur = nearest_waypoint_windowed(t, x, y, wp, 40);
        double d = double(t.arc[cur]) - double(t.arc[wp]);
        const double total = t.total_length;
        if (d > total * 0.5) d -= total;
        if (d < -total * 0.5) d += total;
        unwrapped += d;
        max_unwrapped = std::max(max_unwrapped, unwrapped);
        wp = cur;
    }

    float progress_pct() const {
        return float(std::clamp(max_unwrapped / double(track->total_length) * 100.0, 0.0, 100.0));
    }
};

}  // namespace

VehicleState step_vehicle(const VehicleState& s, const ActionPair& cmd, float dt) {
    const ActionPair c = clamp_action(cmd);
    const Deriv k1 = dynamics(s, c);
    const Deriv k2 = dynamics(advance(s, k1, dt * 0.5f), c);
    const Deriv k3 = dynamics(advance(s, k2, dt * 0.5f), c);
    const Deriv k4 = dynamics(advance(s, k3, dt), c);
    VehicleState r = s;
    const float w = dt / 6.0f;
    r.x += w * (k1.dx + 2.0f * k2.dx + 2.0f * k3.dx + k4.dx);
    r.y += w * (k1.dy + 2.0f * k2.dy + 2.0f * k3.dy + k4.dy);
    r.heading += w * (k1.dh + 2.0f * k2.dh + 2.0f * k3.dh + k4.dh);
    r.speed += w * (k1.dv + 2.0f * k2.dv + 2.0f * k3.dv + k4.dv);
    r.steering += w * (k1.dd + 2.0f * k2.dd + 2.0f * k3.dd + k4.dd);
    r.speed = std::clamp(r.speed, kSpeedMin, kSpeedMax);
    r.steering = std::clamp(r.steering, -kSteerLimitRad, kSteerLimitRad);
    return r;
}

bool footprint_collides(const OccupancyGrid& g, const VehicleState& s) {
    const float ch = std::cos(s.heading);
    const float sh = std::sin(s.heading);
    const float hl = kFootprintLength * 0.5f;
    const float hw = kFootprintWidth * 0.5f;
    // sample the rectangle densely enough that no cell between points is missed
    const float ds = g.resolution * 0.5f;
    const int nl = std::max(2, int(std::ceil(kFootprintLength / ds)) + 1);
    const int nw = std::max(2, int(std::ceil(kFootprintWidth / ds)) + 1);
    for (int i = 0; i < nl; ++i) {
        const float a = -hl + kFootprintLength * float(i) / float(nl - 1);
        for (int j = 0; j < nw; ++j) {
            const float b = -hw + kFootprintWidth * float(j) / float(nw - 1);
            const float px = s.x + a * ch - b * sh;
            const float py = s.y + a * sh + b * ch;
            if (g.world_occupied(px, py)) return true;
        }
    }
    return false;
}

uint32_t scan_crc32(const std::vector<float>& scan) {
    // FNV-1a over the raw float bytes
    uint32_t h = 2166136261u;
    for (float v : scan) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        for (int i = 0; i < 4; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 16777619u;
        }
    }
    return h;
}

VehicleState start_at_waypoint(const Track& track, size_t waypoint) {
    const size_t n = track.waypoint_count();
    if (n < 2) throw std::invalid_argument("track has too few waypoints");
    const size_t i = waypoint % n;
    const size_t j = (i + 1) % n;
    VehicleState s;
    s.x = track.center_x[i];
    s.y = track.center_y[i];
    s.heading = std::atan2(track.center_y[j] - track.center_y[i],
                           track.center_x[j] - track.center_x[i]);
    return s;
}

EpisodeLog run_episode(const Track& track, const Policy& policy, const VehicleState& start,
                       uint64_t seed, float timeout_s, const TickSink& sink) {
    if (footprint_collides(track.grid, start))
        throw std::invalid_argument("run_episode: start pose collides with the map");
    EpisodeLog log;
    Pcg32 rng(mix_seed(seed, 0xE91), 1);
    const float sigma = float(rng.uniform(0.0, 0.5));
    VehicleState s = start;
    ArcWalker walker(track, s.x, s.y);
    const int max_ticks = std::max(1, int(std::lround(double(timeout_s) * kControlHz)));
    log.ticks.reserve(size_t(max_ticks));
    for (int tick = 0; tick < max_ticks; ++tick) {
        std::vector<float> ranges = scan_lidar(track.grid, s);
        add_scan_noise(ranges, sigma, rng);
        std::vector<float> scan = preprocess_scan(ranges);
        const ActionPair cmd = clamp_action(policy(scan, s));

        TickRecord rec;
        rec.t = double(tick) * 0.025;
        rec.state = s;
        rec.action = cmd;
        rec.scan_crc = scan_crc32(scan);
        log.ticks.push_back(rec);
        if (sink) sink(scan, cmd, s);

        s = step_vehicle(s, cmd);
        walker.update(s.x, s.y);
        if (footprint_collides(track.grid, s)) {
            log.outcome = Outcome::Collision;
            break;
        }
        if (walker.unwrapped >= double(track.total_length)) {
            log.outcome = Outcome::LapComplete;
            log.lap_time_s = float(double(tick + 1) * double(kControlDt));
            break;
        }
    }
    log.progress_pct = walker.progress_pct();
    return log;
}

float trajectory_progress(const Track& track, const std::vector<float>& xs,
                          const std::vector<float>& ys) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("trajectory_progress: bad trajectory");
    ArcWalker walker(track, xs[0], ys[0]);
    for (size_t i = 1; i < xs.size(); ++i) walker.update(xs[i], ys[i]);
    return walker.progress_pct();
}

}  // namespace racer
