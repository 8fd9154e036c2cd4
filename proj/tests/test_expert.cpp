#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <racer/expert.hpp>
#include <racer/scan.hpp>
#include <racer/sim.hpp>
#include <racer/track.hpp>

using namespace racer;

namespace {

const std::string kTracksDir = std::string(RACER_SOURCE_DIR) + "/tracks";

Track synthetic_track(std::vector<float> xs, std::vector<float> ys) {
    Track t;
    t.name = "synthetic";
    t.center_x = std::move(xs);
    t.center_y = std::move(ys);
    const size_t n = t.center_x.size();
    t.arc.resize(n, 0.0f);
    float total = 0.0f;
    for (size_t i = 1; i < n; ++i) {
        float dx = t.center_x[i] - t.center_x[i - 1];
        float dy = t.center_y[i] - t.center_y[i - 1];
        total += std::sqrt(dx * dx + dy * dy);
        t.arc[i] = total;
    }
    float cx = t.center_x[0] - t.center_x[n - 1];
    float cy = t.center_y[0] - t.center_y[n - 1];
    t.total_length = total + std::sqrt(cx * cx + cy * cy);
    return t;  // empty grid: everywhere free, the expert never raycasts
}

Track straight_track() {
    std::vector<float> xs, ys;
    for (int i = 0; i <= 200; ++i) {
        xs.push_back(0.25f * float(i));
        ys.push_back(0.0f);
    }
    return synthetic_track(xs, ys);
}

Track circle_track(float radius) {
    std::vector<float> xs, ys;
    for (int i = 0; i < 64; ++i) {
        float a = 2.0f * std::numbers::pi_v<float> * float(i) / 64.0f;
        xs.push_back(radius * std::cos(a));
        ys.push_back(radius * std::sin(a));
    }
    return synthetic_track(xs, ys);
}

const std::vector<float> kDummyScan(size_t(kScanBeams), 0.5f);

}  // namespace

TEST_CASE("three point curvature") {
    CHECK(three_point_curvature(0, 0, 1, 0, 2, 0) == 0.0f);
    // points on a unit circle circumscribe it exactly
    float k = three_point_curvature(1.0f, 0.0f, 0.0f, 1.0f, -1.0f, 0.0f);
    CHECK(k == doctest::Approx(1.0).epsilon(1e-5));
    float k2 = three_point_curvature(2.0f, 0.0f, 0.0f, 2.0f, -2.0f, 0.0f);
    CHECK(k2 == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("expert on a straight line holds course at full speed") {
    Track t = straight_track();
    Policy expert = expert_policy(t);
    VehicleState s;
    s.x = 10.0f;
    s.y = 0.0f;
    s.heading = 0.0f;
    s.speed = 5.0f;
    ActionPair a = expert(kDummyScan, s);
    CHECK(std::abs(a.steering_rad) < 1e-4f);
    CHECK(a.speed_mps == kSpeedMax);
}

TEST_CASE("expert steers back toward the line when offset") {
    Track t = straight_track();
    Policy expert = expert_policy(t);
    VehicleState s;
    s.x = 10.0f;
    s.heading = 0.0f;
    s.speed = 2.0f;

    s.y = 0.5f;  // left of the line: steer right (negative)
    CHECK(expert(kDummyScan, s).steering_rad < -1e-3f);
    s.y = -0.5f;
    CHECK(expert(kDummyScan, s).steering_rad > 1e-3f);
}

TEST_CASE("curvature cap sets speed to sqrt(a_lat/kappa)") {
    Track unit = circle_track(1.0f);
    Policy e1 = expert_policy(unit);
    VehicleState s;
    s.x = 1.0f;
    s.y = 0.0f;
    s.heading = std::numbers::pi_v<float> / 2.0f;  // tangent, counterclockwise
    s.speed = 2.0f;
    CHECK(e1(kDummyScan, s).speed_mps == doctest::Approx(2.0).epsilon(0.02));

    Track wide = circle_track(4.0f);
    Policy e4 = expert_policy(wide);
    VehicleState s4;
    s4.x = 4.0f;
    s4.y = 0.0f;
    s4.heading = std::numbers::pi_v<float> / 2.0f;
    s4.speed = 4.0f;
    CHECK(e4(kDummyScan, s4).speed_mps == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("degenerate centerlines are rejected") {
    Track t = synthetic_track({0.0f, 1.0f}, {0.0f, 0.0f});
    CHECK_THROWS_AS(expert_policy(t), std::invalid_argument);
}

TEST_CASE("expert completes a lap from every centerline start on both tracks") {
    for (const char* name : {"oval", "uturn"}) {
        CAPTURE(name);
        Track track = load_track(kTracksDir + "/" + name);
        Policy expert = expert_policy(track);
        const size_t n = track.waypoint_count();
        REQUIRE(n > 10);
        for (size_t wp = 0; wp < n; ++wp) {
            CAPTURE(wp);
            VehicleState start = start_at_waypoint(track, wp);
            EpisodeLog log = run_episode(track, expert, start, 1000 + wp, 60.0f);
            CHECK(log.outcome == Outcome::LapComplete);
            CHECK(log.progress_pct == 100.0f);
            CHECK(log.lap_time_s > 5.0f);
            CHECK(log.lap_time_s < 60.0f);
        }
    }
}

TEST_CASE("one oval lap yields one sample per 40 Hz tick of the lap") {
    Track track = load_track(kTracksDir + "/oval");
    Policy expert = expert_policy(track);
    EpisodeLog ref = run_episode(track, expert, start_at_waypoint(track, 0), 9, 60.0f);
    REQUIRE(ref.outcome == Outcome::LapComplete);
    const double expected = double(ref.lap_time_s) / 0.025;

    CollectResult res = collect(track, 1, 3);
    CHECK(res.complete);
    CHECK(res.laps_done == 1);
    // collection perturbs the start and adds scan noise, so allow some slack
    CHECK(double(res.dataset.size()) > 0.7 * expected);
    CHECK(double(res.dataset.size()) < 1.4 * expected);
}

TEST_CASE("collection is bitwise deterministic in the seed") {
    Track track = load_track(kTracksDir + "/oval");
    CollectResult a = collect(track, 2, 11);
    CollectResult b = collect(track, 2, 11);
    REQUIRE(a.complete);
    REQUIRE(b.complete);
    REQUIRE(a.dataset.size() == b.dataset.size());
    CHECK(a.dataset.scans == b.dataset.scans);
    CHECK(a.dataset.steering == b.dataset.steering);
    CHECK(a.dataset.speed == b.dataset.speed);

    CollectResult c = collect(track, 2, 12);
    CHECK(a.dataset.scans != c.dataset.scans);
}

TEST_CASE("collected labels and scans are in range") {
    Track track = load_track(kTracksDir + "/uturn");
    CollectResult res = collect(track, 1, 7);
    REQUIRE(res.complete);
    REQUIRE(res.dataset.size() > 100);
    for (size_t i = 0; i < res.dataset.size(); ++i) {
        REQUIRE(res.dataset.scans[i].size() == size_t(kScanBeams));
        for (float v : res.dataset.scans[i]) {
            REQUIRE(v >= 0.0f);
            REQUIRE(v <= 1.0f);
        }
        CHECK(std::abs(res.dataset.steering[i]) <= 1.0f);
        CHECK(res.dataset.speed[i] >= kSpeedMin / kSpeedScale);
        CHECK(res.dataset.speed[i] <= 1.0f);
    }
}

TEST_CASE("recorded samples equal a live pipeline recomputation") {
    Track track = load_track(kTracksDir + "/oval");
    Policy expert = expert_policy(track);

    std::vector<std::vector<float>> scans;
    std::vector<ActionPair> cmds;
    std::vector<VehicleState> states;
    TickSink sink = [&](const std::vector<float>& scan, const ActionPair& cmd,
                        const VehicleState& s) {
        scans.push_back(scan);
        cmds.push_back(cmd);
        states.push_back(s);
    };
    VehicleState start = start_at_waypoint(track, 5);
    EpisodeLog log = run_episode(track, expert, start, 31, 60.0f, sink);
    REQUIRE(log.outcome == Outcome::LapComplete);
    REQUIRE(scans.size() == log.ticks.size());

    Policy fresh = expert_policy(track);  // stateless: recomputation must agree
    for (size_t k = 0; k < scans.size(); k += 97) {
        CHECK(scan_crc32(scans[k]) == log.ticks[k].scan_crc);
        ActionPair again = fresh(scans[k], states[k]);
        CHECK(std::clamp(again.steering_rad, -kSteerLimitRad, kSteerLimitRad) ==
              cmds[k].steering_rad);
        CHECK(std::clamp(again.speed_mps, kSpeedMin, kSpeedMax) == cmds[k].speed_mps);

        // and the stored normalized labels map back to the same command
        float sn = 0.0f, vn = 0.0f;
        map_labels(cmds[k].steering_rad, cmds[k].speed_mps, &sn, &vn);
        Command back = map_output(sn, vn);
        CHECK(back.steering_rad == doctest::Approx(cmds[k].steering_rad).epsilon(1e-5));
        CHECK(back.speed_mps == doctest::Approx(cmds[k].speed_mps).epsilon(1e-5));
    }
}

TEST_CASE("collect rejects bad lap counts") {
    Track track = load_track(kTracksDir + "/oval");
    CHECK_THROWS(collect(track, 0, 1));
}
