#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <racer/scan.hpp>

using namespace racer;

namespace {

std::vector<float> constant_scan(float v) { return std::vector<float>(size_t(kScanBeams), v); }

}  // namespace

TEST_CASE("constant scan normalizes to a constant") {
    std::vector<float> out = preprocess_scan(constant_scan(5.0f));
    REQUIRE(out.size() == size_t(kScanBeams));
    for (float v : out) CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("median filter removes a single-beam spike") {
    std::vector<float> scan = constant_scan(5.0f);
    scan[600] = 100.0f;
    std::vector<float> out = preprocess_scan(scan);
    for (int i = 595; i <= 605; ++i) CHECK(out[size_t(i)] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("invalid beams are linearly interpolated before filtering") {
    // monotone ramp so the median keeps the interpolated midpoint visible
    std::vector<float> scan = constant_scan(4.0f);
    for (int i = 501; i <= 505; ++i) scan[size_t(i)] = 4.0f + 0.5f * float(i - 501);
    scan[503] = std::numeric_limits<float>::quiet_NaN();
    for (int i = 506; i < kScanBeams; ++i) scan[size_t(i)] = 6.0f;
    std::vector<float> out = preprocess_scan(scan);
    CHECK(out[503] == doctest::Approx(0.5).epsilon(1e-6));

    // zero and negative ranges count as dropped beams too
    std::vector<float> scan2 = constant_scan(5.0f);
    scan2[100] = 0.0f;
    scan2[200] = -3.0f;
    std::vector<float> out2 = preprocess_scan(scan2);
    CHECK(out2[100] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out2[200] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("edge dropouts take the nearest valid value") {
    std::vector<float> scan = constant_scan(5.0f);
    scan[0] = std::numeric_limits<float>::infinity();
    scan[1] = 0.0f;
    scan[kScanBeams - 1] = std::numeric_limits<float>::quiet_NaN();
    std::vector<float> out = preprocess_scan(scan);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out[size_t(kScanBeams - 1)] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("preprocess clips to the sensor range and stays in [0,1]") {
    std::vector<float> scan = constant_scan(25.0f);
    for (size_t i = 0; i < scan.size(); i += 3) scan[i] = 11.0f + float(i % 7);
    std::vector<float> out = preprocess_scan(scan);
    for (float v : out) CHECK(v == 1.0f);

    std::vector<float> ramp(static_cast<size_t>(kScanBeams));
    for (int i = 0; i < kScanBeams; ++i) ramp[size_t(i)] = 12.0f * float(i) / float(kScanBeams - 1);
    for (float v : preprocess_scan(ramp)) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("preprocess is idempotent on clean scans up to rescale") {
    // a median-root profile (every 4 consecutive samples monotone, constant ends):
    // preprocess(10 * preprocess(s)) == preprocess(s)
    std::vector<float> scan(static_cast<size_t>(kScanBeams), 2.0f);
    for (int i = 3; i <= 400; ++i) scan[size_t(i)] = 2.0f + 6.0f * float(i - 3) / 397.0f;
    for (int i = 401; i <= 600; ++i) scan[size_t(i)] = 8.0f;
    for (int i = 601; i <= 1000; ++i) scan[size_t(i)] = 8.0f - 5.0f * float(i - 600) / 400.0f;
    for (int i = 1001; i < kScanBeams; ++i) scan[size_t(i)] = 3.0f;
    std::vector<float> once = preprocess_scan(scan);
    std::vector<float> rescaled(once);
    for (auto& v : rescaled) v *= kScanMaxRange;
    std::vector<float> twice = preprocess_scan(rescaled);
    for (size_t i = 0; i < once.size(); ++i)
        CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-5));
}

TEST_CASE("an all-invalid scan is rejected") {
    CHECK_THROWS(preprocess_scan(constant_scan(std::numeric_limits<float>::quiet_NaN())));
    CHECK_THROWS(preprocess_scan(constant_scan(0.0f)));
    CHECK_THROWS(preprocess_scan(std::vector<float>{}));
}

TEST_CASE("downsample keeps every factor-th beam") {
    std::vector<float> scan(static_cast<size_t>(kScanBeams));
    for (int i = 0; i < kScanBeams; ++i) scan[size_t(i)] = float(i);

    std::vector<float> f1 = downsample_scan(scan, 1);
    CHECK(f1.size() == 1081);
    CHECK(f1 == scan);

    std::vector<float> f2 = downsample_scan(scan, 2);
    REQUIRE(f2.size() == 541);
    for (size_t i = 0; i < f2.size(); ++i) CHECK(f2[i] == scan[2 * i]);

    std::vector<float> f4 = downsample_scan(scan, 4);
    REQUIRE(f4.size() == 271);
    for (size_t i = 0; i < f4.size(); ++i) CHECK(f4[i] == scan[4 * i]);
}

TEST_CASE("downsample rejects bad factors and lengths") {
    std::vector<float> scan(size_t(kScanBeams), 1.0f);
    CHECK_THROWS(downsample_scan(scan, 3));
    CHECK_THROWS(downsample_scan(scan, 0));
    CHECK_THROWS(downsample_scan(std::vector<float>(100, 1.0f), 2));
}

TEST_CASE("output mapping follows the linear speed map") {
    Command c = map_output(0.0f, 0.5f);
    CHECK(!c.fault);
    CHECK(c.steering_rad == 0.0f);
    CHECK(c.speed_mps == doctest::Approx(2.5));
}

TEST_CASE("output mapping clamps to actuator limits") {
    Command hi = map_output(2.0f, 1.4f);
    CHECK(hi.steering_norm == 1.0f);
    CHECK(hi.steering_rad == doctest::Approx(0.4189));
    CHECK(hi.speed_mps == 5.0f);

    Command lo = map_output(-3.0f, -0.4f);
    CHECK(lo.steering_norm == -1.0f);
    CHECK(lo.speed_mps == -0.5f);
}

TEST_CASE("non-finite network output becomes a flagged safe stop") {
    for (Command c : {map_output(std::nanf(""), 0.5f), map_output(0.1f, INFINITY),
                      map_output(-INFINITY, std::nanf(""))}) {
        CHECK(c.fault);
        CHECK(c.steering_rad == 0.0f);
        CHECK(c.speed_mps == 0.0f);
    }
}

TEST_CASE("output mapping is monotone inside the clamps") {
    float prev_steer = -10.0f;
    float prev_speed = -10.0f;
    for (float u = -0.95f; u <= 0.95f; u += 0.05f) {
        Command c = map_output(u, 0.1f + 0.15f * (u + 1.0f));
        CHECK(c.steering_rad > prev_steer);
        CHECK(c.speed_mps > prev_speed);
        prev_steer = c.steering_rad;
        prev_speed = c.speed_mps;
    }
}

TEST_CASE("label mapping inverts the output mapping") {
    float sn = 0.0f, vn = 0.0f;
    map_labels(0.0f, 2.5f, &sn, &vn);
    CHECK(sn == 0.0f);
    CHECK(vn == doctest::Approx(0.5));

    map_labels(0.4189f, 5.0f, &sn, &vn);
    CHECK(sn == doctest::Approx(1.0));
    CHECK(vn == doctest::Approx(1.0));

    for (float s = -0.9f; s <= 0.9f; s += 0.3f) {
        for (float v = 0.05f; v <= 0.95f; v += 0.3f) {
            Command c = map_output(s, v);
            map_labels(c.steering_rad, c.speed_mps, &sn, &vn);
            CHECK(sn == doctest::Approx(s).epsilon(1e-5));
            CHECK(vn == doctest::Approx(v).epsilon(1e-5));
        }
    }
}

TEST_CASE("out-of-range labels are rejected") {
    float sn, vn;
    CHECK_THROWS(map_labels(0.6f, 2.0f, &sn, &vn));
    CHECK_THROWS(map_labels(0.0f, 5.6f, &sn, &vn));
    CHECK_THROWS(map_labels(0.0f, -1.0f, &sn, &vn));
    CHECK_THROWS(map_labels(std::nanf(""), 2.0f, &sn, &vn));
}
