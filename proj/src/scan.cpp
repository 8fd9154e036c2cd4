#include <racer/scan.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace racer {

namespace {

bool valid_range(float v) { return std::isfinite(v) && v > 0.0f; }

}  // namespace

std::vector<float> preprocess_scan(const std::vector<float>& ranges_m) {
    const int n = int(ranges_m.size());
    if (n == 0) throw std::invalid_argument("preprocess_scan: empty scan");

    // 1. patch invalid beams by linear interpolation between valid neighbors
    std::vector<float> fixed(ranges_m);
    int first_valid = -1;
    for (int i = 0; i < n; ++i)
        if (valid_range(fixed[i])) {
            first_valid = i;
            break;
        }
    if (first_valid < 0) {
        throw std::invalid_argument("preprocess_scan: every beam is invalid");
    } else {
        for (int i = 0; i < first_valid; ++i) fixed[i] = fixed[first_valid];
        int prev = first_valid;
        for (int i = first_valid + 1; i < n; ++i) {
            if (!valid_range(fixed[i])) continue;
            for (int j = prev + 1; j < i; ++j) {
                float t = float(j - prev) / float(i - prev);
                fixed[j] = fixed[prev] + t * (fixed[i] - fixed[prev]);
            }
            prev = i;
        }
        for (int i = prev + 1; i < n; ++i) fixed[i] = fixed[prev];
    }

    // 2. median filter, window 5, truncated at the edges
    std::vector<float> out(static_cast<size_t>(n));
    float win[5];
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - 2);
        int hi = std::min(n - 1, i + 2);
        int w = 0;
        for (int j = lo; j <= hi; ++j) win[w++] = fixed[j];
        std::sort(win, win + w);
        out[size_t(i)] = win[w / 2];
    }

    // 3. clip and normalize
    for (auto& v : out) v = std::clamp(v, 0.0f, kScanMaxRange) / kScanMaxRange;
    return out;
}

std::vector<float> downsample_scan(const std::vector<float>& scan, int factor) {
    if (factor != 1 && factor != 2 && factor != 4)
        throw std::invalid_argument("downsample_scan: factor must be 1, 2 or 4");
    if (int(scan.size()) != kScanBeams)
        throw std::invalid_argument("downsample_scan: expected " + std::to_string(kScanBeams) +
                                    " beams, got " + std::to_string(scan.size()));
    std::vector<float> out;
    out.reserve(size_t((kScanBeams + factor - 1) / factor));
    for (int i = 0; i < kScanBeams; i += factor) out.push_back(scan[size_t(i)]);
    return out;
}

Command map_output(float o0, float o1) {
    Command c;
    if (!std::isfinite(o0) || !std::isfinite(o1)) {
        c.fault = true;  // safe stop
        return c;
    }
    c.steering_norm = std::clamp(o0, -1.0f, 1.0f);
    c.steering_rad = c.steering_norm * kSteerLimitRad;
    c.speed_mps = std::clamp(o1 * kSpeedScale, kSpeedMin, kSpeedMax);
    return c;
}

void map_labels(float steering_rad, float speed_mps, float* steering_norm, float* speed_norm) {
    const float slop = 1e-6f;
    if (!std::isfinite(steering_rad) || std::abs(steering_rad) > kSteerLimitRad + slop)
        throw std::invalid_argument("map_labels: steering " + std::to_string(steering_rad) +
                                    " rad out of range");
    if (!std::isfinite(speed_mps) || speed_mps < kSpeedMin - slop || speed_mps > kSpeedMax + slop)
        throw std::invalid_argument("map_labels: speed " + std::to_string(speed_mps) +
                                    " m/s out of range");
    *steering_norm = std::clamp(steering_rad / kSteerLimitRad, -1.0f, 1.0f);
    *speed_norm = std::clamp(speed_mps / kSpeedScale, kSpeedMin / kSpeedScale, 1.0f);
}

}  // namespace racer
