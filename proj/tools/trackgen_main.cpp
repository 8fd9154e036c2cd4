// Generates the bundled track directories (map.pgm, map.yaml, centerline.csv).
// The shipped tracks under tracks/ are this tool's output; rerun it after
// changing a shape.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr double kPi = std::numbers::pi;

struct PathBuilder {
    double x = 0.0, y = 0.0, heading = 0.0;
    double ds = 0.05;  // dense sample spacing
    std::vector<double> xs, ys;

    PathBuilder() { push(); }

    void push() {
        xs.push_back(x);
        ys.push_back(y);
    }

    void straight(double len) {
        const int n = std::max(1, int(std::llround(len / ds)));
        const double step = len / n;
        for (int i = 0; i < n; ++i) {
            x += step * std::cos(heading);
            y += step * std::sin(heading);
            push();
        }
    }

    // angle > 0 turns left, < 0 right; exact circular arc
    void arc(double radius, double angle) {
        if (radius <= 0.0) throw std::invalid_argument("arc radius must be positive");
        const double side = angle >= 0.0 ? 1.0 : -1.0;
        const double cx = x - side * radius * std::sin(heading);
        const double cy = y + side * radius * std::cos(heading);
        const double arc_len = std::abs(angle) * radius;
        const int n = std::max(1, int(std::llround(arc_len / ds)));
        const double dphi = angle / n;
        const double phi0 = std::atan2(y - cy, x - cx);
        for (int i = 1; i <= n; ++i) {
            const double phi = phi0 + dphi * i;
            x = cx + radius * std::cos(phi);
            y = cy + radius * std::sin(phi);
            heading += dphi;
            push();
        }
    }

    void assert_closed() const {
        const double dx = xs.back() - xs.front();
        const double dy = ys.back() - ys.front();
        const double gap = std::sqrt(dx * dx + dy * dy);
        if (gap > 0.02)
            throw std::runtime_error("path does not close: gap " + std::to_string(gap) + " m");
        double h = std::fmod(heading, 2.0 * kPi);
        if (h < -kPi) h += 2.0 * kPi;
        if (h > kPi) h -= 2.0 * kPi;
        if (std::abs(h) > 1e-6)
            throw std::runtime_error("path does not close: heading residue " + std::to_string(h));
    }
};

struct TrackShape {
    std::string name;
    std::vector<double> xs, ys;  // dense centerline
    double half_width = 1.5;
    double resolution = 0.05;
};

void write_bundle(const TrackShape& shape, const std::string& out_root) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(out_root) / shape.name;
    fs::create_directories(dir);

    // extents with margin so the wall is solid around the corridor
    const double margin = shape.half_width + 0.5;
    double min_x = shape.xs[0], max_x = shape.xs[0], min_y = shape.ys[0], max_y = shape.ys[0];
    for (size_t i = 0; i < shape.xs.size(); ++i) {
        min_x = std::min(min_x, shape.xs[i]);
        max_x = std::max(max_x, shape.xs[i]);
        min_y = std::min(min_y, shape.ys[i]);
        max_y = std::max(max_y, shape.ys[i]);
    }
    const double origin_x = min_x - margin;
    const double origin_y = min_y - margin;
    const int width = int(std::ceil((max_x + margin - origin_x) / shape.resolution));
    const int height = int(std::ceil((max_y + margin - origin_y) / shape.resolution));

    // grid row 0 = smallest y; occupied everywhere except a disk around every
    // dense centerline sample
    std::vector<uint8_t> free(size_t(width) * height, 0);
    const int rad_cells = int(std::ceil(shape.half_width / shape.resolution));
    for (size_t i = 0; i < shape.xs.size(); ++i) {
        const int cx = int(std::floor((shape.xs[i] - origin_x) / shape.resolution));
        const int cy = int(std::floor((shape.ys[i] - origin_y) / shape.resolution));
        for (int dy = -rad_cells; dy <= rad_cells; ++dy) {
            for (int dx = -rad_cells; dx <= rad_cells; ++dx) {
                const int px = cx + dx;
                const int py = cy + dy;
                if (px < 0 || px >= width || py < 0 || py >= height) continue;
                // cell center distance to the sample point
                const double wx = origin_x + (px + 0.5) * shape.resolution;
                const double wy = origin_y + (py + 0.5) * shape.resolution;
                const double d2 = (wx - shape.xs[i]) * (wx - shape.xs[i]) +
                                  (wy - shape.ys[i]) * (wy - shape.ys[i]);
                if (d2 <= shape.half_width * shape.half_width)
                    free[size_t(py) * width + px] = 1;
            }
        }
    }

    {
        std::ofstream f(dir / "map.pgm", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / "map.pgm").string());
        f << "P5\n" << width << " " << height << "\n255\n";
        // PGM row 0 is the top of the map (largest y)
        std::vector<uint8_t> row(static_cast<size_t>(width));
        for (int iy = height - 1; iy >= 0; --iy) {
            for (int ix = 0; ix < width; ++ix)
                row[size_t(ix)] = free[size_t(iy) * width + ix] ? 255 : 0;
            f.write(reinterpret_cast<const char*>(row.data()), width);
        }
    }
    {
        std::ofstream f(dir / "map.yaml");
        if (!f) throw std::runtime_error("cannot write " + (dir / "map.yaml").string());
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "image: map.pgm\nresolution: %.3f\norigin: [%.6f, %.6f, 0.0]\n"
                      "occupied_thresh: 0.65\n",
                      shape.resolution, origin_x, origin_y);
        f << buf;
    }
    {
        // resample the dense path at ~0.25 m spacing, dropping the closing point
        std::ofstream f(dir / "centerline.csv");
        if (!f) throw std::runtime_error("cannot write " + (dir / "centerline.csv").string());
        f << "x_m,y_m\n";
        const double spacing = 0.25;
        double acc = spacing;  // emit the first point immediately
        size_t count = 0;
        double total = 0.0;
        for (size_t i = 0; i + 1 < shape.xs.size(); ++i) {
            const double dx = shape.xs[i + 1] - shape.xs[i];
            const double dy = shape.ys[i + 1] - shape.ys[i];
            const double seg = std::sqrt(dx * dx + dy * dy);
            if (acc >= spacing) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", shape.xs[i], shape.ys[i]);
                f << buf;
                ++count;
                acc = 0.0;
            }
            acc += seg;
            total += seg;
        }
        std::printf("%s: %d x %d cells, centerline %zu waypoints, length %.2f m\n",
                    shape.name.c_str(), width, height, count, total);
    }
}

TrackShape make_oval() {
    // stadium: two 12 m straights joined by 2.5 m radius half-circles, run
    // counterclockwise
    PathBuilder p;
    p.straight(12.0);
    p.arc(2.5, kPi);
    p.straight(12.0);
    p.arc(2.5, kPi);
    p.assert_closed();
    TrackShape s;
    s.name = "oval";
    s.xs = p.xs;
    s.ys = p.ys;
    return s;
}

TrackShape make_uturn() {
    // two right-hand hairpins joined by short straights, run clockwise; the
    // corridor is wider than the oval's and the turn direction is opposite,
    // so it is a genuine layout shift for a policy trained on the oval
    PathBuilder p;
    p.straight(5.0);
    p.arc(2.8, -kPi);
    p.straight(5.0);
    p.arc(2.8, -kPi);
    p.assert_closed();
    TrackShape s;
    s.name = "uturn";
    s.xs = p.xs;
    s.ys = p.ys;
    s.half_width = 1.7;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate the bundled track map/centerline files"};
    std::string out_root = "tracks";
    app.add_option("--out", out_root, "output root directory")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    try {
        write_bundle(make_oval(), out_root);
        write_bundle(make_uturn(), out_root);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
