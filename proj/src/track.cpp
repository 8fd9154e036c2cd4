#include <racer/track.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace racer {

bool OccupancyGrid::world_occupied(float x, float y) const {
    int cx = int(std::floor((x - origin_x) / resolution));
    int cy = int(std::floor((y - origin_y) / resolution));
    return is_occupied(cx, cy);
}

namespace {

// PGM token reader: whitespace-separated, '#' starts a comment.
int pgm_token(std::istream& f, const std::string& path) {
    while (f) {
        int c = f.peek();
        if (c == '#') {
            std::string junk;
            std::getline(f, junk);
        } else if (std::isspace(c)) {
            f.get();
        } else {
            break;
        }
    }
    int v = -1;
    if (!(f >> v) || v < 0) throw std::runtime_error(path + ": malformed PGM header");
    return v;
}

struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // row 0 = top
};

PgmImage load_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char m0 = 0, m1 = 0;
    f.get(m0);
    f.get(m1);
    if (m0 != 'P' || m1 != '5') throw std::runtime_error(path + ": not a binary PGM (P5)");
    PgmImage img;
    img.width = pgm_token(f, path);
    img.height = pgm_token(f, path);
    int maxval = pgm_token(f, path);
    if (img.width < 1 || img.height < 1 || maxval < 1 || maxval > 255)
        throw std::runtime_error(path + ": unsupported PGM dimensions/maxval");
    f.get();  // single whitespace byte before the raster
    img.pixels.resize(size_t(img.width) * img.height);
    f.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
    if (size_t(f.gcount()) != img.pixels.size())
        throw std::runtime_error(path + ": truncated PGM raster");
    return img;
}

struct MapMeta {
    float resolution = 0.0f;
    float origin_x = 0.0f;
    float origin_y = 0.0f;
    float occupied_thresh = 0.65f;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

MapMeta load_yaml(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    MapMeta meta;
    bool have_res = false;
    std::string line;
    while (std::getline(f, line)) {
        size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = trim(line.substr(0, colon));
        std::string val = trim(line.substr(colon + 1));
        if (key == "resolution") {
            meta.resolution = std::strtof(val.c_str(), nullptr);
            have_res = true;
        } else if (key == "occupied_thresh") {
            meta.occupied_thresh = std::strtof(val.c_str(), nullptr);
        } else if (key == "origin") {
            // origin: [x, y, yaw]
            std::string nums = val;
            for (char& c : nums)
                if (c == '[' || c == ']' || c == ',') c = ' ';
            std::istringstream ss(nums);
            if (!(ss >> meta.origin_x >> meta.origin_y))
                throw std::runtime_error(path + ": malformed origin");
        }
    }
    if (!have_res || !(meta.resolution > 0.0f))
        throw std::runtime_error(path + ": missing or invalid resolution");
    return meta;
}

void load_centerline(const std::string& path, std::vector<float>& xs, std::vector<float>& ys) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty centerline");
    size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected x_m,y_m");
        xs.push_back(std::strtof(line.substr(0, comma).c_str(), nullptr));
        ys.push_back(std::strtof(line.substr(comma + 1).c_str(), nullptr));
    }
    if (xs.size() < 3) throw std::runtime_error(path + ": centerline needs at least 3 waypoints");
}

}  // namespace

Track load_track(const std::string& dir) {
    Track t;
    // take the last path component as the name
    size_t slash = dir.find_last_of('/');
    t.name = slash == std::string::npos ? dir : dir.substr(slash + 1);
    if (t.name.empty()) t.name = dir;

    PgmImage img = load_pgm(dir + "/map.pgm");
    MapMeta meta = load_yaml(dir + "/map.yaml");

    OccupancyGrid& g = t.grid;
    g.width = img.width;
    g.height = img.height;
    g.resolution = meta.resolution;
    g.origin_x = meta.origin_x;
    g.origin_y = meta.origin_y;
    g.occupied.resize(img.pixels.size());
    // image row 0 is the top of the map; grid row 0 has the smallest y
    for (int iy = 0; iy < img.height; ++iy) {
        int gy = img.height - 1 - iy;
        for (int ix = 0; ix < img.width; ++ix) {
            uint8_t v = img.pixels[size_t(iy) * img.width + ix];
            float occ = float(255 - v) / 255.0f;
            g.occupied[size_t(gy) * img.width + ix] = occ >= meta.occupied_thresh ? 1 : 0;
        }
    }

    load_centerline(dir + "/centerline.csv", t.center_x, t.center_y);
    const size_t n = t.center_x.size();
    t.arc.resize(n);
    t.arc[0] = 0.0f;
    for (size_t i = 1; i < n; ++i) {
        float dx = t.center_x[i] - t.center_x[i - 1];
        float dy = t.center_y[i] - t.center_y[i - 1];
        t.arc[i] = t.arc[i - 1] + std::sqrt(dx * dx + dy * dy);
    }
    float cdx = t.center_x[0] - t.center_x[n - 1];
    float cdy = t.center_y[0] - t.center_y[n - 1];
    t.total_length = t.arc[n - 1] + std::sqrt(cdx * cdx + cdy * cdy);

    for (size_t i = 0; i < n; ++i) {
        if (g.world_occupied(t.center_x[i], t.center_y[i]))
            throw std::runtime_error(dir + "/centerline.csv: waypoint " + std::to_string(i) +
                                     " lies in occupied space");
    }
    return t;
}

size_t nearest_waypoint(const Track& t, float x, float y) {
    size_t best = 0;
    float best_d = std::numeric_limits<float>::infinity();
    for (size_t i = 0; i < t.center_x.size(); ++i) {
        float dx = t.center_x[i] - x;
        float dy = t.center_y[i] - y;
        float d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

size_t nearest_waypoint_windowed(const Track& t, float x, float y, size_t hint, int window) {
    const size_t n = t.center_x.size();
    size_t best = hint;
    float best_d = std::numeric_limits<float>::infinity();
    for (int off = -window; off <= window; ++off) {
        long raw = (long(hint) + off) % long(n);
        size_t i = size_t(raw + (raw < 0 ? long(n) : 0));
        float dx = t.center_x[i] - x;
        float dy = t.center_y[i] - y;
        float d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace racer
