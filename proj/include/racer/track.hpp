#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace racer {

// Occupancy grid loaded from a PGM/YAML map bundle. Pixel value 0 is occupied;
// a cell is occupied when (255 - value) / 255 >= occupied_thresh. Row 0 of the
// grid is the row with the smallest world y (PGM stores it last: image row 0
// is the top of the map).
struct OccupancyGrid {
    int width = 0;
    int height = 0;
    float resolution = 0.05f;  // meters per cell
    float origin_x = 0.0f;     // world position of the lower-left corner of cell (0,0)
    float origin_y = 0.0f;
    std::vector<uint8_t> occupied;  // row-major [y * width + x], 1 = occupied

    bool in_bounds(int cx, int cy) const {
        return cx >= 0 && cx < width && cy >= 0 && cy < height;
    }
    // Out-of-bounds cells are free.
    bool is_occupied(int cx, int cy) const {
        return in_bounds(cx, cy) && occupied[size_t(cy) * width + cx] != 0;
    }
    bool world_occupied(float x, float y) const;
};

struct Track {
    std::string name;
    OccupancyGrid grid;
    std::vector<float> center_x;  // closed loop, last point != first
    std::vector<float> center_y;
    std::vector<float> arc;       // cumulative arc length at each waypoint, arc[0] = 0
    float total_length = 0.0f;    // includes the closing segment

    size_t waypoint_count() const { return center_x.size(); }
};

// Loads <dir>/map.pgm, <dir>/map.yaml, <dir>/centerline.csv. Throws
// std::runtime_error naming the missing or malformed file.
Track load_track(const std::string& dir);

// Nearest waypoint by Euclidean distance, full search.
size_t nearest_waypoint(const Track& t, float x, float y);

// Nearest waypoint searching only +-window indices around a hint (wrapping).
size_t nearest_waypoint_windowed(const Track& t, float x, float y, size_t hint, int window);

}  // namespace racer
