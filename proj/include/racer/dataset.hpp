#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <racer/rng.hpp>

namespace racer {

// A behavior-cloning dataset: preprocessed scans (1081 values in [0, 1]) with
// normalized labels. Stored as CSV with header r0,...,r1080,steering_norm,speed_norm.
struct Dataset {
    std::vector<std::vector<float>> scans;   // each of length 1081
    std::vector<float> steering;             // normalized [-1, 1]
    std::vector<float> speed;                // normalized
    size_t size() const { return scans.size(); }
};

void save_dataset_csv(const Dataset& ds, const std::string& path);

// Throws std::runtime_error with the path on missing file or malformed rows.
Dataset load_dataset_csv(const std::string& path);

// Deterministic shuffled split indices: first 85% train, rest validation
// (train count = floor(0.85 * n)). Seed fully determines the permutation.
struct SplitIndices {
    std::vector<size_t> train;
    std::vector<size_t> val;
};
SplitIndices split_dataset(size_t n, uint64_t seed);

}  // namespace racer
