#include <racer/dataset.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <racer/scan.hpp>

namespace racer {

namespace {

void append_float(std::string& out, float v) {
    char buf[32];
    // %.9g round-trips float32 exactly
    int n = std::snprintf(buf, sizeof buf, "%.9g", double(v));
    out.append(buf, size_t(n));
}

float parse_float(const char* begin, const char* end, const std::string& path, size_t line) {
    float v = 0.0f;
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || p != end)
        throw std::runtime_error(path + ":" + std::to_string(line) + ": bad float '" +
                                 std::string(begin, end) + "'");
    return v;
}

}  // namespace

void save_dataset_csv(const Dataset& ds, const std::string& path) {
    if (ds.steering.size() != ds.size() || ds.speed.size() != ds.size())
        throw std::invalid_argument("dataset: column sizes disagree");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    std::string line;
    line.reserve(16 * kScanBeams);
    for (int i = 0; i < kScanBeams; ++i) {
        line += "r";
        line += std::to_string(i);
        line += ",";
    }
    line += "steering_norm,speed_norm\n";
    f << line;
    for (size_t r = 0; r < ds.size(); ++r) {
        if (int(ds.scans[r].size()) != kScanBeams)
            throw std::invalid_argument("dataset: scan " + std::to_string(r) + " has " +
                                        std::to_string(ds.scans[r].size()) + " beams");
        line.clear();
        for (float v : ds.scans[r]) {
            append_float(line, v);
            line += ",";
        }
        append_float(line, ds.steering[r]);
        line += ",";
        append_float(line, ds.speed[r]);
        line += "\n";
        f << line;
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    Dataset ds;
    std::string line;
    size_t lineno = 0;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
    ++lineno;
    if (line.rfind("r0,", 0) != 0)
        throw std::runtime_error(path + ": missing r0,...,steering_norm,speed_norm header");
    const size_t want = size_t(kScanBeams) + 2;
    std::vector<float> row;
    row.reserve(want);
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        row.clear();
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            const char* comma = p;
            while (comma != end && *comma != ',') ++comma;
            row.push_back(parse_float(p, comma, path, lineno));
            if (comma == end) break;
            p = comma + 1;
        }
        if (row.size() != want)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(want) + " columns, got " +
                                     std::to_string(row.size()));
        ds.scans.emplace_back(row.begin(), row.begin() + kScanBeams);
        ds.steering.push_back(row[size_t(kScanBeams)]);
        ds.speed.push_back(row[size_t(kScanBeams) + 1]);
    }
    return ds;
}

SplitIndices split_dataset(size_t n, uint64_t seed) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t(0));
    Pcg32 rng(mix_seed(seed, 0x5));
    for (size_t i = n; i > 1; --i) {
        size_t j = size_t(rng.below(uint32_t(i)));
        std::swap(idx[i - 1], idx[j]);
    }
    SplitIndices s;
    size_t n_train = size_t(double(n) * 0.85);
    s.train.assign(idx.begin(), idx.begin() + std::min(n_train, n));
    s.val.assign(idx.begin() + std::min(n_train, n), idx.end());
    return s;
}

}  // namespace racer
