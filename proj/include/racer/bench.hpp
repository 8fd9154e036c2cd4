#pragma once

#include <cstdint>
#include <string>

namespace racer {

struct BenchResult {
    std::string model;    // model name from the checkpoint
    std::string format;   // "fp32" or "int8"
    double mean_us = 0.0;
    double p50_us = 0.0;
    double p99_us = 0.0;
    uint64_t bytes = 0;   // checkpoint file size
    int64_t params = 0;
    int64_t macs = 0;
};

// Per-inference wall-clock latency of a checkpoint on a fixed random input,
// single-threaded, measured after warmup. The int8 path times input
// quantization together with the integer kernels.
BenchResult bench_latency(const std::string& checkpoint_path, int n_iters = 10000,
                          int warmup = 100, uint64_t seed = 42);

std::string bench_csv_header();
std::string bench_csv_row(const BenchResult& r);

}  // namespace racer
