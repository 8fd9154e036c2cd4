#include <racer/bench.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include <racer/checkpoint.hpp>
#include <racer/model_zoo.hpp>
#include <racer/rng.hpp>

namespace racer {

namespace {
volatile double g_bench_sink;  // defeats dead-code elimination of the timed calls
}

BenchResult bench_latency(const std::string& checkpoint_path, int n_iters, int warmup,
                          uint64_t seed) {
    if (n_iters < 1) throw std::invalid_argument("bench: need at least one iteration");
    const CheckpointKind kind = peek_checkpoint_kind(checkpoint_path);

    BenchResult res;
    res.bytes = uint64_t(std::filesystem::file_size(checkpoint_path));
    res.format = kind == CheckpointKind::Int8 ? "int8" : "fp32";

    using clock = std::chrono::steady_clock;
    std::vector<double> us(static_cast<size_t>(n_iters));
    double sink = 0.0;

    auto measure = [&](auto&& infer) {
        for (int i = 0; i < warmup; ++i) sink += infer();
        for (int i = 0; i < n_iters; ++i) {
            const auto t0 = clock::now();
            sink += infer();
            const auto t1 = clock::now();
            us[size_t(i)] = std::chrono::duration<double, std::micro>(t1 - t0).count();
        }
    };

    if (kind == CheckpointKind::Int8) {
        const QuantNet net = load_quant_checkpoint(checkpoint_path);
        res.model = net.spec.name;
        res.params = count_params(net.spec);
        res.macs = count_macs(net.spec);
        Pcg32 rng(mix_seed(seed, 0xBE));
        std::vector<float> input(size_t(net.spec.input_length));
        for (auto& v : input) v = float(rng.uniform01());
        measure([&]() { return double(quant_forward(net, input)[0]); });
    } else {
        const NetParams params = load_checkpoint(checkpoint_path);
        res.model = params.spec.name;
        res.params = count_params(params.spec);
        res.macs = count_macs(params.spec);
        Pcg32 rng(mix_seed(seed, 0xBE));
        Tensor input({params.spec.input_length});
        for (auto& v : input.data) v = float(rng.uniform01());
        measure([&]() { return double(forward(params, input).data[0]); });
    }
    g_bench_sink = sink;

    double sum = 0.0;
    for (double v : us) sum += v;
    res.mean_us = sum / double(n_iters);
    std::sort(us.begin(), us.end());
    res.p50_us = us[size_t(0.50 * double(n_iters - 1))];
    res.p99_us = us[size_t(0.99 * double(n_iters - 1))];
    return res;
}

std::string bench_csv_header() { return "model,format,mean_us,p50_us,p99_us,bytes,params,macs"; }

std::string bench_csv_row(const BenchResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%.3f,%.3f,%.3f,%llu,%lld,%lld", r.model.c_str(),
                  r.format.c_str(), r.mean_us, r.p50_us, r.p99_us,
                  static_cast<unsigned long long>(r.bytes), static_cast<long long>(r.params),
                  static_cast<long long>(r.macs));
    return buf;
}

}  // namespace racer
