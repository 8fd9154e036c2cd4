#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <racer/bench.hpp>
#include <racer/checkpoint.hpp>
#include <racer/dataset.hpp>
#include <racer/eval.hpp>
#include <racer/expert.hpp>
#include <racer/model_zoo.hpp>
#include <racer/policy.hpp>
#include <racer/quant.hpp>
#include <racer/scan.hpp>
#include <racer/track.hpp>
#include <racer/train.hpp>

namespace {

// Flat key=value config files, one option per line, # comments. A file value
// fills an option only when the flag is absent from the command line, so
// precedence stays: flag, then file, then built-in default. Merged into argv
// by hand because the CLI library only reads config files at top level and
// these belong to subcommands.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config " + path);
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        s.erase(0, s.find_first_not_of(ws));
        s.erase(s.find_last_not_of(ws) + 1);
        return s;
    };
    std::vector<std::string> merged = args;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : merged)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) merged.push_back(flag + "=" + value);
    }
    return merged;
}

std::string group_digits(int64_t v) {
    std::string raw = std::to_string(v);
    std::string out;
    int c = 0;
    for (size_t i = raw.size(); i-- > 0;) {
        out += raw[i];
        if (++c % 3 == 0 && i > 0) out += ',';
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string model_name_of(const std::string& family, std::string size) {
    std::transform(size.begin(), size.end(), size.begin(), ::tolower);
    if (size != "l" && size != "m" && size != "s")
        throw std::invalid_argument("size must be L, M or S");
    return family + "-" + size;
}

void cmd_collect(const std::string& track_dir, int laps, uint64_t seed, const std::string& out) {
    racer::Track track = racer::load_track(track_dir);
    racer::CollectResult res = racer::collect(track, laps, seed);
    racer::save_dataset_csv(res.dataset, out);
    std::cout << "collected " << res.dataset.size() << " samples over " << res.laps_done
              << " laps on " << track.name << " -> " << out << "\n";
    if (!res.complete)
        throw std::runtime_error("expert crashed after " + std::to_string(res.laps_done) +
                                 " laps; partial dataset saved to " + out);
}

void cmd_train(const std::string& family, const std::string& size, const std::string& data,
               int epochs, int batch, float lr, uint64_t seed, const std::string& out) {
    const std::string name = model_name_of(family, size);
    racer::NetSpec spec = racer::make_model(name);
    racer::Dataset ds = racer::load_dataset_csv(data);
    racer::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.adam.lr = lr;
    cfg.seed = seed;
    std::cout << "training " << name << " on " << ds.size() << " samples\n";
    racer::NetParams params =
        racer::train_model(spec, ds, cfg, [&](const racer::EpochStats& st) {
            std::printf("epoch %d/%d  train_loss=%.6f  val_loss=%.6f\n", st.epoch + 1, epochs,
                        double(st.train_loss), double(st.val_loss));
            std::fflush(stdout);
        });
    racer::save_checkpoint(params, out);
    std::cout << "saved " << out << "\n";
}

void cmd_quantize(const std::string& model, const std::string& calib, uint64_t seed,
                  int calib_count, const std::string& out) {
    racer::NetParams params = racer::load_checkpoint(model);
    racer::Dataset ds = racer::load_dataset_csv(calib);
    // calibration set: the first samples of the seed-ordered training split,
    // mirroring what training saw
    racer::SplitIndices split = racer::split_dataset(ds.size(), seed);
    const size_t n = std::min(size_t(calib_count), split.train.size());
    if (n == 0) throw std::runtime_error("quantize: no calibration samples in " + calib);
    int factor = 1;
    for (const auto& m : racer::model_catalog())
        if (m.input_length == params.spec.input_length) factor = m.downsample_factor;
    std::vector<std::vector<float>> samples;
    samples.reserve(n);
    for (size_t i = 0; i < n; ++i)
        samples.push_back(racer::downsample_scan(ds.scans[split.train[i]], factor));
    racer::QuantNet qn = racer::quantize_net(params, samples);
    racer::save_quant_checkpoint(qn, out);
    std::cout << "quantized " << params.spec.name << " with " << n << " calibration samples -> "
              << out << "\n";
}

void cmd_eval(const std::string& model, const std::string& track_dir, int trials, uint64_t seed,
              float timeout, int workers, const std::string& report) {
    racer::Track track = racer::load_track(track_dir);
    racer::Policy policy;
    std::string model_name;
    if (racer::peek_checkpoint_kind(model) == racer::CheckpointKind::Int8) {
        racer::QuantNet qn = racer::load_quant_checkpoint(model);
        model_name = qn.spec.name + "-int8";
        policy = racer::quant_policy(qn);
    } else {
        racer::NetParams p = racer::load_checkpoint(model);
        model_name = p.spec.name;
        policy = racer::net_policy(p);
    }
    racer::EvalConfig cfg;
    cfg.n_trials = trials;
    cfg.seed = seed;
    cfg.timeout_s = timeout;
    cfg.workers = workers;
    racer::EvalReport r = racer::evaluate(policy, track, cfg, model_name);
    std::cout << racer::report_table(r);
    if (!report.empty()) {
        std::ofstream f(report, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + report);
        f << racer::report_csv(r);
    }
}

void cmd_trace(const std::string& model, const std::string& track_dir, size_t start, uint64_t seed,
               float timeout, const std::string& out) {
    racer::Track track = racer::load_track(track_dir);
    racer::Policy policy = racer::policy_from_checkpoint(model);
    racer::EpisodeLog log = racer::trace_episode(policy, track, start, seed, timeout);
    racer::save_trace_csv(log, out);
    std::printf("outcome=%s progress_pct=%.2f ticks=%zu wobble_proxy_rad_per_tick=%.5f -> %s\n",
                racer::outcome_name(log.outcome), double(log.progress_pct), log.ticks.size(),
                log.ticks.size() >= 3 ? double(racer::wobble_metric(log)) : 0.0, out.c_str());
}

void cmd_bench(const std::string& model, int iters, int warmup, uint64_t seed) {
    racer::BenchResult r = racer::bench_latency(model, iters, warmup, seed);
    std::cout << racer::bench_csv_header() << "\n" << racer::bench_csv_row(r) << "\n";
}

void cmd_inspect(const std::string& model) {
    racer::NetSpec spec;
    if (racer::is_known_model(model)) {
        spec = racer::make_model(model);
    } else {
        if (racer::peek_checkpoint_kind(model) == racer::CheckpointKind::Int8)
            spec = racer::load_quant_checkpoint(model).spec;
        else
            spec = racer::load_checkpoint(model).spec;
    }
    auto shapes = racer::activation_shapes(spec);
    std::cout << "model " << spec.name << "  input_length " << spec.input_length << "\n";
    std::printf("%-4s %-24s %-12s %12s %14s\n", "#", "layer", "output", "params", "macs");
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        racer::NetSpec one;
        one.name = spec.name;
        one.input_length = spec.input_length;
        one.layers.assign(spec.layers.begin(), spec.layers.begin() + long(i) + 1);
        racer::NetSpec prev = one;
        prev.layers.pop_back();
        int64_t p = racer::count_params(one) - racer::count_params(prev);
        int64_t m = racer::count_macs(one) - racer::count_macs(prev);
        std::printf("%-4zu %-24s %-12s %12s %14s\n", i, spec.layers[i].describe().c_str(),
                    racer::shape_str(shapes[i + 1]).c_str(), group_digits(p).c_str(),
                    group_digits(m).c_str());
    }
    const int64_t params = racer::count_params(spec);
    const int64_t macs = racer::count_macs(spec);
    std::cout << "total " << group_digits(params) << " params / " << group_digits(macs)
              << " macs\n";
    std::cout << "name=" << spec.name << " input_length=" << spec.input_length
              << " params=" << params << " macs=" << macs << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D-LiDAR end-to-end racing: data collection, training, quantization, evaluation"};
    app.require_subcommand(1);
    app.failure_message([](const CLI::App*, const CLI::Error& e) {
        return std::string("error: ") + e.what() + "\n";
    });

    std::string track_dir, out, data, model, family, size, calib, report, config_path;
    int laps = 32, epochs = 20, batch = 64, trials = 10, iters = 10000, warmup = 100;
    int workers = 1, calib_count = 256;
    size_t start_wp = 0;
    float lr = 5e-5f, timeout = 60.0f;
    uint64_t seed = 0, bench_seed = 42;

    auto* collect = app.add_subcommand("collect", "record expert demonstrations on a track");
    collect->add_option("--track", track_dir, "track bundle directory")->required();
    collect->add_option("--laps", laps, "laps to record")->capture_default_str();
    collect->add_option("--seed", seed, "rng seed")->capture_default_str();
    collect->add_option("--out", out, "output dataset CSV")->required();
    collect->add_option("--config", config_path, "key=value config file");
    collect->callback([&] { cmd_collect(track_dir, laps, seed, out); });

    auto* train = app.add_subcommand("train", "train a model by behavior cloning");
    train->add_option("--family", family, "model family")
        ->required()
        ->check(CLI::IsMember({"tinylidarnet", "mlp256"}));
    train->add_option("--size", size, "model size: L, M or S")->required();
    train->add_option("--data", data, "dataset CSV")->required();
    train->add_option("--epochs", epochs, "training epochs")->capture_default_str();
    train->add_option("--batch", batch, "minibatch size")->capture_default_str();
    train->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    train->add_option("--seed", seed, "rng seed")->capture_default_str();
    train->add_option("--out", out, "output checkpoint")->required();
    train->add_option("--config", config_path, "key=value config file");
    train->callback([&] { cmd_train(family, size, data, epochs, batch, lr, seed, out); });

    auto* quantize = app.add_subcommand("quantize", "post-training int8 quantization");
    quantize->add_option("--model", model, "float32 checkpoint")->required();
    quantize->add_option("--calib", calib, "calibration dataset CSV")->required();
    quantize->add_option("--seed", seed, "seed used when training (selects the calibration split)")
        ->capture_default_str();
    quantize->add_option("--calib-count", calib_count, "calibration sample count")
        ->capture_default_str();
    quantize->add_option("--out", out, "output checkpoint")->required();
    quantize->add_option("--config", config_path, "key=value config file");
    quantize->callback([&] { cmd_quantize(model, calib, seed, calib_count, out); });

    auto* eval = app.add_subcommand("eval", "random-start closed-loop evaluation");
    eval->add_option("--model", model, "model checkpoint (fp32 or int8)")->required();
    eval->add_option("--track", track_dir, "track bundle directory")->required();
    eval->add_option("--trials", trials, "number of trials")->capture_default_str();
    eval->add_option("--seed", seed, "rng seed")->capture_default_str();
    eval->add_option("--timeout", timeout, "per-trial timeout, seconds")->capture_default_str();
    eval->add_option("--workers", workers, "parallel trial workers")->capture_default_str();
    eval->add_option("--report", report, "write per-trial CSV here");
    eval->add_option("--config", config_path, "key=value config file");
    eval->callback([&] { cmd_eval(model, track_dir, trials, seed, timeout, workers, report); });

    auto* trace = app.add_subcommand("trace", "record one episode as a per-tick CSV");
    trace->add_option("--model", model, "model checkpoint (fp32 or int8)")->required();
    trace->add_option("--track", track_dir, "track bundle directory")->required();
    trace->add_option("--start", start_wp, "start waypoint index")->capture_default_str();
    trace->add_option("--seed", seed, "rng seed")->capture_default_str();
    trace->add_option("--timeout", timeout, "episode timeout, seconds")->capture_default_str();
    trace->add_option("--out", out, "output trace CSV")->required();
    trace->add_option("--config", config_path, "key=value config file");
    trace->callback([&] { cmd_trace(model, track_dir, start_wp, seed, timeout, out); });

    auto* bench = app.add_subcommand("bench", "single-inference latency benchmark");
    bench->add_option("--model", model, "model checkpoint (fp32 or int8)")->required();
    bench->add_option("--iters", iters, "timed iterations")->capture_default_str();
    bench->add_option("--warmup", warmup, "warmup iterations")->capture_default_str();
    bench->add_option("--seed", bench_seed, "input seed")->capture_default_str();
    bench->add_option("--config", config_path, "key=value config file");
    bench->callback([&] { cmd_bench(model, iters, warmup, bench_seed); });

    auto* inspect = app.add_subcommand("inspect", "layer table with parameter and MAC counts");
    inspect->add_option("--model", model, "model name or checkpoint path")->required();
    inspect->add_option("--config", config_path, "key=value config file");
    inspect->callback([&] { cmd_inspect(model); });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_args(args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
