#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include <racer/loss.hpp>
#include <racer/model_zoo.hpp>
#include <racer/net.hpp>
#include <racer/optim.hpp>
#include <racer/rng.hpp>
#include <racer/train.hpp>

using namespace racer;

namespace {

// Scalar loss L = sum_i c[i] * out[i]; its gradient w.r.t. the output is c,
// which keeps finite differencing clean (no loss-side curvature).
template <typename T>
T weighted_output(const NetParamsT<T>& params, const TensorT<T>& input,
                  const std::vector<T>& c) {
    TensorT<T> out = forward(params, input);
    T total = 0;
    for (size_t i = 0; i < out.data.size(); ++i) total += c[i] * out.data[i];
    return total;
}

// Central finite differences against backward() for every parameter, in
// 64-bit mode. Returns the worst relative error.
double gradcheck(const NetSpec& spec, uint64_t seed) {
    NetParamsT<double> params = params_cast<double>(init_params(spec, seed));
    Pcg32 rng(mix_seed(seed, 0xF00D), 5);
    TensorT<double> input({spec.input_length});
    for (auto& v : input.data) v = rng.uniform(0.05, 1.0);

    TensorT<double> out0 = forward(params, input);
    std::vector<double> c(out0.data.size());
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);

    ForwardTraceT<double> trace;
    forward(params, input, &trace);
    TensorT<double> loss_grad(out0.shape);
    loss_grad.data = c;
    GradientsT<double> grads = backward(params, trace, loss_grad);

    const double h = 1e-5;
    const double l0 = weighted_output(params, input, c);
    double worst = 0.0;
    size_t skipped = 0, total = 0;
    auto check_tensor = [&](TensorT<double>& p, const TensorT<double>& g) {
        for (size_t i = 0; i < p.data.size(); ++i) {
            ++total;
            const double saved = p.data[i];
            p.data[i] = saved + h;
            const double lp = weighted_output(params, input, c);
            p.data[i] = saved - h;
            const double lm = weighted_output(params, input, c);
            p.data[i] = saved;
            // the net is piecewise linear in any single parameter, so unequal
            // one-sided slopes mean a relu kink inside the stencil; the loss
            // is not differentiable there and the check does not apply
            const double fp = (lp - l0) / h;
            const double fm = (l0 - lm) / h;
            if (std::abs(fp - fm) > 1e-6 * std::max({std::abs(fp), std::abs(fm), 1.0})) {
                ++skipped;
                continue;
            }
            const double fd = (lp - lm) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(g.data[i]), 1e-6});
            worst = std::max(worst, std::abs(fd - g.data[i]) / denom);
        }
    };
    for (size_t l = 0; l < params.weights.size(); ++l) {
        if (params.weights[l].empty()) continue;
        check_tensor(params.weights[l], grads.weights[l]);
        check_tensor(params.biases[l], grads.biases[l]);
    }
    // the kink guard must stay an exception, not swallow the check
    REQUIRE(skipped * 10 < total);
    return worst;
}

Dataset constant_dataset(size_t n) {
    Dataset ds;
    Pcg32 rng(7, 1);
    std::vector<float> scan(1081);
    for (auto& v : scan) v = float(rng.uniform(0.0, 1.0));
    for (size_t i = 0; i < n; ++i) {
        ds.scans.push_back(scan);
        ds.steering.push_back(0.31f);
        ds.speed.push_back(0.62f);
    }
    return ds;
}

}  // namespace

TEST_CASE("conv1d output length formula") {
    CHECK(conv1d_output_length(1081, 10, 4) == 268);
    CHECK(conv1d_output_length(5, 5, 1) == 1);
    for (int len = 1; len <= 40; ++len)
        for (int k = 1; k <= len; ++k)
            for (int s = 1; s <= 5; ++s)
                CHECK(conv1d_output_length(len, k, s) == (len - k) / s + 1);
    CHECK_THROWS(conv1d_output_length(4, 5, 1));
    CHECK_THROWS(conv1d_output_length(4, 0, 1));
    CHECK_THROWS(conv1d_output_length(4, 2, 0));
}

TEST_CASE("zero network maps any input to zero") {
    NetSpec spec = make_model("tinylidarnet-s");
    NetParams params = zero_params<float>(spec);
    Pcg32 rng(3, 0);
    Tensor in({spec.input_length});
    for (auto& v : in.data) v = float(rng.uniform(0.0, 1.0));
    Tensor out = forward(params, in);
    REQUIRE(out.data.size() == 2);
    CHECK(out.data[0] == 0.0f);
    CHECK(out.data[1] == 0.0f);
}

TEST_CASE("dense identity passes input through") {
    NetSpec spec;
    spec.name = "id";
    spec.input_length = 2;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(2, 2)};
    NetParams params = zero_params<float>(spec);
    params.weights[1].data = {1.0f, 0.0f, 0.0f, 1.0f};
    Tensor out = forward(params, Tensor({2}, {0.3f, -0.7f}));
    CHECK(out.data[0] == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(out.data[1] == doctest::Approx(-0.7).epsilon(1e-7));
}

TEST_CASE("tinylidarnet-l forward yields a 2-vector from 1081 inputs") {
    NetSpec spec = make_model("tinylidarnet-l");
    NetParams params = init_params(spec, 11);
    Tensor in({1081});
    for (auto& v : in.data) v = 0.4f;
    Tensor out = forward(params, in);
    CHECK(out.shape == std::vector<int>{2});
    CHECK(out.all_finite());
}

TEST_CASE("input length mismatch is rejected with a diagnostic") {
    NetSpec spec = make_model("tinylidarnet-m");
    NetParams params = init_params(spec, 1);
    Tensor in({100});
    in.fill(0.5f);
    CHECK_THROWS_AS(forward(params, in), std::invalid_argument);
}

TEST_CASE("forward is pure in params and input") {
    NetSpec spec = make_model("mlp256-s");
    NetParams params = init_params(spec, 21);
    Pcg32 rng(5, 2);
    Tensor in({spec.input_length});
    for (auto& v : in.data) v = float(rng.uniform(0.0, 1.0));
    Tensor a = forward(params, in);
    Tensor b = forward(params, in);
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0);
}

TEST_CASE("zero loss gradient backpropagates to zero parameter gradients") {
    NetSpec spec = make_model("mlp256-s");
    NetParams params = init_params(spec, 9);
    Tensor in({spec.input_length});
    in.fill(0.3f);
    ForwardTrace trace;
    forward(params, in, &trace);
    Gradients grads = backward(params, trace, Tensor({2}, {0.0f, 0.0f}));
    for (const auto& g : grads.weights)
        for (float v : g.data) CHECK(v == 0.0f);
    for (const auto& g : grads.biases)
        for (float v : g.data) CHECK(v == 0.0f);
}

TEST_CASE("dense 1x1 gradient matches finite differences") {
    // w=2, b=0, input 3, L = pred^2 with target 0: dL/dw = 2*pred*x = 36
    NetSpec spec;
    spec.name = "tiny";
    spec.input_length = 1;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(1, 1)};
    NetParamsT<double> params = zero_params<double>(spec);
    params.weights[1].data[0] = 2.0;
    TensorT<double> in({1}, {3.0});

    ForwardTraceT<double> trace;
    TensorT<double> out = forward(params, in, &trace);
    REQUIRE(out.data[0] == doctest::Approx(6.0));
    TensorT<double> loss_grad({1}, {2.0 * out.data[0]});
    GradientsT<double> grads = backward(params, trace, loss_grad);
    CHECK(grads.weights[1].data[0] == doctest::Approx(36.0).epsilon(1e-9));

    const double h = 1e-5;
    auto loss_at = [&](double w) {
        params.weights[1].data[0] = w;
        TensorT<double> o = forward(params, in);
        return o.data[0] * o.data[0];
    };
    double fd = (loss_at(2.0 + h) - loss_at(2.0 - h)) / (2.0 * h);
    CHECK(grads.weights[1].data[0] == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("small conv gradient matches finite differences tightly") {
    NetSpec spec;
    spec.name = "conv";
    spec.input_length = 3;
    spec.layers = {LayerSpec::conv1d(1, 1, 2, 1), LayerSpec::flatten(), LayerSpec::dense(2, 1)};
    double worst = gradcheck(spec, 31);
    CHECK(worst < 1e-6);
}

TEST_CASE("randomized gradcheck covers every layer kind") {
    NetSpec conv_net;
    conv_net.name = "convs";
    conv_net.input_length = 17;
    conv_net.layers = {LayerSpec::conv1d(1, 3, 4, 2), LayerSpec::relu(),
                       LayerSpec::conv1d(3, 4, 3, 1), LayerSpec::relu(), LayerSpec::flatten(),
                       LayerSpec::dense(20, 2)};
    NetSpec dense_net;
    dense_net.name = "denses";
    dense_net.input_length = 6;
    dense_net.layers = {LayerSpec::flatten(), LayerSpec::dense(6, 5), LayerSpec::relu(),
                        LayerSpec::dense(5, 4), LayerSpec::relu(), LayerSpec::dense(4, 2)};
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        CHECK(gradcheck(conv_net, seed) < 1e-4);
        CHECK(gradcheck(dense_net, seed) < 1e-4);
    }
}

TEST_CASE("huber hand values") {
    Tensor grad;
    CHECK(huber_loss(Tensor({2}, {0.2f, -0.4f}), Tensor({2}, {0.2f, -0.4f}), 1.0f, &grad) == 0.0f);
    CHECK(grad.data[0] == 0.0f);
    CHECK(grad.data[1] == 0.0f);

    // r = 0.5 inside the quadratic zone
    float l1 = huber_loss(Tensor({1}, {0.5f}), Tensor({1}, {0.0f}), 1.0f);
    CHECK(l1 == doctest::Approx(0.125));

    // r = 2 in the linear zone: delta*(|r| - delta/2) = 1.5, gradient clipped to 1
    float l2 = huber_loss(Tensor({1}, {2.0f}), Tensor({1}, {0.0f}), 1.0f, &grad);
    CHECK(l2 == doctest::Approx(1.5));
    CHECK(grad.data[0] == doctest::Approx(1.0));

    // summed over components
    float l3 = huber_loss(Tensor({2}, {0.5f, 2.0f}), Tensor({2}, {0.0f, 0.0f}), 1.0f);
    CHECK(l3 == doctest::Approx(0.125 + 1.5));
}

TEST_CASE("huber is C1 at the delta boundary") {
    const double delta = 1.0;
    const double eps = 1e-9;
    TensorT<double> grad_lo, grad_hi;
    double lo = huber_loss(TensorT<double>({1}, {delta - eps}), TensorT<double>({1}, {0.0}), delta,
                           &grad_lo);
    double hi = huber_loss(TensorT<double>({1}, {delta + eps}), TensorT<double>({1}, {0.0}), delta,
                           &grad_hi);
    CHECK(std::abs(hi - lo) < 1e-8);
    CHECK(std::abs(grad_hi.data[0] - grad_lo.data[0]) < 1e-8);
}

TEST_CASE("huber rejects bad inputs") {
    CHECK_THROWS(huber_loss(Tensor({1}, {std::nanf("")}), Tensor({1}, {0.0f}), 1.0f));
    CHECK_THROWS(huber_loss(Tensor({1}, {0.0f}), Tensor({1}, {INFINITY}), 1.0f));
    CHECK_THROWS(huber_loss(Tensor({1}, {0.0f}), Tensor({1}, {0.0f}), 0.0f));
    CHECK_THROWS(huber_loss(Tensor({1}, {0.0f}), Tensor({1}, {0.0f}), -1.0f));
    CHECK_THROWS(huber_loss(Tensor({2}, {0.0f, 0.0f}), Tensor({1}, {0.0f}), 1.0f));
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
    NetSpec spec = make_model("mlp256-s");
    NetParams params = init_params(spec, 13);
    NetParams before = params;
    Adam opt(params, AdamConfig{});
    Gradients grads = zero_gradients(params);
    opt.step(params, grads);
    for (size_t l = 0; l < params.weights.size(); ++l) {
        CHECK(params.weights[l].data == before.weights[l].data);
        CHECK(params.biases[l].data == before.biases[l].data);
    }
    CHECK(opt.steps() == 1);
}

TEST_CASE("adam first step moves by about lr") {
    NetSpec spec;
    spec.name = "w";
    spec.input_length = 1;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(1, 1)};
    NetParams params = zero_params<float>(spec);
    Adam opt(params, AdamConfig{});
    Gradients grads = zero_gradients(params);
    grads.weights[1].data[0] = 1.0f;
    opt.step(params, grads);
    CHECK(params.weights[1].data[0] == doctest::Approx(-5e-5).epsilon(1e-4));
    CHECK(params.biases[1].data[0] == 0.0f);
}

TEST_CASE("adam steps move monotonically against the gradient") {
    NetSpec spec;
    spec.name = "w";
    spec.input_length = 1;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(1, 1)};
    NetParams params = zero_params<float>(spec);
    Adam opt(params, AdamConfig{});
    Gradients grads = zero_gradients(params);
    grads.weights[1].data[0] = 0.7f;
    float prev = 0.0f;
    for (int i = 0; i < 3; ++i) {
        opt.step(params, grads);
        CHECK(params.weights[1].data[0] < prev);
        prev = params.weights[1].data[0];
    }
}

TEST_CASE("training memorizes a repeated sample") {
    Dataset ds = constant_dataset(8);
    NetSpec spec;
    spec.name = "probe";
    spec.input_length = 271;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(271, 16), LayerSpec::relu(),
                   LayerSpec::dense(16, 2)};
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.adam.lr = 1e-3f;
    std::vector<EpochStats> history;
    train_model(spec, ds, cfg, [&](const EpochStats& st) { history.push_back(st); });
    REQUIRE(history.size() == 20);
    CHECK(history.back().train_loss < history.front().train_loss);
}

TEST_CASE("tinylidarnet-s fits a synthetic linear task") {
    // target = fixed linear functional of the scan, realizable by the net
    Dataset ds;
    Pcg32 rng(17, 3);
    const size_t n = 1024;
    for (size_t i = 0; i < n; ++i) {
        std::vector<float> scan(1081);
        for (auto& v : scan) v = float(rng.uniform(0.0, 1.0));
        float a = 0.0f, b = 0.0f;
        for (int k = 0; k < 1081; k += 8) {
            a += scan[size_t(k)];
            b += scan[size_t(std::min(1080, k + 3))];
        }
        ds.scans.push_back(std::move(scan));
        ds.steering.push_back(0.6f * (a / 136.0f - 0.5f));
        ds.speed.push_back(0.5f + 0.4f * (b / 136.0f - 0.5f));
    }
    TrainConfig cfg;
    cfg.seed = 2;
    cfg.adam.lr = 2e-3f;  // the 5e-5 default needs far more steps than this small set provides
    NetSpec spec = make_model("tinylidarnet-s");
    float final_val = 1e9f;
    train_model(spec, ds, cfg, [&](const EpochStats& st) { final_val = st.val_loss; });
    CHECK(final_val < 0.01f);
}

TEST_CASE("training loss history is bitwise reproducible") {
    Dataset ds = constant_dataset(64);
    Pcg32 rng(23, 4);
    for (size_t i = 0; i < ds.size(); ++i) {
        for (auto& v : ds.scans[i]) v = float(rng.uniform(0.0, 1.0));
        ds.steering[i] = float(rng.uniform(-0.5, 0.5));
        ds.speed[i] = float(rng.uniform(0.1, 0.9));
    }
    NetSpec spec;
    spec.name = "probe";
    spec.input_length = 541;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(541, 8), LayerSpec::relu(),
                   LayerSpec::dense(8, 2)};
    TrainConfig cfg;
    cfg.seed = 77;
    cfg.epochs = 5;
    auto run = [&]() {
        std::vector<float> hist;
        train_model(spec, ds, cfg, [&](const EpochStats& st) {
            hist.push_back(st.train_loss);
            hist.push_back(st.val_loss);
        });
        return hist;
    };
    std::vector<float> h1 = run();
    std::vector<float> h2 = run();
    REQUIRE(h1.size() == h2.size());
    CHECK(std::memcmp(h1.data(), h2.data(), h1.size() * sizeof(float)) == 0);
}

TEST_CASE("training rejects bad datasets") {
    NetSpec spec = make_model("mlp256-s");
    Dataset empty;
    CHECK_THROWS(train_model(spec, empty, TrainConfig{}));

    NetSpec odd;
    odd.name = "odd";
    odd.input_length = 100;
    odd.layers = {LayerSpec::flatten(), LayerSpec::dense(100, 2)};
    Dataset ds = constant_dataset(4);
    CHECK_THROWS(train_model(odd, ds, TrainConfig{}));
}
