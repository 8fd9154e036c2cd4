#include <racer/train.hpp>

#include <algorithm>
#include <stdexcept>

#include <racer/loss.hpp>
#include <racer/scan.hpp>

namespace racer {

namespace {

int factor_for_input(int input_length) {
    switch (input_length) {
        case 1081: return 1;
        case 541: return 2;
        case 271: return 4;
    }
    throw std::invalid_argument("train: unsupported net input length " +
                                std::to_string(input_length));
}

}  // namespace

NetParams train_model(const NetSpec& spec, const Dataset& ds, const TrainConfig& cfg,
                      const EpochCallback& on_epoch) {
    if (ds.size() < 2) throw std::invalid_argument("train: dataset too small");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("train: epochs and batch size must be positive");

    const int factor = factor_for_input(spec.input_length);
    std::vector<std::vector<float>> inputs(ds.size());
    for (size_t i = 0; i < ds.size(); ++i) inputs[i] = downsample_scan(ds.scans[i], factor);

    const SplitIndices split = split_dataset(ds.size(), cfg.seed);
    if (split.train.empty()) throw std::invalid_argument("train: empty training split");

    NetParams params = init_params(spec, mix_seed(cfg.seed, 0x11));
    Adam opt(params, cfg.adam);
    Gradients grads = zero_gradients(params);
    Pcg32 shuffle_rng(mix_seed(cfg.seed, 0x22), 2);
    std::vector<size_t> order = split.train;

    ForwardTrace trace;
    Tensor loss_grad;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i) {
            size_t j = shuffle_rng.below(uint32_t(i));
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        for (size_t batch_start = 0; batch_start < order.size(); batch_start += size_t(cfg.batch_size)) {
            const size_t bs = std::min(size_t(cfg.batch_size), order.size() - batch_start);
            grads.zero();
            for (size_t k = 0; k < bs; ++k) {
                const size_t idx = order[batch_start + k];
                Tensor x({spec.input_length}, inputs[idx]);
                Tensor y = forward(params, x, &trace);
                Tensor target({2}, {ds.steering[idx], ds.speed[idx]});
                epoch_loss += huber_loss(y, target, cfg.huber_delta, &loss_grad);
                for (auto& v : loss_grad.data) v /= float(bs);
                backward_into(params, trace, loss_grad, grads);
            }
            opt.step(params, grads);
        }
        if (on_epoch) {
            EpochStats st;
            st.epoch = epoch;
            st.train_loss = float(epoch_loss / double(order.size()));
            st.val_loss = split.val.empty() ? 0.0f : evaluate_loss(params, ds, split.val, cfg.huber_delta);
            on_epoch(st);
        }
    }
    return params;
}

float evaluate_loss(const NetParams& params, const Dataset& ds, const std::vector<size_t>& indices,
                    float huber_delta) {
    if (indices.empty()) throw std::invalid_argument("evaluate_loss: no samples");
    const int factor = factor_for_input(params.spec.input_length);
    double total = 0.0;
    for (size_t idx : indices) {
        std::vector<float> in = downsample_scan(ds.scans[idx], factor);
        Tensor x({params.spec.input_length}, std::move(in));
        Tensor y = forward(params, x);
        Tensor target({2}, {ds.steering[idx], ds.speed[idx]});
        total += huber_loss(y, target, huber_delta);
    }
    return float(total / double(indices.size()));
}

}  // namespace racer
