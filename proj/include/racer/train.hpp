#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <racer/dataset.hpp>
#include <racer/net.hpp>
#include <racer/optim.hpp>

namespace racer {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    AdamConfig adam;        // lr defaults to 5e-5
    uint64_t seed = 0;
    float huber_delta = 1.0f;
};

struct EpochStats {
    int epoch = 0;
    float train_loss = 0.0f;  // mean per-sample Huber over the epoch
    float val_loss = 0.0f;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Behavior cloning: 85/15 split of the dataset (seeded shuffle), minibatch
// Adam on Huber loss. Dataset scans are full resolution; each sample is
// downsampled to the model's input length. Returns trained params;
// deterministic in (spec, dataset, cfg).
NetParams train_model(const NetSpec& spec, const Dataset& ds, const TrainConfig& cfg,
                      const EpochCallback& on_epoch = nullptr);

// Mean per-sample Huber loss of params over the given sample indices.
float evaluate_loss(const NetParams& params, const Dataset& ds,
                    const std::vector<size_t>& indices, float huber_delta = 1.0f);

}  // namespace racer
