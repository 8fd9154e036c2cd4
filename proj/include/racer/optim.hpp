#pragma once

#include <cstdint>

#include <racer/net.hpp>

namespace racer {

struct AdamConfig {
    float lr = 5e-5f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

// Adam with bias correction. Moments are kept in float, matching the params.
class Adam {
public:
    Adam(const NetParams& params, AdamConfig cfg);

    // One update from accumulated gradients (already averaged over the batch).
    void step(NetParams& params, const Gradients& grads);

    int64_t steps() const { return t_; }

private:
    AdamConfig cfg_;
    int64_t t_ = 0;
    Gradients m_;  // first moment, same layout as gradients
    Gradients v_;  // second moment
};

}  // namespace racer
