#include <racer/optim.hpp>

#include <cmath>

namespace racer {

Adam::Adam(const NetParams& params, AdamConfig cfg) : cfg_(cfg) {
    m_ = zero_gradients(params);
    v_ = zero_gradients(params);
}

namespace {

void adam_update(std::vector<float>& p, const std::vector<float>& g, std::vector<float>& m,
                 std::vector<float>& v, const AdamConfig& c, float bc1, float bc2) {
    for (size_t i = 0; i < p.size(); ++i) {
        m[i] = c.beta1 * m[i] + (1.0f - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0f - c.beta2) * g[i] * g[i];
        float mhat = m[i] / bc1;
        float vhat = v[i] / bc2;
        p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

}  // namespace

void Adam::step(NetParams& params, const Gradients& grads) {
    if (grads.weights.size() != params.weights.size())
        throw std::invalid_argument("adam: gradient layout mismatch");
    ++t_;
    float bc1 = 1.0f - std::pow(cfg_.beta1, float(t_));
    float bc2 = 1.0f - std::pow(cfg_.beta2, float(t_));
    for (size_t i = 0; i < params.weights.size(); ++i) {
        if (params.weights[i].empty()) continue;
        adam_update(params.weights[i].data, grads.weights[i].data, m_.weights[i].data,
                    v_.weights[i].data, cfg_, bc1, bc2);
        adam_update(params.biases[i].data, grads.biases[i].data, m_.biases[i].data,
                    v_.biases[i].data, cfg_, bc1, bc2);
    }
}

}  // namespace racer
