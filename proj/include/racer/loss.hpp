#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <racer/tensor.hpp>

namespace racer {

// Huber loss summed over output components. For each residual r = pred - target:
//   |r| <= delta : 0.5 r^2
//   otherwise    : delta (|r| - 0.5 delta)
// grad w.r.t. pred is r clamped to [-delta, delta].
template <typename T>
T huber_loss(const TensorT<T>& pred, const TensorT<T>& target, T delta, TensorT<T>* grad = nullptr) {
    if (pred.numel() != target.numel())
        throw std::invalid_argument("huber_loss: pred/target size mismatch");
    if (!(delta > T(0))) throw std::invalid_argument("huber_loss: delta must be positive");
    if (grad && grad->numel() != pred.numel()) *grad = TensorT<T>(pred.shape);
    T total = 0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        if (!std::isfinite(double(pred.data[i])) || !std::isfinite(double(target.data[i])))
            throw std::invalid_argument("huber_loss: non-finite input");
        T r = pred.data[i] - target.data[i];
        T a = std::abs(r);
        if (a <= delta)
            total += T(0.5) * r * r;
        else
            total += delta * (a - T(0.5) * delta);
        if (grad) grad->data[i] = std::clamp(r, -delta, delta);
    }
    return total;
}

}  // namespace racer
