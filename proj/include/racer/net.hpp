#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <racer/rng.hpp>
#include <racer/tensor.hpp>

namespace racer {

enum class LayerKind : uint32_t { Conv1D = 0, Dense = 1, ReLU = 2, Flatten = 3 };

struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    // Conv1D (valid convolution, no padding)
    int in_channels = 0;
    int out_channels = 0;
    int kernel_size = 0;
    int stride = 1;
    // Dense
    int in_features = 0;
    int out_features = 0;

    static LayerSpec conv1d(int in_ch, int out_ch, int k, int stride);
    static LayerSpec dense(int in, int out);
    static LayerSpec relu() { return LayerSpec{LayerKind::ReLU}; }
    static LayerSpec flatten() { return LayerSpec{LayerKind::Flatten}; }

    bool learnable() const { return kind == LayerKind::Conv1D || kind == LayerKind::Dense; }
    std::string describe() const;
};

struct NetSpec {
    std::string name;
    int input_length = 0;
    std::vector<LayerSpec> layers;
};

// floor((len - kernel) / stride) + 1; throws unless len >= kernel >= 1, stride >= 1
int conv1d_output_length(int len, int kernel, int stride);

// Shape of a layer's output given its input shape; throws on mismatch with a
// message naming the layer.
std::vector<int> layer_output_shape(const LayerSpec& layer, const std::vector<int>& in,
                                    const std::string& layer_name);

// Activation shapes for the whole net: entry 0 is the input shape {1, L},
// entry i+1 the output of layer i.
std::vector<std::vector<int>> activation_shapes(const NetSpec& spec);

template <typename T>
struct NetParamsT {
    NetSpec spec;
    // Aligned with spec.layers; empty tensors for non-learnable layers.
    std::vector<TensorT<T>> weights;
    std::vector<TensorT<T>> biases;
};
using NetParams = NetParamsT<float>;

template <typename T>
struct GradientsT {
    std::vector<TensorT<T>> weights;
    std::vector<TensorT<T>> biases;

    void zero() {
        for (auto& t : weights) t.fill(T(0));
        for (auto& t : biases) t.fill(T(0));
    }
};
using Gradients = GradientsT<float>;

// Cached activations of one forward pass; required by backward.
template <typename T>
struct ForwardTraceT {
    std::vector<TensorT<T>> acts;  // acts[0] = input, acts[i+1] = output of layer i
};
using ForwardTrace = ForwardTraceT<float>;

// Parameter tensors shaped from the spec, zero-filled.
template <typename T>
NetParamsT<T> zero_params(const NetSpec& spec);

// He-uniform for layers feeding a ReLU, Xavier-uniform for linear outputs,
// biases zero. Deterministic in the seed.
NetParams init_params(const NetSpec& spec, uint64_t seed);

template <typename T>
GradientsT<T> zero_gradients(const NetParamsT<T>& params);

template <typename To, typename From>
NetParamsT<To> params_cast(const NetParamsT<From>& p) {
    NetParamsT<To> out;
    out.spec = p.spec;
    for (const auto& w : p.weights) out.weights.push_back(tensor_cast<To>(w));
    for (const auto& b : p.biases) out.biases.push_back(tensor_cast<To>(b));
    return out;
}

// Runs the net on one input (shape {L} or {1, L}). Pure in (params, input).
// When trace is given, every activation is cached for backward.
template <typename T>
TensorT<T> forward(const NetParamsT<T>& params, const TensorT<T>& input,
                   ForwardTraceT<T>* trace = nullptr);

// Accumulates d(loss)/d(param) into grads given the loss gradient w.r.t. the
// net output. Throws if the trace does not match a forward pass of params.
template <typename T>
void backward_into(const NetParamsT<T>& params, const ForwardTraceT<T>& trace,
                   const TensorT<T>& loss_grad, GradientsT<T>& grads);

template <typename T>
GradientsT<T> backward(const NetParamsT<T>& params, const ForwardTraceT<T>& trace,
                       const TensorT<T>& loss_grad) {
    GradientsT<T> grads = zero_gradients(params);
    backward_into(params, trace, loss_grad, grads);
    return grads;
}

namespace detail {

// Dot product with a fixed 8-lane accumulation order. The order is defined by
// the source, so results are reproducible at any optimization level while the
// lanes still map onto vector registers.
template <typename T>
inline T dot(const T* a, const T* b, int n) {
    T acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
    T acc4 = 0, acc5 = 0, acc6 = 0, acc7 = 0;
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 += a[i + 0] * b[i + 0];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
        acc4 += a[i + 4] * b[i + 4];
        acc5 += a[i + 5] * b[i + 5];
        acc6 += a[i + 6] * b[i + 6];
        acc7 += a[i + 7] * b[i + 7];
    }
    T tail = 0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return (((acc0 + acc1) + (acc2 + acc3)) + ((acc4 + acc5) + (acc6 + acc7))) + tail;
}

template <typename T>
inline void axpy(T* y, T s, const T* x, int n) {
    for (int i = 0; i < n; ++i) y[i] += s * x[i];
}

}  // namespace detail

extern template TensorT<float> forward<float>(const NetParamsT<float>&, const TensorT<float>&,
                                              ForwardTraceT<float>*);
extern template TensorT<double> forward<double>(const NetParamsT<double>&, const TensorT<double>&,
                                                ForwardTraceT<double>*);
extern template void backward_into<float>(const NetParamsT<float>&, const ForwardTraceT<float>&,
                                          const TensorT<float>&, GradientsT<float>&);
extern template void backward_into<double>(const NetParamsT<double>&, const ForwardTraceT<double>&,
                                           const TensorT<double>&, GradientsT<double>&);
extern template NetParamsT<float> zero_params<float>(const NetSpec&);
extern template NetParamsT<double> zero_params<double>(const NetSpec&);
extern template GradientsT<float> zero_gradients<float>(const NetParamsT<float>&);
extern template GradientsT<double> zero_gradients<double>(const NetParamsT<double>&);

}  // namespace racer
