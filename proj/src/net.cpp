#include <racer/net.hpp>

#include <cmath>

namespace racer {

LayerSpec LayerSpec::conv1d(int in_ch, int out_ch, int k, int stride) {
    if (in_ch < 1 || out_ch < 1 || k < 1 || stride < 1)
        throw std::invalid_argument("conv1d: dimensions must be positive");
    LayerSpec l;
    l.kind = LayerKind::Conv1D;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.kernel_size = k;
    l.stride = stride;
    return l;
}

LayerSpec LayerSpec::dense(int in, int out) {
    if (in < 1 || out < 1) throw std::invalid_argument("dense: dimensions must be positive");
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.in_features = in;
    l.out_features = out;
    return l;
}

std::string LayerSpec::describe() const {
    switch (kind) {
        case LayerKind::Conv1D:
            return "conv1d(" + std::to_string(in_channels) + "->" + std::to_string(out_channels) +
                   ", k" + std::to_string(kernel_size) + ", s" + std::to_string(stride) + ")";
        case LayerKind::Dense:
            return "dense(" + std::to_string(in_features) + "->" + std::to_string(out_features) + ")";
        case LayerKind::ReLU:
            return "relu";
        case LayerKind::Flatten:
            return "flatten";
    }
    return "unknown";
}

int conv1d_output_length(int len, int kernel, int stride) {
    if (kernel < 1 || stride < 1) throw std::invalid_argument("conv1d: bad kernel/stride");
    if (len < kernel)
        throw std::invalid_argument("conv1d: input length " + std::to_string(len) +
                                    " shorter than kernel " + std::to_string(kernel));
    return (len - kernel) / stride + 1;
}

std::vector<int> layer_output_shape(const LayerSpec& layer, const std::vector<int>& in,
                                    const std::string& layer_name) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument(layer_name + " " + layer.describe() + ": " + why +
                                    " (input shape " + shape_str(in) + ")");
    };
    switch (layer.kind) {
        case LayerKind::Conv1D: {
            if (in.size() != 2) fail("expects a {channels, length} input");
            if (in[0] != layer.in_channels) fail("channel mismatch");
            int lout = conv1d_output_length(in[1], layer.kernel_size, layer.stride);
            return {layer.out_channels, lout};
        }
        case LayerKind::Dense: {
            long long n = TensorT<float>::numel_of(in);
            if (n != layer.in_features) fail("feature count mismatch");
            return {layer.out_features};
        }
        case LayerKind::ReLU:
            return in;
        case LayerKind::Flatten:
            return {int(TensorT<float>::numel_of(in))};
    }
    fail("unknown layer kind");
    return {};
}

std::vector<std::vector<int>> activation_shapes(const NetSpec& spec) {
    if (spec.input_length < 1) throw std::invalid_argument("net '" + spec.name + "': bad input length");
    std::vector<std::vector<int>> shapes;
    shapes.push_back({1, spec.input_length});
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        std::string name = "net '" + spec.name + "' layer " + std::to_string(i);
        shapes.push_back(layer_output_shape(spec.layers[i], shapes.back(), name));
    }
    return shapes;
}

template <typename T>
NetParamsT<T> zero_params(const NetSpec& spec) {
    activation_shapes(spec);  // validates the whole chain
    NetParamsT<T> p;
    p.spec = spec;
    for (const auto& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::Conv1D:
                p.weights.emplace_back(std::vector<int>{l.out_channels, l.in_channels, l.kernel_size});
                p.biases.emplace_back(std::vector<int>{l.out_channels});
                break;
            case LayerKind::Dense:
                p.weights.emplace_back(std::vector<int>{l.out_features, l.in_features});
                p.biases.emplace_back(std::vector<int>{l.out_features});
                break;
            default:
                p.weights.emplace_back();
                p.biases.emplace_back();
        }
    }
    return p;
}

NetParams init_params(const NetSpec& spec, uint64_t seed) {
    NetParams p = zero_params<float>(spec);
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (!l.learnable()) continue;
        bool relu_next = false;
        for (size_t j = i + 1; j < spec.layers.size(); ++j) {
            if (spec.layers[j].kind == LayerKind::Flatten) continue;
            relu_next = spec.layers[j].kind == LayerKind::ReLU;
            break;
        }
        int fan_in = l.kind == LayerKind::Conv1D ? l.in_channels * l.kernel_size : l.in_features;
        int fan_out = l.kind == LayerKind::Conv1D ? l.out_channels * l.kernel_size : l.out_features;
        // He-uniform ahead of a ReLU, Xavier-uniform for linear outputs.
        float limit = relu_next ? std::sqrt(6.0f / float(fan_in))
                                : std::sqrt(6.0f / float(fan_in + fan_out));
        Pcg32 rng(mix_seed(seed, 0x1000 + i));
        for (auto& w : p.weights[i].data) w = rng.uniform(-limit, limit);
    }
    return p;
}

template <typename T>
GradientsT<T> zero_gradients(const NetParamsT<T>& params) {
    GradientsT<T> g;
    for (const auto& w : params.weights)
        g.weights.push_back(w.empty() ? TensorT<T>() : TensorT<T>(w.shape));
    for (const auto& b : params.biases)
        g.biases.push_back(b.empty() ? TensorT<T>() : TensorT<T>(b.shape));
    return g;
}

namespace {

std::string layer_name(const NetSpec& spec, size_t i) {
    return "net '" + spec.name + "' layer " + std::to_string(i);
}

// Patch matrix: row p holds the input window for output position p, channel
// blocks of kernel_size values, matching the {out, in, k} weight layout.
template <typename T>
void im2col(const LayerSpec& l, const TensorT<T>& x, std::vector<T>& cols, int& lout) {
    int lin = x.shape[1];
    lout = conv1d_output_length(lin, l.kernel_size, l.stride);
    int patch = l.in_channels * l.kernel_size;
    cols.resize(size_t(lout) * patch);
    for (int p = 0; p < lout; ++p) {
        T* cp = cols.data() + size_t(p) * patch;
        const int x0 = p * l.stride;
        for (int c = 0; c < l.in_channels; ++c) {
            const T* xr = x.data.data() + size_t(c) * lin + x0;
            T* dst = cp + size_t(c) * l.kernel_size;
            for (int j = 0; j < l.kernel_size; ++j) dst[j] = xr[j];
        }
    }
}

template <typename T>
void check_params(const NetParamsT<T>& params) {
    size_t n = params.spec.layers.size();
    if (params.weights.size() != n || params.biases.size() != n)
        throw std::invalid_argument("net '" + params.spec.name + "': params not aligned with layers");
}

}  // namespace

template <typename T>
TensorT<T> forward(const NetParamsT<T>& params, const TensorT<T>& input, ForwardTraceT<T>* trace) {
    const NetSpec& spec = params.spec;
    check_params(params);
    if (input.numel() != spec.input_length)
        throw std::invalid_argument("net '" + spec.name + "': expected " +
                                    std::to_string(spec.input_length) + " inputs, got " +
                                    std::to_string(input.numel()));
    TensorT<T> x({1, spec.input_length}, input.data);
    if (trace) {
        trace->acts.clear();
        trace->acts.reserve(spec.layers.size() + 1);
        trace->acts.push_back(x);
    }
    std::vector<T> cols;
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        TensorT<T> y;
        switch (l.kind) {
            case LayerKind::Conv1D: {
                if (x.shape.size() != 2 || x.shape[0] != l.in_channels)
                    throw std::invalid_argument(layer_name(spec, i) + " " + l.describe() +
                                                ": input shape " + shape_str(x.shape));
                int lout = 0;
                im2col(l, x, cols, lout);
                const int patch = l.in_channels * l.kernel_size;
                y = TensorT<T>({l.out_channels, lout});
                const TensorT<T>& w = params.weights[i];
                const TensorT<T>& b = params.biases[i];
                for (int o = 0; o < l.out_channels; ++o) {
                    const T* wo = w.data.data() + size_t(o) * patch;
                    T* yo = y.data.data() + size_t(o) * lout;
                    const T bo = b.data[o];
                    for (int p = 0; p < lout; ++p)
                        yo[p] = detail::dot(wo, cols.data() + size_t(p) * patch, patch) + bo;
                }
                break;
            }
            case LayerKind::Dense: {
                if (x.numel() != l.in_features)
                    throw std::invalid_argument(layer_name(spec, i) + " " + l.describe() +
                                                ": input shape " + shape_str(x.shape));
                y = TensorT<T>({l.out_features});
                const TensorT<T>& w = params.weights[i];
                for (int o = 0; o < l.out_features; ++o)
                    y.data[o] = detail::dot(w.data.data() + size_t(o) * l.in_features, x.data.data(),
                                            l.in_features) +
                                params.biases[i].data[o];
                break;
            }
            case LayerKind::ReLU: {
                y = x;
                for (auto& v : y.data) v = v > T(0) ? v : T(0);
                break;
            }
            case LayerKind::Flatten: {
                y = x;
                y.shape = {int(x.numel())};
                break;
            }
        }
        x = std::move(y);
        if (trace) trace->acts.push_back(x);
    }
    return x;
}

template <typename T>
void backward_into(const NetParamsT<T>& params, const ForwardTraceT<T>& trace,
                   const TensorT<T>& loss_grad, GradientsT<T>& grads) {
    const NetSpec& spec = params.spec;
    check_params(params);
    if (trace.acts.size() != spec.layers.size() + 1)
        throw std::invalid_argument("backward: trace does not match the net");
    if (grads.weights.size() != spec.layers.size() || grads.biases.size() != spec.layers.size())
        throw std::invalid_argument("backward: gradient buffers not aligned with layers");
    if (loss_grad.numel() != trace.acts.back().numel())
        throw std::invalid_argument("backward: loss gradient shape mismatch");

    TensorT<T> dy = loss_grad;
    dy.shape = trace.acts.back().shape;
    std::vector<T> cols, dcols;
    for (size_t ri = spec.layers.size(); ri-- > 0;) {
        const LayerSpec& l = spec.layers[ri];
        const TensorT<T>& x = trace.acts[ri];
        const bool need_dx = ri > 0;
        TensorT<T> dx;
        switch (l.kind) {
            case LayerKind::Conv1D: {
                int lout = 0;
                im2col(l, x, cols, lout);
                const int patch = l.in_channels * l.kernel_size;
                const int lin = x.shape[1];
                TensorT<T>& dw = grads.weights[ri];
                TensorT<T>& db = grads.biases[ri];
                for (int o = 0; o < l.out_channels; ++o) {
                    const T* dyo = dy.data.data() + size_t(o) * lout;
                    T* dwo = dw.data.data() + size_t(o) * patch;
                    T bsum = 0;
                    for (int p = 0; p < lout; ++p) {
                        bsum += dyo[p];
                        detail::axpy(dwo, dyo[p], cols.data() + size_t(p) * patch, patch);
                    }
                    db.data[o] += bsum;
                }
                if (need_dx) {
                    dcols.assign(size_t(lout) * patch, T(0));
                    const TensorT<T>& w = params.weights[ri];
                    for (int o = 0; o < l.out_channels; ++o) {
                        const T* dyo = dy.data.data() + size_t(o) * lout;
                        const T* wo = w.data.data() + size_t(o) * patch;
                        for (int p = 0; p < lout; ++p)
                            detail::axpy(dcols.data() + size_t(p) * patch, dyo[p], wo, patch);
                    }
                    dx = TensorT<T>(x.shape);
                    for (int p = 0; p < lout; ++p) {
                        const T* dcp = dcols.data() + size_t(p) * patch;
                        const int x0 = p * l.stride;
                        for (int c = 0; c < l.in_channels; ++c) {
                            T* dst = dx.data.data() + size_t(c) * lin + x0;
                            const T* src = dcp + size_t(c) * l.kernel_size;
                            for (int j = 0; j < l.kernel_size; ++j) dst[j] += src[j];
                        }
                    }
                }
                break;
            }
            case LayerKind::Dense: {
                TensorT<T>& dw = grads.weights[ri];
                TensorT<T>& db = grads.biases[ri];
                for (int o = 0; o < l.out_features; ++o) {
                    db.data[o] += dy.data[o];
                    detail::axpy(dw.data.data() + size_t(o) * l.in_features, dy.data[o],
                                 x.data.data(), l.in_features);
                }
                if (need_dx) {
                    dx = TensorT<T>(x.shape);
                    const TensorT<T>& w = params.weights[ri];
                    for (int o = 0; o < l.out_features; ++o)
                        detail::axpy(dx.data.data(), dy.data[o],
                                     w.data.data() + size_t(o) * l.in_features, l.in_features);
                }
                break;
            }
            case LayerKind::ReLU: {
                if (need_dx) {
                    dx = TensorT<T>(x.shape);
                    for (size_t j = 0; j < x.data.size(); ++j)
                        dx.data[j] = x.data[j] > T(0) ? dy.data[j] : T(0);
                }
                break;
            }
            case LayerKind::Flatten: {
                if (need_dx) {
                    dx = dy;
                    dx.shape = x.shape;
                }
                break;
            }
        }
        if (!need_dx) break;
        dy = std::move(dx);
    }
}

template NetParamsT<float> zero_params<float>(const NetSpec&);
template NetParamsT<double> zero_params<double>(const NetSpec&);
template GradientsT<float> zero_gradients<float>(const NetParamsT<float>&);
template GradientsT<double> zero_gradients<double>(const NetParamsT<double>&);
template TensorT<float> forward<float>(const NetParamsT<float>&, const TensorT<float>&,
                                       ForwardTraceT<float>*);
template TensorT<double> forward<double>(const NetParamsT<double>&, const TensorT<double>&,
                                         ForwardTraceT<double>*);
template void backward_into<float>(const NetParamsT<float>&, const ForwardTraceT<float>&,
                                   const TensorT<float>&, GradientsT<float>&);
template void backward_into<double>(const NetParamsT<double>&, const ForwardTraceT<double>&,
                                    const TensorT<double>&, GradientsT<double>&);

}  // namespace racer
