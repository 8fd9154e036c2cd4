#include <racer/quant.hpp>

#include <algorithm>
#include <limits>

namespace racer {

QuantParams choose_activation_qparams(float min_v, float max_v) {
    if (!std::isfinite(min_v) || !std::isfinite(max_v) || min_v > max_v)
        throw std::invalid_argument("activation qparams: bad range");
    // zero must be representable so that zero padding/ReLU cutoffs are exact
    min_v = std::min(min_v, 0.0f);
    max_v = std::max(max_v, 0.0f);
    if (max_v - min_v < 1e-3f) max_v = min_v + 1e-3f;
    QuantParams q;
    q.scale = (max_v - min_v) / 255.0f;
    long zp = -128 - std::lround(double(min_v) / q.scale);
    q.zero_point = int32_t(std::clamp(zp, -128L, 127L));
    return q;
}

float choose_weight_scale(const std::vector<float>& w) {
    float m = 0.0f;
    for (float v : w) m = std::max(m, std::abs(v));
    return std::max(m / 127.0f, 1e-8f);
}

FixedMultiplier encode_multiplier(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("requant multiplier must be positive");
    if (m >= 1.0)
        throw std::invalid_argument("requant multiplier " + std::to_string(m) + " >= 1 unsupported");
    int exp = 0;
    double frac = std::frexp(m, &exp);  // m = frac * 2^exp, frac in [0.5, 1)
    int shift = -exp;
    int64_t mant = std::llround(frac * 2147483648.0);  // frac * 2^31, in [2^30, 2^31]
    if (mant == (int64_t(1) << 31)) {
        mant >>= 1;
        --shift;
    }
    if (shift < 0) throw std::invalid_argument("requant multiplier rounds to >= 1");
    if (shift > 31) {
        // too small for the normal encoding; keep shift 31 with a short mantissa
        int extra = shift - 31;
        mant = extra >= 63 ? 0 : (mant + (int64_t(1) << (extra - 1))) >> extra;
        shift = 31;
    }
    return FixedMultiplier{int32_t(mant), int32_t(shift)};
}

int32_t requant_scale(int32_t value, FixedMultiplier mult) {
    const int sh = 31 + mult.shift;  // [31, 62]
    const int64_t prod = int64_t(value) * int64_t(mult.mantissa);
    const int64_t half = int64_t(1) << (sh - 1);
    int64_t r;
    if (prod >= 0)
        r = (prod + half) >> sh;
    else
        r = -((-prod + half) >> sh);  // round half away from zero
    return int32_t(r);
}

namespace {

struct StagePlan {
    size_t layer_idx = 0;
    bool fused_relu = false;
    size_t out_act = 0;  // index into ForwardTrace::acts of this stage's output
};

std::vector<StagePlan> plan_stages(const NetSpec& spec) {
    std::vector<StagePlan> plan;
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::ReLU || l.kind == LayerKind::Flatten) continue;
        StagePlan sp;
        sp.layer_idx = i;
        sp.out_act = i + 1;
        size_t j = i + 1;
        while (j < spec.layers.size() && spec.layers[j].kind == LayerKind::Flatten) ++j;
        if (j < spec.layers.size() && spec.layers[j].kind == LayerKind::ReLU) {
            sp.fused_relu = true;
            sp.out_act = j + 1;
        }
        plan.push_back(sp);
    }
    if (plan.empty()) throw std::invalid_argument("quantize: net has no learnable layers");
    return plan;
}

void run_stage(const QuantStage& st, const std::vector<int8_t>& x, std::vector<int8_t>& y) {
    const LayerSpec& l = st.layer;
    const int32_t zin = st.in_q.zero_point;
    const int32_t zout = st.out_q.zero_point;
    const int32_t lo = st.fused_relu ? zout : -128;

    // offset inputs once; (q - zin) spans [-255, 255]
    std::vector<int16_t> xi(x.size());
    for (size_t i = 0; i < x.size(); ++i) xi[i] = int16_t(int32_t(x[i]) - zin);

    if (l.kind == LayerKind::Conv1D) {
        if (x.size() % size_t(l.in_channels) != 0)
            throw std::invalid_argument("quant conv: input not divisible by channels");
        const int lin = int(x.size()) / l.in_channels;
        const int lout = conv1d_output_length(lin, l.kernel_size, l.stride);
        y.assign(size_t(l.out_channels) * lout, 0);
        for (int o = 0; o < l.out_channels; ++o) {
            const int8_t* wo = st.weights.data() + size_t(o) * l.in_channels * l.kernel_size;
            const int32_t bo = st.bias[size_t(o)];
            for (int p = 0; p < lout; ++p) {
                int32_t acc = bo;
                const int x0 = p * l.stride;
                for (int c = 0; c < l.in_channels; ++c) {
                    const int16_t* xr = xi.data() + size_t(c) * lin + x0;
                    const int8_t* wr = wo + size_t(c) * l.kernel_size;
                    for (int j = 0; j < l.kernel_size; ++j) acc += int32_t(xr[j]) * int32_t(wr[j]);
                }
                int32_t r = requant_scale(acc, st.requant) + zout;
                y[size_t(o) * lout + p] = int8_t(std::clamp(r, lo, int32_t(127)));
            }
        }
    } else if (l.kind == LayerKind::Dense) {
        if (int(x.size()) != l.in_features)
            throw std::invalid_argument("quant dense: input size mismatch");
        y.assign(size_t(l.out_features), 0);
        for (int o = 0; o < l.out_features; ++o) {
            const int8_t* wo = st.weights.data() + size_t(o) * l.in_features;
            int32_t acc = st.bias[size_t(o)];
            for (int i = 0; i < l.in_features; ++i) acc += int32_t(xi[size_t(i)]) * int32_t(wo[i]);
            int32_t r = requant_scale(acc, st.requant) + zout;
            y[size_t(o)] = int8_t(std::clamp(r, lo, int32_t(127)));
        }
    } else {
        throw std::invalid_argument("quant stage: unsupported layer kind");
    }
}

std::vector<int8_t> quantize_input(const QuantNet& net, const std::vector<float>& input) {
    if (int(input.size()) != net.spec.input_length)
        throw std::invalid_argument("quant forward: expected " +
                                    std::to_string(net.spec.input_length) + " inputs, got " +
                                    std::to_string(input.size()));
    if (net.stages.empty()) throw std::invalid_argument("quant forward: empty net");
    std::vector<int8_t> q(input.size());
    for (size_t i = 0; i < input.size(); ++i)
        q[i] = quantize_i8(input[i], net.input_q.scale, net.input_q.zero_point);
    return q;
}

}  // namespace

QuantNet quantize_net(const NetParams& params, const std::vector<std::vector<float>>& calibration) {
    if (calibration.empty()) throw std::invalid_argument("quantize: empty calibration set");
    const NetSpec& spec = params.spec;
    std::vector<StagePlan> plan = plan_stages(spec);

    // activation ranges over the calibration set
    const size_t n_acts = spec.layers.size() + 1;
    std::vector<float> amin(n_acts, std::numeric_limits<float>::infinity());
    std::vector<float> amax(n_acts, -std::numeric_limits<float>::infinity());
    ForwardTrace tr;
    for (const auto& sample : calibration) {
        Tensor x({int(sample.size())}, std::vector<float>(sample.begin(), sample.end()));
        forward(params, x, &tr);
        for (size_t a = 0; a < tr.acts.size(); ++a) {
            for (float v : tr.acts[a].data) {
                amin[a] = std::min(amin[a], v);
                amax[a] = std::max(amax[a], v);
            }
        }
    }

    QuantNet qn;
    qn.spec = spec;
    qn.input_q = choose_activation_qparams(amin[0], amax[0]);
    QuantParams prev = qn.input_q;
    for (const StagePlan& sp : plan) {
        const LayerSpec& l = spec.layers[sp.layer_idx];
        QuantStage st;
        st.layer = l;
        st.fused_relu = sp.fused_relu;
        st.in_q = prev;
        st.out_q = choose_activation_qparams(amin[sp.out_act], amax[sp.out_act]);

        const Tensor& w = params.weights[sp.layer_idx];
        const Tensor& b = params.biases[sp.layer_idx];
        st.weight_scale = choose_weight_scale(w.data);
        st.weights.resize(w.data.size());
        for (size_t k = 0; k < w.data.size(); ++k)
            st.weights[k] = quantize_i8(w.data[k], st.weight_scale, 0, -127, 127);

        const double bias_scale = double(st.in_q.scale) * double(st.weight_scale);
        st.bias.resize(b.data.size());
        int64_t max_bias = 0;
        for (size_t k = 0; k < b.data.size(); ++k) {
            double q = double(b.data[k]) / bias_scale;
            q = std::clamp(q, -2147483648.0, 2147483647.0);
            st.bias[k] = int32_t(std::llround(q));
            max_bias = std::max(max_bias, int64_t(std::abs(int64_t(st.bias[k]))));
        }
        st.requant = encode_multiplier(bias_scale / double(st.out_q.scale));

        // int32 accumulator headroom: N terms of at most 255*127 plus the bias
        const int64_t n_acc =
            l.kind == LayerKind::Conv1D ? int64_t(l.in_channels) * l.kernel_size : l.in_features;
        if (n_acc * 255 * 127 + max_bias >= (int64_t(1) << 31))
            throw std::runtime_error("quantize: layer too wide for an int32 accumulator");

        prev = st.out_q;
        qn.stages.push_back(std::move(st));
    }
    return qn;
}

std::vector<float> quant_forward(const QuantNet& net, const std::vector<float>& input) {
    std::vector<int8_t> x = quantize_input(net, input);
    std::vector<int8_t> y;
    for (const QuantStage& st : net.stages) {
        run_stage(st, x, y);
        x.swap(y);
    }
    const QuantParams& oq = net.stages.back().out_q;
    std::vector<float> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = dequantize_i8(x[i], oq.scale, oq.zero_point);
    return out;
}

std::vector<std::vector<int8_t>> quant_forward_trace(const QuantNet& net,
                                                     const std::vector<float>& input) {
    std::vector<int8_t> x = quantize_input(net, input);
    std::vector<std::vector<int8_t>> acts;
    acts.push_back(x);
    std::vector<int8_t> y;
    for (const QuantStage& st : net.stages) {
        run_stage(st, x, y);
        x.swap(y);
        acts.push_back(x);
    }
    return acts;
}

}  // namespace racer
