#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <racer/net.hpp>

namespace racer {

// Post-training int8 quantization.
//
// Activations: asymmetric, uint8 affine stored as int8 with zero point
//   (real = scale * (q - zero_point), q in [-128, 127]).
// Weights: symmetric per-tensor, q in [-127, 127], zero point 0.
// Biases: int32 at scale in_scale * weight_scale.
// The requantization multiplier M = in_scale * w_scale / out_scale is encoded
// as a fixed-point mantissa in [2^30, 2^31) with a right shift.

struct QuantParams {
    float scale = 1.0f;
    int32_t zero_point = 0;  // 0 for weights
};

// Activation range -> affine params. The range is nudged to include zero and
// degenerate ranges are widened so the scale stays usable.
QuantParams choose_activation_qparams(float min_v, float max_v);

// Symmetric weight scale: max|w| / 127, floored at 1e-8.
float choose_weight_scale(const std::vector<float>& w);

inline int8_t quantize_i8(float v, float scale, int32_t zero_point, int lo = -128, int hi = 127) {
    float q = v / scale + float(zero_point);
    int32_t r = int32_t(std::lround(q));
    if (r < lo) r = lo;
    if (r > hi) r = hi;
    return int8_t(r);
}

inline float dequantize_i8(int8_t q, float scale, int32_t zero_point) {
    return scale * (float(q) - float(zero_point));
}

// Fixed-point encoding of a positive multiplier M < 1:
//   M ~= mantissa * 2^-31 * 2^-shift, mantissa in [2^30, 2^31), shift in [0, 31].
// Multipliers too small for shift 31 fall back to a denormal mantissa below
// 2^30. Throws on M >= 1.
struct FixedMultiplier {
    int32_t mantissa = 0;
    int32_t shift = 0;  // extra right shift after the 31-bit one
};
FixedMultiplier encode_multiplier(double m);

// (value * mantissa) >> (31 + shift), rounding half away from zero.
int32_t requant_scale(int32_t value, FixedMultiplier mult);

// One quantized learnable stage (a conv or dense layer with its optional
// fused ReLU).
struct QuantStage {
    LayerSpec layer;
    bool fused_relu = false;
    std::vector<int8_t> weights;  // same layout as the float tensor
    std::vector<int32_t> bias;
    float weight_scale = 1.0f;
    QuantParams in_q;
    QuantParams out_q;
    FixedMultiplier requant;
};

struct QuantNet {
    NetSpec spec;  // original float spec (for shapes and naming)
    QuantParams input_q;
    std::vector<QuantStage> stages;
};

// Calibration: range of every activation over the calibration set, then weight
// quantization. Calibration scans must already be preprocessed/downsampled.
QuantNet quantize_net(const NetParams& params, const std::vector<std::vector<float>>& calibration);

// Integer-only inference. Float touches only the input quantize and the output
// dequantize. Returns the dequantized two outputs.
std::vector<float> quant_forward(const QuantNet& net, const std::vector<float>& input);

// Intermediate int8 activations for oracle tests: entry 0 is the quantized
// input, entry i+1 the output of stage i.
std::vector<std::vector<int8_t>> quant_forward_trace(const QuantNet& net,
                                                     const std::vector<float>& input);

}  // namespace racer
