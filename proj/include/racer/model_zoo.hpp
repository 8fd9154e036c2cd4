#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <racer/net.hpp>

namespace racer {

// The two model families, each at three input sizes. The size suffix fixes the
// scan downsample factor: L = 1081 beams (factor 1), M = 541 (2), S = 271 (4).
//
//   tinylidarnet : 5 conv stages then a 4-layer head, 2 outputs
//   mlp256       : flatten, two 256-unit hidden layers, 2 outputs
//
// Names accepted anywhere a model is named: tinylidarnet-l/m/s, mlp256-l/m/s.

struct ModelInfo {
    std::string name;
    int input_length = 0;
    int downsample_factor = 0;
};

const std::vector<ModelInfo>& model_catalog();

bool is_known_model(const std::string& name);

// Throws std::invalid_argument on unknown names.
NetSpec make_model(const std::string& name);

int model_input_length(const std::string& name);
int model_downsample_factor(const std::string& name);

// Parameter and multiply-accumulate counts. MACs count weight multiplies only
// (conv: L_out * C_out * k * C_in, dense: in * out); bias adds excluded.
int64_t count_params(const NetSpec& spec);
int64_t count_macs(const NetSpec& spec);

}  // namespace racer
