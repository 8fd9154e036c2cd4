#pragma once

#include <string>

#include <racer/net.hpp>
#include <racer/quant.hpp>

namespace racer {

// Checkpoint container. Little-endian binary, magic "RACERNET", format
// version 1. Holds either float32 params or a quantized net; loaders throw
// std::runtime_error with the path and reason on anything malformed.

enum class CheckpointKind : uint32_t { Float32 = 0, Int8 = 1 };

CheckpointKind peek_checkpoint_kind(const std::string& path);

void save_checkpoint(const NetParams& params, const std::string& path);
NetParams load_checkpoint(const std::string& path);

void save_quant_checkpoint(const QuantNet& net, const std::string& path);
QuantNet load_quant_checkpoint(const std::string& path);

}  // namespace racer
