#pragma once

#include <string>

#include <racer/checkpoint.hpp>
#include <racer/net.hpp>
#include <racer/quant.hpp>
#include <racer/sim.hpp>

namespace racer {

// Wraps a trained net as a simulator policy: downsample to the model's input
// length, run inference, map outputs to actuator commands. A non-finite
// network output turns into a safe stop.
Policy net_policy(const NetParams& params);
Policy quant_policy(const QuantNet& net);

// Loads either checkpoint kind and wraps it.
Policy policy_from_checkpoint(const std::string& path);

// Open-loop baseline that slams steering to alternate extremes every tick at
// fixed speed. Used as the wobble comparison baseline.
Policy bang_bang_policy(float speed_mps = 1.5f);

}  // namespace racer
