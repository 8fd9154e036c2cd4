#include <racer/policy.hpp>

#include <memory>
#include <stdexcept>

#include <racer/scan.hpp>

namespace racer {

namespace {

int factor_for_input(int input_length) {
    switch (input_length) {
        case 1081: return 1;
        case 541: return 2;
        case 271: return 4;
    }
    throw std::invalid_argument("policy: unsupported net input length " +
                                std::to_string(input_length));
}

ActionPair command_to_action(const Command& c) {
    ActionPair a;
    a.steering_rad = c.steering_rad;
    a.speed_mps = c.speed_mps;
    return a;
}

}  // namespace

Policy net_policy(const NetParams& params) {
    const int factor = factor_for_input(params.spec.input_length);
    auto shared = std::make_shared<NetParams>(params);
    return [shared, factor](const std::vector<float>& scan, const VehicleState&) -> ActionPair {
        std::vector<float> in = downsample_scan(scan, factor);
        Tensor x({shared->spec.input_length}, std::move(in));
        Tensor y = forward(*shared, x);
        return command_to_action(map_output(y.data[0], y.data[1]));
    };
}

Policy quant_policy(const QuantNet& net) {
    const int factor = factor_for_input(net.spec.input_length);
    auto shared = std::make_shared<QuantNet>(net);
    return [shared, factor](const std::vector<float>& scan, const VehicleState&) -> ActionPair {
        std::vector<float> in = downsample_scan(scan, factor);
        std::vector<float> y = quant_forward(*shared, in);
        return command_to_action(map_output(y[0], y[1]));
    };
}

Policy policy_from_checkpoint(const std::string& path) {
    if (peek_checkpoint_kind(path) == CheckpointKind::Int8)
        return quant_policy(load_quant_checkpoint(path));
    return net_policy(load_checkpoint(path));
}

Policy bang_bang_policy(float speed_mps) {
    int tick = 0;
    return [tick, speed_mps](const std::vector<float>&, const VehicleState&) mutable -> ActionPair {
        ActionPair a;
        a.steering_rad = (tick++ % 2 == 0) ? kSteerLimitRad : -kSteerLimitRad;
        a.speed_mps = speed_mps;
        return a;
    };
}

}  // namespace racer
