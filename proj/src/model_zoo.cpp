#include <racer/model_zoo.hpp>

#include <stdexcept>

namespace racer {

namespace {

// Input lengths follow from downsampling the 1081-beam scan by 1/2/4 keeping
// every f-th beam: ceil(1081 / f).
const std::vector<ModelInfo> kCatalog = {
    {"tinylidarnet-l", 1081, 1}, {"tinylidarnet-m", 541, 2}, {"tinylidarnet-s", 271, 4},
    {"mlp256-l", 1081, 1},       {"mlp256-m", 541, 2},       {"mlp256-s", 271, 4},
};

const ModelInfo& find_model(const std::string& name) {
    for (const auto& m : kCatalog)
        if (m.name == name) return m;
    throw std::invalid_argument("unknown model '" + name +
                                "' (expected tinylidarnet-{l,m,s} or mlp256-{l,m,s})");
}

NetSpec tinylidarnet(const std::string& name, int input_length) {
    NetSpec s;
    s.name = name;
    s.input_length = input_length;
    auto& l = s.layers;
    l.push_back(LayerSpec::conv1d(1, 24, 10, 4));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::conv1d(24, 36, 8, 4));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::conv1d(36, 48, 4, 2));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::conv1d(48, 64, 3, 1));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::conv1d(64, 64, 3, 1));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::flatten());
    int lout = input_length;
    lout = conv1d_output_length(lout, 10, 4);
    lout = conv1d_output_length(lout, 8, 4);
    lout = conv1d_output_length(lout, 4, 2);
    lout = conv1d_output_length(lout, 3, 1);
    lout = conv1d_output_length(lout, 3, 1);
    l.push_back(LayerSpec::dense(64 * lout, 100));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::dense(100, 50));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::dense(50, 10));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::dense(10, 2));
    return s;
}

NetSpec mlp256(const std::string& name, int input_length) {
    NetSpec s;
    s.name = name;
    s.input_length = input_length;
    auto& l = s.layers;
    l.push_back(LayerSpec::flatten());
    l.push_back(LayerSpec::dense(input_length, 256));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::dense(256, 256));
    l.push_back(LayerSpec::relu());
    l.push_back(LayerSpec::dense(256, 2));
    return s;
}

}  // namespace

const std::vector<ModelInfo>& model_catalog() { return kCatalog; }

bool is_known_model(const std::string& name) {
    for (const auto& m : kCatalog)
        if (m.name == name) return true;
    return false;
}

NetSpec make_model(const std::string& name) {
    const ModelInfo& info = find_model(name);
    if (name.rfind("tinylidarnet", 0) == 0) return tinylidarnet(name, info.input_length);
    return mlp256(name, info.input_length);
}

int model_input_length(const std::string& name) { return find_model(name).input_length; }

int model_downsample_factor(const std::string& name) { return find_model(name).downsample_factor; }

int64_t count_params(const NetSpec& spec) {
    int64_t n = 0;
    for (const auto& l : spec.layers) {
        if (l.kind == LayerKind::Conv1D)
            n += int64_t(l.out_channels) * l.in_channels * l.kernel_size + l.out_channels;
        else if (l.kind == LayerKind::Dense)
            n += int64_t(l.out_features) * l.in_features + l.out_features;
    }
    return n;
}

int64_t count_macs(const NetSpec& spec) {
    auto shapes = activation_shapes(spec);
    int64_t n = 0;
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::Conv1D) {
            int lout = shapes[i + 1][1];
            n += int64_t(lout) * l.out_channels * l.in_channels * l.kernel_size;
        } else if (l.kind == LayerKind::Dense) {
            n += int64_t(l.out_features) * l.in_features;
        }
    }
    return n;
}

}  // namespace racer
