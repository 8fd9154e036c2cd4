#include <racer/checkpoint.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace racer {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[8] = {'R', 'A', 'C', 'E', 'R', 'N', 'E', 'T'};
constexpr uint32_t kVersion = 1;

struct Writer {
    std::ofstream f;
    std::string path;
    explicit Writer(const std::string& p) : f(p, std::ios::binary), path(p) {
        if (!f) throw std::runtime_error("cannot write " + p);
    }
    void bytes(const void* p, size_t n) { f.write(static_cast<const char*>(p), std::streamsize(n)); }
    void u8(uint8_t v) { bytes(&v, 1); }
    void u32(uint32_t v) { bytes(&v, 4); }
    void u64(uint64_t v) { bytes(&v, 8); }
    void i32(int32_t v) { bytes(&v, 4); }
    void f32(float v) { bytes(&v, 4); }
    void str(const std::string& s) {
        u32(uint32_t(s.size()));
        bytes(s.data(), s.size());
    }
    void close() {
        f.close();
        if (!f) throw std::runtime_error("write failed: " + path);
    }
};

struct Reader {
    std::ifstream f;
    std::string path;
    explicit Reader(const std::string& p) : f(p, std::ios::binary), path(p) {
        if (!f) throw std::runtime_error("cannot open " + p);
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw std::runtime_error(path + ": " + why);
    }
    void bytes(void* p, size_t n) {
        f.read(static_cast<char*>(p), std::streamsize(n));
        if (size_t(f.gcount()) != n) fail("truncated checkpoint");
    }
    uint8_t u8() { uint8_t v; bytes(&v, 1); return v; }
    uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
    uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
    int32_t i32() { int32_t v; bytes(&v, 4); return v; }
    float f32() { float v; bytes(&v, 4); return v; }
    std::string str() {
        uint32_t n = u32();
        if (n > (1u << 20)) fail("absurd string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
};

void write_spec(Writer& w, const NetSpec& spec) {
    w.str(spec.name);
    w.i32(spec.input_length);
    w.u32(uint32_t(spec.layers.size()));
    for (const auto& l : spec.layers) {
        w.u32(uint32_t(l.kind));
        w.i32(l.in_channels);
        w.i32(l.out_channels);
        w.i32(l.kernel_size);
        w.i32(l.stride);
        w.i32(l.in_features);
        w.i32(l.out_features);
    }
}

NetSpec read_spec(Reader& r) {
    NetSpec spec;
    spec.name = r.str();
    spec.input_length = r.i32();
    uint32_t n = r.u32();
    if (n > 4096) r.fail("absurd layer count");
    for (uint32_t i = 0; i < n; ++i) {
        LayerSpec l;
        uint32_t kind = r.u32();
        if (kind > uint32_t(LayerKind::Flatten)) r.fail("unknown layer kind");
        l.kind = LayerKind(kind);
        l.in_channels = r.i32();
        l.out_channels = r.i32();
        l.kernel_size = r.i32();
        l.stride = r.i32();
        l.in_features = r.i32();
        l.out_features = r.i32();
        spec.layers.push_back(l);
    }
    return spec;
}

void write_header(Writer& w, CheckpointKind kind) {
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(uint32_t(kind));
}

CheckpointKind read_header(Reader& r) {
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) r.fail("not a model checkpoint (bad magic)");
    uint32_t version = r.u32();
    if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
    uint32_t kind = r.u32();
    if (kind > uint32_t(CheckpointKind::Int8)) r.fail("unknown checkpoint kind");
    return CheckpointKind(kind);
}

}  // namespace

CheckpointKind peek_checkpoint_kind(const std::string& path) {
    Reader r(path);
    return read_header(r);
}

void save_checkpoint(const NetParams& params, const std::string& path) {
    Writer w(path);
    write_header(w, CheckpointKind::Float32);
    write_spec(w, params.spec);
    for (size_t i = 0; i < params.weights.size(); ++i) {
        if (params.weights[i].empty()) continue;
        w.bytes(params.weights[i].data.data(), params.weights[i].data.size() * 4);
        w.bytes(params.biases[i].data.data(), params.biases[i].data.size() * 4);
    }
    w.close();
}

NetParams load_checkpoint(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CheckpointKind::Float32) r.fail("expected a float32 checkpoint");
    NetSpec spec = read_spec(r);
    NetParams p;
    try {
        p = zero_params<float>(spec);
    } catch (const std::exception& e) {
        r.fail(std::string("invalid net spec: ") + e.what());
    }
    for (size_t i = 0; i < p.weights.size(); ++i) {
        if (p.weights[i].empty()) continue;
        r.bytes(p.weights[i].data.data(), p.weights[i].data.size() * 4);
        r.bytes(p.biases[i].data.data(), p.biases[i].data.size() * 4);
    }
    return p;
}

void save_quant_checkpoint(const QuantNet& net, const std::string& path) {
    Writer w(path);
    write_header(w, CheckpointKind::Int8);
    write_spec(w, net.spec);
    w.f32(net.input_q.scale);
    w.i32(net.input_q.zero_point);
    w.u32(uint32_t(net.stages.size()));
    for (const auto& s : net.stages) {
        w.u32(uint32_t(s.layer.kind));
        w.i32(s.layer.in_channels);
        w.i32(s.layer.out_channels);
        w.i32(s.layer.kernel_size);
        w.i32(s.layer.stride);
        w.i32(s.layer.in_features);
        w.i32(s.layer.out_features);
        w.u8(s.fused_relu ? 1 : 0);
        w.f32(s.weight_scale);
        w.f32(s.in_q.scale);
        w.i32(s.in_q.zero_point);
        w.f32(s.out_q.scale);
        w.i32(s.out_q.zero_point);
        w.i32(s.requant.mantissa);
        w.i32(s.requant.shift);
        w.u64(s.weights.size());
        w.bytes(s.weights.data(), s.weights.size());
        w.u64(s.bias.size());
        w.bytes(s.bias.data(), s.bias.size() * 4);
    }
    w.close();
}

QuantNet load_quant_checkpoint(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CheckpointKind::Int8) r.fail("expected an int8 checkpoint");
    QuantNet net;
    net.spec = read_spec(r);
    net.input_q.scale = r.f32();
    net.input_q.zero_point = r.i32();
    uint32_t n = r.u32();
    if (n > 4096) r.fail("absurd stage count");
    for (uint32_t i = 0; i < n; ++i) {
        QuantStage s;
        uint32_t kind = r.u32();
        if (kind > uint32_t(LayerKind::Flatten)) r.fail("unknown layer kind");
        s.layer.kind = LayerKind(kind);
        s.layer.in_channels = r.i32();
        s.layer.out_channels = r.i32();
        s.layer.kernel_size = r.i32();
        s.layer.stride = r.i32();
        s.layer.in_features = r.i32();
        s.layer.out_features = r.i32();
        s.fused_relu = r.u8() != 0;
        s.weight_scale = r.f32();
        s.in_q.scale = r.f32();
        s.in_q.zero_point = r.i32();
        s.out_q.scale = r.f32();
        s.out_q.zero_point = r.i32();
        s.requant.mantissa = r.i32();
        s.requant.shift = r.i32();
        uint64_t nw = r.u64();
        if (nw > (1u << 28)) r.fail("absurd weight count");
        s.weights.resize(size_t(nw));
        r.bytes(s.weights.data(), s.weights.size());
        uint64_t nb = r.u64();
        if (nb > (1u << 24)) r.fail("absurd bias count");
        s.bias.resize(size_t(nb));
        r.bytes(s.bias.data(), s.bias.size() * 4);
        net.stages.push_back(std::move(s));
    }
    return net;
}

}  // namespace racer
