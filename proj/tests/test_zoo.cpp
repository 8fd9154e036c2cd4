#include <doctest.h>

#include <racer/model_zoo.hpp>
#include <racer/net.hpp>
#include <racer/rng.hpp>

using namespace racer;

TEST_CASE("parameter and mac counts match the published table exactly") {
    struct Row {
        const char* name;
        int input;
        int64_t params;
        int64_t macs;
    };
    const Row rows[] = {
        {"tinylidarnet-l", 1081, 220686, 1546960},
        {"tinylidarnet-m", 541, 111886, 687680},
        {"tinylidarnet-s", 271, 54286, 240752},
        {"mlp256-l", 1081, 343298, 342784},
        {"mlp256-m", 541, 205058, 204544},
        {"mlp256-s", 271, 135938, 135424},
    };
    for (const Row& r : rows) {
        CAPTURE(r.name);
        NetSpec spec = make_model(r.name);
        CHECK(spec.input_length == r.input);
        CHECK(count_params(spec) == r.params);
        CHECK(count_macs(spec) == r.macs);
    }
}

TEST_CASE("hand counted dense layer") {
    NetSpec spec;
    spec.name = "d";
    spec.input_length = 10;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(10, 2)};
    CHECK(count_params(spec) == 22);
    CHECK(count_macs(spec) == 20);
}

TEST_CASE("empty spec counts zero") {
    NetSpec spec;
    spec.name = "none";
    spec.input_length = 1081;
    CHECK(count_params(spec) == 0);
    CHECK(count_macs(spec) == 0);
}

TEST_CASE("every catalog model forwards a random input to shape [2]") {
    Pcg32 rng(41, 6);
    for (const ModelInfo& info : model_catalog()) {
        CAPTURE(info.name);
        NetSpec spec = make_model(info.name);
        CHECK(spec.input_length == info.input_length);
        NetParams params = init_params(spec, 99);
        Tensor in({spec.input_length});
        for (auto& v : in.data) v = float(rng.uniform(0.0, 1.0));
        Tensor out = forward(params, in);
        CHECK(out.shape == std::vector<int>{2});
        CHECK(out.all_finite());
    }
}

TEST_CASE("mac count grows with input length within a family") {
    CHECK(count_macs(make_model("tinylidarnet-s")) <= count_macs(make_model("tinylidarnet-m")));
    CHECK(count_macs(make_model("tinylidarnet-m")) <= count_macs(make_model("tinylidarnet-l")));
    CHECK(count_macs(make_model("mlp256-s")) <= count_macs(make_model("mlp256-m")));
    CHECK(count_macs(make_model("mlp256-m")) <= count_macs(make_model("mlp256-l")));
}

TEST_CASE("downsample factors follow the size suffix") {
    CHECK(model_downsample_factor("tinylidarnet-l") == 1);
    CHECK(model_downsample_factor("tinylidarnet-m") == 2);
    CHECK(model_downsample_factor("tinylidarnet-s") == 4);
    CHECK(model_input_length("mlp256-m") == 541);
}

TEST_CASE("unknown model names are rejected") {
    CHECK(!is_known_model("resnet-50"));
    CHECK(is_known_model("tinylidarnet-l"));
    CHECK_THROWS_AS(make_model("tinylidarnet-xl"), std::invalid_argument);
    CHECK_THROWS_AS(make_model(""), std::invalid_argument);
}
