#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "dbmid/checkpoint.hpp"
#include "dbmid/classifier.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/network.hpp"
#include "helpers.hpp"

using namespace dbmid;

TEST_SUITE_BEGIN("checkpoint");

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

NetworkConfig small_config() {
    NetworkConfig cfg;
    cfg.stages = 2;
    cfg.layers_per_stage = 1;
    cfg.channels = {4, 6};
    return cfg;
}

}  // namespace

TEST_CASE("weights round trip exactly") {
    testutil::TempDir tmp("ckpt_rt");
    const ModelWeights w = EncoderDecoderNet::build(small_config(), 31, "motion");
    const std::string path = tmp.file("net.ckpt");
    save_checkpoint(w, path);
    const ModelWeights back = load_checkpoint(path);

    CHECK(back.role == w.role);
    REQUIRE(back.tensors.size() == w.tensors.size());
    for (size_t i = 0; i < w.tensors.size(); ++i) {
        CHECK(back.tensors[i].name == w.tensors[i].name);
        CHECK(back.tensors[i].shape == w.tensors[i].shape);
        CHECK(back.tensors[i].v == w.tensors[i].v);  // bit-exact float payload
    }
    // Config survives a json reserialization round trip.
    const NetworkConfig cfg = NetworkConfig::from_json_string(back.config_json);
    CHECK(cfg.stages == 2);
    CHECK(cfg.channels == std::vector<int>{4, 6});
}

TEST_CASE("saving twice produces byte-identical files") {
    testutil::TempDir tmp("ckpt_bytes");
    const ModelWeights w = EncoderDecoderNet::build(small_config(), 32, "defocus");
    save_checkpoint(w, tmp.file("a.ckpt"));
    save_checkpoint(w, tmp.file("b.ckpt"));
    CHECK(slurp(tmp.file("a.ckpt")) == slurp(tmp.file("b.ckpt")));
}

TEST_CASE("a reloaded network infers identically") {
    testutil::TempDir tmp("ckpt_infer");
    const ModelWeights w = EncoderDecoderNet::build(small_config(), 33, "defocus");
    const std::string path = tmp.file("net.ckpt");
    save_checkpoint(w, path);

    const EncoderDecoderNet a(w);
    const EncoderDecoderNet b(load_checkpoint(path));
    const Image in = testutil::textured_image(32, 32, 3, 9);
    CHECK(a.infer(in).data == b.infer(in).data);
}

TEST_CASE("classifier checkpoints round trip too") {
    testutil::TempDir tmp("ckpt_cls");
    ClassifierConfig cc;
    cc.stages = 2;
    cc.layers_per_stage = 1;
    cc.channels = {4, 8};
    cc.input_size = 32;
    const ModelWeights w = ClassifierNet::build(cc, 34);
    const std::string path = tmp.file("cls.ckpt");
    save_checkpoint(w, path);
    const ModelWeights back = load_checkpoint(path);
    CHECK(back.role == "classifier");
    CHECK_NOTHROW(ClassifierNet{back});
}

TEST_CASE("corruption is rejected loudly") {
    testutil::TempDir tmp("ckpt_bad");
    const ModelWeights w = EncoderDecoderNet::build(small_config(), 35, "defocus");
    const std::string path = tmp.file("net.ckpt");
    save_checkpoint(w, path);
    const std::string bytes = slurp(path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint(tmp.file("nope.ckpt")), IoError);
    }
    SUBCASE("bad magic") {
        std::string b = bytes;
        b[0] = 'X';
        spit(tmp.file("magic.ckpt"), b);
        CHECK_THROWS_AS(load_checkpoint(tmp.file("magic.ckpt")), CheckpointError);
    }
    SUBCASE("truncated header") {
        spit(tmp.file("hdr.ckpt"), bytes.substr(0, 8));
        CHECK_THROWS_AS(load_checkpoint(tmp.file("hdr.ckpt")), CheckpointError);
    }
    SUBCASE("truncated tensor data") {
        spit(tmp.file("trunc.ckpt"), bytes.substr(0, bytes.size() - 16));
        CHECK_THROWS_AS(load_checkpoint(tmp.file("trunc.ckpt")), CheckpointError);
    }
    SUBCASE("trailing garbage") {
        spit(tmp.file("tail.ckpt"), bytes + "junk");
        CHECK_THROWS_AS(load_checkpoint(tmp.file("tail.ckpt")), CheckpointError);
    }
    SUBCASE("mangled manifest json") {
        std::string b = bytes;
        b[12] = '\x01';  // inside the manifest text
        spit(tmp.file("json.ckpt"), b);
        CHECK_THROWS_AS(load_checkpoint(tmp.file("json.ckpt")), CheckpointError);
    }
    SUBCASE("non-finite payload") {
        ModelWeights nan_w = w;
        nan_w.tensors[0].v[3] = std::numeric_limits<float>::quiet_NaN();
        save_checkpoint(nan_w, tmp.file("nan.ckpt"));
        CHECK_THROWS_AS(load_checkpoint(tmp.file("nan.ckpt")), CheckpointError);
    }
    SUBCASE("empty role never reaches disk") {
        ModelWeights anon = w;
        anon.role.clear();
        CHECK_THROWS_AS(save_checkpoint(anon, tmp.file("anon.ckpt")), CheckpointError);
    }
}

TEST_SUITE_END();
