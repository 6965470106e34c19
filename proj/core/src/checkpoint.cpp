#include "dbmid/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "dbmid/errors.hpp"

namespace dbmid {

namespace {

constexpr char kMagic[6] = {'D', 'B', 'M', 'I', 'D', '1'};

static_assert(sizeof(float) == 4, "float32 tensor data assumed");

// Tensor payloads are little-endian on disk; byte-swap on big-endian hosts.
void to_little_endian(std::vector<float>& data) {
    if constexpr (std::endian::native == std::endian::big) {
        for (float& f : data) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            u = __builtin_bswap32(u);
            std::memcpy(&f, &u, 4);
        }
    }
}

}  // namespace

void save_checkpoint(const ModelWeights& model, const std::string& path) {
    if (model.role.empty()) throw CheckpointError("model role must be set");
    nlohmann::json manifest;
    manifest["format_version"] = 1;
    manifest["role"] = model.role;
    try {
        manifest["config"] = nlohmann::json::parse(model.config_json);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("model config is not valid json: ") + e.what());
    }
    std::uint64_t offset = 0;
    nlohmann::json tensors = nlohmann::json::array();
    for (const Tensor& t : model.tensors) {
        nlohmann::json entry;
        entry["name"] = t.name;
        entry["shape"] = t.shape;
        entry["offset"] = offset;
        tensors.push_back(entry);
        offset += t.numel() * 4;
    }
    manifest["tensors"] = tensors;
    const std::string text = manifest.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, sizeof kMagic);
    const std::uint32_t len = std::uint32_t(text.size());
    char lenb[4] = {char(len & 0xff), char((len >> 8) & 0xff), char((len >> 16) & 0xff),
                    char((len >> 24) & 0xff)};
    os.write(lenb, 4);
    os.write(text.data(), std::streamsize(text.size()));
    for (const Tensor& t : model.tensors) {
        std::vector<float> buf = t.v;
        to_little_endian(buf);
        os.write(reinterpret_cast<const char*>(buf.data()),
                 std::streamsize(buf.size() * 4));
    }
    if (!os) throw IoError("write failed: " + path);
}

ModelWeights load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[6];
    if (!is.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0) {
        throw CheckpointError("not a checkpoint file (bad magic): " + path);
    }
    unsigned char lenb[4];
    if (!is.read(reinterpret_cast<char*>(lenb), 4)) {
        throw CheckpointError("truncated checkpoint header: " + path);
    }
    const std::uint32_t len = std::uint32_t(lenb[0]) | (std::uint32_t(lenb[1]) << 8) |
                              (std::uint32_t(lenb[2]) << 16) |
                              (std::uint32_t(lenb[3]) << 24);
    if (len == 0 || len > (64u << 20)) {
        throw CheckpointError("implausible manifest length: " + path);
    }
    std::string text(len, '\0');
    if (!is.read(text.data(), len)) {
        throw CheckpointError("truncated checkpoint manifest: " + path);
    }

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint manifest: ") + e.what());
    }
    ModelWeights model;
    try {
        if (manifest.at("format_version").get<int>() != 1) {
            throw CheckpointError("unsupported checkpoint format version");
        }
        model.role = manifest.at("role").get<std::string>();
        model.config_json = manifest.at("config").dump();
        std::uint64_t expect_offset = 0;
        for (const auto& entry : manifest.at("tensors")) {
            Tensor t;
            t.name = entry.at("name").get<std::string>();
            t.shape = entry.at("shape").get<std::vector<int>>();
            for (int d : t.shape) {
                if (d <= 0) throw CheckpointError("bad tensor shape in " + t.name);
            }
            if (entry.at("offset").get<std::uint64_t>() != expect_offset) {
                throw CheckpointError("tensor offsets not contiguous in " + path);
            }
            t.v.resize(t.numel());
            if (!is.read(reinterpret_cast<char*>(t.v.data()),
                         std::streamsize(t.v.size() * 4))) {
                throw CheckpointError("truncated tensor data in " + path);
            }
            to_little_endian(t.v);  // swap back on big-endian hosts
            expect_offset += t.numel() * 4;
            model.tensors.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint manifest: ") + e.what());
    }
    // Reject trailing garbage so corruption cannot hide after valid tensors.
    char extra;
    if (is.read(&extra, 1)) throw CheckpointError("trailing bytes after tensor data: " + path);
    model.validate_finite();
    return model;
}

}  // namespace dbmid
