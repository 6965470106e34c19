#pragma once

#include <string>

#include "dbmid/network.hpp"

namespace dbmid {

// Container layout: magic "DBMID1", uint32 little-endian manifest length,
// UTF-8 JSON manifest (format_version, role, config, tensor names/shapes/
// byte offsets), then raw little-endian float32 tensor data concatenated in
// manifest order. Round trips are byte-exact.
void save_checkpoint(const ModelWeights& model, const std::string& path);

ModelWeights load_checkpoint(const std::string& path);

}  // namespace dbmid
