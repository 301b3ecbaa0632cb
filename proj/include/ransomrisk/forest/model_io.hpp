#pragma once

#include <string>

#include "ransomrisk/forest/forest.hpp"

namespace ransomrisk::forest {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: config, schema tables and per-tree node arrays.
std::string serialize_model(const Forest& forest);
/// Throws VersionMismatch for other format versions and CorruptModel for
/// anything unparseable or structurally inconsistent.
Forest deserialize_model(const std::string& bytes);

void save_model(const std::string& path, const Forest& forest);
Forest load_model(const std::string& path);

}  // namespace ransomrisk::forest
