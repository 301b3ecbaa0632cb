#pragma once

#include <istream>
#include <string>
#include <vector>

#include "ransomrisk/core/types.hpp"

namespace ransomrisk::dataset {

/// Column names of the labeled dataset CSV, in file order.
const std::vector<std::string>& columns();

/// Header plus one row per record. Multi-valued cells are ';'-joined;
/// doubles use the shortest round-trip form, so equal records always give
/// equal bytes.
std::string to_csv(const std::vector<AttackRecord>& records);
std::vector<AttackRecord> from_csv(std::istream& in);
std::vector<AttackRecord> load_csv(const std::string& path);

}  // namespace ransomrisk::dataset
