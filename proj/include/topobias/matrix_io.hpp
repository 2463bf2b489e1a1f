#pragma once

#include <filesystem>
#include <string>

#include "topobias/features.hpp"

namespace topobias {

// Features CSV, format "topobias-features-v1":
//
//   topology_id,generator,internode.min,...,clustering.avg@100
//   uniform-000000,uniform,3.162278,...,0.58215
//
// Values are written in the shortest form that round-trips the exact double,
// so a written matrix reads back bit-identically.

std::string features_csv_string(const FeatureMatrix& m);
void write_features_csv(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix read_features_csv(const std::filesystem::path& path);

}  // namespace topobias
