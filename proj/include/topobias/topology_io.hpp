#pragma once

#include <filesystem>
#include <string>

#include "topobias/topology.hpp"

namespace topobias {

// Topology CSV, format "topobias-topology v1":
//
//   # topobias-topology v1,D=<side>,generator=<label>,seed=<u64|none>
//   id,x,y
//   0,12.345678,980.000000
//
// Ids are contiguous from 0 in file order; coordinates carry six decimals.

std::string topology_csv_string(const Topology& t);
void write_topology_csv(const Topology& t, const std::filesystem::path& path);

// Strict parse of the v1 format. Errors name the 1-based line and the cause.
Topology read_topology_csv(const std::filesystem::path& path);

// Import from either the v1 format or, with headerless = true, bare "x,y"
// rows. The stored label becomes `label`, the seed is dropped, and every
// coordinate must lie in [0, area_side]; violations raise std::runtime_error.
Topology import_topology(const std::filesystem::path& path, double area_side,
                         const std::string& label, bool headerless = false);

}  // namespace topobias
