#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adiabat/calibration.hpp"
#include "adiabat/eos.hpp"

namespace adiabat {

/// Parses a registry document
///   {"spaces": [{"id", "U", "P", "constants", "domain": {"theta": [lo, hi],
///                "v": [lo, hi]}, "reference": {"theta", "v", "entropy"},
///                "units"?, "anchor_temperature"?}]}
/// `origin` prefixes error messages. Throws InputError, SyntaxError.
std::vector<EosSpec> parse_registry(std::string_view json, const std::string& origin = "registry");
std::vector<EosSpec> load_registry(const std::filesystem::path& path);

/// The registry shipped with the library: ideal_gas (SI), vdw_gas and
/// ideal_reduced (reduced units).
std::string_view bundled_registry_json();
std::vector<EosSpec> bundled_registry();

struct ProcessGraph {
  std::vector<std::string> nodes;  // optional isolated nodes
  std::vector<ProcessDecl> processes;
};

/// {"processes": [{"id", "source": [{"space", "scale", "U", "V"}], "target":
/// [...], "note"?}], "nodes"?: [...]}
ProcessGraph parse_process_graph(std::string_view json, const std::string& origin = "graph");
ProcessGraph load_process_graph(const std::filesystem::path& path);

/// Reads a whole file; InputError naming the path when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace adiabat
