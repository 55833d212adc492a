#pragma once

#include <json.hpp>

#include <string>

namespace erw {

// The scenario/config file format: one key-value tree with two encodings.
// The native "keytree" encoding is an indentation-based subset of the
// familiar yaml-style syntax:
//
//   plan:
//     grid: [8, 8]
//     rounds:
//       - label: baseline
//         time_yr: 0
//     depth:
//       dist: triangular
//
// Scalars are parsed as JSON scalars when possible (numbers, true/false,
// null), strings otherwise; quotes are only needed for strings that would
// otherwise parse as something else. Full-line comments start with '#'.
// Files whose first non-space character is '{' are parsed as plain JSON.
// parse(serialize(parse(text))) == parse(text) for every valid input.

nlohmann::json parse_config_text(const std::string& text);
nlohmann::json parse_config_file(const std::string& path);
std::string serialize_keytree(const nlohmann::json& tree);

// stable FNV-1a hash of the canonical (sorted-key JSON) encoding,
// hex-encoded; embedded in run metadata for reproducibility checks
std::string config_hash(const nlohmann::json& tree);

} // namespace erw
