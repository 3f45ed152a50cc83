#pragma once

// Instance files: one JSON document shared by every subcommand.
//
//   {
//     "psi":    {"6": "1/2", ...},
//     "theta":  {"4": "1/9", ...},
//     "f":      "totient" | {"2^1": "1", "3^1": "2", ...},
//     "g":      same as f,
//     "edges":  "auto" | [[v, w], ...],
//     "params": {"epsilon": "2/5", "C": "1", "t": "10", "K": "0",
//                "p0": 100, "precision_bits": 256}
//   }
//
// Rationals are "p/q" or "p" strings. "auto" edges are rebuilt from
// params.t and params.K on load.

#include <filesystem>
#include <string>
#include <string_view>

#include "dsq/quality.hpp"

namespace dsq {

struct Instance {
  PairSystem system;
  Params params;
  bool edges_auto = false;
};

Instance parse_instance(std::string_view json_text);
/// Deterministic rendering: keys sorted, two-space indent, trailing newline.
std::string serialize_instance(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

/// Parses only the "params" object of a document (missing keys keep their
/// defaults).
Params parse_params(std::string_view json_text);
std::string serialize_params(const Params& params);

/// Canonical text of an edge set: "[[v,w],...]".
std::string serialize_edges(const EdgeSet& edges);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dsq
