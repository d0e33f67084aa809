#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sobn/types.hpp"

namespace sobn {

// Benchmark topologies. The three-node networks and the two small loopy
// networks are fixed by hand; net21 is produced by a deterministic seeded
// generator (21 nodes, binary or tri-valued, several undirected loops,
// in-degree at most 3) whose canonical serialization is committed alongside
// the tests.
enum class Builtin { chain3, tent3, v3, triangle, diamond, net21 };

std::optional<Builtin> builtin_from_name(std::string_view name);
const char* to_string(Builtin name);
std::vector<Builtin> all_builtins();

NetworkStructure builtin_structure(Builtin name);

// Evidence node set for a structure: the nodes incident with exactly one
// edge; if no such node exists, the sources and sinks.
std::vector<int> default_evidence_nodes(const NetworkStructure& structure);

// Evidence node set for a builtin. net21 uses a fixed seeded draw of 11 of
// its 21 nodes; the others follow the degree rule above.
std::vector<int> default_evidence_nodes(Builtin name);

// Seed of the net21 generator and of its evidence draw.
inline constexpr std::uint64_t kNet21Seed = 0x5053'0021;

}  // namespace sobn
