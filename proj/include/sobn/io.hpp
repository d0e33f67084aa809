#pragma once

#include <string>
#include <variant>

#include "sobn/exact_types.hpp"
#include "sobn/types.hpp"

namespace sobn {

// Network document, version 1. Line-oriented, whitespace-separated tokens,
// `#` starts a comment. Layout:
//
//   sobn-network 1
//   kind uncertain              # or: concrete
//   variable A : lo hi
//   variable B : lo hi
//   parents B : A               # order fixes the row indexing
//   alphas A                    # `probabilities` for concrete networks
//   . : 2 2                     # root rows are keyed `.`
//   end
//   alphas B
//   lo : 2 5                    # rows keyed by parent state names,
//   hi : 1 1                    # comma-separated when there are several
//   end
//
// Rows may appear in any order; parsing normalizes them to the
// parent_config_index convention. Serialization is canonical: variables in id
// order, rows in index order, numbers printed with 17 significant digits, so
// equal networks serialize identically and every value round-trips exactly.

using ParsedNetwork = std::variant<ConcreteNetwork, UncertainNetwork>;

ParsedNetwork parse_network(const std::string& text);
std::string serialize_network(const ConcreteNetwork& network);
std::string serialize_network(const UncertainNetwork& network);
std::string serialize_network(const ParsedNetwork& network);

// Evidence document, version 1:
//
//   sobn-evidence 1
//   A hi
//   C lo
Evidence parse_evidence(const NetworkStructure& structure,
                        const std::string& text);
std::string serialize_evidence(const NetworkStructure& structure,
                               const Evidence& evidence);

// Dataset document, version 1: a header of variable names (a permutation of
// the network's variables), then one row of state names per observation.
//
//   sobn-dataset 1
//   A B C
//   lo lo hi
Dataset parse_dataset(const NetworkStructure& structure,
                      const std::string& text);
std::string serialize_dataset(const NetworkStructure& structure,
                              const Dataset& dataset);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sobn
