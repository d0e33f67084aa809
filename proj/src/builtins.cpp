#include "sobn/builtins.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sobn/rng.hpp"

namespace sobn {

std::optional<Builtin> builtin_from_name(std::string_view name) {
  for (Builtin b : all_builtins())
    if (name == to_string(b)) return b;
  return std::nullopt;
}

const char* to_string(Builtin name) {
  switch (name) {
    case Builtin::chain3: return "chain3";
    case Builtin::tent3: return "tent3";
    case Builtin::v3: return "v3";
    case Builtin::triangle: return "triangle";
    case Builtin::diamond: return "diamond";
    case Builtin::net21: return "net21";
  }
  return "?";
}

std::vector<Builtin> all_builtins() {
  return {Builtin::chain3, Builtin::tent3,   Builtin::v3,
          Builtin::triangle, Builtin::diamond, Builtin::net21};
}

namespace {

NetworkStructure make_binary(const std::vector<std::string>& names,
                             const std::vector<std::vector<int>>& parents) {
  std::vector<Variable> variables;
  for (std::size_t i = 0; i < names.size(); ++i)
    variables.push_back(Variable{static_cast<int>(i), names[i], 2, {"0", "1"}});
  return NetworkStructure(std::move(variables), parents);
}

// 21 nodes, binary or tri-valued, parents drawn from earlier nodes so the
// graph is acyclic by construction; in-degree capped at 3. Integer draws
// only, so the structure is identical on every platform.
NetworkStructure make_net21() {
  Rng rng(kNet21Seed);
  const int n = 21;
  std::vector<Variable> variables;
  for (int i = 0; i < n; ++i) {
    const int card = 2 + rng.uniform_int(2);
    Variable var;
    var.id = i;
    var.name = (i < 10 ? "N0" : "N") + std::to_string(i);
    var.cardinality = card;
    for (int s = 0; s < card; ++s) var.state_names.push_back(std::to_string(s));
    variables.push_back(std::move(var));
  }
  std::vector<std::vector<int>> parents(n);
  for (int i = 1; i < n; ++i) {
    const int roll = rng.uniform_int(10);
    int degree = roll < 5 ? 1 : roll < 8 ? 2 : 3;
    degree = std::min(degree, i);
    std::vector<int>& plist = parents[i];
    while (static_cast<int>(plist.size()) < degree) {
      const int p = rng.uniform_int(i);
      if (std::find(plist.begin(), plist.end(), p) == plist.end())
        plist.push_back(p);
    }
  }
  return NetworkStructure(std::move(variables), std::move(parents));
}

}  // namespace

NetworkStructure builtin_structure(Builtin name) {
  switch (name) {
    case Builtin::chain3:
      return make_binary({"A", "B", "C"}, {{}, {0}, {1}});
    case Builtin::tent3:
      return make_binary({"A", "B", "C"}, {{}, {0}, {0}});
    case Builtin::v3:
      return make_binary({"A", "B", "C"}, {{}, {}, {0, 1}});
    case Builtin::triangle:
      return make_binary({"A", "B", "C"}, {{}, {0}, {0, 1}});
    case Builtin::diamond:
      return make_binary({"A", "B", "C", "D"}, {{}, {0}, {0}, {1, 2}});
    case Builtin::net21:
      return make_net21();
  }
  throw std::invalid_argument("unknown builtin");
}

std::vector<int> default_evidence_nodes(const NetworkStructure& structure) {
  std::vector<int> nodes;
  for (int v = 0; v < structure.num_variables(); ++v)
    if (structure.undirected_degree(v) == 1) nodes.push_back(v);
  if (!nodes.empty()) return nodes;
  // no leaf-degree node: fall back to the sources and sinks
  for (int v = 0; v < structure.num_variables(); ++v)
    if (structure.parents(v).empty() || structure.children(v).empty())
      nodes.push_back(v);
  return nodes;
}

std::vector<int> default_evidence_nodes(Builtin name) {
  if (name != Builtin::net21)
    return default_evidence_nodes(builtin_structure(name));
  Rng rng = Rng::stream(kNet21Seed, Rng::StreamKind::Generic, 21);
  std::vector<int> nodes(21);
  std::iota(nodes.begin(), nodes.end(), 0);
  rng.shuffle(nodes);
  nodes.resize(11);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

}  // namespace sobn
