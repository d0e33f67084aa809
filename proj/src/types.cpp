#include "sobn/types.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sobn {

namespace {

std::vector<int> topological_sort(int n,
                                  const std::vector<std::vector<int>>& parents) {
  std::vector<int> in_degree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    in_degree[v] = static_cast<int>(parents[v].size());
    for (int p : parents[v]) children[p].push_back(v);
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (in_degree[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    // smallest id first, for a deterministic order
    std::pop_heap(ready.begin(), ready.end(), std::greater<>());
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int c : children[v]) {
      if (--in_degree[c] == 0) {
        ready.push_back(c);
        std::push_heap(ready.begin(), ready.end(), std::greater<>());
      }
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("NetworkStructure: directed cycle");
  return order;
}

}  // namespace

NetworkStructure::NetworkStructure(std::vector<Variable> variables,
                                   std::vector<std::vector<int>> parents)
    : variables_(std::move(variables)), parents_(std::move(parents)) {
  const int n = static_cast<int>(variables_.size());
  if (static_cast<int>(parents_.size()) != n)
    throw std::invalid_argument("NetworkStructure: parents list size mismatch");
  std::set<std::string> names;
  for (int v = 0; v < n; ++v) {
    const Variable& var = variables_[v];
    if (var.id != v)
      throw std::invalid_argument("NetworkStructure: variable id must equal its position");
    if (var.cardinality < 2)
      throw std::invalid_argument("NetworkStructure: cardinality must be at least 2");
    if (static_cast<int>(var.state_names.size()) != var.cardinality)
      throw std::invalid_argument("NetworkStructure: state name count mismatch");
    if (!names.insert(var.name).second)
      throw std::invalid_argument("NetworkStructure: duplicate variable name");
    std::set<std::string> states(var.state_names.begin(), var.state_names.end());
    if (static_cast<int>(states.size()) != var.cardinality)
      throw std::invalid_argument("NetworkStructure: duplicate state name");
  }
  children_.assign(n, {});
  for (int v = 0; v < n; ++v) {
    std::set<int> seen;
    for (int p : parents_[v]) {
      if (p < 0 || p >= n)
        throw std::invalid_argument("NetworkStructure: parent id out of range");
      if (p == v || !seen.insert(p).second)
        throw std::invalid_argument("NetworkStructure: repeated or self parent");
    }
  }
  for (int v = 0; v < n; ++v)
    for (int p : parents_[v]) children_[p].push_back(v);
  topo_order_ = topological_sort(n, parents_);
}

int NetworkStructure::state_index(int id, const std::string& state_name) const {
  const Variable& var = variable(id);
  for (int s = 0; s < var.cardinality; ++s)
    if (var.state_names[s] == state_name) return s;
  return -1;
}

int NetworkStructure::variable_index(const std::string& name) const {
  for (const Variable& var : variables_)
    if (var.name == name) return var.id;
  return -1;
}

std::vector<int> NetworkStructure::parent_cardinalities(int id) const {
  std::vector<int> cards;
  cards.reserve(parents_[id].size());
  for (int p : parents_.at(id)) cards.push_back(variables_[p].cardinality);
  return cards;
}

int NetworkStructure::row_count(int id) const {
  const auto cards = parent_cardinalities(id);
  return static_cast<int>(config_count(cards));
}

int NetworkStructure::undirected_degree(int id) const {
  return static_cast<int>(parents_.at(id).size() + children_.at(id).size());
}

int NetworkStructure::num_edges() const {
  int total = 0;
  for (const auto& p : parents_) total += static_cast<int>(p.size());
  return total;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

bool is_polytree(const NetworkStructure& structure) {
  return undirected_loop_count(structure) == 0;
}

int undirected_loop_count(const NetworkStructure& structure) {
  UnionFind uf(structure.num_variables());
  int loops = 0;
  for (int v = 0; v < structure.num_variables(); ++v)
    for (int p : structure.parents(v))
      if (!uf.unite(p, v)) ++loops;
  return loops;
}

namespace {

void check_table_shape(const NetworkStructure& structure,
                       const std::vector<MatrixXd>& tables) {
  if (static_cast<int>(tables.size()) != structure.num_variables())
    throw std::invalid_argument("network: one table required per variable");
  for (int v = 0; v < structure.num_variables(); ++v) {
    if (tables[v].rows() != structure.row_count(v) ||
        tables[v].cols() != structure.variable(v).cardinality)
      throw std::invalid_argument("network: table shape mismatch");
  }
}

}  // namespace

ConcreteNetwork::ConcreteNetwork(NetworkStructure structure,
                                 std::vector<MatrixXd> tables)
    : structure_(std::move(structure)), tables_(std::move(tables)) {
  check_table_shape(structure_, tables_);
  for (const MatrixXd& t : tables_) {
    if ((t.array() < 0.0).any())
      throw std::invalid_argument("ConcreteNetwork: negative probability");
    for (int r = 0; r < t.rows(); ++r)
      if (std::abs(t.row(r).sum() - 1.0) > 1e-12)
        throw std::invalid_argument("ConcreteNetwork: row does not sum to 1");
  }
}

bool ConcreteNetwork::operator==(const ConcreteNetwork& other) const {
  if (!(structure_ == other.structure_)) return false;
  for (std::size_t i = 0; i < tables_.size(); ++i)
    if (!(tables_[i].array() == other.tables_[i].array()).all()) return false;
  return true;
}

UncertainNetwork::UncertainNetwork(NetworkStructure structure,
                                   std::vector<MatrixXd> alphas)
    : structure_(std::move(structure)), alphas_(std::move(alphas)) {
  check_table_shape(structure_, alphas_);
  for (const MatrixXd& t : alphas_)
    if ((t.array() <= 0.0).any())
      throw std::invalid_argument("UncertainNetwork: alphas must be positive");
}

bool UncertainNetwork::operator==(const UncertainNetwork& other) const {
  if (!(structure_ == other.structure_)) return false;
  for (std::size_t i = 0; i < alphas_.size(); ++i)
    if (!(alphas_[i].array() == other.alphas_[i].array()).all()) return false;
  return true;
}

void Evidence::validate(const NetworkStructure& structure) const {
  for (const auto& [id, state] : assignments_) {
    if (id < 0 || id >= structure.num_variables())
      throw std::invalid_argument("Evidence: unknown variable id");
    if (state < 0 || state >= structure.variable(id).cardinality)
      throw std::invalid_argument("Evidence: state out of range");
  }
}

}  // namespace sobn
