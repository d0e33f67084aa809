#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "sobn/errors.hpp"
#include "sobn/indexing.hpp"

namespace sobn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Variable {
  int id = 0;
  std::string name;
  int cardinality = 2;
  std::vector<std::string> state_names;

  bool operator==(const Variable&) const = default;
};

// Directed acyclic graph of discrete variables. Parent order is part of the
// structure: it fixes the mixed-radix row indexing of every table attached to
// a variable (see parent_config_index).
class NetworkStructure {
 public:
  NetworkStructure(std::vector<Variable> variables,
                   std::vector<std::vector<int>> parents);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int id) const { return variables_.at(id); }
  const std::vector<int>& parents(int id) const { return parents_.at(id); }
  const std::vector<int>& children(int id) const { return children_.at(id); }
  const std::vector<int>& topological_order() const { return topo_order_; }

  int state_index(int id, const std::string& state_name) const;
  int variable_index(const std::string& name) const;  // -1 if absent

  std::vector<int> parent_cardinalities(int id) const;
  // Number of CPT rows for a variable: product of parent cardinalities.
  int row_count(int id) const;
  int undirected_degree(int id) const;
  int num_edges() const;

  bool operator==(const NetworkStructure& other) const {
    return variables_ == other.variables_ && parents_ == other.parents_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> topo_order_;
};

// True when the undirected skeleton is acyclic.
bool is_polytree(const NetworkStructure& structure);

// First Betti number of the skeleton: edges - vertices + components.
// Zero for polytrees; counts independent undirected loops otherwise.
int undirected_loop_count(const NetworkStructure& structure);

// Bayesian network with point-valued conditional tables. Table `v` has
// row_count(v) rows and cardinality(v) columns; each row is a distribution
// over the child's states.
class ConcreteNetwork {
 public:
  ConcreteNetwork(NetworkStructure structure, std::vector<MatrixXd> tables);

  const NetworkStructure& structure() const { return structure_; }
  const MatrixXd& cpt(int id) const { return tables_.at(id); }
  const std::vector<MatrixXd>& tables() const { return tables_; }

  bool operator==(const ConcreteNetwork& other) const;

 private:
  NetworkStructure structure_;
  std::vector<MatrixXd> tables_;
};

// Bayesian network whose rows carry Dirichlet parameters instead of point
// probabilities. Rows are mutually independent; no cross-row covariance is
// ever represented.
class UncertainNetwork {
 public:
  UncertainNetwork(NetworkStructure structure, std::vector<MatrixXd> alphas);

  const NetworkStructure& structure() const { return structure_; }
  const MatrixXd& alpha(int id) const { return alphas_.at(id); }
  const std::vector<MatrixXd>& tables() const { return alphas_; }

  bool operator==(const UncertainNetwork& other) const;

 private:
  NetworkStructure structure_;
  std::vector<MatrixXd> alphas_;
};

// Observed variable assignments, keyed by variable id.
class Evidence {
 public:
  Evidence() = default;
  explicit Evidence(std::map<int, int> assignments)
      : assignments_(std::move(assignments)) {}

  void set(int id, int state) { assignments_[id] = state; }
  bool observed(int id) const { return assignments_.count(id) != 0; }
  int state(int id) const { return assignments_.at(id); }
  bool empty() const { return assignments_.empty(); }
  std::size_t size() const { return assignments_.size(); }
  const std::map<int, int>& assignments() const { return assignments_; }

  // Throws if an assignment references an unknown variable or state.
  void validate(const NetworkStructure& structure) const;

  bool operator==(const Evidence&) const = default;
};

// Mean vector plus covariance matrix of one message or internal value.
struct MessageStats {
  VectorXd mean;
  MatrixXd cov;

  static MessageStats certain(VectorXd mean_value) {
    const auto n = mean_value.size();
    return MessageStats{std::move(mean_value), MatrixXd::Zero(n, n)};
  }
};

// Posterior mean and covariance of p(Y|e) for one queried variable.
struct MarginalEstimate {
  int variable = -1;
  VectorXd mean;
  MatrixXd cov;
};

// Moments of one Dirichlet CPT row.
struct CptMoments {
  std::vector<MessageStats> rows;
};

// Per-variable row moments of an uncertain network; cross-row covariance is
// structurally zero.
struct NetworkMoments {
  std::vector<CptMoments> tables;
};

}  // namespace sobn
