#pragma once

#include <string>
#include <vector>

#include "sobn/types.hpp"

namespace sobn {

// Arithmetic circuit computing sum_{y ~ e} prod_i theta_{y_i | x_i} for any
// indicator setting, compiled from a network structure by variable
// elimination. Children always precede parents in the node list, so a single
// ascending sweep evaluates the circuit and a descending sweep differentiates
// it.
class Spn {
 public:
  enum class NodeKind { Sum, Product, Indicator, Parameter };

  struct Node {
    NodeKind kind;
    std::vector<int> children;  // operator nodes
    int variable = -1;          // leaves
    int state = -1;             // leaves
    int config = -1;            // parameter leaves: CPT row
  };

  // Largest intermediate factor the compiler will materialize.
  static constexpr long long kFactorGuard = 1LL << 25;

  // Default order eliminates a variable whose children are all eliminated,
  // min-fill first among candidates. Any permutation is legal; the circuit
  // value is order-independent even though its shape is not.
  static Spn compile(const NetworkStructure& structure);
  static Spn compile(const NetworkStructure& structure,
                     const std::vector<int>& elimination_order);

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  long long edge_count() const;
  int num_variables() const { return static_cast<int>(cards_.size()); }
  int cardinality(int variable) const { return cards_.at(variable); }
  int row_count(int variable) const { return static_cast<int>(param_ids_.at(variable).size()); }

  struct Evaluation {
    VectorXd values;
    VectorXd derivatives;  // of the root wrt each node value
    double root_value = 0.0;
  };

  // Indicators are 1 where consistent with the evidence, 0 elsewhere;
  // parameter leaves take their table values. Returns per-node values and
  // p(e) at the root.
  Evaluation forward(const std::vector<MatrixXd>& tables,
                     const Evidence& evidence) const;

  // Fills eval.derivatives; for a parameter leaf this is d p(e) / d theta.
  void backward(Evaluation& eval) const;

  double parameter_derivative(const Evaluation& eval, int variable, int config,
                              int state) const;

  // p(y, e) for every state y of `variable`, from the derivative identity
  // p(y, e) = sum_x (d p(e) / d theta_{y|x}) theta_{y|x}.
  VectorXd joint_marginal(const Evaluation& eval,
                          const std::vector<MatrixXd>& tables,
                          int variable) const;

  // Versioned textual dump for debugging.
  std::string dump() const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<int> cards_;
  std::vector<std::vector<int>> indicator_ids_;          // [var][state]
  std::vector<std::vector<std::vector<int>>> param_ids_;  // [var][config][state]

  friend class SpnCompiler;
};

// Second-order query: means are p(y|e) at the row means; the covariance is
// the delta-method of the ratio p(y, e) / p(e) over the independent rows,
// with both gradients read off backward passes.
std::vector<MarginalEstimate> sospn_query(const Spn& spn,
                                          const NetworkStructure& structure,
                                          const NetworkMoments& moments,
                                          const Evidence& evidence);

std::vector<MarginalEstimate> sospn_query(const Spn& spn,
                                          const UncertainNetwork& network,
                                          const Evidence& evidence);

}  // namespace sobn
