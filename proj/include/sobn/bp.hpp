#pragma once

#include <span>
#include <vector>

#include "sobn/rng.hpp"
#include "sobn/types.hpp"

namespace sobn {

// -- Pearl message kernels (first-order). ------------------------------------
//
// Messages live on edges. Both the parent-to-child pi-message and the
// child-to-parent lambda-message on an edge are vectors over the parent
// variable's states. The same kernels drive the mean path of the
// second-order engine so the two engines agree exactly at first order.

// pi_Y(y) = sum_x theta(x, y) * prod_i pi_i(x_i); reduces to the prior row
// for a parentless node.
VectorXd internal_pi_mean(const MatrixXd& cpt, std::span<const int> parent_cards,
                          std::span<const VectorXd> parent_pi);

// lambda_Y(y) = prod_j lambda_j(y); all-ones for a childless node.
VectorXd internal_lambda_mean(int cardinality,
                              std::span<const VectorXd> child_lambda);

// Message to child `target_child` (a position in the children list):
// internal pi times every other child's lambda-message.
VectorXd pi_message_mean(const VectorXd& internal_pi,
                         std::span<const VectorXd> child_lambda,
                         int target_child);

// Message to parent `target_parent` (a position in the parent list):
// lambda(x_i) = sum_y lambda_Y(y) sum_{x ~ x_i} theta(x, y) prod_{j != i} pi_j(x_j).
// `parent_pi` holds one entry per parent; the target's entry is not read.
VectorXd lambda_message_mean(const MatrixXd& cpt,
                             std::span<const int> parent_cards,
                             int target_parent, const VectorXd& internal_lambda,
                             std::span<const VectorXd> parent_pi);

// Normalized elementwise product of the internal values. Throws
// InconsistentEvidenceError when the product vanishes everywhere.
VectorXd belief_mean(const VectorXd& internal_pi, const VectorXd& internal_lambda);

// Scales `v` to unit sum and returns the factor applied; throws
// InconsistentEvidenceError when the sum is not positive.
double normalize_sum(VectorXd& v);
// Scales `v` so its largest entry is 1 and returns the factor applied.
double rescale_max(VectorXd& v);

// -- Message bookkeeping shared by both engines. ------------------------------

struct MessageGraph {
  struct Edge {
    int parent;
    int child;
    int parent_pos;  // index of `parent` within `child`'s parent list
  };

  explicit MessageGraph(const NetworkStructure& structure);

  // Message ids: [0, E) are pi-messages along edges, [E, 2E) are
  // lambda-messages along the reversed edges.
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_messages() const { return 2 * num_edges(); }
  bool is_pi_message(int id) const { return id < num_edges(); }
  int edge_of(int id) const { return is_pi_message(id) ? id : id - num_edges(); }

  std::vector<Edge> edges;
  std::vector<std::vector<int>> in_edges;   // per node, edges parent -> node, parent order
  std::vector<std::vector<int>> out_edges;  // per node, edges node -> child, children order
};

// -- Loopy engine. -------------------------------------------------------------

struct PropagationOptions {
  double epsilon = 1e-8;
  int max_rounds = 200;
  // Keep messages on a canonical scale (pi-messages sum to 1, lambda-messages
  // peak at 1). Beliefs are invariant to this scaling; disabling it is only
  // useful in tests.
  bool normalize_messages = true;
};

struct ConvergenceReport {
  int rounds = 0;
  double max_delta = 0.0;
  bool converged = false;
};

struct BpResult {
  std::vector<VectorXd> beliefs;
  ConvergenceReport report;
};

// Random-order rounds over all messages until the largest message-mean change
// in a round is at most epsilon. Evidence nodes keep one-hot internal values.
// `rng` only drives the per-round update order.
BpResult run_bp(const ConcreteNetwork& network, const Evidence& evidence,
                const PropagationOptions& options, Rng& rng);

}  // namespace sobn
