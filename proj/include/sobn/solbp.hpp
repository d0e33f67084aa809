#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sobn/bp.hpp"
#include "sobn/dirichlet.hpp"
#include "sobn/rng.hpp"
#include "sobn/types.hpp"

namespace sobn {

// -- Analytic Jacobians of the message kernels, evaluated at means. -----------
//
// Every covariance update below is the delta-method sum J sigma J^T over the
// kernel's statistically independent inputs. Ratio forms of the diagonal
// Jacobians divide by message means that can be zero, so each is computed
// from its underlying product or normalization form instead; the two agree
// wherever the ratio is defined.
namespace jac {

// internal-pi wrt one CPT row: a scalar multiple of the identity,
// prod_i pi_i(x_i) for the row's configuration.
double internal_pi_wrt_theta(std::span<const int> parent_cards, int config,
                             std::span<const VectorXd> parent_pi);

// internal-pi wrt the pi-message from parent i; |Y| x |X_i|.
MatrixXd internal_pi_wrt_parent(const MatrixXd& cpt,
                                std::span<const int> parent_cards, int i,
                                std::span<const VectorXd> parent_pi);

// internal-lambda wrt the lambda-message from child j; diagonal.
VectorXd internal_lambda_wrt_child(int cardinality,
                                   std::span<const VectorXd> child_lambda,
                                   int j);

// pi-message wrt the internal pi; diagonal.
VectorXd pi_message_wrt_internal(int cardinality,
                                 std::span<const VectorXd> child_lambda,
                                 int target_child);

// pi-message wrt the lambda-message from sibling child j; diagonal.
VectorXd pi_message_wrt_sibling(const VectorXd& internal_pi,
                                std::span<const VectorXd> child_lambda,
                                int target_child, int j);

// lambda-message wrt one CPT row; |X_i| x |Y| with a single nonzero row at
// the row configuration's i-th digit.
MatrixXd lambda_message_wrt_theta(std::span<const int> parent_cards,
                                  int target_parent, int config,
                                  const VectorXd& internal_lambda,
                                  std::span<const VectorXd> parent_pi);

// lambda-message wrt the pi-message from parent j != i; |X_i| x |X_j|.
MatrixXd lambda_message_wrt_parent(const MatrixXd& cpt,
                                   std::span<const int> parent_cards,
                                   int target_parent, int j,
                                   const VectorXd& internal_lambda,
                                   std::span<const VectorXd> parent_pi);

// lambda-message wrt the internal lambda; |X_i| x |Y|.
MatrixXd lambda_message_wrt_internal(const MatrixXd& cpt,
                                     std::span<const int> parent_cards,
                                     int target_parent,
                                     std::span<const VectorXd> parent_pi);

// belief wrt internal lambda / internal pi; |Y| x |Y|.
MatrixXd belief_wrt_lambda(const VectorXd& internal_pi,
                           const VectorXd& internal_lambda);
MatrixXd belief_wrt_pi(const VectorXd& internal_pi,
                       const VectorXd& internal_lambda);

}  // namespace jac

// -- Second-order kernels. -----------------------------------------------------

MessageStats so_internal_pi(const MatrixXd& cpt_mean, const CptMoments& cpt,
                            std::span<const int> parent_cards,
                            std::span<const MessageStats> parent_pi);

MessageStats so_internal_lambda(int cardinality,
                                std::span<const MessageStats> child_lambda);

MessageStats so_pi_message(const MessageStats& internal_pi,
                           std::span<const MessageStats> child_lambda,
                           int target_child);

MessageStats so_lambda_message(const MatrixXd& cpt_mean, const CptMoments& cpt,
                               std::span<const int> parent_cards,
                               int target_parent,
                               const MessageStats& internal_lambda,
                               std::span<const MessageStats> parent_pi);

MarginalEstimate so_belief(int variable, const MessageStats& internal_pi,
                           const MessageStats& internal_lambda);

// -- Engine. --------------------------------------------------------------------

struct SecondOrderBeliefState {
  std::vector<MessageStats> pi_messages;      // per edge
  std::vector<MessageStats> lambda_messages;  // per edge
  std::vector<MessageStats> internal_pi;      // per node
  std::vector<MessageStats> internal_lambda;  // per node
  int round = 0;
};

struct SolbpResult {
  std::vector<MarginalEstimate> marginals;  // one per node, in id order
  ConvergenceReport report;
};

using RoundObserver = std::function<void(const SecondOrderBeliefState&)>;

// Random-order rounds updating the mean and covariance of every message until
// the largest message-mean change is at most epsilon (covariances keep
// updating but are not part of the stopping test). Mirrors run_bp exactly on
// the mean path: same schedule, same kernels.
SolbpResult run_solbp(const NetworkStructure& structure,
                      const NetworkMoments& moments, const Evidence& evidence,
                      const PropagationOptions& options, Rng& rng,
                      const RoundObserver& observer = {});

SolbpResult run_solbp(const UncertainNetwork& network, const Evidence& evidence,
                      const PropagationOptions& options, Rng& rng,
                      const RoundObserver& observer = {});

}  // namespace sobn
