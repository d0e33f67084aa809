#include "sobn/solbp.hpp"

#include <numeric>

#include "sobn/errors.hpp"

namespace sobn {

namespace jac {

double internal_pi_wrt_theta(std::span<const int> parent_cards, int config,
                             std::span<const VectorXd> parent_pi) {
  const std::vector<int> states = parent_config_unindex(config, parent_cards);
  double weight = 1.0;
  for (std::size_t i = 0; i < states.size(); ++i) weight *= parent_pi[i][states[i]];
  return weight;
}

MatrixXd internal_pi_wrt_parent(const MatrixXd& cpt,
                                std::span<const int> parent_cards, int i,
                                std::span<const VectorXd> parent_pi) {
  MatrixXd J = MatrixXd::Zero(cpt.cols(), parent_cards[i]);
  std::vector<int> states(parent_cards.size(), 0);
  for (int r = 0; r < cpt.rows(); ++r) {
    double weight = 1.0;
    for (std::size_t j = 0; j < states.size(); ++j)
      if (static_cast<int>(j) != i) weight *= parent_pi[j][states[j]];
    J.col(states[i]) += weight * cpt.row(r).transpose();
    next_config(states, parent_cards);
  }
  return J;
}

VectorXd internal_lambda_wrt_child(int cardinality,
                                   std::span<const VectorXd> child_lambda,
                                   int j) {
  VectorXd diag = VectorXd::Ones(cardinality);
  for (std::size_t k = 0; k < child_lambda.size(); ++k)
    if (static_cast<int>(k) != j) diag.array() *= child_lambda[k].array();
  return diag;
}

VectorXd pi_message_wrt_internal(int cardinality,
                                 std::span<const VectorXd> child_lambda,
                                 int target_child) {
  VectorXd diag = VectorXd::Ones(cardinality);
  for (std::size_t k = 0; k < child_lambda.size(); ++k)
    if (static_cast<int>(k) != target_child) diag.array() *= child_lambda[k].array();
  return diag;
}

VectorXd pi_message_wrt_sibling(const VectorXd& internal_pi,
                                std::span<const VectorXd> child_lambda,
                                int target_child, int j) {
  VectorXd diag = internal_pi;
  for (std::size_t k = 0; k < child_lambda.size(); ++k)
    if (static_cast<int>(k) != target_child && static_cast<int>(k) != j)
      diag.array() *= child_lambda[k].array();
  return diag;
}

MatrixXd lambda_message_wrt_theta(std::span<const int> parent_cards,
                                  int target_parent, int config,
                                  const VectorXd& internal_lambda,
                                  std::span<const VectorXd> parent_pi) {
  const std::vector<int> states = parent_config_unindex(config, parent_cards);
  double weight = 1.0;
  for (std::size_t j = 0; j < states.size(); ++j)
    if (static_cast<int>(j) != target_parent) weight *= parent_pi[j][states[j]];
  MatrixXd J = MatrixXd::Zero(parent_cards[target_parent], internal_lambda.size());
  J.row(states[target_parent]) = weight * internal_lambda.transpose();
  return J;
}

MatrixXd lambda_message_wrt_parent(const MatrixXd& cpt,
                                   std::span<const int> parent_cards,
                                   int target_parent, int j,
                                   const VectorXd& internal_lambda,
                                   std::span<const VectorXd> parent_pi) {
  MatrixXd J = MatrixXd::Zero(parent_cards[target_parent], parent_cards[j]);
  std::vector<int> states(parent_cards.size(), 0);
  for (int r = 0; r < cpt.rows(); ++r) {
    double weight = 1.0;
    for (std::size_t l = 0; l < states.size(); ++l)
      if (static_cast<int>(l) != target_parent && static_cast<int>(l) != j)
        weight *= parent_pi[l][states[l]];
    J(states[target_parent], states[j]) += weight * cpt.row(r).dot(internal_lambda);
    next_config(states, parent_cards);
  }
  return J;
}

MatrixXd lambda_message_wrt_internal(const MatrixXd& cpt,
                                     std::span<const int> parent_cards,
                                     int target_parent,
                                     std::span<const VectorXd> parent_pi) {
  MatrixXd J = MatrixXd::Zero(parent_cards[target_parent], cpt.cols());
  std::vector<int> states(parent_cards.size(), 0);
  for (int r = 0; r < cpt.rows(); ++r) {
    double weight = 1.0;
    for (std::size_t j = 0; j < states.size(); ++j)
      if (static_cast<int>(j) != target_parent) weight *= parent_pi[j][states[j]];
    J.row(states[target_parent]) += weight * cpt.row(r);
    next_config(states, parent_cards);
  }
  return J;
}

namespace {

// Shared form of the belief Jacobians: column y' of the derivative of
// normalize(pi .* lambda) wrt one factor is (other(y')/S) (e_{y'} - p).
MatrixXd belief_jacobian(const VectorXd& other_factor, const VectorXd& pi,
                         const VectorXd& lambda) {
  const VectorXd q = pi.cwiseProduct(lambda);
  const double total = q.sum();
  if (!(total > 0.0))
    throw InconsistentEvidenceError("belief: pi and lambda have no common support");
  const VectorXd p = q / total;
  const Eigen::Index n = q.size();
  MatrixXd J(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    J.col(c) = -(other_factor[c] / total) * p;
    J(c, c) += other_factor[c] / total;
  }
  return J;
}

}  // namespace

MatrixXd belief_wrt_lambda(const VectorXd& internal_pi,
                           const VectorXd& internal_lambda) {
  return belief_jacobian(internal_pi, internal_pi, internal_lambda);
}

MatrixXd belief_wrt_pi(const VectorXd& internal_pi,
                       const VectorXd& internal_lambda) {
  return belief_jacobian(internal_lambda, internal_pi, internal_lambda);
}

}  // namespace jac

namespace {

MatrixXd symmetrized(MatrixXd m) { return ((m + m.transpose()) / 2.0).eval(); }

// D sigma D^T for a diagonal Jacobian given as its diagonal.
MatrixXd scale_cov(const VectorXd& diag, const MatrixXd& cov) {
  return cov.cwiseProduct(diag * diag.transpose());
}

std::vector<VectorXd> means_of(std::span<const MessageStats> stats) {
  std::vector<VectorXd> means;
  means.reserve(stats.size());
  for (const MessageStats& s : stats) means.push_back(s.mean);
  return means;
}

}  // namespace

MessageStats so_internal_pi(const MatrixXd& cpt_mean, const CptMoments& cpt,
                            std::span<const int> parent_cards,
                            std::span<const MessageStats> parent_pi) {
  const std::vector<VectorXd> pi_means = means_of(parent_pi);
  MessageStats out;
  out.mean = internal_pi_mean(cpt_mean, parent_cards, pi_means);
  const Eigen::Index card = out.mean.size();
  out.cov = MatrixXd::Zero(card, card);
  for (int r = 0; r < cpt_mean.rows(); ++r) {
    const double w = jac::internal_pi_wrt_theta(parent_cards, r, pi_means);
    out.cov += (w * w) * cpt.rows[r].cov;
  }
  for (std::size_t i = 0; i < parent_pi.size(); ++i) {
    const MatrixXd J = jac::internal_pi_wrt_parent(cpt_mean, parent_cards,
                                                   static_cast<int>(i), pi_means);
    out.cov += J * parent_pi[i].cov * J.transpose();
  }
  out.cov = symmetrized(std::move(out.cov));
  return out;
}

MessageStats so_internal_lambda(int cardinality,
                                std::span<const MessageStats> child_lambda) {
  const std::vector<VectorXd> lambda_means = means_of(child_lambda);
  MessageStats out;
  out.mean = internal_lambda_mean(cardinality, lambda_means);
  out.cov = MatrixXd::Zero(cardinality, cardinality);
  for (std::size_t j = 0; j < child_lambda.size(); ++j) {
    const VectorXd d = jac::internal_lambda_wrt_child(cardinality, lambda_means,
                                                      static_cast<int>(j));
    out.cov += scale_cov(d, child_lambda[j].cov);
  }
  out.cov = symmetrized(std::move(out.cov));
  return out;
}

MessageStats so_pi_message(const MessageStats& internal_pi,
                           std::span<const MessageStats> child_lambda,
                           int target_child) {
  const std::vector<VectorXd> lambda_means = means_of(child_lambda);
  const int card = static_cast<int>(internal_pi.mean.size());
  MessageStats out;
  out.mean = pi_message_mean(internal_pi.mean, lambda_means, target_child);
  const VectorXd d_pi = jac::pi_message_wrt_internal(card, lambda_means, target_child);
  out.cov = scale_cov(d_pi, internal_pi.cov);
  for (std::size_t j = 0; j < child_lambda.size(); ++j) {
    if (static_cast<int>(j) == target_child) continue;
    const VectorXd d = jac::pi_message_wrt_sibling(internal_pi.mean, lambda_means,
                                                   target_child, static_cast<int>(j));
    out.cov += scale_cov(d, child_lambda[j].cov);
  }
  out.cov = symmetrized(std::move(out.cov));
  return out;
}

MessageStats so_lambda_message(const MatrixXd& cpt_mean, const CptMoments& cpt,
                               std::span<const int> parent_cards,
                               int target_parent,
                               const MessageStats& internal_lambda,
                               std::span<const MessageStats> parent_pi) {
  const std::vector<VectorXd> pi_means = means_of(parent_pi);
  MessageStats out;
  out.mean = lambda_message_mean(cpt_mean, parent_cards, target_parent,
                                 internal_lambda.mean, pi_means);
  const Eigen::Index card = out.mean.size();
  out.cov = MatrixXd::Zero(card, card);
  for (int r = 0; r < cpt_mean.rows(); ++r) {
    const MatrixXd J = jac::lambda_message_wrt_theta(
        parent_cards, target_parent, r, internal_lambda.mean, pi_means);
    out.cov += J * cpt.rows[r].cov * J.transpose();
  }
  for (std::size_t j = 0; j < parent_pi.size(); ++j) {
    if (static_cast<int>(j) == target_parent) continue;
    const MatrixXd J = jac::lambda_message_wrt_parent(
        cpt_mean, parent_cards, target_parent, static_cast<int>(j),
        internal_lambda.mean, pi_means);
    out.cov += J * parent_pi[j].cov * J.transpose();
  }
  const MatrixXd J_lambda = jac::lambda_message_wrt_internal(
      cpt_mean, parent_cards, target_parent, pi_means);
  out.cov += J_lambda * internal_lambda.cov * J_lambda.transpose();
  out.cov = symmetrized(std::move(out.cov));
  return out;
}

MarginalEstimate so_belief(int variable, const MessageStats& internal_pi,
                           const MessageStats& internal_lambda) {
  MarginalEstimate out;
  out.variable = variable;
  out.mean = belief_mean(internal_pi.mean, internal_lambda.mean);
  const MatrixXd J_lambda = jac::belief_wrt_lambda(internal_pi.mean, internal_lambda.mean);
  const MatrixXd J_pi = jac::belief_wrt_pi(internal_pi.mean, internal_lambda.mean);
  out.cov = symmetrized(J_lambda * internal_lambda.cov * J_lambda.transpose() +
                        J_pi * internal_pi.cov * J_pi.transpose());
  return out;
}

namespace {

MessageStats one_hot_stats(int cardinality, int state) {
  VectorXd v = VectorXd::Zero(cardinality);
  v[state] = 1.0;
  return MessageStats::certain(std::move(v));
}

}  // namespace

SolbpResult run_solbp(const NetworkStructure& structure,
                      const NetworkMoments& moments, const Evidence& evidence,
                      const PropagationOptions& options, Rng& rng,
                      const RoundObserver& observer) {
  evidence.validate(structure);
  const MessageGraph graph(structure);
  const int n = structure.num_variables();
  const int num_edges = graph.num_edges();

  // mean tables, reused by every kernel call
  std::vector<MatrixXd> mean_cpt(n);
  std::vector<std::vector<int>> parent_cards(n);
  for (int v = 0; v < n; ++v) {
    parent_cards[v] = structure.parent_cardinalities(v);
    const auto& rows = moments.tables[v].rows;
    MatrixXd table(rows.size(), structure.variable(v).cardinality);
    for (std::size_t r = 0; r < rows.size(); ++r)
      table.row(r) = rows[r].mean.transpose();
    mean_cpt[v] = std::move(table);
  }

  std::vector<int> out_pos(num_edges, 0);
  for (int v = 0; v < n; ++v)
    for (std::size_t k = 0; k < graph.out_edges[v].size(); ++k)
      out_pos[graph.out_edges[v][k]] = static_cast<int>(k);

  SecondOrderBeliefState state;
  state.pi_messages.resize(num_edges);
  state.lambda_messages.resize(num_edges);
  for (int e = 0; e < num_edges; ++e) {
    const int card = structure.variable(graph.edges[e].parent).cardinality;
    state.pi_messages[e] = MessageStats::certain(VectorXd::Constant(card, 1.0 / card));
    state.lambda_messages[e] = MessageStats::certain(VectorXd::Ones(card));
  }
  state.internal_pi.resize(n);
  state.internal_lambda.resize(n);
  for (int v = 0; v < n; ++v) {
    const int card = structure.variable(v).cardinality;
    if (evidence.observed(v)) {
      state.internal_pi[v] = one_hot_stats(card, evidence.state(v));
      state.internal_lambda[v] = one_hot_stats(card, evidence.state(v));
    } else {
      state.internal_pi[v] =
          structure.parents(v).empty()
              ? moments.tables[v].rows[0]
              : MessageStats::certain(VectorXd::Constant(card, 1.0 / card));
      state.internal_lambda[v] = MessageStats::certain(VectorXd::Ones(card));
    }
  }

  std::vector<int> order(graph.num_messages());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> pi_arrived(n), lambda_arrived(n);
  std::vector<MessageStats> scratch;

  auto gather = [&](const std::vector<int>& edge_ids,
                    const std::vector<MessageStats>& source)
      -> std::span<const MessageStats> {
    scratch.clear();
    for (int e : edge_ids) scratch.push_back(source[e]);
    return scratch;
  };

  ConvergenceReport report;
  std::vector<VectorXd> prev_means(2 * num_edges);
  while (true) {
    for (int e = 0; e < num_edges; ++e) {
      prev_means[e] = state.pi_messages[e].mean;
      prev_means[num_edges + e] = state.lambda_messages[e].mean;
    }
    rng.shuffle(order);
    std::fill(pi_arrived.begin(), pi_arrived.end(), 0);
    std::fill(lambda_arrived.begin(), lambda_arrived.end(), 0);

    for (int id : order) {
      const int e = graph.edge_of(id);
      const MessageGraph::Edge& edge = graph.edges[e];
      if (graph.is_pi_message(id)) {
        const int sender = edge.parent;
        const int receiver = edge.child;
        MessageStats stats = so_pi_message(
            state.internal_pi[sender],
            gather(graph.out_edges[sender], state.lambda_messages), out_pos[e]);
        if (options.normalize_messages) {
          const double f = normalize_sum(stats.mean);
          stats.cov *= f * f;
        }
        state.pi_messages[e] = std::move(stats);
        if (++pi_arrived[receiver] ==
                static_cast<int>(structure.parents(receiver).size()) &&
            !evidence.observed(receiver)) {
          MessageStats pi = so_internal_pi(
              mean_cpt[receiver], moments.tables[receiver], parent_cards[receiver],
              gather(graph.in_edges[receiver], state.pi_messages));
          if (options.normalize_messages) {
            const double f = normalize_sum(pi.mean);
            pi.cov *= f * f;
          }
          state.internal_pi[receiver] = std::move(pi);
        }
      } else {
        const int sender = edge.child;
        const int receiver = edge.parent;
        MessageStats stats = so_lambda_message(
            mean_cpt[sender], moments.tables[sender], parent_cards[sender],
            edge.parent_pos, state.internal_lambda[sender],
            gather(graph.in_edges[sender], state.pi_messages));
        if (options.normalize_messages) {
          const double f = rescale_max(stats.mean);
          stats.cov *= f * f;
        }
        state.lambda_messages[e] = std::move(stats);
        if (++lambda_arrived[receiver] ==
                static_cast<int>(structure.children(receiver).size()) &&
            !evidence.observed(receiver)) {
          MessageStats lambda = so_internal_lambda(
              structure.variable(receiver).cardinality,
              gather(graph.out_edges[receiver], state.lambda_messages));
          if (options.normalize_messages) {
            const double f = rescale_max(lambda.mean);
            lambda.cov *= f * f;
          }
          state.internal_lambda[receiver] = std::move(lambda);
        }
      }
    }

    ++report.rounds;
    state.round = report.rounds;
    if (observer) observer(state);
    report.max_delta = 0.0;
    for (int e = 0; e < num_edges; ++e) {
      report.max_delta = std::max(
          report.max_delta,
          (state.pi_messages[e].mean - prev_means[e]).cwiseAbs().maxCoeff());
      report.max_delta = std::max(
          report.max_delta, (state.lambda_messages[e].mean - prev_means[num_edges + e])
                                .cwiseAbs()
                                .maxCoeff());
    }
    if (report.max_delta <= options.epsilon) {
      report.converged = true;
      break;
    }
    if (report.rounds >= options.max_rounds) break;
  }

  SolbpResult result;
  result.report = report;
  result.marginals.reserve(n);
  for (int v = 0; v < n; ++v)
    result.marginals.push_back(
        so_belief(v, state.internal_pi[v], state.internal_lambda[v]));
  return result;
}

SolbpResult run_solbp(const UncertainNetwork& network, const Evidence& evidence,
                      const PropagationOptions& options, Rng& rng,
                      const RoundObserver& observer) {
  return run_solbp(network.structure(), moments_of(network), evidence, options,
                   rng, observer);
}

}  // namespace sobn
