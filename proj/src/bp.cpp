#include "sobn/bp.hpp"

#include <numeric>

#include "sobn/errors.hpp"

namespace sobn {

VectorXd internal_pi_mean(const MatrixXd& cpt, std::span<const int> parent_cards,
                          std::span<const VectorXd> parent_pi) {
  if (parent_cards.empty()) return cpt.row(0).transpose();
  VectorXd out = VectorXd::Zero(cpt.cols());
  std::vector<int> states(parent_cards.size(), 0);
  for (int r = 0; r < cpt.rows(); ++r) {
    double weight = 1.0;
    for (std::size_t i = 0; i < states.size(); ++i) weight *= parent_pi[i][states[i]];
    out += weight * cpt.row(r).transpose();
    next_config(states, parent_cards);
  }
  return out;
}

VectorXd internal_lambda_mean(int cardinality,
                              std::span<const VectorXd> child_lambda) {
  VectorXd out = VectorXd::Ones(cardinality);
  for (const VectorXd& message : child_lambda) out.array() *= message.array();
  return out;
}

VectorXd pi_message_mean(const VectorXd& internal_pi,
                         std::span<const VectorXd> child_lambda,
                         int target_child) {
  VectorXd out = internal_pi;
  for (std::size_t j = 0; j < child_lambda.size(); ++j)
    if (static_cast<int>(j) != target_child) out.array() *= child_lambda[j].array();
  return out;
}

VectorXd lambda_message_mean(const MatrixXd& cpt,
                             std::span<const int> parent_cards,
                             int target_parent, const VectorXd& internal_lambda,
                             std::span<const VectorXd> parent_pi) {
  VectorXd out = VectorXd::Zero(parent_cards[target_parent]);
  std::vector<int> states(parent_cards.size(), 0);
  for (int r = 0; r < cpt.rows(); ++r) {
    double weight = 1.0;
    for (std::size_t j = 0; j < states.size(); ++j)
      if (static_cast<int>(j) != target_parent) weight *= parent_pi[j][states[j]];
    out[states[target_parent]] += weight * cpt.row(r).dot(internal_lambda);
    next_config(states, parent_cards);
  }
  return out;
}

VectorXd belief_mean(const VectorXd& internal_pi, const VectorXd& internal_lambda) {
  VectorXd product = internal_pi.cwiseProduct(internal_lambda);
  const double total = product.sum();
  if (!(total > 0.0))
    throw InconsistentEvidenceError("belief: pi and lambda have no common support");
  return product / total;
}

double normalize_sum(VectorXd& v) {
  const double total = v.sum();
  if (!(total > 0.0))
    throw InconsistentEvidenceError("message mean sums to zero");
  v /= total;
  return 1.0 / total;
}

double rescale_max(VectorXd& v) {
  const double top = v.maxCoeff();
  if (!(top > 0.0))
    throw InconsistentEvidenceError("message mean is identically zero");
  v /= top;
  return 1.0 / top;
}

MessageGraph::MessageGraph(const NetworkStructure& structure) {
  const int n = structure.num_variables();
  in_edges.assign(n, {});
  out_edges.assign(n, {});
  for (int child = 0; child < n; ++child) {
    const std::vector<int>& plist = structure.parents(child);
    for (std::size_t pos = 0; pos < plist.size(); ++pos) {
      const int id = static_cast<int>(edges.size());
      edges.push_back(Edge{plist[pos], child, static_cast<int>(pos)});
      in_edges[child].push_back(id);
      out_edges[plist[pos]].push_back(id);
    }
  }
}

namespace {

VectorXd one_hot(int cardinality, int state) {
  VectorXd v = VectorXd::Zero(cardinality);
  v[state] = 1.0;
  return v;
}

}  // namespace

BpResult run_bp(const ConcreteNetwork& network, const Evidence& evidence,
                const PropagationOptions& options, Rng& rng) {
  const NetworkStructure& structure = network.structure();
  evidence.validate(structure);
  const MessageGraph graph(structure);
  const int n = structure.num_variables();
  const int num_edges = graph.num_edges();

  // position of each edge inside its parent's out-edge list
  std::vector<int> out_pos(num_edges, 0);
  for (int v = 0; v < n; ++v)
    for (std::size_t k = 0; k < graph.out_edges[v].size(); ++k)
      out_pos[graph.out_edges[v][k]] = static_cast<int>(k);

  std::vector<VectorXd> pi_msg(num_edges), lambda_msg(num_edges);
  for (int e = 0; e < num_edges; ++e) {
    const int card = structure.variable(graph.edges[e].parent).cardinality;
    pi_msg[e] = VectorXd::Constant(card, 1.0 / card);
    lambda_msg[e] = VectorXd::Ones(card);
  }

  std::vector<VectorXd> internal_pi(n), internal_lambda(n);
  for (int v = 0; v < n; ++v) {
    const int card = structure.variable(v).cardinality;
    if (evidence.observed(v)) {
      internal_pi[v] = one_hot(card, evidence.state(v));
      internal_lambda[v] = one_hot(card, evidence.state(v));
    } else {
      internal_pi[v] = structure.parents(v).empty()
                           ? network.cpt(v).row(0).transpose()
                           : VectorXd::Constant(card, 1.0 / card);
      internal_lambda[v] = VectorXd::Ones(card);
    }
  }

  std::vector<int> order(graph.num_messages());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> pi_arrived(n), lambda_arrived(n);
  std::vector<VectorXd> scratch;

  auto gather = [&](const std::vector<int>& edge_ids,
                    const std::vector<VectorXd>& source) -> std::span<const VectorXd> {
    scratch.clear();
    for (int e : edge_ids) scratch.push_back(source[e]);
    return scratch;
  };

  ConvergenceReport report;
  std::vector<VectorXd> prev_pi = pi_msg, prev_lambda = lambda_msg;
  while (true) {
    prev_pi = pi_msg;
    prev_lambda = lambda_msg;
    rng.shuffle(order);
    std::fill(pi_arrived.begin(), pi_arrived.end(), 0);
    std::fill(lambda_arrived.begin(), lambda_arrived.end(), 0);

    for (int id : order) {
      const int e = graph.edge_of(id);
      const MessageGraph::Edge& edge = graph.edges[e];
      if (graph.is_pi_message(id)) {
        const int sender = edge.parent;
        const int receiver = edge.child;
        VectorXd value = pi_message_mean(
            internal_pi[sender], gather(graph.out_edges[sender], lambda_msg),
            out_pos[e]);
        if (options.normalize_messages) normalize_sum(value);
        pi_msg[e] = std::move(value);
        if (++pi_arrived[receiver] ==
                static_cast<int>(structure.parents(receiver).size()) &&
            !evidence.observed(receiver)) {
          const std::vector<int> cards = structure.parent_cardinalities(receiver);
          VectorXd pi = internal_pi_mean(network.cpt(receiver), cards,
                                         gather(graph.in_edges[receiver], pi_msg));
          if (options.normalize_messages) normalize_sum(pi);
          internal_pi[receiver] = std::move(pi);
        }
      } else {
        const int sender = edge.child;
        const int receiver = edge.parent;
        const std::vector<int> cards = structure.parent_cardinalities(sender);
        VectorXd value = lambda_message_mean(
            network.cpt(sender), cards, edge.parent_pos, internal_lambda[sender],
            gather(graph.in_edges[sender], pi_msg));
        if (options.normalize_messages) rescale_max(value);
        lambda_msg[e] = std::move(value);
        if (++lambda_arrived[receiver] ==
                static_cast<int>(structure.children(receiver).size()) &&
            !evidence.observed(receiver)) {
          VectorXd lambda = internal_lambda_mean(
              structure.variable(receiver).cardinality,
              gather(graph.out_edges[receiver], lambda_msg));
          if (options.normalize_messages) rescale_max(lambda);
          internal_lambda[receiver] = std::move(lambda);
        }
      }
    }

    ++report.rounds;
    report.max_delta = 0.0;
    for (int e = 0; e < num_edges; ++e) {
      report.max_delta = std::max(
          report.max_delta, (pi_msg[e] - prev_pi[e]).cwiseAbs().maxCoeff());
      report.max_delta = std::max(
          report.max_delta, (lambda_msg[e] - prev_lambda[e]).cwiseAbs().maxCoeff());
    }
    if (report.max_delta <= options.epsilon) {
      report.converged = true;
      break;
    }
    if (report.rounds >= options.max_rounds) break;
  }

  BpResult result;
  result.report = report;
  result.beliefs.reserve(n);
  for (int v = 0; v < n; ++v)
    result.beliefs.push_back(belief_mean(internal_pi[v], internal_lambda[v]));
  return result;
}

}  // namespace sobn
