#include "sobn/exact.hpp"

#include <string>

#include "sobn/errors.hpp"

namespace sobn {

namespace {

// Row index of variable v's CPT under a full assignment.
int row_of(const NetworkStructure& structure, int v,
           const std::vector<int>& assignment) {
  const std::vector<int>& plist = structure.parents(v);
  if (plist.empty()) return 0;
  std::vector<int> states(plist.size());
  for (std::size_t k = 0; k < plist.size(); ++k) states[k] = assignment[plist[k]];
  const std::vector<int> cards = structure.parent_cardinalities(v);
  return parent_config_index(states, cards);
}

}  // namespace

QueryResult enumerate_query(const ConcreteNetwork& network,
                            const Evidence& evidence) {
  const NetworkStructure& structure = network.structure();
  evidence.validate(structure);
  const int n = structure.num_variables();

  std::vector<int> free_vars;
  std::vector<int> free_cards;
  std::vector<int> assignment(n, 0);
  for (int v = 0; v < n; ++v) {
    if (evidence.observed(v)) {
      assignment[v] = evidence.state(v);
    } else {
      free_vars.push_back(v);
      free_cards.push_back(structure.variable(v).cardinality);
    }
  }
  if (config_count(free_cards) > kEnumerationGuard)
    throw CapacityError("enumerate_query: free state space exceeds 2^25");

  QueryResult result;
  result.marginals.resize(n);
  for (int v = 0; v < n; ++v)
    result.marginals[v] = VectorXd::Zero(structure.variable(v).cardinality);

  std::vector<int> free_states(free_vars.size(), 0);
  double p_evidence = 0.0;
  for (;;) {
    for (std::size_t k = 0; k < free_vars.size(); ++k)
      assignment[free_vars[k]] = free_states[k];
    double joint = 1.0;
    for (int v = 0; v < n && joint > 0.0; ++v)
      joint *= network.cpt(v)(row_of(structure, v, assignment), assignment[v]);
    if (joint > 0.0) {
      p_evidence += joint;
      for (int v = 0; v < n; ++v) result.marginals[v][assignment[v]] += joint;
    }
    if (!next_config(free_states, free_cards)) break;
  }
  if (!(p_evidence > 0.0))
    throw InconsistentEvidenceError("enumerate_query: evidence has probability zero");
  for (int v = 0; v < n; ++v) result.marginals[v] /= p_evidence;
  result.p_evidence = p_evidence;
  return result;
}

std::vector<int> ancestral_sample(const ConcreteNetwork& network, Rng& rng) {
  const NetworkStructure& structure = network.structure();
  std::vector<int> assignment(structure.num_variables(), -1);
  for (int v : structure.topological_order()) {
    const int row = row_of(structure, v, assignment);
    assignment[v] = rng.categorical(network.cpt(v).row(row).transpose());
  }
  return assignment;
}

UncertainNetwork learn_dirichlet(const NetworkStructure& structure,
                                 const Dataset& data) {
  std::vector<MatrixXd> alphas(structure.num_variables());
  for (int v = 0; v < structure.num_variables(); ++v)
    alphas[v] = MatrixXd::Ones(structure.row_count(v),
                               structure.variable(v).cardinality);
  for (const std::vector<int>& row : data.rows) {
    if (static_cast<int>(row.size()) != structure.num_variables())
      throw std::invalid_argument("learn_dirichlet: row width mismatch");
    for (int v = 0; v < structure.num_variables(); ++v) {
      if (row[v] < 0 || row[v] >= structure.variable(v).cardinality)
        throw std::invalid_argument("learn_dirichlet: state out of range");
      alphas[v](row_of(structure, v, row), row[v]) += 1.0;
    }
  }
  return UncertainNetwork(structure, std::move(alphas));
}

ConcreteNetwork sample_ground_truth(const NetworkStructure& structure,
                                    Rng& rng) {
  std::vector<MatrixXd> tables(structure.num_variables());
  for (int v = 0; v < structure.num_variables(); ++v) {
    const int card = structure.variable(v).cardinality;
    MatrixXd table(structure.row_count(v), card);
    const VectorXd ones = VectorXd::Ones(card);
    for (int r = 0; r < table.rows(); ++r)
      table.row(r) = rng.dirichlet(ones).transpose();
    tables[v] = std::move(table);
  }
  return ConcreteNetwork(structure, std::move(tables));
}

ConcreteNetwork sample_parameters(const UncertainNetwork& network, Rng& rng) {
  const NetworkStructure& structure = network.structure();
  std::vector<MatrixXd> tables(structure.num_variables());
  for (int v = 0; v < structure.num_variables(); ++v) {
    const MatrixXd& alpha = network.alpha(v);
    MatrixXd table(alpha.rows(), alpha.cols());
    for (int r = 0; r < alpha.rows(); ++r)
      table.row(r) = rng.dirichlet(alpha.row(r).transpose()).transpose();
    tables[v] = std::move(table);
  }
  return ConcreteNetwork(structure, std::move(tables));
}

std::vector<MarginalEstimate> monte_carlo_second_order(
    const UncertainNetwork& network, const Evidence& evidence, int n_samples,
    Rng& rng) {
  if (n_samples < 2)
    throw std::invalid_argument("monte_carlo_second_order: need at least 2 samples");
  const NetworkStructure& structure = network.structure();
  evidence.validate(structure);

  std::vector<int> queried;
  for (int v = 0; v < structure.num_variables(); ++v)
    if (!evidence.observed(v)) queried.push_back(v);

  std::vector<MarginalEstimate> estimates(queried.size());
  for (std::size_t q = 0; q < queried.size(); ++q) {
    const int card = structure.variable(queried[q]).cardinality;
    estimates[q].variable = queried[q];
    estimates[q].mean = VectorXd::Zero(card);
    estimates[q].cov = MatrixXd::Zero(card, card);
  }

  // Welford update per queried node; draws violating the evidence are
  // rejected and redrawn, 10 attempts each.
  for (int i = 0; i < n_samples; ++i) {
    QueryResult query;
    bool drawn = false;
    for (int attempt = 0; attempt < 10 && !drawn; ++attempt) {
      const ConcreteNetwork sampled = sample_parameters(network, rng);
      try {
        query = enumerate_query(sampled, evidence);
        drawn = true;
      } catch (const InconsistentEvidenceError&) {
      }
    }
    if (!drawn)
      throw InconsistentEvidenceError(
          "monte_carlo_second_order: rejection cap exceeded at sample " +
          std::to_string(i));
    const double count = i + 1;
    for (std::size_t q = 0; q < queried.size(); ++q) {
      const VectorXd& x = query.marginals[queried[q]];
      const VectorXd delta = x - estimates[q].mean;
      estimates[q].mean += delta / count;
      estimates[q].cov += delta * (x - estimates[q].mean).transpose();
    }
  }
  for (MarginalEstimate& e : estimates) {
    e.cov /= static_cast<double>(n_samples - 1);
    e.cov = ((e.cov + e.cov.transpose()) / 2.0).eval();
  }
  return estimates;
}

}  // namespace sobn
