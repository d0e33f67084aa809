#pragma once

#include <vector>

#include "sobn/exact_types.hpp"
#include "sobn/rng.hpp"
#include "sobn/types.hpp"

namespace sobn {

// Exact posterior marginals obtained by summing the joint over every
// assignment compatible with the evidence.
struct QueryResult {
  std::vector<VectorXd> marginals;  // p(Y_i | e); one-hot on evidence nodes
  double p_evidence = 0.0;
};

// Largest free joint state space enumerate_query will walk.
inline constexpr long long kEnumerationGuard = 1LL << 25;

// Brute-force inference. Throws InconsistentEvidenceError when p(e) = 0 and
// CapacityError when the free state space exceeds kEnumerationGuard.
QueryResult enumerate_query(const ConcreteNetwork& network,
                            const Evidence& evidence);

// One complete assignment drawn in topological order.
std::vector<int> ancestral_sample(const ConcreteNetwork& network, Rng& rng);

// Posterior Dirichlet tables from complete data: alpha = 1 + count. Rows
// never seen keep the uniform all-ones prior.
UncertainNetwork learn_dirichlet(const NetworkStructure& structure,
                                 const Dataset& data);

// Every CPT row drawn independently from Dirichlet(1, ..., 1).
ConcreteNetwork sample_ground_truth(const NetworkStructure& structure,
                                    Rng& rng);

// Every CPT row drawn independently from its Dirichlet posterior.
ConcreteNetwork sample_parameters(const UncertainNetwork& network, Rng& rng);

// Monte-Carlo second-order oracle: repeatedly sample parameters, run
// enumerate_query, and report the sample mean and unbiased sample covariance
// of p(Y|e) for every unobserved variable. Draws that make the evidence
// impossible are rejected and redrawn, up to 10 attempts per sample.
std::vector<MarginalEstimate> monte_carlo_second_order(
    const UncertainNetwork& network, const Evidence& evidence, int n_samples,
    Rng& rng);

}  // namespace sobn
