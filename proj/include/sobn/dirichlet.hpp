#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "sobn/types.hpp"

namespace sobn {

// Mean of a Dirichlet distribution: alpha / sum(alpha).
template <typename Derived>
Eigen::VectorXd dirichlet_mean(const Eigen::MatrixBase<Derived>& alpha) {
  if (alpha.size() == 0 || (alpha.array() <= 0.0).any())
    throw std::domain_error("dirichlet_mean: alphas must be positive");
  const double strength = alpha.sum();
  return alpha.template cast<double>() / strength;
}

// Covariance of a Dirichlet distribution:
//   cov(k, k') = mu_k (delta_{k,k'} - mu_k') / (S + 1),  S = sum(alpha).
// Rows sum to zero: the outcome is constrained to the simplex.
template <typename Derived>
Eigen::MatrixXd dirichlet_covariance(const Eigen::MatrixBase<Derived>& alpha) {
  if (alpha.size() == 0 || (alpha.array() <= 0.0).any())
    throw std::domain_error("dirichlet_covariance: alphas must be positive");
  const double strength = alpha.sum();
  const Eigen::VectorXd mu = alpha.template cast<double>() / strength;
  Eigen::MatrixXd cov =
      (mu.asDiagonal().toDenseMatrix() - mu * mu.transpose()) / (strength + 1.0);
  return cov;
}

// Tablewise moments of every CPT row. Row r of table v describes
// p(V = . | parents(V) = unindex(r)).
NetworkMoments moments_of(const UncertainNetwork& network);

// Network of row means; the first-order view of an uncertain network.
ConcreteNetwork mean_network(const UncertainNetwork& network);

}  // namespace sobn
