#include "sobn/dirichlet.hpp"

namespace sobn {

NetworkMoments moments_of(const UncertainNetwork& network) {
  NetworkMoments moments;
  moments.tables.resize(network.structure().num_variables());
  for (int v = 0; v < network.structure().num_variables(); ++v) {
    const MatrixXd& alpha = network.alpha(v);
    auto& rows = moments.tables[v].rows;
    rows.reserve(alpha.rows());
    for (int r = 0; r < alpha.rows(); ++r) {
      VectorXd row = alpha.row(r).transpose();
      rows.push_back(MessageStats{dirichlet_mean(row), dirichlet_covariance(row)});
    }
  }
  return moments;
}

ConcreteNetwork mean_network(const UncertainNetwork& network) {
  std::vector<MatrixXd> tables;
  tables.reserve(network.tables().size());
  for (const MatrixXd& alpha : network.tables()) {
    MatrixXd mean(alpha.rows(), alpha.cols());
    for (int r = 0; r < alpha.rows(); ++r)
      mean.row(r) = alpha.row(r) / alpha.row(r).sum();
    tables.push_back(std::move(mean));
  }
  return ConcreteNetwork(network.structure(), std::move(tables));
}

}  // namespace sobn
