#include "sobn/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sobn {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::derive_seed(std::uint64_t master, StreamKind kind,
                               std::uint64_t index) {
  std::uint64_t state = master;
  splitmix64(state);
  state ^= static_cast<std::uint64_t>(kind) * 0xD6E8FEB86659FD93ULL;
  splitmix64(state);
  state ^= index;
  return splitmix64(state);
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = gen_();
  } while (draw >= limit);
  return static_cast<int>(draw % bound);
}

double Rng::normal() {
  // Box-Muller; u clamped away from 0 so the log is finite.
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
  if (alpha.size() == 0 || (alpha.array() <= 0.0).any())
    throw std::invalid_argument("dirichlet: alphas must be positive");
  Eigen::VectorXd draw(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) draw[k] = gamma(alpha[k]);
  const double total = draw.sum();
  if (total <= 0.0) {
    // all gammas underflowed; fall back to the largest alpha
    Eigen::Index best = 0;
    alpha.maxCoeff(&best);
    draw.setZero();
    draw[best] = 1.0;
    return draw;
  }
  return draw / total;
}

int Rng::categorical(const Eigen::VectorXd& probabilities) {
  const double total = probabilities.sum();
  if (!(total > 0.0))
    throw std::invalid_argument("categorical: weights must have positive sum");
  const double target = uniform() * total;
  double cum = 0.0;
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    cum += probabilities[k];
    if (target < cum) return static_cast<int>(k);
  }
  return static_cast<int>(probabilities.size() - 1);
}

}  // namespace sobn
