#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace sobn {

// All randomness in this library is mt19937_64 driven through the explicit
// draw routines below, so results are reproducible bit-for-bit from a seed.
// Experiment code derives independent streams from one master seed with
// Rng::stream(master, kind, index); the derivation is a SplitMix64 chain over
// (master, kind, index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  enum class StreamKind : std::uint64_t {
    GroundTruth = 1,
    Trial = 2,
    Schedule = 3,
    MonteCarlo = 4,
    Generic = 5,
  };

  static std::uint64_t derive_seed(std::uint64_t master, StreamKind kind,
                                   std::uint64_t index);
  static Rng stream(std::uint64_t master, StreamKind kind, std::uint64_t index) {
    return Rng(derive_seed(master, kind, index));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  int uniform_int(int n);

  // Standard normal via Box-Muller (cosine branch; no state is cached).
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 handled by the
  // usual boost Gamma(shape+1) * U^{1/shape}.
  double gamma(double shape);

  // Dirichlet(alpha) via normalized Gamma draws.
  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);

  // Draw from an unnormalized nonnegative weight vector.
  int categorical(const Eigen::VectorXd& probabilities);

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
      std::swap(items[i], items[uniform_int(i + 1)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sobn
