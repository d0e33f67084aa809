#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sobn/types.hpp"

namespace sobn {

// -- Confidence intervals and calibration. ------------------------------------

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Equal-tailed interval of significance gamma from a Beta distribution
// moment-matched to (mean, variance): a = mean*nu, b = (1-mean)*nu with
// nu = mean(1-mean)/variance - 1. Degenerates to [mean, mean] when the
// variance is zero or nu is not positive. Throws std::domain_error when the
// variance exceeds the feasible mean(1-mean) by more than 1e-12.
ConfidenceInterval confidence_interval(double mean, double variance,
                                       double gamma);

enum class EngineKind { Solbp, Sospn };
const char* to_string(EngineKind engine);

// Everything recorded for one experimental trial.
struct TrialRecord {
  struct NodeResult {
    int node = -1;
    VectorXd truth;  // exact p(Y|e) under the ground-truth network
    MarginalEstimate solbp;
    MarginalEstimate sospn;
  };

  int trial = 0;
  int ground_truth_id = 0;
  bool ok = true;
  std::string error;               // for skipped trials
  std::vector<NodeResult> nodes;   // queried (non-evidence) nodes
  int solbp_rounds = 0;
  bool solbp_converged = true;
  double solbp_seconds = 0.0;
  double sospn_seconds = 0.0;
};

struct DecbodCurve {
  VectorXd gamma;
  VectorXd fraction;  // in-bounds rate at each gamma
};

// Grid 0, step, 2*step, ... capped at 0.99.
VectorXd decbod_gamma_grid(double step);

// Fraction of (trial, node, state) tests whose ground-truth probability lands
// in the moment-matched interval. Binary nodes contribute one test (state 0);
// wider nodes contribute one per state. Variances are clamped to the feasible
// range before matching.
DecbodCurve decbod(std::span<const TrialRecord> records, EngineKind engine,
                   const VectorXd& gamma_grid);

// -- Experiment protocol. -------------------------------------------------------

struct ExperimentConfig {
  std::string name = "experiment";
  int n_train = 100;
  int n_runs = 1000;
  int trials_per_ground_truth = 100;
  double epsilon = 1e-8;
  int max_rounds = 200;
  double gamma_step = 0.01;
  std::uint64_t seed = 0;
  int jobs = 1;  // <= 0 picks the hardware concurrency
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered by trial id
  int failures = 0;
};

// One trial: draw evidence values from the current ground truth, learn a
// Dirichlet network from n_train ancestral samples, run both second-order
// engines on the learned network, and record the exact ground-truth
// marginals. The ground truth itself is resampled every
// trials_per_ground_truth trials. Deterministic for a fixed seed regardless
// of `jobs`: every random stream is derived from (seed, trial or
// ground-truth index). Timings cover only the engine calls.
ExperimentResult run_experiment(const NetworkStructure& structure,
                                const std::vector<int>& evidence_nodes,
                                const ExperimentConfig& config);

// -- CSV artifacts. ---------------------------------------------------------------
//
// Each artifact starts with a `# sobn-<what> 1` schema line, then a header
// row. Numbers print with up to 17 significant digits; with a fixed seed the
// trials, scatter and decbod files are reproducible byte-for-byte (timing
// files are not, by nature).

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);

void write_scatter_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_timing_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_decbod_csv(std::ostream& out, const DecbodCurve& solbp,
                      const DecbodCurve& sospn);

}  // namespace sobn
