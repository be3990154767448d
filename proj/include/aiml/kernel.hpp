#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "aiml/manifold.hpp"

namespace aiml {

/// Symmetric m x m matrix of integrated augmentation-invariant weights
///   W_{i1,i2} = (1/n^2) sum_{j1,j2} exp(-||X_{i1,j1} - X_{i2,j2}||^2 / t),
/// diagonal included. Entries lie in (0, 1]; a diagonal entry equals 1 only
/// when all views of that sample coincide.
struct WeightMatrix {
  Eigen::MatrixXd values;
  double bandwidth_t = 0.0;
  int n_views = 0;

  int size() const { return static_cast<int>(values.rows()); }
};

/// Exact double sum over all view pairs, computed on the upper triangle in a
/// fixed (ascending j1, then j2) order and mirrored, so the result is
/// symmetric by construction and stable run to run.
WeightMatrix integrated_weights(const MultiViewDataset& dataset, double t);

/// Bandwidth selection rules. The two rate rules follow the asymptotic
/// prescriptions t = m^{-1/(d+4)} and t = (log m / m)^{2/(4d+13)}; they
/// assume unit-scale manifolds. The median rule is data-driven: `scale`
/// times the median of squared Euclidean distances over a seeded subsample
/// of at most 10^4 cross-sample view pairs.
struct BandwidthRule {
  enum Kind { kTheoryRate, kLogRate, kMedianHeuristic } kind = kMedianHeuristic;
  int dim = 2;        // intrinsic dimension d, used by the rate rules
  double scale = 1.0;  // multiplier on the median heuristic

  static BandwidthRule theory_rate(int d);
  static BandwidthRule log_rate(int d);
  static BandwidthRule median(double scale = 1.0);
  static BandwidthRule from_name(const std::string& name, int d);
  std::string name() const;
};

double bandwidth_heuristic(const MultiViewDataset& dataset,
                           const BandwidthRule& rule,
                           std::uint64_t seed = 0x6d656469616eULL);

/// Row sums of W (degree vector); strictly positive since each diagonal
/// block contributes at least the n same-view unit terms.
Eigen::VectorXd degree_vector(const WeightMatrix& weights);

}  // namespace aiml
