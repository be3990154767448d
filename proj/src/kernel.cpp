#include "aiml/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aiml/errors.hpp"
#include "aiml/rng.hpp"

namespace aiml {

WeightMatrix integrated_weights(const MultiViewDataset& dataset, double t) {
  if (t <= 0.0) throw ConfigError("integrated_weights: bandwidth t must be > 0");
  if (!dataset.points.allFinite()) {
    throw DataError("integrated_weights: non-finite point coordinates");
  }
  const int m = dataset.m;
  const int n = dataset.n;
  const double inv_t = 1.0 / t;
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);

  WeightMatrix w;
  w.bandwidth_t = t;
  w.n_views = n;
  w.values.resize(m, m);
  for (int i1 = 0; i1 < m; ++i1) {
    for (int i2 = i1; i2 < m; ++i2) {
      double sum = 0.0;
      for (int j1 = 0; j1 < n; ++j1) {
        const auto a = dataset.view(i1, j1);
        for (int j2 = 0; j2 < n; ++j2) {
          sum += std::exp(-(a - dataset.view(i2, j2)).squaredNorm() * inv_t);
        }
      }
      w.values(i1, i2) = sum * inv_n2;
      w.values(i2, i1) = w.values(i1, i2);
    }
  }
  return w;
}

BandwidthRule BandwidthRule::theory_rate(int d) {
  if (d < 1) throw ConfigError("bandwidth rule: dimension d must be >= 1");
  return {kTheoryRate, d, 1.0};
}

BandwidthRule BandwidthRule::log_rate(int d) {
  if (d < 1) throw ConfigError("bandwidth rule: dimension d must be >= 1");
  return {kLogRate, d, 1.0};
}

BandwidthRule BandwidthRule::median(double scale) {
  if (scale <= 0.0) throw ConfigError("bandwidth rule: scale must be > 0");
  return {kMedianHeuristic, 0, scale};
}

BandwidthRule BandwidthRule::from_name(const std::string& name, int d) {
  if (name == "theory") return theory_rate(d);
  if (name == "lograte") return log_rate(d);
  if (name == "median") return median();
  throw ConfigError("unknown bandwidth rule '" + name +
                    "' (expected theory, lograte, median)");
}

std::string BandwidthRule::name() const {
  switch (kind) {
    case kTheoryRate: return "theory";
    case kLogRate: return "lograte";
    case kMedianHeuristic: return "median";
  }
  return "unknown";
}

double bandwidth_heuristic(const MultiViewDataset& dataset,
                           const BandwidthRule& rule, std::uint64_t seed) {
  const int m = dataset.m;
  if (m < 2) throw ConfigError("bandwidth_heuristic: m must be >= 2");
  switch (rule.kind) {
    case BandwidthRule::kTheoryRate:
      return std::pow(static_cast<double>(m), -1.0 / (rule.dim + 4.0));
    case BandwidthRule::kLogRate:
      return std::pow(std::log(static_cast<double>(m)) / m,
                      2.0 / (4.0 * rule.dim + 13.0));
    case BandwidthRule::kMedianHeuristic:
      break;
  }

  const int n = dataset.n;
  constexpr std::size_t kMaxPairs = 10000;
  const std::size_t total =
      static_cast<std::size_t>(m) * (m - 1) / 2 * n * n;
  std::vector<double> sq;
  sq.reserve(std::min(total, kMaxPairs));
  if (total <= kMaxPairs) {
    for (int i1 = 0; i1 < m; ++i1)
      for (int i2 = i1 + 1; i2 < m; ++i2)
        for (int j1 = 0; j1 < n; ++j1)
          for (int j2 = 0; j2 < n; ++j2)
            sq.push_back((dataset.view(i1, j1) - dataset.view(i2, j2)).squaredNorm());
  } else {
    Rng rng(Rng::derive(seed, {0x6d64ULL}));
    while (sq.size() < kMaxPairs) {
      const int i1 = static_cast<int>(rng.next_below(m));
      int i2 = static_cast<int>(rng.next_below(m - 1));
      if (i2 >= i1) ++i2;  // cross-sample pairs only
      const int j1 = static_cast<int>(rng.next_below(n));
      const int j2 = static_cast<int>(rng.next_below(n));
      sq.push_back((dataset.view(i1, j1) - dataset.view(i2, j2)).squaredNorm());
    }
  }
  std::sort(sq.begin(), sq.end());
  const std::size_t k = sq.size();
  const double median = k % 2 == 1 ? sq[k / 2] : 0.5 * (sq[k / 2 - 1] + sq[k / 2]);
  return rule.scale * median;
}

Eigen::VectorXd degree_vector(const WeightMatrix& weights) {
  return weights.values.rowwise().sum();
}

}  // namespace aiml
