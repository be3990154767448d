#include "aiml/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "aiml/errors.hpp"

namespace aiml {

KnnConfig KnnConfig::fixed(int k) {
  if (k < 1) throw ConfigError("knn: k must be >= 1");
  return {kFixed, k, 1.0, 1};
}

KnnConfig KnnConfig::rate_rule(double holder_alpha, int dim) {
  if (holder_alpha <= 0.0 || dim < 1) {
    throw ConfigError("knn rate rule: need holder_alpha > 0 and dim >= 1");
  }
  return {kRateRule, 1, holder_alpha, dim};
}

int KnnConfig::resolve(int s) const {
  if (s < 1) throw ConfigError("knn: empty training set");
  int k = fixed_k;
  if (kind == kRateRule) {
    const double expo = 2.0 * holder_alpha / (2.0 * holder_alpha + dim);
    k = static_cast<int>(std::lround(std::pow(static_cast<double>(s), expo)));
  }
  return std::clamp(k, 1, s);
}

namespace {

// Indices of the k nearest training rows, distance ties broken by index.
std::vector<int> k_nearest(const Eigen::MatrixXd& train,
                           const Eigen::VectorXd& query, int k) {
  const int s = static_cast<int>(train.rows());
  std::vector<std::pair<double, int>> order(s);
  for (int i = 0; i < s; ++i) {
    order[i] = {(train.row(i).transpose() - query).squaredNorm(), i};
  }
  std::partial_sort(order.begin(), order.begin() + k, order.end());
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = order[i].second;
  return idx;
}

void check_inputs(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                  int k) {
  const int s = static_cast<int>(train.rows());
  if (s == 0) throw ConfigError("knn: empty training set");
  if (static_cast<int>(labels.size()) != s) {
    throw ConfigError("knn: features/labels length mismatch");
  }
  if (k < 1 || k > s) throw ConfigError("knn: k must lie in [1, s]");
}

}  // namespace

int knn_classify(const Eigen::MatrixXd& train_features,
                 const std::vector<int>& train_labels,
                 const Eigen::VectorXd& query, int k) {
  check_inputs(train_features, train_labels, k);
  int positives = 0;
  for (int i : k_nearest(train_features, query, k)) {
    if (train_labels[i] == 1) ++positives;
  }
  return 2 * positives > k ? +1 : -1;
}

int knn_classify_multiclass(const Eigen::MatrixXd& train_features,
                            const std::vector<int>& train_labels,
                            const Eigen::VectorXd& query, int k) {
  check_inputs(train_features, train_labels, k);
  std::map<int, int> votes;
  for (int i : k_nearest(train_features, query, k)) ++votes[train_labels[i]];
  int best_label = 0, best_count = -1;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {  // map iterates ascending: ties keep the smaller
      best_label = label;
      best_count = count;
    }
  }
  return best_label;
}

double misclassification_error(const Eigen::MatrixXd& train_features,
                               const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_features,
                               const std::vector<int>& test_labels, int k,
                               bool multiclass) {
  const int t = static_cast<int>(test_features.rows());
  if (t == 0 || static_cast<int>(test_labels.size()) != t) {
    throw ConfigError("knn: bad test set");
  }
  int wrong = 0;
  for (int i = 0; i < t; ++i) {
    const Eigen::VectorXd q = test_features.row(i);
    const int pred = multiclass
                         ? knn_classify_multiclass(train_features, train_labels, q, k)
                         : knn_classify(train_features, train_labels, q, k);
    if (pred != test_labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / t;
}

}  // namespace aiml
