#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace aiml {

/// k-selection for the kNN classifier: either a fixed k or the rate rule
/// k = round(s^{2a/(2a+dim)}) with Holder smoothness a, clamped to [1, s].
struct KnnConfig {
  enum Kind { kFixed, kRateRule } kind = kRateRule;
  int fixed_k = 1;
  double holder_alpha = 1.0;
  int dim = 1;

  static KnnConfig fixed(int k);
  static KnnConfig rate_rule(double holder_alpha, int dim);
  int resolve(int s) const;
};

/// Majority-vote binary kNN with Euclidean distance. Distance ties break by
/// ascending training index; the vote returns +1 only on a strict majority
/// (> k/2), so an even-k exact tie returns -1.
int knn_classify(const Eigen::MatrixXd& train_features,
                 const std::vector<int>& train_labels,
                 const Eigen::VectorXd& query, int k);

/// Plurality-vote variant for integer class labels (used by the digits
/// pipeline); vote ties break toward the smaller label.
int knn_classify_multiclass(const Eigen::MatrixXd& train_features,
                            const std::vector<int>& train_labels,
                            const Eigen::VectorXd& query, int k);

/// Fraction of test points whose prediction differs from their label.
double misclassification_error(const Eigen::MatrixXd& train_features,
                               const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_features,
                               const std::vector<int>& test_labels, int k,
                               bool multiclass = false);

}  // namespace aiml
