#include <cmath>
#include <vector>

#include "aiml/errors.hpp"
#include "aiml/knn.hpp"
#include "aiml/rng.hpp"
#include "doctest.h"

using namespace aiml;

namespace {

Eigen::MatrixXd line_points(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  int i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Eigen::VectorXd q1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

}  // namespace

TEST_SUITE("knn") {

TEST_CASE("k=1 returns the label of an exactly matching point") {
  const auto train = line_points({0.0, 2.0, 5.0});
  CHECK(knn_classify(train, {-1, 1, -1}, q1(2.0), 1) == 1);
}

TEST_CASE("strict majority rule") {
  const auto train = line_points({1.0, 2.0, 3.0, 10.0});
  // k=3 nearest of query 0: labels (+1, +1, -1)
  CHECK(knn_classify(train, {1, 1, -1, -1}, q1(0.0), 3) == 1);
  // k=2 nearest labels (+1, -1): exact tie is not a strict majority
  CHECK(knn_classify(train, {1, -1, -1, -1}, q1(0.0), 2) == -1);
}

TEST_CASE("distance ties break toward the smaller training index") {
  const auto train = line_points({-1.0, 1.0});
  CHECK(knn_classify(train, {1, -1}, q1(0.0), 1) == 1);
  CHECK(knn_classify(train, {-1, 1}, q1(0.0), 1) == -1);
}

TEST_CASE("bad inputs are configuration errors") {
  const auto train = line_points({0.0, 1.0});
  CHECK_THROWS_AS(knn_classify(Eigen::MatrixXd(0, 1), {}, q1(0.0), 1), ConfigError);
  CHECK_THROWS_AS(knn_classify(train, {1, -1}, q1(0.0), 3), ConfigError);
  CHECK_THROWS_AS(knn_classify(train, {1, -1}, q1(0.0), 0), ConfigError);
  CHECK_THROWS_AS(knn_classify(train, {1}, q1(0.0), 1), ConfigError);
}

TEST_CASE("positive rescaling never changes a prediction") {
  Rng rng(12);
  Eigen::MatrixXd train(40, 3);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    for (int d = 0; d < 3; ++d) train(i, d) = rng.uniform(-1, 1);
    labels[i] = rng.next_below(2) == 0 ? -1 : 1;
  }
  const Eigen::MatrixXd scaled = 3.7 * train;
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd q(3);
    for (int d = 0; d < 3; ++d) q(d) = rng.uniform(-1, 1);
    for (int k : {1, 3, 7}) {
      CHECK(knn_classify(train, labels, q, k) ==
            knn_classify(scaled, labels, 3.7 * q, k));
    }
  }
}

TEST_CASE("permuting training rows preserves generic predictions") {
  Rng rng(13);
  Eigen::MatrixXd train(30, 2);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) {
    train(i, 0) = rng.uniform(-1, 1);
    train(i, 1) = rng.uniform(-1, 1);
    labels[i] = rng.next_below(2) == 0 ? -1 : 1;
  }
  auto perm = random_permutation(30, rng);
  Eigen::MatrixXd shuffled(30, 2);
  std::vector<int> shuffled_labels(30);
  for (int i = 0; i < 30; ++i) {
    shuffled.row(i) = train.row(static_cast<int>(perm[i]));
    shuffled_labels[i] = labels[perm[i]];
  }
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd q(2);
    q << rng.uniform(-1, 1), rng.uniform(-1, 1);
    CHECK(knn_classify(train, labels, q, 5) ==
          knn_classify(shuffled, shuffled_labels, q, 5));
  }
}

TEST_CASE("rate rule resolves and clamps") {
  const KnnConfig raw = KnnConfig::rate_rule(1.0, 2);   // k ~ sqrt(s)
  CHECK(raw.resolve(300) == 17);
  const KnnConfig spectral = KnnConfig::rate_rule(1.0, 1);  // k ~ s^(2/3)
  CHECK(spectral.resolve(300) == 45);
  CHECK(spectral.resolve(1) == 1);
  CHECK(KnnConfig::fixed(5).resolve(3) == 3);  // clamp to s
  CHECK_THROWS_AS(KnnConfig::fixed(0), ConfigError);
  CHECK_THROWS_AS(KnnConfig::rate_rule(0.0, 1), ConfigError);
}

TEST_CASE("multiclass plurality vote with smaller-label ties") {
  const auto train = line_points({1.0, 2.0, 3.0, 4.0});
  CHECK(knn_classify_multiclass(train, {7, 7, 3, 3}, q1(0.0), 3) == 7);
  CHECK(knn_classify_multiclass(train, {7, 3, 7, 3}, q1(0.0), 4) == 3);  // 2-2 tie
}

TEST_CASE("error vanishes on a memorized deterministic training set") {
  Rng rng(14);
  Eigen::MatrixXd x(20, 2);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = rng.uniform(-1, 1);
    x(i, 1) = rng.uniform(-1, 1);
    y[i] = x(i, 0) > 0 ? 1 : -1;
  }
  CHECK(misclassification_error(x, y, x, y, 1) == 0.0);
}

TEST_CASE("labels independent of features give the marginal mismatch rate") {
  Rng rng(15);
  const int s = 200, t = 2000;
  Eigen::MatrixXd train(s, 2), test(t, 2);
  std::vector<int> train_y(s), test_y(t);
  for (int i = 0; i < s; ++i) {
    train(i, 0) = rng.uniform(-1, 1);
    train(i, 1) = rng.uniform(-1, 1);
    train_y[i] = rng.next_below(2) == 0 ? -1 : 1;
  }
  for (int i = 0; i < t; ++i) {
    test(i, 0) = rng.uniform(-1, 1);
    test(i, 1) = rng.uniform(-1, 1);
    test_y[i] = rng.next_below(2) == 0 ? -1 : 1;
  }
  const double err = misclassification_error(train, train_y, test, test_y, 5);
  // P(err) = 1/2 for a coin-flip marginal; sigma = sqrt(1/4 / t)
  CHECK(std::abs(err - 0.5) < 3.0 * std::sqrt(0.25 / t));
}

}  // TEST_SUITE
