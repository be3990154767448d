#include <algorithm>
#include <cmath>
#include <vector>

#include "aiml/encoder.hpp"
#include "aiml/errors.hpp"
#include "aiml/manifold.hpp"
#include "aiml/rng.hpp"
#include "doctest.h"

using namespace aiml;

namespace {

// Independent straight-line forward pass: scalar loops, no Eigen products.
std::vector<double> oracle_forward(const EncoderParams& p,
                                   const std::vector<double>& x) {
  std::vector<double> h = x;
  for (int l = 0; l < p.layer_count(); ++l) {
    std::vector<double> next(p.layer_dims[l + 1]);
    for (int r = 0; r < p.layer_dims[l + 1]; ++r) {
      double z = p.biases[l](r);
      for (int c = 0; c < p.layer_dims[l]; ++c) z += p.weights[l](r, c) * h[c];
      next[r] = (l + 1 < p.layer_count() && p.activation == EncoderParams::kTanh)
                    ? std::tanh(z)
                    : z;
    }
    h = std::move(next);
  }
  return h;
}

// Independent evaluation of the three sums from the paper objective.
LossBreakdown oracle_loss(const EncoderParams& p, const TripletBatch& batch,
                          const LossConfig& cfg) {
  const int b_size = batch.size();
  const int n_out = p.output_dim();
  std::vector<std::vector<double>> za, zp, zn;
  for (int b = 0; b < b_size; ++b) {
    auto row = [&](const Eigen::MatrixXd& m) {
      std::vector<double> x(m.cols());
      for (int d = 0; d < m.cols(); ++d) x[d] = m(b, d);
      return x;
    };
    za.push_back(oracle_forward(p, row(batch.anchors)));
    zp.push_back(oracle_forward(p, row(batch.positives)));
    zn.push_back(oracle_forward(p, row(batch.negatives)));
  }
  LossBreakdown out;
  for (int b = 0; b < b_size; ++b) {
    double dn = 0.0, dp = 0.0;
    for (int k = 0; k < n_out; ++k) {
      dn += (za[b][k] - zn[b][k]) * (za[b][k] - zn[b][k]);
      dp += (za[b][k] - zp[b][k]) * (za[b][k] - zp[b][k]);
    }
    out.unsupervised += batch.neg_weights(b) * dn;
    out.self_supervised += cfg.lambda1 * dp;
  }
  const double scale = static_cast<double>(batch.corpus_m) / b_size;
  for (int l1 = 0; l1 < n_out; ++l1) {
    for (int l2 = l1; l2 < n_out; ++l2) {
      double g = 0.0;
      for (int b = 0; b < b_size; ++b) g += za[b][l1] * za[b][l2];
      const double target = l1 == l2 ? 1.0 : 0.0;
      out.regularization +=
          cfg.lambda2 * (scale * g - target) * (scale * g - target);
    }
  }
  out.total = out.unsupervised + out.self_supervised + out.regularization;
  return out;
}

TripletBatch random_batch(int b_size, int dim, int corpus_m, std::uint64_t seed) {
  TripletBatch batch;
  batch.corpus_m = corpus_m;
  batch.anchors.resize(b_size, dim);
  batch.positives.resize(b_size, dim);
  batch.negatives.resize(b_size, dim);
  batch.neg_weights.resize(b_size);
  batch.anchor_ids.assign(b_size, 0);
  Rng rng(seed);
  for (int b = 0; b < b_size; ++b) {
    for (int d = 0; d < dim; ++d) {
      batch.anchors(b, d) = rng.uniform(-1, 1);
      batch.positives(b, d) = rng.uniform(-1, 1);
      batch.negatives(b, d) = rng.uniform(-1, 1);
    }
    batch.neg_weights(b) = 0.05 + 0.9 * rng.next_double();
  }
  return batch;
}

// flat view over all parameters for finite differencing
std::vector<double*> param_slots(EncoderParams& p) {
  std::vector<double*> slots;
  for (int l = 0; l < p.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < p.weights[l].size(); ++i) {
      slots.push_back(p.weights[l].data() + i);
    }
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) {
      slots.push_back(p.biases[l].data() + i);
    }
  }
  return slots;
}

double flat_grad(const EncoderGradient& g, std::size_t slot) {
  std::size_t at = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    const auto nw = static_cast<std::size_t>(g.weights[l].size());
    if (slot < at + nw) return g.weights[l].data()[slot - at];
    at += nw;
    const auto nb = static_cast<std::size_t>(g.biases[l].size());
    if (slot < at + nb) return g.biases[l].data()[slot - at];
    at += nb;
  }
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_SUITE("encoder") {

TEST_CASE("loss equals the independent oracle to 1e-12") {
  const auto params = init_encoder({3, 8, 5, 2}, 99);
  const auto batch = random_batch(5, 3, 40, 7);
  LossConfig cfg;
  cfg.lambda1 = 3.5;
  cfg.lambda2 = 1.25;
  const LossBreakdown mine = loss(params, batch, cfg);
  const LossBreakdown ref = oracle_loss(params, batch, cfg);
  CHECK(mine.unsupervised == doctest::Approx(ref.unsupervised).epsilon(1e-12));
  CHECK(mine.self_supervised == doctest::Approx(ref.self_supervised).epsilon(1e-12));
  CHECK(mine.regularization == doctest::Approx(ref.regularization).epsilon(1e-12));
  CHECK(mine.total == doctest::Approx(ref.total).epsilon(1e-12));
}

TEST_CASE("loss components are non-negative and additive") {
  const auto params = init_encoder({2, 6, 3}, 5);
  const auto batch = random_batch(8, 2, 32, 3);
  LossConfig cfg;
  const LossBreakdown lb = loss(params, batch, cfg);
  CHECK(lb.unsupervised >= 0.0);
  CHECK(lb.self_supervised >= 0.0);
  CHECK(lb.regularization >= 0.0);
  CHECK(lb.total == doctest::Approx(lb.unsupervised + lb.self_supervised +
                                    lb.regularization)
                        .epsilon(1e-12));
}

TEST_CASE("a constant map zeroes both distance terms") {
  auto params = init_encoder({3, 4, 2}, 1);
  for (auto& w : params.weights) w.setZero();
  params.biases[0].setConstant(0.3);
  params.biases[1].setConstant(-0.7);
  const auto batch = random_batch(6, 3, 24, 9);
  LossConfig cfg;
  cfg.lambda2 = 0.0;
  const LossBreakdown lb = loss(params, batch, cfg);
  CHECK(lb.total == 0.0);
}

TEST_CASE("identity-Gram batch has zero regularization") {
  // single identity layer: representations equal the anchors
  EncoderParams params;
  params.layer_dims = {2, 2};
  params.weights = {Eigen::MatrixXd::Identity(2, 2)};
  params.biases = {Eigen::VectorXd::Zero(2)};
  TripletBatch batch = random_batch(2, 2, 2, 11);  // corpus_m = B: scale 1
  batch.anchors = Eigen::MatrixXd::Identity(2, 2);  // Gram = I
  LossConfig cfg;
  cfg.lambda1 = 0.0;
  const LossBreakdown lb = loss(params, batch, cfg);
  CHECK(lb.regularization == 0.0);
}

TEST_CASE("gradient vanishes for the all-zero network") {
  auto params = init_encoder({3, 4, 2}, 2);
  for (auto& w : params.weights) w.setZero();
  for (auto& b : params.biases) b.setZero();
  const auto batch = random_batch(4, 3, 16, 13);
  LossConfig cfg;
  cfg.lambda2 = 0.0;  // keep the Gram target away: pure symmetry check
  const EncoderGradient g = loss_gradient(params, batch, cfg);
  for (const auto& gw : g.weights) CHECK(gw.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& gb : g.biases) CHECK(gb.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient is additive across the three components") {
  const auto params = init_encoder({3, 6, 2}, 21);
  const auto batch = random_batch(4, 3, 20, 23);
  LossConfig both, unsup_only, self_only, reg_only;
  both.lambda1 = 2.5;
  both.lambda2 = 4.0;
  unsup_only.lambda1 = 0.0;
  unsup_only.lambda2 = 0.0;
  self_only.lambda1 = 2.5;
  self_only.lambda2 = 0.0;
  reg_only.lambda1 = 0.0;
  reg_only.lambda2 = 4.0;
  const auto g_both = loss_gradient(params, batch, both);
  const auto g_u = loss_gradient(params, batch, unsup_only);
  const auto g_s = loss_gradient(params, batch, self_only);
  const auto g_r = loss_gradient(params, batch, reg_only);
  for (std::size_t l = 0; l < g_both.weights.size(); ++l) {
    const Eigen::MatrixXd sum =
        g_s.weights[l] + g_r.weights[l] - g_u.weights[l];
    CHECK((g_both.weights[l] - sum).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("analytic gradient matches central finite differences per component") {
  auto params = init_encoder({3, 7, 4, 2}, 31);
  const auto batch = random_batch(4, 3, 28, 33);

  struct Pick {
    double lambda1, lambda2;
    double LossBreakdown::* field;
    const char* name;
  };
  const Pick picks[] = {
      {0.0, 0.0, &LossBreakdown::unsupervised, "unsupervised"},
      {1.7, 0.0, &LossBreakdown::total, "with self-supervised"},
      {0.0, 2.3, &LossBreakdown::total, "with regularization"},
  };
  const double h = 1e-5;
  Rng pick_rng(55);
  auto slots = param_slots(params);
  for (const Pick& pick : picks) {
    CAPTURE(pick.name);
    LossConfig cfg;
    cfg.lambda1 = pick.lambda1;
    cfg.lambda2 = pick.lambda2;
    const EncoderGradient g = loss_gradient(params, batch, cfg);
    // The central difference itself carries roundoff noise of order
    // eps * |loss| / h; coordinates with gradients below that measurement
    // floor cannot be certified at 1e-5 relative and are skipped.
    const double floor = 1e-5 * (1.0 + loss(params, batch, cfg).*(pick.field));
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 100; ++trial) {
      const std::size_t slot = pick_rng.next_below(slots.size());
      const double saved = *slots[slot];
      *slots[slot] = saved + h;
      const double up = loss(params, batch, cfg).*(pick.field);
      *slots[slot] = saved - h;
      const double down = loss(params, batch, cfg).*(pick.field);
      *slots[slot] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = flat_grad(g, slot);
      if (std::max(std::abs(fd), std::abs(an)) < floor) continue;
      ++checked;
      const double rel = std::abs(fd - an) / std::max(std::abs(fd), std::abs(an));
      CHECK(rel <= 1e-5);
    }
    CHECK(checked >= 100);
  }
}

TEST_CASE("triplet sampler contract") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 12, 3, 44);
  SUBCASE("epoch sweep covers every anchor exactly once") {
    const TripletBatch batch = sample_triplets(ds, 12, 50.0, 3);
    std::vector<int> ids = batch.anchor_ids;
    std::sort(ids.begin(), ids.end());
    for (int i = 0; i < 12; ++i) CHECK(ids[i] == i);
  }
  SUBCASE("positives are a different view of the anchor sample") {
    const TripletBatch batch = sample_triplets(ds, 12, 50.0, 3);
    for (int b = 0; b < batch.size(); ++b) {
      CHECK((batch.anchors.row(b) - batch.positives.row(b)).norm() > 0.0);
      const int i = batch.anchor_ids[b];
      bool anchor_is_view = false, positive_is_view = false;
      for (int j = 0; j < ds.n; ++j) {
        if ((batch.anchors.row(b) - ds.view(i, j)).norm() == 0.0) anchor_is_view = true;
        if ((batch.positives.row(b) - ds.view(i, j)).norm() == 0.0) positive_is_view = true;
      }
      CHECK(anchor_is_view);
      CHECK(positive_is_view);
    }
  }
  SUBCASE("negatives come from another sample") {
    const auto two = generate_dataset(ManifoldSpec::torus(), 2, 2, 9);
    const TripletBatch batch = sample_triplets(two, 2, 50.0, 5);
    for (int b = 0; b < 2; ++b) {
      const int other = 1 - batch.anchor_ids[b];
      bool from_other = false;
      for (int j = 0; j < 2; ++j) {
        if ((batch.negatives.row(b) - two.view(other, j)).norm() == 0.0) {
          from_other = true;
        }
      }
      CHECK(from_other);
    }
  }
  SUBCASE("n = 1 is rejected, naming the self-supervised term") {
    const auto single = generate_dataset(ManifoldSpec::torus(), 5, 1, 2);
    CHECK_THROWS_WITH_AS(sample_triplets(single, 5, 50.0, 1),
                         doctest::Contains("self-supervised"), ConfigError);
  }
}

TEST_CASE("sampled negative weights match the exhaustive kernel average") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 10, 3, 66);
  const double t = 80.0;
  // exhaustive average of exp(-||X_{i,j} - X_{i',j'}||^2 / t) over i != i'
  double exhaustive = 0.0;
  int count = 0;
  for (int i = 0; i < 10; ++i)
    for (int ip = 0; ip < 10; ++ip) {
      if (ip == i) continue;
      for (int j = 0; j < 3; ++j)
        for (int jp = 0; jp < 3; ++jp) {
          exhaustive += std::exp(-(ds.view(i, j) - ds.view(ip, jp)).squaredNorm() / t);
          ++count;
        }
    }
  exhaustive /= count;

  TripletSampler sampler(ds, t, 12345);
  std::vector<double> draws;
  while (draws.size() < 10000) {
    const TripletBatch batch = sampler.next_batch(10);
    for (int b = 0; b < batch.size(); ++b) draws.push_back(batch.neg_weights(b));
  }
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= static_cast<double>(draws.size());
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= static_cast<double>(draws.size() - 1);
  const double sigma = std::sqrt(var / static_cast<double>(draws.size()));
  CHECK(std::abs(mean - exhaustive) <= 3.0 * sigma);
}

TEST_CASE("encode basics") {
  auto params = init_encoder({3, 4, 2}, 77);
  for (auto& w : params.weights) w.setZero();
  for (auto& b : params.biases) b.setZero();
  CHECK(encode(params, Eigen::Vector3d(1, 2, 3)).cwiseAbs().maxCoeff() == 0.0);

  // identity-activation linearity with zero biases
  auto linear = init_encoder({3, 4, 2}, 78, EncoderParams::kIdentity);
  const Eigen::VectorXd x = Eigen::Vector3d(0.3, -0.2, 0.9);
  const Eigen::VectorXd one = encode(linear, x);
  const Eigen::VectorXd two = encode(linear, 2.0 * x);
  CHECK((two - 2.0 * one).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("encode agrees with the loss-internal forward values") {
  const auto params = init_encoder({3, 5, 2}, 79);
  const auto batch = random_batch(3, 3, 12, 80);
  LossConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.lambda2 = 0.0;
  const LossBreakdown lb = loss(params, batch, cfg);
  const Eigen::MatrixXd za = encode_batch(params, batch.anchors);
  const Eigen::MatrixXd zp = encode_batch(params, batch.positives);
  const Eigen::MatrixXd zn = encode_batch(params, batch.negatives);
  double unsup = 0.0, self = 0.0;
  for (int b = 0; b < 3; ++b) {
    unsup += batch.neg_weights(b) * (za.row(b) - zn.row(b)).squaredNorm();
    self += (za.row(b) - zp.row(b)).squaredNorm();
  }
  CHECK(lb.unsupervised == doctest::Approx(unsup).epsilon(1e-12));
  CHECK(lb.self_supervised == doctest::Approx(self).epsilon(1e-12));
}

TEST_CASE("training determinism and the zero-step identities") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 24, 3, 91);
  LossConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.lambda2 = 1.0;
  cfg.bandwidth_t = 60.0;
  cfg.batch_size = 8;
  cfg.epochs = 3;
  cfg.learning_rate = 1e-5;
  cfg.seed = 5;
  const TrainResult a = train(ds, {3, 8, 2}, cfg);
  const TrainResult b = train(ds, {3, 8, 2}, cfg);
  for (int l = 0; l < a.params.layer_count(); ++l) {
    CHECK((a.params.weights[l].array() == b.params.weights[l].array()).all());
  }

  LossConfig frozen = cfg;
  frozen.learning_rate = 0.0;
  const TrainResult c = train(ds, {3, 8, 2}, frozen);
  LossConfig empty = cfg;
  empty.epochs = 0;
  const TrainResult d = train(ds, {3, 8, 2}, empty);  // untouched initialization
  for (int l = 0; l < c.params.layer_count(); ++l) {
    CHECK((c.params.weights[l].array() == d.params.weights[l].array()).all());
    CHECK((c.params.biases[l].array() == d.params.biases[l].array()).all());
  }
  CHECK(a.trajectory.size() == 3);
}

TEST_CASE("training tightens positive pairs against negatives") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 100, 3, 17);
  LossConfig cfg;
  cfg.bandwidth_t = 30.0;
  cfg.batch_size = 25;
  cfg.epochs = 60;
  cfg.seed = 3;
  LossConfig frozen = cfg;
  frozen.epochs = 0;
  const EncoderParams before = train(ds, {3, 32, 2}, frozen).params;
  const EncoderParams after = train(ds, {3, 32, 2}, cfg).params;
  const TripletBatch held = sample_triplets(ds, 100, cfg.bandwidth_t, 909);
  auto ratio = [&](const EncoderParams& p) {
    const Eigen::MatrixXd za = encode_batch(p, held.anchors);
    const Eigen::MatrixXd zp = encode_batch(p, held.positives);
    const Eigen::MatrixXd zn = encode_batch(p, held.negatives);
    return (za - zp).rowwise().squaredNorm().mean() /
           (za - zn).rowwise().squaredNorm().mean();
  };
  CHECK(ratio(after) < ratio(before));
}

TEST_CASE("divergent training reports the epoch") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 24, 3, 92);
  LossConfig cfg;
  cfg.bandwidth_t = 60.0;
  cfg.batch_size = 8;
  cfg.epochs = 50;
  cfg.learning_rate = 1e14;
  cfg.lambda2 = 500.0;
  cfg.seed = 6;
  CHECK_THROWS_AS(train(ds, {3, 8, 2}, cfg), TrainingError);
}

TEST_CASE("architecture must match the dataset") {
  const auto ds = generate_dataset(ManifoldSpec::torus(), 12, 2, 93);
  LossConfig cfg;
  CHECK_THROWS_AS(train(ds, {4, 8, 2}, cfg), ConfigError);
}

}  // TEST_SUITE
