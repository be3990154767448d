#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "aiml/manifold.hpp"

namespace aiml {

/// Small feed-forward encoder: tanh on hidden layers, identity output.
/// The identity-activation mode exists for linearity checks in tests.
struct EncoderParams {
  std::vector<int> layer_dims;              // input D, hidden..., output N
  std::vector<Eigen::MatrixXd> weights;     // layer l: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;      // layer l: dims[l+1]
  enum Activation { kTanh, kIdentity } activation = kTanh;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

/// Xavier-uniform weights, zero biases; deterministic per seed.
EncoderParams init_encoder(const std::vector<int>& layer_dims,
                           std::uint64_t seed,
                           EncoderParams::Activation activation =
                               EncoderParams::kTanh);

/// One mini-batch of triplets (anchor, positive, negative): anchor and
/// positive are distinct views of the same sample, the negative is a view of
/// a different sample. neg_weights carries the single-view Gaussian kernel
/// exp(-||X_i - X_{i-}||^2 / t) between anchor and negative.
struct TripletBatch {
  Eigen::MatrixXd anchors;    // B x D
  Eigen::MatrixXd positives;  // B x D
  Eigen::MatrixXd negatives;  // B x D
  Eigen::VectorXd neg_weights;
  std::vector<int> anchor_ids;
  int corpus_m = 0;  // full sample count, for the Gram scale factor

  int size() const { return static_cast<int>(anchors.rows()); }
};

struct LossConfig {
  double lambda1 = 100.0;
  double lambda2 = 200.0;
  double bandwidth_t = 1.0;
  int batch_size = 50;
  double learning_rate = 5e-7;  // the Gram penalty dominates the curvature
  int epochs = 200;
  std::uint64_t seed = 0;
};

/// Epoch-sweep triplet sampler: each epoch visits every anchor exactly once
/// in a seeded shuffled order; view and negative draws come from per-anchor
/// substreams. Requires n >= 2 views (the positive needs a second view).
class TripletSampler {
 public:
  TripletSampler(const MultiViewDataset& dataset, double bandwidth_t,
                 std::uint64_t seed);

  /// Next batch of at most `batch_size` anchors; a new epoch starts (with a
  /// fresh shuffle) whenever the current sweep is exhausted.
  TripletBatch next_batch(int batch_size);

  int epoch() const { return epoch_; }

 private:
  const MultiViewDataset& dataset_;
  double bandwidth_t_;
  std::uint64_t seed_;
  std::vector<std::size_t> order_;
  int cursor_ = 0;
  int epoch_ = 0;
};

/// First batch of a fresh epoch sweep; batch_size = m covers every anchor
/// exactly once.
TripletBatch sample_triplets(const MultiViewDataset& dataset, int batch_size,
                             double bandwidth_t, std::uint64_t seed);

/// The three loss terms over a batch, each including its lambda factor, so
/// total = unsupervised + self_supervised + regularization.
struct LossBreakdown {
  double total = 0.0;
  double unsupervised = 0.0;
  double self_supervised = 0.0;
  double regularization = 0.0;
};

struct EncoderGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Batch loss: sum_b w_b ||f(a_b) - f(n_b)||^2
///           + lambda1 sum_b ||f(a_b) - f(p_b)||^2
///           + lambda2 sum_{l1<=l2} (G_{l1,l2} - delta_{l1,l2})^2,
/// where G = (m/B) Z^T Z is the batch Gram of anchor representations scaled
/// to full-corpus size.
LossBreakdown loss(const EncoderParams& params, const TripletBatch& batch,
                   const LossConfig& cfg);

/// Analytic gradient of `loss` by backpropagation through the shared encoder
/// at anchors, positives and negatives.
EncoderGradient loss_gradient(const EncoderParams& params,
                              const TripletBatch& batch, const LossConfig& cfg);

Eigen::VectorXd encode(const EncoderParams& params, const Eigen::VectorXd& x);
Eigen::MatrixXd encode_batch(const EncoderParams& params,
                             const Eigen::MatrixXd& rows);

struct TrainResult {
  EncoderParams params;
  std::vector<LossBreakdown> trajectory;  // per-epoch means over batches
};

/// Mini-batch SGD with a fixed step over epoch sweeps; deterministic per
/// cfg.seed. Throws TrainingError (naming the epoch) when the loss turns
/// non-finite.
TrainResult train(const MultiViewDataset& dataset,
                  const std::vector<int>& layer_dims, const LossConfig& cfg);

}  // namespace aiml
