#include "aiml/encoder.hpp"

#include <cmath>
#include <string>

#include "aiml/errors.hpp"
#include "aiml/rng.hpp"

namespace aiml {

namespace {

enum : std::uint64_t { kTagInit = 11, kTagEpoch = 12, kTagDraw = 13, kTagTriplets = 14 };

struct ForwardCache {
  std::vector<Eigen::MatrixXd> h;  // h[0] = input, h[L] = output, B x dims[l]
};

ForwardCache forward(const EncoderParams& params, const Eigen::MatrixXd& x) {
  ForwardCache cache;
  const int layers = params.layer_count();
  cache.h.resize(layers + 1);
  cache.h[0] = x;
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = cache.h[l] * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    const bool hidden = l + 1 < layers;
    cache.h[l + 1] = (hidden && params.activation == EncoderParams::kTanh)
                         ? z.array().tanh().matrix()
                         : std::move(z);
  }
  return cache;
}

// Backpropagate d(loss)/d(output) through one stream, accumulating into grad.
void backward(const EncoderParams& params, const ForwardCache& cache,
              Eigen::MatrixXd grad_out, EncoderGradient& grad) {
  const int layers = params.layer_count();
  for (int l = layers - 1; l >= 0; --l) {
    const bool hidden = l + 1 < layers;
    if (hidden && params.activation == EncoderParams::kTanh) {
      grad_out = (grad_out.array() * (1.0 - cache.h[l + 1].array().square())).matrix();
    }
    grad.weights[l] += grad_out.transpose() * cache.h[l];
    grad.biases[l] += grad_out.colwise().sum().transpose();
    if (l > 0) grad_out = (grad_out * params.weights[l]).eval();
  }
}

EncoderGradient zero_gradient(const EncoderParams& params) {
  EncoderGradient g;
  for (int l = 0; l < params.layer_count(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(),
                                              params.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
  }
  return g;
}

// Shared forward/loss/gradient evaluation; grad output is optional.
LossBreakdown evaluate(const EncoderParams& params, const TripletBatch& batch,
                       const LossConfig& cfg, EncoderGradient* grad) {
  if (batch.size() == 0) throw ConfigError("loss: empty triplet batch");
  params.validate();

  const ForwardCache fa = forward(params, batch.anchors);
  const ForwardCache fp = forward(params, batch.positives);
  const ForwardCache fn = forward(params, batch.negatives);
  const Eigen::MatrixXd& za = fa.h.back();
  const Eigen::MatrixXd& zp = fp.h.back();
  const Eigen::MatrixXd& zn = fn.h.back();
  if (!za.allFinite() || !zp.allFinite() || !zn.allFinite()) {
    throw NumericalError("loss: non-finite encoder activations");
  }

  const Eigen::MatrixXd diff_neg = za - zn;
  const Eigen::MatrixXd diff_pos = za - zp;

  LossBreakdown out;
  out.unsupervised =
      (diff_neg.rowwise().squaredNorm().array() * batch.neg_weights.array()).sum();
  out.self_supervised = cfg.lambda1 * diff_pos.rowwise().squaredNorm().sum();

  const double scale = static_cast<double>(batch.corpus_m) / batch.size();
  const int n_out = params.output_dim();
  const Eigen::MatrixXd gram = scale * (za.transpose() * za);
  const Eigen::MatrixXd mism = gram - Eigen::MatrixXd::Identity(n_out, n_out);
  double r = 0.0;
  for (int l1 = 0; l1 < n_out; ++l1)
    for (int l2 = l1; l2 < n_out; ++l2) r += mism(l1, l2) * mism(l1, l2);
  out.regularization = cfg.lambda2 * r;
  out.total = out.unsupervised + out.self_supervised + out.regularization;

  if (grad) {
    // d(unsup)/dA = 2 diag(w) (A - N), d(self)/dA = 2 l1 (A - P),
    // d(reg)/dA = 2 l2 scale * A (M + Diag(M)) with M = G - I.
    Eigen::MatrixXd grad_anchor =
        2.0 * (batch.neg_weights.asDiagonal() * diff_neg) +
        (2.0 * cfg.lambda1) * diff_pos;
    Eigen::MatrixXd m_adj = mism;
    m_adj.diagonal() += mism.diagonal();
    grad_anchor += (2.0 * cfg.lambda2 * scale) * (za * m_adj);

    backward(params, fa, std::move(grad_anchor), *grad);
    backward(params, fp, (-2.0 * cfg.lambda1) * diff_pos, *grad);
    backward(params, fn, -2.0 * (batch.neg_weights.asDiagonal() * diff_neg), *grad);
  }
  return out;
}

}  // namespace

void EncoderParams::validate() const {
  if (layer_dims.size() < 2) throw ConfigError("encoder: need input and output dims");
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw ConfigError("encoder: layer count mismatch");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
        biases[l].size() != layer_dims[l + 1]) {
      throw ConfigError("encoder: layer " + std::to_string(l) + " shape mismatch");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw DataError("encoder: non-finite parameters");
    }
  }
}

EncoderParams init_encoder(const std::vector<int>& layer_dims,
                           std::uint64_t seed,
                           EncoderParams::Activation activation) {
  if (layer_dims.size() < 2) throw ConfigError("encoder: need input and output dims");
  for (int d : layer_dims) {
    if (d < 1) throw ConfigError("encoder: layer dims must be positive");
  }
  EncoderParams p;
  p.layer_dims = layer_dims;
  p.activation = activation;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int rows = layer_dims[l + 1], cols = layer_dims[l];
    const double limit = std::sqrt(6.0 / (rows + cols));
    Rng rng(Rng::derive(seed, {kTagInit, l}));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(rows));
  }
  return p;
}

TripletSampler::TripletSampler(const MultiViewDataset& dataset,
                               double bandwidth_t, std::uint64_t seed)
    : dataset_(dataset), bandwidth_t_(bandwidth_t), seed_(seed) {
  if (dataset.m < 2) throw ConfigError("triplet sampling: m must be >= 2");
  if (dataset.n < 2) {
    throw ConfigError(
        "triplet sampling: the self-supervised term needs n >= 2 views");
  }
  if (bandwidth_t <= 0.0) throw ConfigError("triplet sampling: t must be > 0");
  Rng rng(Rng::derive(seed_, {kTagEpoch, 0}));
  order_ = random_permutation(dataset.m, rng);
}

TripletBatch TripletSampler::next_batch(int batch_size) {
  if (batch_size < 1) throw ConfigError("triplet sampling: batch_size must be >= 1");
  const int m = dataset_.m;
  const int n = dataset_.n;
  if (cursor_ >= m) {
    ++epoch_;
    cursor_ = 0;
    Rng rng(Rng::derive(seed_, {kTagEpoch, static_cast<std::uint64_t>(epoch_)}));
    order_ = random_permutation(m, rng);
  }
  const int take = std::min(batch_size, m - cursor_);

  TripletBatch batch;
  batch.corpus_m = m;
  batch.anchors.resize(take, dataset_.dim);
  batch.positives.resize(take, dataset_.dim);
  batch.negatives.resize(take, dataset_.dim);
  batch.neg_weights.resize(take);
  batch.anchor_ids.resize(take);
  for (int b = 0; b < take; ++b) {
    const int i = static_cast<int>(order_[cursor_ + b]);
    Rng rng(Rng::derive(seed_, {kTagDraw, static_cast<std::uint64_t>(epoch_),
                                static_cast<std::uint64_t>(cursor_ + b)}));
    const int j = static_cast<int>(rng.next_below(n));
    const int j_pos = static_cast<int>((j + 1 + rng.next_below(n - 1)) % n);
    int i_neg = static_cast<int>(rng.next_below(m - 1));
    if (i_neg >= i) ++i_neg;  // negatives exclude the anchor sample
    const int j_neg = static_cast<int>(rng.next_below(n));

    batch.anchor_ids[b] = i;
    batch.anchors.row(b) = dataset_.view(i, j);
    batch.positives.row(b) = dataset_.view(i, j_pos);
    batch.negatives.row(b) = dataset_.view(i_neg, j_neg);
    batch.neg_weights(b) = std::exp(
        -(batch.anchors.row(b) - batch.negatives.row(b)).squaredNorm() /
        bandwidth_t_);
  }
  cursor_ += take;
  return batch;
}

TripletBatch sample_triplets(const MultiViewDataset& dataset, int batch_size,
                             double bandwidth_t, std::uint64_t seed) {
  TripletSampler sampler(dataset, bandwidth_t, seed);
  return sampler.next_batch(batch_size);
}

LossBreakdown loss(const EncoderParams& params, const TripletBatch& batch,
                   const LossConfig& cfg) {
  return evaluate(params, batch, cfg, nullptr);
}

EncoderGradient loss_gradient(const EncoderParams& params,
                              const TripletBatch& batch, const LossConfig& cfg) {
  EncoderGradient grad = zero_gradient(params);
  evaluate(params, batch, cfg, &grad);
  return grad;
}

Eigen::VectorXd encode(const EncoderParams& params, const Eigen::VectorXd& x) {
  return encode_batch(params, x.transpose()).row(0);
}

Eigen::MatrixXd encode_batch(const EncoderParams& params,
                             const Eigen::MatrixXd& rows) {
  params.validate();
  if (rows.cols() != params.input_dim()) {
    throw ConfigError("encode: input dimension mismatch");
  }
  return forward(params, rows).h.back();
}

TrainResult train(const MultiViewDataset& dataset,
                  const std::vector<int>& layer_dims, const LossConfig& cfg) {
  if (layer_dims.empty() || layer_dims.front() != dataset.dim) {
    throw ConfigError("train: encoder input dim must match the dataset");
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1) {
    throw ConfigError("train: bad epochs or batch size");
  }

  TrainResult result;
  result.params = init_encoder(layer_dims, Rng::derive(cfg.seed, {kTagInit}));

  // Calibrate the output layer so the corpus-scaled Gram diagonal starts at
  // one. The orthogonality penalty targets sum_i Theta_l(X_i)^2 = 1, a scale
  // of 1/sqrt(m) per entry; starting there keeps the fixed-step updates of
  // all three loss terms commensurate.
  {
    const Eigen::MatrixXd z = encode_batch(result.params, dataset.points);
    for (int l = 0; l < result.params.output_dim(); ++l) {
      const double v = z.col(l).squaredNorm() / dataset.n;
      if (v > 0.0) result.params.weights.back().row(l) /= std::sqrt(v);
    }
  }

  TripletSampler sampler(dataset, cfg.bandwidth_t,
                         Rng::derive(cfg.seed, {kTagTriplets}));
  const int batches_per_epoch = (dataset.m + cfg.batch_size - 1) / cfg.batch_size;

  EncoderGradient grad = zero_gradient(result.params);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    LossBreakdown epoch_mean;
    for (int b = 0; b < batches_per_epoch; ++b) {
      const TripletBatch batch = sampler.next_batch(cfg.batch_size);
      for (auto& g : grad.weights) g.setZero();
      for (auto& g : grad.biases) g.setZero();
      const LossBreakdown lb = evaluate(result.params, batch, cfg, &grad);
      if (!std::isfinite(lb.total)) {
        throw TrainingError("train: loss diverged at epoch " +
                            std::to_string(epoch));
      }
      for (int l = 0; l < result.params.layer_count(); ++l) {
        result.params.weights[l] -= cfg.learning_rate * grad.weights[l];
        result.params.biases[l] -= cfg.learning_rate * grad.biases[l];
      }
      epoch_mean.total += lb.total;
      epoch_mean.unsupervised += lb.unsupervised;
      epoch_mean.self_supervised += lb.self_supervised;
      epoch_mean.regularization += lb.regularization;
    }
    const double inv = 1.0 / batches_per_epoch;
    epoch_mean.total *= inv;
    epoch_mean.unsupervised *= inv;
    epoch_mean.self_supervised *= inv;
    epoch_mean.regularization *= inv;
    result.trajectory.push_back(epoch_mean);
  }
  return result;
}

}  // namespace aiml
