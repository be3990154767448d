#include "aiml/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "aiml/errors.hpp"
#include "aiml/rng.hpp"

namespace aiml {

namespace {

enum : std::uint64_t {
  kTagRepeat = 31,
  kTagData = 32,
  kTagBandwidth = 33,
  kTagLabels = 34,
  kTagSplit = 35,
  kTagAugment = 36,
  kTagCorpusPick = 37,
  kTagDraw = 38,
  kTagEncoder = 39,
};

std::string trim_number(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// mean and standard error over repeats
std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

RepresentationSpec RepresentationSpec::raw_x() { return {kRawX, 0.0, 0.0}; }

RepresentationSpec RepresentationSpec::le() {
  return {kLaplacianEigenmaps, 0.0, 0.0};
}

RepresentationSpec RepresentationSpec::dm(double alpha, double diffusion_time) {
  return {kDiffusionMaps, alpha, diffusion_time};
}

std::string RepresentationSpec::name() const {
  switch (kind) {
    case kRawX: return "raw_x";
    case kLaplacianEigenmaps: return "le";
    case kDiffusionMaps:
      return "dm_a" + trim_number(alpha) + "_l" + trim_number(diffusion_time);
  }
  return "unknown";
}

std::vector<CellErrors> run_comparison_experiment_raw(const ComparisonConfig& cfg) {
  if (cfg.s_list.size() > 1 && cfg.delta_list.size() > 1) {
    throw ConfigError("comparison experiment: vary s or delta, not both");
  }
  if (cfg.repeats < 1) throw ConfigError("comparison experiment: repeats must be >= 1");
  if (cfg.s_list.empty() || cfg.delta_list.empty()) {
    throw ConfigError("comparison experiment: empty s or delta list");
  }
  for (int s : cfg.s_list) {
    if (s < 1 || s + cfg.test_size > cfg.m) {
      throw ConfigError(
          "comparison experiment: need s + test_size <= m for every s");
    }
  }
  const bool vary_delta = cfg.delta_list.size() > 1;

  KnnConfig knn_raw = cfg.knn_raw;
  KnnConfig knn_spectral = cfg.knn_spectral;
  if (cfg.knn_defaults) {
    knn_raw = KnnConfig::rate_rule(1.0, cfg.manifold.intrinsic_dim());
    knn_spectral = KnnConfig::rate_rule(1.0, cfg.manifold.signal_dim());
  }

  struct CellKey {
    std::size_t rep;
    int s;
    int delta;
  };
  std::vector<CellKey> cells;
  for (std::size_t rep = 0; rep < cfg.representations.size(); ++rep)
    for (int delta : cfg.delta_list)
      for (int s : cfg.s_list) cells.push_back({rep, s, delta});

  // errors[cell][repeat], each repeat fully independent given its seed
  std::vector<std::vector<double>> errors(cells.size(),
                                          std::vector<double>(cfg.repeats, 0.0));

  auto run_repeat = [&](int repeat) {
    const std::uint64_t seed_r = Rng::derive(
        cfg.master_seed, {kTagRepeat, static_cast<std::uint64_t>(repeat)});
    const MultiViewDataset ds = generate_dataset(
        cfg.manifold, cfg.m, cfg.n, Rng::derive(seed_r, {kTagData}));
    const double t = bandwidth_heuristic(ds, cfg.bandwidth_rule,
                                         Rng::derive(seed_r, {kTagBandwidth}));
    const WeightMatrix w = integrated_weights(ds, t);

    // Sample-level feature matrix per representation.
    std::vector<Eigen::MatrixXd> features;
    for (const auto& rep : cfg.representations) {
      switch (rep.kind) {
        case RepresentationSpec::kRawX: {
          Eigen::MatrixXd raw(cfg.m, ds.dim);
          for (int i = 0; i < cfg.m; ++i) raw.row(i) = ds.view(i, 0);
          features.push_back(std::move(raw));
          break;
        }
        case RepresentationSpec::kLaplacianEigenmaps:
          features.push_back(laplacian_eigenmaps(w, cfg.n_components).coords);
          break;
        case RepresentationSpec::kDiffusionMaps:
          features.push_back(
              diffusion_maps(w, cfg.n_components, rep.alpha, rep.diffusion_time)
                  .coords);
          break;
      }
    }

    std::map<int, std::vector<int>> labels_by_delta;
    for (int delta : cfg.delta_list) {
      labels_by_delta[delta] =
          assign_labels(ds, sine_regression(delta),
                        "|sin(" + std::to_string(delta) + " phi)|",
                        Rng::derive(seed_r, {kTagLabels,
                                             static_cast<std::uint64_t>(delta)}))
              .labels;
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      const auto& labels = labels_by_delta.at(cell.delta);
      Rng split_rng(Rng::derive(seed_r, {kTagSplit,
                                         static_cast<std::uint64_t>(cell.delta),
                                         static_cast<std::uint64_t>(cell.s)}));
      const std::vector<std::size_t> perm = random_permutation(cfg.m, split_rng);

      const Eigen::MatrixXd& feats = features[cell.rep];
      const int p = static_cast<int>(feats.cols());
      Eigen::MatrixXd train_x(cell.s, p), test_x(cfg.test_size, p);
      std::vector<int> train_y(cell.s), test_y(cfg.test_size);
      for (int i = 0; i < cell.s; ++i) {
        train_x.row(i) = feats.row(static_cast<int>(perm[i]));
        train_y[i] = labels[perm[i]];
      }
      for (int i = 0; i < cfg.test_size; ++i) {
        test_x.row(i) = feats.row(static_cast<int>(perm[cell.s + i]));
        test_y[i] = labels[perm[cell.s + i]];
      }
      const KnnConfig& kc = cfg.representations[cell.rep].is_spectral()
                                ? knn_spectral
                                : knn_raw;
      errors[c][repeat] = misclassification_error(train_x, train_y, test_x,
                                                  test_y, kc.resolve(cell.s));
    }
  };

  // Repeats are independent; split them over a couple of workers.
  const unsigned workers =
      std::min(4u, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1 || cfg.repeats < 4) {
    for (int r = 0; r < cfg.repeats; ++r) run_repeat(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&, wkr]() {
        for (int r = static_cast<int>(wkr); r < cfg.repeats;
             r += static_cast<int>(workers)) {
          run_repeat(r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<CellErrors> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellErrors ce;
    ce.representation = cfg.representations[cells[c].rep].name();
    ce.s_or_delta = vary_delta ? cells[c].delta : cells[c].s;
    ce.errors = std::move(errors[c]);
    out.push_back(std::move(ce));
  }
  return out;
}

std::vector<CellResult> run_comparison_experiment(const ComparisonConfig& cfg) {
  std::vector<CellResult> results;
  for (const auto& cell : run_comparison_experiment_raw(cfg)) {
    const auto [mean, se] = mean_stderr(cell.errors);
    CellResult r;
    r.manifold = cfg.manifold.name();
    r.representation = cell.representation;
    r.s_or_delta = cell.s_or_delta;
    r.mean_error = mean;
    r.std_error = se;
    r.repeats = cfg.repeats;
    r.seed = cfg.master_seed;
    results.push_back(std::move(r));
  }
  return results;
}

const std::vector<std::string> kResultsHeader = {
    "manifold", "representation", "s_or_delta", "mean_error",
    "stderr",   "repeats",        "seed"};

std::vector<std::vector<std::string>> results_to_rows(
    const std::vector<CellResult>& results) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    std::ostringstream mean_ss, se_ss;
    mean_ss.precision(6);
    mean_ss << r.mean_error;
    se_ss.precision(6);
    se_ss << r.std_error;
    rows.push_back({r.manifold, r.representation, std::to_string(r.s_or_delta),
                    mean_ss.str(), se_ss.str(), std::to_string(r.repeats),
                    std::to_string(r.seed)});
  }
  return rows;
}

MultiViewDataset augment_images_dataset(const std::vector<GrayImage>& images,
                                        int n_views,
                                        const std::string& augmentation,
                                        std::uint64_t seed) {
  if (images.empty()) throw ConfigError("augment_images_dataset: no images");
  if (n_views < 1) throw ConfigError("augment_images_dataset: n_views < 1");
  const bool rotate = augmentation == "rotate_resize_crop";
  if (!rotate && augmentation != "resize_crop") {
    throw ConfigError("unknown augmentation '" + augmentation +
                      "' (expected resize_crop or rotate_resize_crop)");
  }
  const int m = static_cast<int>(images.size());
  const int dim = images[0].width * images[0].height;

  MultiViewDataset ds;
  ds.m = m;
  ds.n = n_views;
  ds.dim = dim;
  ds.seed = seed;
  ds.points.resize(static_cast<Eigen::Index>(m) * n_views, dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n_views; ++j) {
      const std::uint64_t view_seed =
          Rng::derive(seed, {kTagAugment, static_cast<std::uint64_t>(i),
                             static_cast<std::uint64_t>(j)});
      const GrayImage aug = rotate
                                ? augment_rotate_resize_crop(images[i], view_seed)
                                : augment_resize_crop(images[i], view_seed);
      ds.points.row(static_cast<Eigen::Index>(i) * n_views + j) =
          flatten_normalize(aug);
    }
  }
  return ds;
}

namespace {

struct MnistPools {
  IdxImages train_images;
  IdxLabels train_labels;
  IdxImages test_images;
  IdxLabels test_labels;
};

MnistPools load_mnist(const MnistConfig& cfg) {
  MnistPools pools;
  auto images = [&](const std::string& path) {
    IdxContent c = parse_idx(read_idx_file(path));
    if (!c.images) throw ParseError(path + ": expected an IDX image file");
    return std::move(*c.images);
  };
  auto labels = [&](const std::string& path) {
    IdxContent c = parse_idx(read_idx_file(path));
    if (!c.labels) throw ParseError(path + ": expected an IDX label file");
    return std::move(*c.labels);
  };
  pools.train_images = images(cfg.train_images);
  pools.train_labels = labels(cfg.train_labels);
  pools.test_images = images(cfg.test_images);
  pools.test_labels = labels(cfg.test_labels);
  if (pools.train_images.count != static_cast<int>(pools.train_labels.values.size()) ||
      pools.test_images.count != static_cast<int>(pools.test_labels.values.size())) {
    throw ParseError("mnist: image/label counts disagree");
  }
  return pools;
}

// One spectral pipeline: corpus, weights, embedding, plus a query cache.
struct SpectralPipeline {
  MultiViewDataset corpus;
  WeightMatrix weights;
  Embedding embedding;
  std::map<std::pair<int, int>, Eigen::VectorXd> cache;  // (pool, index)

  Eigen::VectorXd extend(const Eigen::VectorXd& flat, int pool, int index) {
    const auto key = std::make_pair(pool, index);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd coords =
        nystrom_extend(embedding, weights, corpus, flat.transpose());
    cache.emplace(key, coords);
    return coords;
  }
};

}  // namespace

namespace {

// Seeded choice of corpus images shared by every pipeline.
std::vector<GrayImage> pick_corpus_images(const IdxImages& pool, int corpus_size,
                                          std::uint64_t master_seed) {
  if (corpus_size > pool.count) {
    throw ConfigError("mnist experiment: corpus_size exceeds the training pool");
  }
  Rng pick_rng(Rng::derive(master_seed, {kTagCorpusPick}));
  const std::vector<std::size_t> pick = random_permutation(pool.count, pick_rng);
  std::vector<GrayImage> images;
  images.reserve(corpus_size);
  for (int i = 0; i < corpus_size; ++i) {
    images.push_back(pool.image(static_cast<int>(pick[i])));
  }
  return images;
}

std::uint64_t pipeline_seed(std::uint64_t master_seed, std::size_t pipeline_index) {
  return Rng::derive(master_seed,
                     {kTagAugment, static_cast<std::uint64_t>(pipeline_index)});
}

}  // namespace

MultiViewDataset mnist_corpus_dataset(const MnistConfig& cfg,
                                      const std::string& augmentation) {
  const IdxContent content = parse_idx(read_idx_file(cfg.train_images));
  if (!content.images) {
    throw ParseError(cfg.train_images + ": expected an IDX image file");
  }
  std::size_t index = 0;
  while (index < cfg.augmentations.size() &&
         cfg.augmentations[index] != augmentation) {
    ++index;
  }
  if (index == cfg.augmentations.size()) {
    throw ConfigError("augmentation '" + augmentation + "' not in config");
  }
  const auto images =
      pick_corpus_images(*content.images, cfg.corpus_size, cfg.master_seed);
  return augment_images_dataset(images, cfg.corpus_views, augmentation,
                                pipeline_seed(cfg.master_seed, index));
}

std::vector<CellResult> run_mnist_experiment(const MnistConfig& cfg) {
  if (cfg.repeats < 1) throw ConfigError("mnist experiment: repeats must be >= 1");
  const MnistPools pools = load_mnist(cfg);

  // Unlabeled corpus for the spectral representations.
  const std::vector<GrayImage> corpus_images =
      pick_corpus_images(pools.train_images, cfg.corpus_size, cfg.master_seed);

  std::vector<std::pair<std::string, SpectralPipeline>> pipelines;
  std::vector<std::pair<std::string, EncoderParams>> encoders;
  pipelines.reserve(cfg.augmentations.size());
  for (const auto& aug : cfg.augmentations) {
    SpectralPipeline p;
    p.corpus = augment_images_dataset(
        corpus_images, cfg.corpus_views, aug,
        pipeline_seed(cfg.master_seed, pipelines.size()));
    const double t = bandwidth_heuristic(p.corpus, BandwidthRule::median(),
                                         Rng::derive(cfg.master_seed, {kTagBandwidth}));
    p.weights = integrated_weights(p.corpus, t);
    p.embedding = laplacian_eigenmaps(p.weights, cfg.n_components);
    pipelines.emplace_back(aug, std::move(p));

    if (cfg.include_encoder) {
      const int enc_m = std::min(cfg.encoder_corpus, pools.train_images.count);
      const std::vector<GrayImage> enc_images =
          pick_corpus_images(pools.train_images, enc_m, cfg.master_seed);
      MultiViewDataset enc_ds = augment_images_dataset(
          enc_images, cfg.encoder_views, aug,
          Rng::derive(cfg.master_seed, {kTagEncoder, 1,
                                        static_cast<std::uint64_t>(encoders.size())}));
      LossConfig loss_cfg = cfg.encoder_loss;
      loss_cfg.bandwidth_t = bandwidth_heuristic(
          enc_ds, BandwidthRule::median(),
          Rng::derive(cfg.master_seed, {kTagEncoder, 2}));
      loss_cfg.seed = Rng::derive(cfg.master_seed, {kTagEncoder, 3});
      std::vector<int> dims = {enc_ds.dim};
      dims.insert(dims.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
      dims.push_back(cfg.n_components);
      encoders.emplace_back(aug, train(enc_ds, dims, loss_cfg).params);
    }
  }

  // Column layout: raw, spectral per pipeline, encoder per pipeline.
  struct Column {
    std::string name;
    SpectralPipeline* pipeline = nullptr;
    const EncoderParams* encoder = nullptr;
  };
  std::vector<Column> columns;
  columns.push_back({"raw_x", nullptr, nullptr});
  for (auto& [aug, p] : pipelines) columns.push_back({"spectral_" + aug, &p, nullptr});
  for (auto& [aug, e] : encoders) columns.push_back({"encoder_" + aug, nullptr, &e});

  auto feature_of = [&](Column& col, const GrayImage& img, int pool, int index) {
    const Eigen::VectorXd flat = flatten_normalize(img);
    if (col.pipeline) return col.pipeline->extend(flat, pool, index);
    if (col.encoder) return encode(*col.encoder, flat);
    return flat;
  };

  std::vector<CellResult> results;
  for (int s : cfg.s_list) {
    if (s < 1 || s > pools.train_images.count ||
        cfg.test_size > pools.test_images.count) {
      throw ConfigError("mnist experiment: bad s or test_size");
    }
    std::vector<std::vector<double>> errors(columns.size());
    for (int r = 0; r < cfg.repeats; ++r) {
      Rng draw_rng(Rng::derive(cfg.master_seed,
                               {kTagDraw, static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(r)}));
      std::vector<int> train_idx(s), test_idx(cfg.test_size);
      for (int i = 0; i < s; ++i) {
        train_idx[i] = static_cast<int>(draw_rng.next_below(pools.train_images.count));
      }
      for (int i = 0; i < cfg.test_size; ++i) {
        test_idx[i] = static_cast<int>(draw_rng.next_below(pools.test_images.count));
      }
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const int p = columns[c].pipeline
                          ? cfg.n_components
                          : (columns[c].encoder ? cfg.n_components
                                                : pools.train_images.rows *
                                                      pools.train_images.cols);
        Eigen::MatrixXd train_x(s, p), test_x(cfg.test_size, p);
        std::vector<int> train_y(s), test_y(cfg.test_size);
        for (int i = 0; i < s; ++i) {
          train_x.row(i) = feature_of(columns[c],
                                      pools.train_images.image(train_idx[i]), 0,
                                      train_idx[i]);
          train_y[i] = pools.train_labels.values[train_idx[i]];
        }
        for (int i = 0; i < cfg.test_size; ++i) {
          test_x.row(i) = feature_of(columns[c],
                                     pools.test_images.image(test_idx[i]), 1,
                                     test_idx[i]);
          test_y[i] = pools.test_labels.values[test_idx[i]];
        }
        errors[c].push_back(misclassification_error(
            train_x, train_y, test_x, test_y,
            std::min(cfg.knn_k, s), /*multiclass=*/true));
      }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto [mean, se] = mean_stderr(errors[c]);
      results.push_back({"mnist", columns[c].name, s, mean, se, cfg.repeats,
                         cfg.master_seed});
    }
  }
  return results;
}

}  // namespace aiml
