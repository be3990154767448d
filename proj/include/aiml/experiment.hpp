#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aiml/encoder.hpp"
#include "aiml/image.hpp"
#include "aiml/kernel.hpp"
#include "aiml/knn.hpp"
#include "aiml/manifold.hpp"
#include "aiml/spectral.hpp"

namespace aiml {

/// Which data representation a kNN column uses.
struct RepresentationSpec {
  enum Kind { kRawX, kLaplacianEigenmaps, kDiffusionMaps } kind = kRawX;
  double alpha = 1.0;
  double diffusion_time = 0.1;

  static RepresentationSpec raw_x();
  static RepresentationSpec le();
  static RepresentationSpec dm(double alpha, double diffusion_time);
  std::string name() const;
  bool is_spectral() const { return kind != kRawX; }
};

/// Simulation comparison protocol: per repeat, generate a fresh multi-view
/// corpus, compute every representation of its samples, label the samples by
/// the regression function, then evaluate kNN on disjoint train/test subsets
/// of the corpus for each cell. Exactly one of s_list / delta_list may hold
/// more than one value; the varying one labels the output rows.
struct ComparisonConfig {
  ManifoldSpec manifold;
  int m = 400;
  int n = 3;
  int n_components = 2;
  BandwidthRule bandwidth_rule = BandwidthRule::median();
  std::vector<RepresentationSpec> representations = {
      RepresentationSpec::raw_x(), RepresentationSpec::le(),
      RepresentationSpec::dm(0.5, 0.1), RepresentationSpec::dm(1.0, 0.1)};
  std::vector<int> s_list = {50, 100, 200, 300};
  std::vector<int> delta_list = {1};
  int repeats = 100;
  int test_size = 100;
  KnnConfig knn_raw;       // defaults to the rate rule with dim = d
  KnnConfig knn_spectral;  // defaults to the rate rule with dim = d_s
  bool knn_defaults = true;
  std::uint64_t master_seed = 1;
};

struct CellResult {
  std::string manifold;
  std::string representation;
  int s_or_delta = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
};

std::vector<CellResult> run_comparison_experiment(const ComparisonConfig& cfg);

/// Per-repeat errors for one representation/cell, for trend checks.
struct CellErrors {
  std::string representation;
  int s_or_delta = 0;
  std::vector<double> errors;
};

std::vector<CellErrors> run_comparison_experiment_raw(const ComparisonConfig& cfg);

std::vector<std::vector<std::string>> results_to_rows(
    const std::vector<CellResult>& results);
extern const std::vector<std::string> kResultsHeader;

/// Handwritten-digits protocol: spectral representations are learned once
/// per augmentation pipeline from an unlabeled multi-view corpus; repeats
/// redraw the labeled subsets and extend them by Nystrom.
struct MnistConfig {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::vector<std::string> augmentations = {"resize_crop", "rotate_resize_crop"};
  int corpus_size = 1000;
  int corpus_views = 7;
  int n_components = 16;
  std::vector<int> s_list = {50, 100, 200, 400};
  int repeats = 100;
  int test_size = 100;
  int knn_k = 5;
  bool include_encoder = false;
  int encoder_corpus = 10000;
  int encoder_views = 2;
  std::vector<int> encoder_hidden = {256, 64};
  LossConfig encoder_loss;
  std::uint64_t master_seed = 1;
};

/// Builds a MultiViewDataset of augmented views for the given images.
MultiViewDataset augment_images_dataset(const std::vector<GrayImage>& images,
                                        int n_views,
                                        const std::string& augmentation,
                                        std::uint64_t seed);

/// The exact unlabeled corpus run_mnist_experiment learns its spectral
/// representation from, for the given augmentation pipeline.
MultiViewDataset mnist_corpus_dataset(const MnistConfig& cfg,
                                      const std::string& augmentation);

std::vector<CellResult> run_mnist_experiment(const MnistConfig& cfg);

}  // namespace aiml
