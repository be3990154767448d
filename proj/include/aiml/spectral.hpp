#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>

#include "aiml/kernel.hpp"
#include "aiml/manifold.hpp"

namespace aiml {

enum class EmbeddingMethod { kLaplacianEigenmaps, kDiffusionMaps };

std::string method_name(EmbeddingMethod method);

/// Spectral coordinates of the m training samples.
///
/// `eigenvalues` holds the N non-trivial eigenvalues on the Laplacian scale,
/// ascending: generalized eigenvalues of (L, D) for Laplacian eigenmaps and
/// (1 - mu)/t for diffusion maps, where mu are transition-matrix eigenvalues.
/// `basis` holds the corresponding eigenvectors (B-orthonormal in the degree
/// weighting); `coords` equals `basis` for Laplacian eigenmaps and
/// exp(-l * lambda_k)-scaled columns for diffusion maps.
struct Embedding {
  Eigen::MatrixXd coords;       // m x N
  Eigen::MatrixXd basis;        // m x N, unscaled eigenvectors
  Eigen::VectorXd eigenvalues;  // N, ascending
  EmbeddingMethod method = EmbeddingMethod::kLaplacianEigenmaps;
  double alpha = 0.0;           // diffusion maps only
  double diffusion_time = 0.0;  // l, diffusion maps only
  double bandwidth_t = 0.0;
  bool skipped_trivial = false;
  std::string warning;  // non-empty when the trivial-mode detection was odd

  int size() const { return static_cast<int>(coords.rows()); }
  int components() const { return static_cast<int>(coords.cols()); }

  /// Transition-operator eigenvalue mu_k matching eigenvalue k: 1 - lambda
  /// for Laplacian eigenmaps, 1 - t * lambda for diffusion maps.
  double transition_eigenvalue(int k) const;
};

/// Solves A v = lambda B v for symmetric A and positive diagonal B by
/// whitening with B^{-1/2} and a dense symmetric eigendecomposition.
/// Returns the `count` smallest eigenpairs, eigenvalues ascending,
/// eigenvectors B-orthonormal (v^T B v = 1) with the largest-magnitude entry
/// made positive (first such entry on ties).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> solve_generalized_symmetric_eigen(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b_diag, int count);

/// Algorithm: L = D - W, solve L eta = lambda D eta, discard the trivial
/// eigenpair (|lambda| < 1e-8 with near-constant vector), keep the next N.
Embedding laplacian_eigenmaps(const WeightMatrix& weights, int n_components);

/// Alpha-normalized diffusion maps: W^(a) = D^-a W D^-a, transition matrix
/// P^(a) = (D^(a))^-1 W^(a); the top N+1 eigenpairs of P^(a) are computed
/// through the equivalent generalized problem on (D^(a) - W^(a), D^(a)),
/// converted to Laplacian scale via lambda = (1 - mu)/t, trivial pair
/// skipped, and coordinates scaled by exp(-l * lambda_k).
Embedding diffusion_maps(const WeightMatrix& weights, int n_components,
                         double alpha, double diffusion_time);

/// Row-stochastic transition matrix P^(alpha); exposed for invariant checks.
Eigen::MatrixXd transition_matrix(const WeightMatrix& weights, double alpha);

/// Nystrom out-of-sample extension. `query_views` is one row per view of the
/// query point. Integrated weights w_i between the query views and sample
/// i's views use the same kernel and bandwidth as `weights`; the extension
/// of eigenvector k is the mu-normalized kernel average
///
///   eta_k(x) = (sum_i w~_i eta_{k,i}) / (mu_k sum_i w~_i),
///
/// where w~_i = w_i for Laplacian eigenmaps and w~_i = w_i / d_i^alpha for
/// diffusion maps (the query's own degree factor cancels in the ratio), and
/// mu_k is the transition-operator eigenvalue. Diffusion-map coordinates are
/// additionally scaled by exp(-l * lambda_k). Extending a training sample's
/// own views reproduces its embedding row exactly.
Eigen::VectorXd nystrom_extend(const Embedding& embedding,
                               const WeightMatrix& weights,
                               const MultiViewDataset& train,
                               const Eigen::MatrixXd& query_views);

}  // namespace aiml
