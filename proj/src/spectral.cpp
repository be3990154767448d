#include "aiml/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "aiml/errors.hpp"

namespace aiml {

namespace {

constexpr double kTrivialEigenvalueTol = 1e-8;
constexpr double kTrivialConstancyTol = 1e-6;

// Coefficient of variation of the vector entries; near zero for the constant
// trivial eigenvector.
double coefficient_of_variation(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  const double sd = std::sqrt((v.array() - mean).square().mean());
  if (std::abs(mean) < 1e-300) return sd > 0.0 ? 1e300 : 0.0;
  return sd / std::abs(mean);
}

// Shared tail of both algorithms: solve the generalized Laplacian problem,
// drop the trivial mode, record a warning when the spectrum looks odd.
struct SpectralCore {
  Eigen::VectorXd eigenvalues;  // N, after the trivial skip
  Eigen::MatrixXd basis;        // m x N
  std::string warning;
};

SpectralCore solve_and_skip_trivial(const Eigen::MatrixXd& laplacian,
                                    const Eigen::VectorXd& degrees,
                                    int n_components) {
  auto [values, vectors] =
      solve_generalized_symmetric_eigen(laplacian, degrees, n_components + 1);
  SpectralCore core;
  if (values(1) < kTrivialEigenvalueTol) {
    core.warning =
        "multiple near-zero eigenvalues: the weight graph looks disconnected";
  } else if (std::abs(values(0)) >= kTrivialEigenvalueTol ||
             coefficient_of_variation(vectors.col(0)) >= kTrivialConstancyTol) {
    core.warning = "smallest eigenpair does not look trivial (lambda0=" +
                   std::to_string(values(0)) + "); skipped once regardless";
  }
  core.eigenvalues = values.segment(1, n_components);
  core.basis = vectors.rightCols(n_components);
  return core;
}

}  // namespace

std::string method_name(EmbeddingMethod method) {
  return method == EmbeddingMethod::kLaplacianEigenmaps ? "laplacian_eigenmaps"
                                                        : "diffusion_maps";
}

double Embedding::transition_eigenvalue(int k) const {
  const double lambda = eigenvalues(k);
  return method == EmbeddingMethod::kLaplacianEigenmaps
             ? 1.0 - lambda
             : 1.0 - bandwidth_t * lambda;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> solve_generalized_symmetric_eigen(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b_diag, int count) {
  const int m = static_cast<int>(a.rows());
  if (count < 1 || count > m) {
    throw ConfigError("solve_generalized_symmetric_eigen: count out of range");
  }
  if (b_diag.size() != m) {
    throw ConfigError("solve_generalized_symmetric_eigen: size mismatch");
  }
  if ((b_diag.array() <= 0.0).any()) {
    throw NumericalError(
        "solve_generalized_symmetric_eigen: B has a non-positive entry");
  }

  // Whiten: S = B^{-1/2} A B^{-1/2}, symmetrized to kill rounding skew.
  const Eigen::VectorXd inv_sqrt_b = b_diag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd s = inv_sqrt_b.asDiagonal() * a * inv_sqrt_b.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense symmetric eigendecomposition failed");
  }

  Eigen::VectorXd values = solver.eigenvalues().head(count);
  Eigen::MatrixXd vectors(m, count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd v = inv_sqrt_b.cwiseProduct(solver.eigenvectors().col(k));
    // v^T B v = u^T u = 1 already; fix the sign by the largest-|entry| rule.
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < m; ++i) {
      const double mag = std::abs(v(i));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    vectors.col(k) = v(arg) < 0.0 ? (-v).eval() : v;
  }
  return {std::move(values), std::move(vectors)};
}

Embedding laplacian_eigenmaps(const WeightMatrix& weights, int n_components) {
  const int m = weights.size();
  if (n_components < 1) throw ConfigError("laplacian_eigenmaps: N must be >= 1");
  if (n_components + 1 > m) {
    throw ConfigError("laplacian_eigenmaps: N + 1 must be <= m");
  }
  const Eigen::VectorXd degrees = degree_vector(weights);
  Eigen::MatrixXd laplacian = -weights.values;
  laplacian.diagonal() += degrees;

  SpectralCore core = solve_and_skip_trivial(laplacian, degrees, n_components);
  Embedding emb;
  emb.method = EmbeddingMethod::kLaplacianEigenmaps;
  emb.bandwidth_t = weights.bandwidth_t;
  emb.eigenvalues = std::move(core.eigenvalues);
  emb.basis = std::move(core.basis);
  emb.coords = emb.basis;
  emb.skipped_trivial = true;
  emb.warning = std::move(core.warning);
  return emb;
}

Embedding diffusion_maps(const WeightMatrix& weights, int n_components,
                         double alpha, double diffusion_time) {
  const int m = weights.size();
  if (n_components < 1) throw ConfigError("diffusion_maps: N must be >= 1");
  if (n_components + 1 > m) throw ConfigError("diffusion_maps: N + 1 must be <= m");
  if (alpha < 0.0 || alpha > 1.0) {
    throw ConfigError("diffusion_maps: alpha must lie in [0, 1]");
  }
  if (diffusion_time < 0.0) {
    throw ConfigError("diffusion_maps: diffusion time l must be >= 0");
  }

  const Eigen::VectorXd degrees = degree_vector(weights);
  const Eigen::VectorXd inv_d_alpha = degrees.array().pow(-alpha).matrix();
  Eigen::MatrixXd w_alpha =
      inv_d_alpha.asDiagonal() * weights.values * inv_d_alpha.asDiagonal();
  const Eigen::VectorXd d_alpha = w_alpha.rowwise().sum();

  // P^(a) eta = mu eta is the generalized problem W^(a) eta = mu D^(a) eta;
  // the smallest eigenvalues of (D^(a) - W^(a), D^(a)) are nu = 1 - mu.
  Eigen::MatrixXd laplacian = -w_alpha;
  laplacian.diagonal() += d_alpha;
  SpectralCore core = solve_and_skip_trivial(laplacian, d_alpha, n_components);

  Embedding emb;
  emb.method = EmbeddingMethod::kDiffusionMaps;
  emb.alpha = alpha;
  emb.diffusion_time = diffusion_time;
  emb.bandwidth_t = weights.bandwidth_t;
  emb.eigenvalues = core.eigenvalues / weights.bandwidth_t;  // (1 - mu)/t
  emb.basis = std::move(core.basis);
  emb.coords.resize(m, n_components);
  for (int k = 0; k < n_components; ++k) {
    emb.coords.col(k) =
        std::exp(-diffusion_time * emb.eigenvalues(k)) * emb.basis.col(k);
  }
  emb.skipped_trivial = true;
  emb.warning = std::move(core.warning);
  return emb;
}

Eigen::MatrixXd transition_matrix(const WeightMatrix& weights, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw ConfigError("transition_matrix: alpha must lie in [0, 1]");
  }
  const Eigen::VectorXd degrees = degree_vector(weights);
  const Eigen::VectorXd inv_d_alpha = degrees.array().pow(-alpha).matrix();
  Eigen::MatrixXd w_alpha =
      inv_d_alpha.asDiagonal() * weights.values * inv_d_alpha.asDiagonal();
  const Eigen::VectorXd d_alpha = w_alpha.rowwise().sum();
  return d_alpha.cwiseInverse().asDiagonal() * w_alpha;
}

Eigen::VectorXd nystrom_extend(const Embedding& embedding,
                               const WeightMatrix& weights,
                               const MultiViewDataset& train,
                               const Eigen::MatrixXd& query_views) {
  const int m = weights.size();
  if (m < 2) throw ConfigError("nystrom_extend: need at least 2 training samples");
  if (train.m != m || embedding.size() != m) {
    throw ConfigError("nystrom_extend: embedding, weights and dataset disagree");
  }
  if (query_views.rows() < 1) {
    throw ConfigError("nystrom_extend: at least one query view required");
  }
  if (query_views.cols() != train.dim) {
    throw ConfigError("nystrom_extend: query dimension mismatch");
  }

  const int n = train.n;
  const int q = static_cast<int>(query_views.rows());
  const double inv_t = 1.0 / weights.bandwidth_t;
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) {
    double sum = 0.0;
    for (int jq = 0; jq < q; ++jq) {
      const auto v = query_views.row(jq);
      for (int j = 0; j < n; ++j) {
        sum += std::exp(-(v - train.view(i, j)).squaredNorm() * inv_t);
      }
    }
    w(i) = sum / (static_cast<double>(q) * n);
  }
  if (embedding.method == EmbeddingMethod::kDiffusionMaps) {
    const Eigen::VectorXd degrees = degree_vector(weights);
    w = w.cwiseQuotient(degrees.array().pow(embedding.alpha).matrix());
  }

  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("nystrom_extend: query weight mass underflowed");
  }

  const int n_components = embedding.components();
  Eigen::VectorXd out(n_components);
  for (int k = 0; k < n_components; ++k) {
    const double mu = embedding.transition_eigenvalue(k);
    if (mu < kTrivialEigenvalueTol) {
      throw NumericalError("nystrom_extend: component " + std::to_string(k) +
                           " is extension-unstable (mu=" + std::to_string(mu) +
                           ")");
    }
    double value = w.dot(embedding.basis.col(k)) / (mu * total);
    if (embedding.method == EmbeddingMethod::kDiffusionMaps) {
      value *= std::exp(-embedding.diffusion_time * embedding.eigenvalues(k));
    }
    out(k) = value;
  }
  return out;
}

}  // namespace aiml
