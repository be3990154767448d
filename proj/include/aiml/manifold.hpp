#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aiml {

enum class ManifoldKind { kTorus, kSwissRoll1, kSwissRoll2, kCliffordTorus };

/// Description of one of the four built-in product manifolds. Each is a
/// product of a one-dimensional signal factor (coordinate phi) and a
/// one-dimensional nuisance factor (coordinate psi) embedded in R^D:
///
///   torus        (R + r cos phi) cos psi, (R + r cos phi) sin psi, r sin phi
///   swissroll1   phi cos phi, phi sin phi, psi
///   swissroll2   psi cos psi, psi sin psi, phi
///   clifford     r_s cos phi, r_s sin phi, r_v cos psi, r_v sin psi
///
/// The Clifford torus is the one exactly isometric product (the R^3 torus
/// fiber circumference depends on phi), so quantitative spectrum checks use
/// it.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::kTorus;
  double major_radius = 10.0;  // torus R
  double minor_radius = 5.0;   // torus r
  double radius_signal = 1.0;  // clifford r_s
  double radius_nuisance = 1.0;  // clifford r_v

  static ManifoldSpec torus(double major = 10.0, double minor = 5.0);
  static ManifoldSpec swiss_roll1();
  static ManifoldSpec swiss_roll2();
  static ManifoldSpec clifford_torus(double r_s = 1.0, double r_v = 1.0);
  static ManifoldSpec from_name(const std::string& name);

  int ambient_dim() const;              // D
  int signal_dim() const { return 1; }  // d_s
  int nuisance_dim() const { return 1; }  // d_v
  int intrinsic_dim() const { return signal_dim() + nuisance_dim(); }

  std::pair<double, double> phi_range() const;
  std::pair<double, double> psi_range() const;

  std::string name() const;

  /// Throws ConfigError on non-positive radii or empty parameter ranges.
  void validate() const;
};

/// m samples of n augmented views each. Row i*n + j of `points` is X_{i,j}.
/// The hidden latents are retained so oracle tests can re-embed them; image
/// datasets carry neither spec nor latents.
struct MultiViewDataset {
  int m = 0;
  int n = 0;
  int dim = 0;
  Eigen::MatrixXd points;      // (m*n) x dim
  Eigen::VectorXd latent_phi;  // m, empty for image data
  Eigen::MatrixXd latent_psi;  // m x n, empty for image data
  std::optional<ManifoldSpec> spec;
  std::uint64_t seed = 0;

  auto view(int i, int j) const { return points.row(i * n + j); }
  bool has_latents() const { return latent_phi.size() == m && m > 0; }
};

/// Labeled features for the downstream task.
struct LabeledDataset {
  Eigen::MatrixXd features;   // s x p
  std::vector<int> labels;    // entries in {-1, +1}
  std::string regression_tag;

  int size() const { return static_cast<int>(labels.size()); }
};

/// Regression function gamma~ : phi -> [0, 1].
using RegressionFn = std::function<double(double)>;

/// phi_i i.i.d. uniform over the spec's phi range, psi_{i,j} i.i.d. uniform
/// over the psi range; one derived substream per latent so generation is
/// order-independent. Half-open ranges [lo, hi).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sample_latents(
    const ManifoldSpec& spec, int m, int n, std::uint64_t seed);

/// Closed-form embedding T(phi, psi). Throws DomainError when a latent is
/// outside the spec's range.
Eigen::VectorXd embed_point(const ManifoldSpec& spec, double phi, double psi);

MultiViewDataset generate_dataset(const ManifoldSpec& spec, int m, int n,
                                  std::uint64_t seed);

/// Y_i = +1 with probability regression(phi_i), else -1; the representative
/// feature of sample i is the designated view X_{i,1}. Throws DomainError if
/// the regression leaves [0, 1].
LabeledDataset assign_labels(const MultiViewDataset& dataset,
                             const RegressionFn& regression,
                             const std::string& regression_tag,
                             std::uint64_t seed);

/// gamma_delta(phi) = |sin(delta * phi)|.
RegressionFn sine_regression(int delta);

}  // namespace aiml
