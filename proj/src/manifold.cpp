#include "aiml/manifold.hpp"

#include <cmath>
#include <numbers>

#include "aiml/errors.hpp"
#include "aiml/rng.hpp"

namespace aiml {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Substream tags for the per-latent and per-label streams.
enum : std::uint64_t { kTagPhi = 1, kTagPsi = 2, kTagLabel = 3 };

}  // namespace

ManifoldSpec ManifoldSpec::torus(double major, double minor) {
  ManifoldSpec s;
  s.kind = ManifoldKind::kTorus;
  s.major_radius = major;
  s.minor_radius = minor;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::swiss_roll1() {
  ManifoldSpec s;
  s.kind = ManifoldKind::kSwissRoll1;
  return s;
}

ManifoldSpec ManifoldSpec::swiss_roll2() {
  ManifoldSpec s;
  s.kind = ManifoldKind::kSwissRoll2;
  return s;
}

ManifoldSpec ManifoldSpec::clifford_torus(double r_s, double r_v) {
  ManifoldSpec s;
  s.kind = ManifoldKind::kCliffordTorus;
  s.radius_signal = r_s;
  s.radius_nuisance = r_v;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::from_name(const std::string& name) {
  if (name == "torus") return torus();
  if (name == "swissroll1") return swiss_roll1();
  if (name == "swissroll2") return swiss_roll2();
  if (name == "clifford") return clifford_torus();
  throw ConfigError("unknown manifold '" + name +
                    "' (expected torus, swissroll1, swissroll2, clifford)");
}

int ManifoldSpec::ambient_dim() const {
  return kind == ManifoldKind::kCliffordTorus ? 4 : 3;
}

std::pair<double, double> ManifoldSpec::phi_range() const {
  switch (kind) {
    case ManifoldKind::kTorus:
    case ManifoldKind::kCliffordTorus:
      return {0.0, kTwoPi};
    case ManifoldKind::kSwissRoll1:
      return {1.5 * std::numbers::pi, 4.5 * std::numbers::pi};
    case ManifoldKind::kSwissRoll2:
      return {0.0, 10.0};
  }
  return {0.0, 0.0};
}

std::pair<double, double> ManifoldSpec::psi_range() const {
  switch (kind) {
    case ManifoldKind::kTorus:
    case ManifoldKind::kCliffordTorus:
      return {0.0, kTwoPi};
    case ManifoldKind::kSwissRoll1:
      return {0.0, 10.0};
    case ManifoldKind::kSwissRoll2:
      return {1.5 * std::numbers::pi, 4.5 * std::numbers::pi};
  }
  return {0.0, 0.0};
}

std::string ManifoldSpec::name() const {
  switch (kind) {
    case ManifoldKind::kTorus: return "torus";
    case ManifoldKind::kSwissRoll1: return "swissroll1";
    case ManifoldKind::kSwissRoll2: return "swissroll2";
    case ManifoldKind::kCliffordTorus: return "clifford";
  }
  return "unknown";
}

void ManifoldSpec::validate() const {
  if (kind == ManifoldKind::kTorus &&
      (major_radius <= 0.0 || minor_radius <= 0.0)) {
    throw ConfigError("torus radii must be positive");
  }
  if (kind == ManifoldKind::kCliffordTorus &&
      (radius_signal <= 0.0 || radius_nuisance <= 0.0)) {
    throw ConfigError("clifford torus radii must be positive");
  }
  auto [plo, phi_4] = phi_range();
  auto [qlo, qhi] = psi_range();
  if (!(plo < phi_4) || !(qlo < qhi)) {
    throw ConfigError("manifold parameter ranges must be non-empty");
  }
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sample_latents(
    const ManifoldSpec& spec, int m, int n, std::uint64_t seed) {
  spec.validate();
  if (m < 2) throw ConfigError("sample_latents: m must be >= 2");
  if (n < 1) throw ConfigError("sample_latents: n must be >= 1");

  const auto [plo, phi] = spec.phi_range();
  const auto [qlo, qhi] = spec.psi_range();
  Eigen::VectorXd latent_phi(m);
  Eigen::MatrixXd latent_psi(m, n);
  for (int i = 0; i < m; ++i) {
    Rng phi_rng(Rng::derive(seed, {kTagPhi, static_cast<std::uint64_t>(i)}));
    latent_phi(i) = phi_rng.uniform(plo, phi);
    for (int j = 0; j < n; ++j) {
      Rng psi_rng(Rng::derive(seed, {kTagPsi, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j)}));
      latent_psi(i, j) = psi_rng.uniform(qlo, qhi);
    }
  }
  return {std::move(latent_phi), std::move(latent_psi)};
}

Eigen::VectorXd embed_point(const ManifoldSpec& spec, double phi, double psi) {
  const auto [plo, phi_hi] = spec.phi_range();
  const auto [qlo, qhi] = spec.psi_range();
  if (!(phi >= plo && phi <= phi_hi)) {
    throw DomainError("embed_point: phi out of range for " + spec.name());
  }
  if (!(psi >= qlo && psi <= qhi)) {
    throw DomainError("embed_point: psi out of range for " + spec.name());
  }

  Eigen::VectorXd x(spec.ambient_dim());
  switch (spec.kind) {
    case ManifoldKind::kTorus: {
      const double ring = spec.major_radius + spec.minor_radius * std::cos(phi);
      x << ring * std::cos(psi), ring * std::sin(psi),
          spec.minor_radius * std::sin(phi);
      break;
    }
    case ManifoldKind::kSwissRoll1:
      x << phi * std::cos(phi), phi * std::sin(phi), psi;
      break;
    case ManifoldKind::kSwissRoll2:
      x << psi * std::cos(psi), psi * std::sin(psi), phi;
      break;
    case ManifoldKind::kCliffordTorus:
      x << spec.radius_signal * std::cos(phi), spec.radius_signal * std::sin(phi),
          spec.radius_nuisance * std::cos(psi),
          spec.radius_nuisance * std::sin(psi);
      break;
  }
  return x;
}

MultiViewDataset generate_dataset(const ManifoldSpec& spec, int m, int n,
                                  std::uint64_t seed) {
  auto [latent_phi, latent_psi] = sample_latents(spec, m, n, seed);
  MultiViewDataset ds;
  ds.m = m;
  ds.n = n;
  ds.dim = spec.ambient_dim();
  ds.points.resize(m * n, ds.dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      ds.points.row(i * n + j) =
          embed_point(spec, latent_phi(i), latent_psi(i, j));
    }
  }
  ds.latent_phi = std::move(latent_phi);
  ds.latent_psi = std::move(latent_psi);
  ds.spec = spec;
  ds.seed = seed;
  return ds;
}

LabeledDataset assign_labels(const MultiViewDataset& dataset,
                             const RegressionFn& regression,
                             const std::string& regression_tag,
                             std::uint64_t seed) {
  if (!dataset.has_latents()) {
    throw ConfigError("assign_labels requires a dataset with latents");
  }
  LabeledDataset out;
  out.regression_tag = regression_tag;
  out.features.resize(dataset.m, dataset.dim);
  out.labels.resize(dataset.m);
  for (int i = 0; i < dataset.m; ++i) {
    const double p = regression(dataset.latent_phi(i));
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("assign_labels: regression value outside [0, 1]");
    }
    Rng rng(Rng::derive(seed, {kTagLabel, static_cast<std::uint64_t>(i)}));
    out.labels[i] = rng.next_double() < p ? +1 : -1;
    out.features.row(i) = dataset.view(i, 0);
  }
  return out;
}

RegressionFn sine_regression(int delta) {
  if (delta < 1) throw ConfigError("sine_regression: delta must be >= 1");
  return [delta](double phi) { return std::abs(std::sin(delta * phi)); };
}

}  // namespace aiml
