#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qfivol/matrix_core.hpp"

namespace qfivol {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Gaussian deviates from the raw 64-bit engine output (Box-Muller), avoiding
// the implementation-defined std:: distributions.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t key) : engine_(key) {}

  double uniform_open() {
    // 53 random bits, shifted half a step off zero: (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform_open();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Standard complex Gaussian: E|z|^2 = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * (1.0 / std::numbers::sqrt2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

CMatrix gaussian_matrix(GaussianSource& g, Eigen::Index n, bool real) {
  CMatrix m(n, n);
  // column-major fill order is part of the determinism contract
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      m(r, c) = real ? Complex(g.normal(), 0.0) : g.complex_normal();
    }
  }
  return m;
}

HermitianMatrix hermitian_from(GaussianSource& g, Eigen::Index n, bool real) {
  const CMatrix m = gaussian_matrix(g, n, real);
  return HermitianMatrix(CMatrix((m + m.adjoint()) * 0.5));
}

DensityMatrix density_from(GaussianSource& g, Eigen::Index n, bool real) {
  const CMatrix m = gaussian_matrix(g, n, real);
  CMatrix w = m * m.adjoint();
  w = (w + w.adjoint()) * 0.5;
  w /= w.trace().real();
  return DensityMatrix(w);
}

void require_dim(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("sample: dimension must be positive");
}

}  // namespace

std::string_view ensemble_name(Ensemble e) {
  switch (e) {
    case Ensemble::ComplexHermitian: return "complex-hermitian";
    case Ensemble::RealSymmetric: return "real-symmetric";
    case Ensemble::Density: return "density";
    case Ensemble::RealDensity: return "real-density";
    case Ensemble::PauliLikeStructured: return "pauli-like-structured";
  }
  return "unknown";
}

Ensemble parse_ensemble(std::string_view tag) {
  for (Ensemble e : {Ensemble::ComplexHermitian, Ensemble::RealSymmetric, Ensemble::Density,
                     Ensemble::RealDensity, Ensemble::PauliLikeStructured}) {
    if (ensemble_name(e) == tag) return e;
  }
  throw std::invalid_argument("unknown ensemble tag '" + std::string(tag) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * kGolden));
}

HermitianMatrix sample_hermitian(const RandomSpec& spec, std::uint64_t index) {
  require_dim(spec.dim);
  GaussianSource g(derive_seed(spec.seed, index));
  switch (spec.ensemble) {
    case Ensemble::ComplexHermitian: return hermitian_from(g, spec.dim, false);
    case Ensemble::RealSymmetric: return hermitian_from(g, spec.dim, true);
    default: break;
  }
  throw std::invalid_argument("sample_hermitian: ensemble '" +
                              std::string(ensemble_name(spec.ensemble)) +
                              "' does not produce a single observable");
}

DensityMatrix sample_density(const RandomSpec& spec, std::uint64_t index) {
  require_dim(spec.dim);
  GaussianSource g(derive_seed(spec.seed, index));
  switch (spec.ensemble) {
    case Ensemble::Density: return density_from(g, spec.dim, false);
    case Ensemble::RealDensity: return density_from(g, spec.dim, true);
    default: break;
  }
  throw std::invalid_argument("sample_density: ensemble '" +
                              std::string(ensemble_name(spec.ensemble)) +
                              "' does not produce a state");
}

StructuredTriple sample_structured(const RandomSpec& spec, std::uint64_t index) {
  require_dim(spec.dim);
  if (spec.ensemble != Ensemble::PauliLikeStructured) {
    throw std::invalid_argument("sample_structured: ensemble must be pauli-like-structured");
  }
  GaussianSource g(derive_seed(spec.seed, index));
  const Eigen::Index n = spec.dim;
  HermitianMatrix a = hermitian_from(g, n, false);
  CMatrix b = hermitian_from(g, n, false).entries();
  b.diagonal().setZero();
  RVector c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = g.normal();
  return StructuredTriple{std::move(a), HermitianMatrix(b),
                          HermitianMatrix(CMatrix(c.cast<Complex>().asDiagonal()))};
}

Sample sample(const RandomSpec& spec, std::uint64_t index) {
  switch (spec.ensemble) {
    case Ensemble::ComplexHermitian:
    case Ensemble::RealSymmetric:
      return sample_hermitian(spec, index);
    case Ensemble::Density:
    case Ensemble::RealDensity:
      return sample_density(spec, index);
    case Ensemble::PauliLikeStructured:
      return sample_structured(spec, index);
  }
  throw std::invalid_argument("sample: unknown ensemble");
}

DensityMatrix sample_pure_state(std::uint64_t seed, Eigen::Index dim, std::uint64_t index) {
  require_dim(dim);
  GaussianSource g(derive_seed(seed, index));
  CVector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = g.complex_normal();
  return DensityMatrix::pure(psi);
}

}  // namespace qfivol
