#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace qfivol {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DecompositionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerances shared by the construction checks.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kFaithfulCut = 1e-12;

/// Complex self-adjoint n x n matrix.
///
/// Construction rejects inputs whose deviation from self-adjointness exceeds
/// kHermitianTol (absolute, entrywise) and then stores (M + M^dagger)/2, so the
/// stored entries are exactly Hermitian.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& entries);
  static HermitianMatrix from_real(const RMatrix& entries);
  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& entries() const { return m_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  /// True when every entry has zero imaginary part.
  bool is_real() const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix entries, Trusted) : m_(std::move(entries)) {}
  CMatrix m_;
};

/// Hermitian spectral decomposition, eigenvalues sorted descending.
struct Spectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;  // columns
};

/// Decomposes a Hermitian matrix, A = U diag(lambda) U^dagger.
///
/// Eigenvalues come back in descending order. Inside each numerically
/// degenerate cluster (gap below 1e-11 * max(1, |lambda|_max)) the basis is
/// rebuilt by projecting the canonical vectors e_0, e_1, ... onto the cluster's
/// eigenspace and Gram-Schmidt orthonormalizing them in that order, skipping
/// projections with norm below 1e-6. Every eigenvector is then phase-fixed so
/// that its first entry of maximal modulus is real and positive. The result
/// depends only on the eigenspaces, not on the solver's internal choices.
///
/// Throws DecompositionFailure if the tridiagonal QL iteration does not
/// converge (Eigen caps it at 30 sweeps per eigenvalue).
Spectrum spectral_decompose(const HermitianMatrix& a);

/// Positive semidefinite unit-trace Hermitian matrix with its spectrum cached.
class DensityMatrix {
 public:
  explicit DensityMatrix(const CMatrix& entries);
  static DensityMatrix diagonal(const RVector& probabilities);
  /// Rank-one projector psi psi^dagger / |psi|^2.
  static DensityMatrix pure(const CVector& psi);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& entries() const { return m_; }
  const RVector& eigenvalues() const { return spectrum_.eigenvalues; }
  const CMatrix& eigenvectors() const { return spectrum_.eigenvectors; }
  bool faithful() const { return faithful_; }
  bool is_pure() const;
  /// Real entries and a real eigenbasis.
  bool is_real() const;

 private:
  CMatrix m_;
  Spectrum spectrum_;
  bool faithful_ = true;
};

/// An observable centered at a state and written in the state's eigenbasis:
/// entries(h, j) = phi_h^dagger A_0 phi_j.
class EigenframeMatrix {
 public:
  EigenframeMatrix(CMatrix entries, RVector state_eigenvalues)
      : m_(std::move(entries)), lambda_(std::move(state_eigenvalues)) {}

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& entries() const { return m_; }
  Complex operator()(Eigen::Index h, Eigen::Index j) const { return m_(h, j); }
  /// Spectrum of the state whose eigenframe this is.
  const RVector& state_eigenvalues() const { return lambda_; }

 private:
  CMatrix m_;
  RVector lambda_;
};

/// A - Tr(rho A) I.
HermitianMatrix center(const HermitianMatrix& a, const DensityMatrix& rho);

/// U^dagger A_0 U with U the eigenvectors of rho.
EigenframeMatrix to_eigenframe(const HermitianMatrix& a, const DensityMatrix& rho);

/// U^dagger X U without centering; used for tangent vectors.
CMatrix in_eigenframe(const HermitianMatrix& x, const DensityMatrix& rho);

/// i(rho A - A rho).
HermitianMatrix commutator_i(const DensityMatrix& rho, const HermitianMatrix& a);

/// Max-entry deviation of the eigenframe commutator from i(lambda_h - lambda_j) a_hj.
double commutator_eigenframe_residual(const DensityMatrix& rho, const HermitianMatrix& a);

/// Determinant of a small real square matrix (at most 8 x 8). Closed-form
/// cofactors up to 3 x 3, partial-pivot elimination above.
double det_small(const RMatrix& g);

void require_same_dim(Eigen::Index a, Eigen::Index b, std::string_view what);

// ---------------------------------------------------------------------------
// Seeded sampling

enum class Ensemble {
  ComplexHermitian,
  RealSymmetric,
  Density,
  RealDensity,
  PauliLikeStructured,
};

std::string_view ensemble_name(Ensemble e);
/// Accepts the tag names "complex-hermitian", "real-symmetric", "density",
/// "real-density", "pauli-like-structured".
Ensemble parse_ensemble(std::string_view tag);

struct RandomSpec {
  std::uint64_t seed = 0;
  Eigen::Index dim = 2;
  Ensemble ensemble = Ensemble::ComplexHermitian;
};

/// A: arbitrary Hermitian; B: Hermitian with zero diagonal; C: real diagonal.
struct StructuredTriple {
  HermitianMatrix a;
  HermitianMatrix b;
  HermitianMatrix c;
};

using Sample = std::variant<HermitianMatrix, DensityMatrix, StructuredTriple>;

/// Stream key for (seed, index): splitmix64(splitmix64(seed) ^ index * golden).
/// The returned key seeds a std::mt19937_64 whose raw output drives every
/// draw, so results are bit-identical across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

Sample sample(const RandomSpec& spec, std::uint64_t index);

HermitianMatrix sample_hermitian(const RandomSpec& spec, std::uint64_t index);
DensityMatrix sample_density(const RandomSpec& spec, std::uint64_t index);
StructuredTriple sample_structured(const RandomSpec& spec, std::uint64_t index);
/// Haar-random pure state from a normalized complex Gaussian vector.
DensityMatrix sample_pure_state(std::uint64_t seed, Eigen::Index dim, std::uint64_t index);

}  // namespace qfivol
