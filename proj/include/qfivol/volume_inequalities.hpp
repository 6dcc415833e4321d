#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qfivol/matrix_core.hpp"
#include "qfivol/monotone_functions.hpp"
#include "qfivol/qfi_metrics.hpp"

namespace qfivol {

inline constexpr int kMaxObservables = 8;
/// Cap on the state dimension for the O(dim^6) three-observable decomposition.
inline constexpr Eigen::Index kMaxDecompositionDim = 6;

/// A state, N observables and a regular function.
class GramSpec {
 public:
  GramSpec(DensityMatrix state, std::vector<HermitianMatrix> observables, MonotoneFunction f);

  const DensityMatrix& state() const { return ctx_.state(); }
  const std::vector<HermitianMatrix>& observables() const { return observables_; }
  const MonotoneFunction& function() const { return ctx_.function(); }
  const MetricContext& context() const { return ctx_; }
  int size() const { return static_cast<int>(observables_.size()); }
  /// Centered observables in the state's eigenframe, one per observable.
  const std::vector<EigenframeMatrix>& frames() const { return frames_; }

  /// Same state and observables, different function.
  GramSpec with_function(MonotoneFunction g) const;

 private:
  MetricContext ctx_;
  std::vector<HermitianMatrix> observables_;
  std::vector<EigenframeMatrix> frames_;
};

struct VolumeReport {
  RMatrix cov_gram;
  /// (f(0)/2) <i[rho,A_h], i[rho,A_j]>_{rho,f}, built as Cov - tilde-trace.
  RMatrix qfi_gram;
  double cov_det = 0.0;
  double qfi_det = 0.0;
  /// cov_det - qfi_det
  double gap = 0.0;
  std::optional<double> robertson_det;  // even N only
  std::optional<double> decomposition;  // N <= 3, faithful, dim <= 6, when requested
};

enum class VolumeKind { Covariance, Qfi };

RMatrix covariance_gram(const GramSpec& spec);
RMatrix qfi_gram(const GramSpec& spec);

/// sqrt(max(0, det G)) for the chosen Gram matrix.
double volume(const GramSpec& spec, VolumeKind kind);

/// V(f) = (f(0)/2)^(N/2) Vol^f(i[rho,A_1], ..., i[rho,A_N]).
double scaled_qfi_volume(const GramSpec& spec);

/// Fills both Gram matrices, their determinants and F(f). With
/// `with_decomposition` the H.K sum is added when N <= 3 and it is defined.
VolumeReport gap_F(const GramSpec& spec, bool with_decomposition = false);

/// H^f(x, y, w, z) for two pairs; all arguments positive.
double h_term(const MonotoneFunction& f, double x, double y, double w, double z);
/// H^f(x, y, h, k, w, z) for three pairs, via the closed product form
/// ((x+y)(h+k)(w+z) - prod over pairs of (u-v)^2 f(0)/m_f(u,v)) / 8.
double h_term(const MonotoneFunction& f, double x, double y, double h, double k, double w,
              double z);
/// Dispatches on args.size() (4 or 6).
double h_term(const MonotoneFunction& f, std::span<const double> args);

/// Index pair (row, column) into an eigenframe matrix.
struct IndexPair {
  Eigen::Index row;
  Eigen::Index col;
};

/// K_{ijkl} for two observables: |a_ij|^2|b_kl|^2 + |a_kl|^2|b_ij|^2 - 2 Re(a_ij b_ji) Re(a_kl b_lk).
double k_term(const EigenframeMatrix& a, const EigenframeMatrix& b, IndexPair p, IndexPair q);
/// K_{ijhklm} for three observables: the S_3 / A_3 permutation sum over the
/// pairs p = (i,j), q = (h,k), r = (l,m).
double k_term(const EigenframeMatrix& a, const EigenframeMatrix& b, const EigenframeMatrix& c,
              IndexPair p, IndexPair q, IndexPair r);

/// F(f) as sum_ij m_f~|a_ij|^2 (N = 1), (1/2) sum H K (N = 2) or (1/6) sum H K (N = 3).
/// Requires a faithful state; N = 3 also requires dim <= kMaxDecompositionDim.
double decompose_F(const GramSpec& spec);

/// det of the real antisymmetric matrix -(i/2) Tr(rho [A_h, A_j]) for even N, 0 for odd N.
double robertson_bound(const DensityMatrix& rho, std::span<const HermitianMatrix> observables);

/// Smallest singular value of the N x 2 dim^2 matrix of vectorized centered observables.
double dependence_singular_value(const GramSpec& spec);

inline constexpr double kMainTol = 1e-10;
inline constexpr double kDependenceTol = 1e-8;
inline constexpr double kEqualityTol = 1e-8;
inline constexpr double kMonotoneSlack = 1e-10;

struct MonotonicityCheck {
  TildeOrder order = TildeOrder::Incomparable;
  double v_self = 0.0;
  double v_partner = 0.0;
  std::optional<bool> holds;  // empty when the tilde order is unresolved
};

/// Applies the volume ordering implied by `order` (f~ <= g~ gives V(f) >= V(g))
/// with slack kMonotoneSlack * max(1, v_self, v_partner). A pair whose squared
/// volumes differ by at most `det_noise` (determinant rounding) also passes.
MonotonicityCheck compare_volumes(TildeOrder order, double v_self, double v_partner,
                                  double det_noise = 0.0);

struct ConjectureVerdict {
  double gap = 0.0;
  double scale = 1.0;  // max(1, |cov_det|)
  bool main_holds = true;
  bool dependent = false;
  bool equality_consistent = true;
  /// Independent observables with |F| <= 1e-8 scale; reportable, not a violation.
  bool near_zero_independent = false;
  /// F < -1e-10 scale. Only N = 3 complex inputs can legitimately set this.
  bool candidate_counterexample = false;
  /// N <= 2, or N = 3 with real state and observables, or N = 3 with a
  /// diagonal state, zero-diagonal second and diagonal third observable.
  bool proven_case = false;
  std::optional<MonotonicityCheck> monotonicity;
};

ConjectureVerdict check_conjectures(const GramSpec& spec,
                                    const std::optional<MonotoneFunction>& partner = std::nullopt);
/// Same, reusing an already computed report for `spec`.
ConjectureVerdict check_conjectures(const GramSpec& spec, const VolumeReport& report,
                                    const std::optional<MonotoneFunction>& partner = std::nullopt);

/// Hessian of S(p) = Var_p(X) Var_p(Y) - Cov_p(X,Y)^2 in the probability
/// vector p, treated as a point of R^n.
RMatrix hessian_generalized_variance(const RVector& p, const RVector& x, const RVector& y);
double quadratic_form(const RMatrix& h, const RVector& v);

}  // namespace qfivol
