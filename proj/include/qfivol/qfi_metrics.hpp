#pragma once

#include <stdexcept>

#include "qfivol/matrix_core.hpp"
#include "qfivol/monotone_functions.hpp"

namespace qfivol {

class NonFaithfulState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A state paired with a regular monotone function, with the eigenframe
/// multiplier tables m_f(lambda_h, lambda_j) and m_f~(lambda_h, lambda_j)
/// precomputed. These tables are the superoperators m(L_rho, R_rho)
/// restricted to the state's eigenbasis.
class MetricContext {
 public:
  /// Throws NonRegularFunction for f with f(0) = 0.
  MetricContext(DensityMatrix state, MonotoneFunction f);

  const DensityMatrix& state() const { return state_; }
  const MonotoneFunction& function() const { return f_; }
  const MonotoneFunction& tilde_function() const { return tilde_; }
  const RMatrix& mean_table() const { return mean_f_; }
  const RMatrix& tilde_mean_table() const { return mean_tilde_; }

 private:
  DensityMatrix state_;
  MonotoneFunction f_;
  MonotoneFunction tilde_;
  RMatrix mean_f_;
  RMatrix mean_tilde_;
};

/// Cov_rho(A, B) = Re Tr(rho A_0 B_0), evaluated as
/// (1/2) sum_hj (lambda_h + lambda_j) Re(a_hj b_jh).
double covariance(const DensityMatrix& rho, const HermitianMatrix& a, const HermitianMatrix& b);
double covariance(const EigenframeMatrix& a, const EigenframeMatrix& b);

/// sum_hj m(lambda_h, lambda_j) Re(a_hj b_jh), with m the f~ table.
double tilde_trace(const RMatrix& tilde_means, const EigenframeMatrix& a,
                   const EigenframeMatrix& b);

/// m(L_rho, R_rho)(A_0) in the original basis; m is m_f or m_f~.
HermitianMatrix mean_superop_apply(const MetricContext& ctx, const HermitianMatrix& a,
                                   bool use_tilde);

/// <X, Y>_{rho,f} = Tr(X m_f(L_rho, R_rho)^{-1}(Y)) for self-adjoint X, Y.
/// Throws NonFaithfulState when some eigenvalue of rho is zero.
double qfi_inner(const MetricContext& ctx, const HermitianMatrix& x, const HermitianMatrix& y);

/// Metric adjusted correlation Corr^f_rho(A, B) = Cov_rho(A, B) - Tr(m_f~(L,R)(A_0) B_0).
/// Valid for non-faithful states.
double f_correlation(const MetricContext& ctx, const HermitianMatrix& a, const HermitianMatrix& b);

/// The same quantity through the metric: (f(0)/2) <i[rho,A], i[rho,B]>_{rho,f}.
double f_correlation_direct(const MetricContext& ctx, const HermitianMatrix& a,
                            const HermitianMatrix& b);

/// |f_correlation_direct - f_correlation|. Contract: <= 1e-9 max(1, |f_correlation|).
double identity_residual(const MetricContext& ctx, const HermitianMatrix& a,
                         const HermitianMatrix& b);

}  // namespace qfivol
