#include "qfivol/qfi_metrics.hpp"

#include <cmath>
#include <fmt/format.h>

namespace qfivol {

namespace {

RMatrix build_table(const MonotoneFunction& f, const RVector& lam) {
  const Eigen::Index n = lam.size();
  RMatrix t(n, n);
  for (Eigen::Index h = 0; h < n; ++h) {
    t(h, h) = lam(h);
    for (Eigen::Index j = h + 1; j < n; ++j) {
      t(h, j) = t(j, h) = scalar_mean(f, lam(h), lam(j));
    }
  }
  return t;
}

// sum_hj w_hj Re(a_hj b_jh); b Hermitian so b_jh = conj(b_hj)
double weighted_pairing(const RMatrix& w, const CMatrix& a, const CMatrix& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index h = 0; h < a.rows(); ++h) {
      s += w(h, j) * (a(h, j) * b(j, h)).real();
    }
  }
  return s;
}

}  // namespace

MetricContext::MetricContext(DensityMatrix state, MonotoneFunction f)
    : state_(std::move(state)), f_(f), tilde_(tilde(f)) {
  mean_f_ = build_table(f_, state_.eigenvalues());
  mean_tilde_ = build_table(tilde_, state_.eigenvalues());
}

double covariance(const EigenframeMatrix& a, const EigenframeMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "covariance");
  const RVector& lam = a.state_eigenvalues();
  const Eigen::Index n = lam.size();
  RMatrix w(n, n);
  for (Eigen::Index h = 0; h < n; ++h) {
    for (Eigen::Index j = 0; j < n; ++j) w(h, j) = 0.5 * (lam(h) + lam(j));
  }
  return weighted_pairing(w, a.entries(), b.entries());
}

double covariance(const DensityMatrix& rho, const HermitianMatrix& a, const HermitianMatrix& b) {
  return covariance(to_eigenframe(a, rho), to_eigenframe(b, rho));
}

double tilde_trace(const RMatrix& tilde_means, const EigenframeMatrix& a,
                   const EigenframeMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "tilde_trace");
  require_same_dim(tilde_means.rows(), a.dim(), "tilde_trace");
  return weighted_pairing(tilde_means, a.entries(), b.entries());
}

HermitianMatrix mean_superop_apply(const MetricContext& ctx, const HermitianMatrix& a,
                                   bool use_tilde) {
  const DensityMatrix& rho = ctx.state();
  const EigenframeMatrix frame = to_eigenframe(a, rho);
  const RMatrix& table = use_tilde ? ctx.tilde_mean_table() : ctx.mean_table();
  const CMatrix scaled = frame.entries().cwiseProduct(table.cast<Complex>());
  const CMatrix& u = rho.eigenvectors();
  const CMatrix back = u * scaled * u.adjoint();
  return HermitianMatrix(CMatrix((back + back.adjoint()) * 0.5));
}

double qfi_inner(const MetricContext& ctx, const HermitianMatrix& x, const HermitianMatrix& y) {
  const DensityMatrix& rho = ctx.state();
  if (!rho.faithful()) {
    throw NonFaithfulState("qfi_inner: metric undefined on non-faithful state");
  }
  require_same_dim(x.dim(), y.dim(), "qfi_inner");
  const CMatrix xf = in_eigenframe(x, rho);
  const CMatrix yf = in_eigenframe(y, rho);
  const RMatrix& m = ctx.mean_table();
  double s = 0.0;
  for (Eigen::Index j = 0; j < xf.cols(); ++j) {
    for (Eigen::Index h = 0; h < xf.rows(); ++h) {
      s += (xf(h, j) * std::conj(yf(h, j))).real() / m(h, j);
    }
  }
  return s;
}

double f_correlation(const MetricContext& ctx, const HermitianMatrix& a, const HermitianMatrix& b) {
  const EigenframeMatrix af = to_eigenframe(a, ctx.state());
  const EigenframeMatrix bf = to_eigenframe(b, ctx.state());
  return covariance(af, bf) - tilde_trace(ctx.tilde_mean_table(), af, bf);
}

double f_correlation_direct(const MetricContext& ctx, const HermitianMatrix& a,
                            const HermitianMatrix& b) {
  const DensityMatrix& rho = ctx.state();
  return 0.5 * ctx.function().value_at_zero() *
         qfi_inner(ctx, commutator_i(rho, a), commutator_i(rho, b));
}

double identity_residual(const MetricContext& ctx, const HermitianMatrix& a,
                         const HermitianMatrix& b) {
  return std::abs(f_correlation_direct(ctx, a, b) - f_correlation(ctx, a, b));
}

}  // namespace qfivol
