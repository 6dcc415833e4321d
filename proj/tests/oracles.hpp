#pragma once

// Reference computations used as test oracles. Nothing here goes through the
// library's eigenframe machinery: determinants by permutation expansion,
// superoperators as explicit d^2 x d^2 matrices, traces taken literally.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "qfivol/matrix_core.hpp"
#include "qfivol/monotone_functions.hpp"

namespace oracle {

using qfivol::CMatrix;
using qfivol::Complex;
using qfivol::RMatrix;

inline double leibniz_det(const RMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= m(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline CMatrix centered(const CMatrix& rho, const CMatrix& a) {
  const Complex mean = (rho * a).trace();
  return a - mean * CMatrix::Identity(a.rows(), a.cols());
}

/// Re Tr(rho A0 B0).
inline double covariance(const CMatrix& rho, const CMatrix& a, const CMatrix& b) {
  return (rho * centered(rho, a) * centered(rho, b)).trace().real();
}

inline CMatrix commutator_i(const CMatrix& rho, const CMatrix& a) {
  return Complex(0, 1) * (rho * a - a * rho);
}

inline CMatrix kron(const CMatrix& x, const CMatrix& y) {
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

inline Eigen::VectorXcd vec(const CMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline CMatrix unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

/// Matrix of the superoperator m_g(L_rho, R_rho) acting on column-major vec(X),
/// built as R g(R^{-1} L) with L = I (x) rho, R = rho^T (x) I. Faithful rho only.
inline CMatrix mean_superop(const CMatrix& rho, const std::function<double(double)>& g) {
  const Eigen::Index d = rho.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix l = kron(id, rho);
  const CMatrix r = kron(rho.transpose(), id);
  CMatrix s = r.inverse() * l;
  s = (0.5 * (s + s.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  Eigen::VectorXcd gv(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < gv.size(); ++k) gv(k) = g(std::max(es.eigenvalues()(k), 0.0));
  return r * es.eigenvectors() * gv.asDiagonal() * es.eigenvectors().adjoint();
}

/// <X, Y>_{rho,f} = Tr(X m_f(L,R)^{-1}(Y)).
inline double qfi_inner(const CMatrix& rho, const qfivol::MonotoneFunction& f, const CMatrix& x,
                        const CMatrix& y) {
  const CMatrix m = mean_superop(rho, [&](double t) { return f(t); });
  const CMatrix z = unvec(m.lu().solve(vec(y)), rho.rows());
  return (x * z).trace().real();
}

/// f~ straight from its defining formula.
inline double tilde_value(const qfivol::MonotoneFunction& f, double x) {
  return 0.5 * ((x + 1.0) - (x - 1.0) * (x - 1.0) * f.value_at_zero() / f(x));
}

/// (f(0)/2) <i[rho,A], i[rho,B]>_{rho,f}.
inline double correlation(const CMatrix& rho, const qfivol::MonotoneFunction& f, const CMatrix& a,
                          const CMatrix& b) {
  return 0.5 * f.value_at_zero() *
         qfi_inner(rho, f, commutator_i(rho, a), commutator_i(rho, b));
}

/// Cov - Tr(m_f~(L,R)(A0) B0) with the superoperator built from the formula for f~.
inline double correlation_tilde(const CMatrix& rho, const qfivol::MonotoneFunction& f,
                                const CMatrix& a, const CMatrix& b) {
  const CMatrix m = mean_superop(rho, [&](double t) { return tilde_value(f, t); });
  const CMatrix a0 = centered(rho, a);
  const CMatrix b0 = centered(rho, b);
  const CMatrix ma = unvec(m * vec(a0), rho.rows());
  return covariance(rho, a, b) - (ma * b0).trace().real();
}

struct Grams {
  RMatrix cov;
  RMatrix corr;
};

inline Grams grams(const CMatrix& rho, const qfivol::MonotoneFunction& f,
                   const std::vector<CMatrix>& obs) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  Grams g{RMatrix(n, n), RMatrix(n, n)};
  for (Eigen::Index h = 0; h < n; ++h) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g.cov(h, j) = covariance(rho, obs[h], obs[j]);
      g.corr(h, j) = correlation(rho, f, obs[h], obs[j]);
    }
  }
  return g;
}

/// det(Cov) - det(Corr) by permutation expansion on oracle Gram matrices.
inline double gap(const CMatrix& rho, const qfivol::MonotoneFunction& f,
                  const std::vector<CMatrix>& obs) {
  const Grams g = grams(rho, f, obs);
  return leibniz_det(g.cov) - leibniz_det(g.corr);
}

/// H for three pairs, term by term as defined (seven products of means).
inline double h3_expanded(const qfivol::MonotoneFunction& f, double x, double y, double h, double k,
                          double w, double z) {
  auto mt = [&](double u, double v) {
    const double hi = std::max(u, v);
    return hi * tilde_value(f, std::min(u, v) / hi);
  };
  const double m1 = mt(x, y), m2 = mt(h, k), m3 = mt(w, z);
  return 0.25 * (x + y) * (h + k) * m3 + 0.25 * (w + z) * (x + y) * m2 +
         0.25 * (h + k) * (w + z) * m1 - 0.5 * (x + y) * m2 * m3 - 0.5 * (w + z) * m1 * m2 -
         0.5 * (h + k) * m3 * m1 + m1 * m2 * m3;
}

/// H for two pairs as defined.
inline double h2_expanded(const qfivol::MonotoneFunction& f, double x, double y, double w,
                          double z) {
  auto mt = [&](double u, double v) {
    const double hi = std::max(u, v);
    return hi * tilde_value(f, std::min(u, v) / hi);
  };
  return 0.5 * (x + y) * mt(w, z) + 0.5 * (w + z) * mt(x, y) - mt(x, y) * mt(w, z);
}

/// Hessian of S(p) = Var_p(X)Var_p(Y) - Cov_p(X,Y)^2 by central differences
/// of S extended to all of R^n (no normalization of p).
inline RMatrix fd_hessian(const Eigen::VectorXd& p, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, double step = 1e-4) {
  auto s = [&](const Eigen::VectorXd& q) {
    const double ex = q.dot(x), ey = q.dot(y);
    const double vx = q.dot(x.cwiseProduct(x)) - ex * ex;
    const double vy = q.dot(y.cwiseProduct(y)) - ey * ey;
    const double c = q.dot(x.cwiseProduct(y)) - ex * ey;
    return vx * vy - c * c;
  };
  const Eigen::Index n = p.size();
  RMatrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd pp = p, pm = p, mp = p, mm = p;
      pp(i) += step; pp(j) += step;
      pm(i) += step; pm(j) -= step;
      mp(i) -= step; mp(j) += step;
      mm(i) -= step; mm(j) -= step;
      h(i, j) = (s(pp) - s(pm) - s(mp) + s(mm)) / (4 * step * step);
    }
  }
  return h;
}

}  // namespace oracle
