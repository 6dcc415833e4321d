#include "qfivol/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <string>

namespace qfivol {

namespace {

bool all_real(const CMatrix& m) {
  return (m.array().imag() == 0.0).all();
}

// Rebuilds the basis of one degenerate cluster from the canonical vectors.
void canonicalize_cluster(CMatrix& vecs, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index n = vecs.rows();
  const Eigen::Index k = end - begin;
  const CMatrix span = vecs.middleCols(begin, k);
  CMatrix basis(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index e = 0; e < n && found < k; ++e) {
    // projection of e_e onto the cluster: span * span^dagger e_e
    CVector v = span * span.row(e).adjoint();
    for (Eigen::Index q = 0; q < found; ++q) {
      v -= basis.col(q) * basis.col(q).dot(v);
    }
    const double nv = v.norm();
    if (nv < 1e-6) continue;
    basis.col(found++) = v / nv;
  }
  if (found == k) vecs.middleCols(begin, k) = basis;
}

void fix_phase(CMatrix& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      const double a = std::abs(vecs(r, c));
      // first entry that is maximal up to round-off
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        arg = r;
      }
    }
    if (best > 0.0) {
      const Complex phase = std::conj(vecs(arg, c)) / best;
      vecs.col(c) *= phase;
      vecs(arg, c) = Complex(std::abs(vecs(arg, c)), 0.0);
    }
  }
}

}  // namespace

void require_same_dim(Eigen::Index a, Eigen::Index b, std::string_view what) {
  if (a != b) {
    throw DimensionMismatch(fmt::format("{}: dimension mismatch ({} vs {})", what, a, b));
  }
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(const CMatrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw std::invalid_argument("HermitianMatrix: entries must be a non-empty square matrix");
  }
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= kHermitianTol)) {
    throw std::invalid_argument(
        fmt::format("HermitianMatrix: not self-adjoint (max deviation {:.3e})", dev));
  }
  m_ = (entries + entries.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::from_real(const RMatrix& entries) {
  return HermitianMatrix(CMatrix(entries.cast<Complex>()));
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim), Trusted{});
}

bool HermitianMatrix::is_real() const { return all_real(m_); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  require_same_dim(dim(), o.dim(), "HermitianMatrix::operator+");
  return HermitianMatrix(CMatrix(m_ + o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  require_same_dim(dim(), o.dim(), "HermitianMatrix::operator-");
  return HermitianMatrix(CMatrix(m_ - o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(CMatrix(m_ * s), Trusted{});
}

// ---------------------------------------------------------------------------

Spectrum spectral_decompose(const HermitianMatrix& a) {
  const Eigen::Index n = a.dim();
  RVector ascending;
  CMatrix vecs;
  if (a.is_real()) {
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(a.entries().real());
    if (solver.info() != Eigen::Success) {
      throw DecompositionFailure("spectral_decompose: eigen iteration did not converge");
    }
    ascending = solver.eigenvalues();
    vecs = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.entries());
    if (solver.info() != Eigen::Success) {
      throw DecompositionFailure("spectral_decompose: eigen iteration did not converge");
    }
    ascending = solver.eigenvalues();
    vecs = solver.eigenvectors();
  }

  Spectrum out;
  out.eigenvalues = ascending.reverse();
  out.eigenvectors = vecs.rowwise().reverse();

  const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  const double gap = 1e-11 * scale;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || out.eigenvalues(i - 1) - out.eigenvalues(i) > gap) {
      if (i - begin > 1) canonicalize_cluster(out.eigenvectors, begin, i);
      begin = i;
    }
  }
  fix_phase(out.eigenvectors);
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(const CMatrix& entries) {
  const HermitianMatrix h(entries);
  m_ = h.entries();
  const double tr = m_.trace().real();
  if (!(std::abs(tr - 1.0) <= kTraceTol)) {
    throw std::invalid_argument(fmt::format("DensityMatrix: trace {:.17g} is not 1", tr));
  }
  spectrum_ = spectral_decompose(h);
  for (Eigen::Index i = 0; i < spectrum_.eigenvalues.size(); ++i) {
    double& lam = spectrum_.eigenvalues(i);
    if (lam < -kFaithfulCut) {
      throw std::invalid_argument(
          fmt::format("DensityMatrix: negative eigenvalue {:.3e}", lam));
    }
    if (lam < kFaithfulCut) {
      lam = 0.0;
      faithful_ = false;
    }
  }
}

DensityMatrix DensityMatrix::diagonal(const RVector& probabilities) {
  return DensityMatrix(CMatrix(probabilities.cast<Complex>().asDiagonal()));
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double nrm = psi.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  const CVector u = psi / nrm;
  return DensityMatrix(CMatrix(u * u.adjoint()));
}

bool DensityMatrix::is_pure() const {
  const auto& lam = spectrum_.eigenvalues;
  return std::abs(lam(0) - 1.0) <= kTraceTol &&
         (lam.size() == 1 || (lam.tail(lam.size() - 1).array() == 0.0).all());
}

bool DensityMatrix::is_real() const {
  return all_real(m_) && all_real(spectrum_.eigenvectors);
}

// ---------------------------------------------------------------------------

HermitianMatrix center(const HermitianMatrix& a, const DensityMatrix& rho) {
  require_same_dim(a.dim(), rho.dim(), "center");
  const double mean = (rho.entries() * a.entries()).trace().real();
  CMatrix out = a.entries();
  out.diagonal().array() -= mean;
  return HermitianMatrix(out);
}

EigenframeMatrix to_eigenframe(const HermitianMatrix& a, const DensityMatrix& rho) {
  require_same_dim(a.dim(), rho.dim(), "to_eigenframe");
  const CMatrix& u = rho.eigenvectors();
  CMatrix frame = u.adjoint() * center(a, rho).entries() * u;
  frame = (frame + frame.adjoint()) * 0.5;
  return EigenframeMatrix(std::move(frame), rho.eigenvalues());
}

CMatrix in_eigenframe(const HermitianMatrix& x, const DensityMatrix& rho) {
  require_same_dim(x.dim(), rho.dim(), "in_eigenframe");
  const CMatrix& u = rho.eigenvectors();
  CMatrix frame = u.adjoint() * x.entries() * u;
  return (frame + frame.adjoint()) * 0.5;
}

HermitianMatrix commutator_i(const DensityMatrix& rho, const HermitianMatrix& a) {
  require_same_dim(a.dim(), rho.dim(), "commutator_i");
  const CMatrix& r = rho.entries();
  const CMatrix& m = a.entries();
  CMatrix c = Complex(0.0, 1.0) * (r * m - m * r);
  return HermitianMatrix((c + c.adjoint()) * 0.5);
}

double commutator_eigenframe_residual(const DensityMatrix& rho, const HermitianMatrix& a) {
  const CMatrix x = in_eigenframe(commutator_i(rho, a), rho);
  const EigenframeMatrix af = to_eigenframe(a, rho);
  const RVector& lam = rho.eigenvalues();
  double worst = 0.0;
  for (Eigen::Index h = 0; h < x.rows(); ++h) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Complex expect = Complex(0.0, lam(h) - lam(j)) * af(h, j);
      worst = std::max(worst, std::abs(x(h, j) - expect));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

double det_small(const RMatrix& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("det_small: matrix is not square");
  const Eigen::Index n = g.rows();
  if (n > 8) throw std::invalid_argument("det_small: dimension above 8");
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return g(0, 0);
    case 2:
      return g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    case 3:
      return g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) -
             g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0)) +
             g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    default:
      break;
  }
  RMatrix w = g;
  double det = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index r = k + 1; r < n; ++r) {
      if (std::abs(w(r, k)) > std::abs(w(piv, k))) piv = r;
    }
    if (w(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      w.row(k).swap(w.row(piv));
      det = -det;
    }
    det *= w(k, k);
    for (Eigen::Index r = k + 1; r < n; ++r) {
      const double factor = w(r, k) / w(k, k);
      w.row(r).tail(n - k - 1) -= factor * w.row(k).tail(n - k - 1);
    }
  }
  return det;
}

}  // namespace qfivol
