#include "qfivol/volume_inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

namespace qfivol {

namespace {

// Per-pair scalars shared by the H kernels.
struct PairMeans {
  double half_sum;    // (u + v) / 2
  double tilde_mean;  // m_f~(u, v)
  double deficit;     // (u - v)^2 f(0) / (2 m_f(u, v)) = half_sum - tilde_mean
};

PairMeans pair_means(const MonotoneFunction& f, const MonotoneFunction& ft, double u, double v) {
  const double d = u - v;
  const double deficit = d == 0.0 ? 0.0 : d * d * f.value_at_zero() / (2.0 * scalar_mean(f, u, v));
  return {0.5 * (u + v), scalar_mean(ft, u, v), deficit};
}

double h2_kernel(const PairMeans& p, const PairMeans& q) {
  return p.half_sum * q.tilde_mean + q.half_sum * p.tilde_mean - p.tilde_mean * q.tilde_mean;
}

double h3_kernel(const PairMeans& p, const PairMeans& q, const PairMeans& r) {
  return p.half_sum * q.half_sum * r.half_sum - p.deficit * q.deficit * r.deficit;
}

// Per-pair scalars shared by the K kernels; ab = Re(a_ij b_ji) and so on.
struct PairEntries {
  double aa = 0.0, bb = 0.0, cc = 0.0;
  double ab = 0.0, ac = 0.0, bc = 0.0;
};

PairEntries pair_entries(const CMatrix& a, const CMatrix& b, const CMatrix* c, IndexPair p) {
  const Complex aij = a(p.row, p.col);
  const Complex bij = b(p.row, p.col), bji = b(p.col, p.row);
  PairEntries e;
  e.aa = std::norm(aij);
  e.bb = std::norm(bij);
  e.ab = (aij * bji).real();
  if (c != nullptr) {
    const Complex cij = (*c)(p.row, p.col), cji = (*c)(p.col, p.row);
    e.cc = std::norm(cij);
    e.ac = (aij * cji).real();
    e.bc = (bij * cji).real();
  }
  return e;
}

double k2_kernel(const PairEntries& p, const PairEntries& q) {
  return p.aa * q.bb + q.aa * p.bb - 2.0 * p.ab * q.ab;
}

double k3_kernel(const PairEntries& p1, const PairEntries& p2, const PairEntries& p3) {
  const std::array<const PairEntries*, 3> e{&p1, &p2, &p3};
  static constexpr std::array<std::array<int, 3>, 6> kS3{
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  double total = 0.0;
  for (const auto& s : kS3) {
    const PairEntries& x = *e[s[0]];
    const PairEntries& y = *e[s[1]];
    const PairEntries& z = *e[s[2]];
    total += x.aa * y.bb * z.cc + 2.0 * x.ac * y.ab * z.bc;
  }
  // the first three rows of kS3 are the alternating group
  double mixed = 0.0;
  for (int k = 0; k < 3; ++k) {
    const PairEntries& x = *e[kS3[k][0]];
    const PairEntries& y = *e[kS3[k][1]];
    const PairEntries& z = *e[kS3[k][2]];
    mixed += x.aa * y.bc * z.bc + x.bb * y.ac * z.ac + x.cc * y.ab * z.ab;
  }
  return total - 2.0 * mixed;
}

void require_positive(std::span<const double> args) {
  for (double v : args) {
    if (!(v > 0.0)) throw std::domain_error("h_term: arguments must be positive");
  }
}

void require_index(const EigenframeMatrix& m, IndexPair p) {
  if (p.row < 0 || p.col < 0 || p.row >= m.dim() || p.col >= m.dim()) {
    throw std::out_of_range(fmt::format("k_term: index ({}, {}) outside dimension {}", p.row,
                                        p.col, m.dim()));
  }
}

RMatrix tilde_gram(const GramSpec& spec) {
  const auto& fr = spec.frames();
  const int n = spec.size();
  RMatrix g(n, n);
  for (int h = 0; h < n; ++h) {
    for (int j = h; j < n; ++j) {
      g(h, j) = g(j, h) = tilde_trace(spec.context().tilde_mean_table(), fr[h], fr[j]);
    }
  }
  return g;
}

bool is_diagonal(const CMatrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r != c && m(r, c) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

GramSpec::GramSpec(DensityMatrix state, std::vector<HermitianMatrix> observables,
                   MonotoneFunction f)
    : ctx_(std::move(state), std::move(f)), observables_(std::move(observables)) {
  if (observables_.empty()) throw std::invalid_argument("GramSpec: need at least one observable");
  if (observables_.size() > static_cast<std::size_t>(kMaxObservables)) {
    throw std::invalid_argument("GramSpec: at most 8 observables");
  }
  frames_.reserve(observables_.size());
  for (const auto& a : observables_) {
    require_same_dim(a.dim(), ctx_.state().dim(), "GramSpec");
    frames_.push_back(to_eigenframe(a, ctx_.state()));
  }
}

GramSpec GramSpec::with_function(MonotoneFunction g) const {
  return GramSpec(state(), observables_, std::move(g));
}

RMatrix covariance_gram(const GramSpec& spec) {
  const auto& fr = spec.frames();
  const int n = spec.size();
  RMatrix g(n, n);
  for (int h = 0; h < n; ++h) {
    for (int j = h; j < n; ++j) g(h, j) = g(j, h) = covariance(fr[h], fr[j]);
  }
  return g;
}

RMatrix qfi_gram(const GramSpec& spec) { return covariance_gram(spec) - tilde_gram(spec); }

double volume(const GramSpec& spec, VolumeKind kind) {
  const RMatrix g = kind == VolumeKind::Covariance ? covariance_gram(spec) : qfi_gram(spec);
  return std::sqrt(std::max(0.0, det_small(g)));
}

double scaled_qfi_volume(const GramSpec& spec) { return volume(spec, VolumeKind::Qfi); }

VolumeReport gap_F(const GramSpec& spec, bool with_decomposition) {
  VolumeReport r;
  r.cov_gram = covariance_gram(spec);
  r.qfi_gram = r.cov_gram - tilde_gram(spec);
  r.cov_det = det_small(r.cov_gram);
  r.qfi_det = det_small(r.qfi_gram);
  r.gap = r.cov_det - r.qfi_det;
  if (spec.size() % 2 == 0) {
    r.robertson_det = robertson_bound(spec.state(), spec.observables());
  }
  if (with_decomposition && spec.size() <= 3 && spec.state().faithful() &&
      (spec.size() < 3 || spec.state().dim() <= kMaxDecompositionDim)) {
    r.decomposition = decompose_F(spec);
  }
  return r;
}

// ---------------------------------------------------------------------------

double h_term(const MonotoneFunction& f, double x, double y, double w, double z) {
  require_positive(std::array{x, y, w, z});
  const MonotoneFunction ft = tilde(f);
  return h2_kernel(pair_means(f, ft, x, y), pair_means(f, ft, w, z));
}

double h_term(const MonotoneFunction& f, double x, double y, double h, double k, double w,
              double z) {
  require_positive(std::array{x, y, h, k, w, z});
  const MonotoneFunction ft = tilde(f);
  return h3_kernel(pair_means(f, ft, x, y), pair_means(f, ft, h, k), pair_means(f, ft, w, z));
}

double h_term(const MonotoneFunction& f, std::span<const double> args) {
  if (args.size() == 4) return h_term(f, args[0], args[1], args[2], args[3]);
  if (args.size() == 6) return h_term(f, args[0], args[1], args[2], args[3], args[4], args[5]);
  throw std::invalid_argument("h_term: expected 4 or 6 arguments");
}

double k_term(const EigenframeMatrix& a, const EigenframeMatrix& b, IndexPair p, IndexPair q) {
  require_same_dim(a.dim(), b.dim(), "k_term");
  for (IndexPair ip : {p, q}) require_index(a, ip);
  return k2_kernel(pair_entries(a.entries(), b.entries(), nullptr, p),
                   pair_entries(a.entries(), b.entries(), nullptr, q));
}

double k_term(const EigenframeMatrix& a, const EigenframeMatrix& b, const EigenframeMatrix& c,
              IndexPair p, IndexPair q, IndexPair r) {
  require_same_dim(a.dim(), b.dim(), "k_term");
  require_same_dim(a.dim(), c.dim(), "k_term");
  for (IndexPair ip : {p, q, r}) require_index(a, ip);
  const CMatrix& am = a.entries();
  const CMatrix& bm = b.entries();
  const CMatrix* cm = &c.entries();
  return k3_kernel(pair_entries(am, bm, cm, p), pair_entries(am, bm, cm, q),
                   pair_entries(am, bm, cm, r));
}

double decompose_F(const GramSpec& spec) {
  const int n_obs = spec.size();
  if (n_obs < 1 || n_obs > 3) {
    throw std::invalid_argument("decompose_F: only N = 1, 2, 3 have a decomposition");
  }
  const DensityMatrix& rho = spec.state();
  if (!rho.faithful()) throw NonFaithfulState("decompose_F: state must be faithful");
  const Eigen::Index dim = rho.dim();
  if (n_obs == 3 && dim > kMaxDecompositionDim) {
    throw std::invalid_argument("decompose_F: dimension above 6 for N = 3");
  }
  const auto& fr = spec.frames();
  const RMatrix& mt = spec.context().tilde_mean_table();

  if (n_obs == 1) {
    const CMatrix& a = fr[0].entries();
    double s = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i) s += mt(i, j) * std::norm(a(i, j));
    }
    return s;
  }

  const MonotoneFunction& f = spec.function();
  const MonotoneFunction& ft = spec.context().tilde_function();
  const RVector& lam = rho.eigenvalues();
  const Eigen::Index pairs = dim * dim;
  std::vector<PairMeans> means(pairs);
  std::vector<PairEntries> entries(pairs);
  const CMatrix* c = n_obs == 3 ? &fr[2].entries() : nullptr;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      means[i * dim + j] = pair_means(f, ft, lam(i), lam(j));
      entries[i * dim + j] = pair_entries(fr[0].entries(), fr[1].entries(), c, {i, j});
    }
  }

  double s = 0.0;
  if (n_obs == 2) {
    for (Eigen::Index p = 0; p < pairs; ++p) {
      for (Eigen::Index q = 0; q < pairs; ++q) {
        s += h2_kernel(means[p], means[q]) * k2_kernel(entries[p], entries[q]);
      }
    }
    return 0.5 * s;
  }
  for (Eigen::Index p = 0; p < pairs; ++p) {
    for (Eigen::Index q = 0; q < pairs; ++q) {
      for (Eigen::Index r = 0; r < pairs; ++r) {
        s += h3_kernel(means[p], means[q], means[r]) *
             k3_kernel(entries[p], entries[q], entries[r]);
      }
    }
  }
  return s / 6.0;
}

// ---------------------------------------------------------------------------

double robertson_bound(const DensityMatrix& rho, std::span<const HermitianMatrix> observables) {
  const auto n = static_cast<Eigen::Index>(observables.size());
  if (n < 1) throw std::invalid_argument("robertson_bound: need at least one observable");
  for (const auto& a : observables) require_same_dim(a.dim(), rho.dim(), "robertson_bound");
  if (n % 2 == 1) return 0.0;
  if (n > kMaxObservables) throw std::invalid_argument("robertson_bound: at most 8 observables");
  RMatrix m = RMatrix::Zero(n, n);
  for (Eigen::Index h = 0; h < n; ++h) {
    for (Eigen::Index j = h + 1; j < n; ++j) {
      const CMatrix& x = observables[h].entries();
      const CMatrix& y = observables[j].entries();
      const Complex t = (rho.entries() * (x * y - y * x)).trace();
      const Complex v = Complex(0.0, -0.5) * t;
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(t))) {
        throw std::logic_error("robertson_bound: commutator expectation is not imaginary");
      }
      m(h, j) = v.real();
      m(j, h) = -v.real();
    }
  }
  return det_small(m);
}

double dependence_singular_value(const GramSpec& spec) {
  const Eigen::Index dim = spec.state().dim();
  const Eigen::Index n = spec.size();
  const Eigen::Index width = 2 * dim * dim;
  if (n > width) return 0.0;
  RMatrix stacked(n, width);
  for (Eigen::Index k = 0; k < n; ++k) {
    const CMatrix a0 = center(spec.observables()[k], spec.state()).entries();
    for (Eigen::Index e = 0; e < dim * dim; ++e) {
      const Complex v = a0(e % dim, e / dim);
      stacked(k, 2 * e) = v.real();
      stacked(k, 2 * e + 1) = v.imag();
    }
  }
  Eigen::JacobiSVD<RMatrix> svd(stacked);
  return svd.singularValues().minCoeff();
}

ConjectureVerdict check_conjectures(const GramSpec& spec,
                                    const std::optional<MonotoneFunction>& partner) {
  return check_conjectures(spec, gap_F(spec), partner);
}

ConjectureVerdict check_conjectures(const GramSpec& spec, const VolumeReport& report,
                                    const std::optional<MonotoneFunction>& partner) {
  ConjectureVerdict v;
  v.gap = report.gap;
  v.scale = std::max(1.0, std::abs(report.cov_det));
  v.main_holds = report.gap >= -kMainTol * v.scale;
  v.candidate_counterexample = !v.main_holds;
  v.dependent = dependence_singular_value(spec) < kDependenceTol;
  const bool tiny = std::abs(report.gap) <= kEqualityTol * v.scale;
  v.equality_consistent = !v.dependent || tiny;
  v.near_zero_independent = !v.dependent && tiny;

  const auto& obs = spec.observables();
  const bool all_real =
      spec.state().is_real() &&
      std::all_of(obs.begin(), obs.end(), [](const HermitianMatrix& a) { return a.is_real(); });
  const bool structured = spec.size() == 3 && is_diagonal(spec.state().entries()) &&
                          (obs[1].entries().diagonal().array() == 0.0).all() &&
                          is_diagonal(obs[2].entries());
  v.proven_case = spec.size() <= 2 || (spec.size() == 3 && (all_real || structured));

  if (partner) {
    v.monotonicity = compare_volumes(tilde_order(spec.function(), *partner),
                                     std::sqrt(std::max(0.0, report.qfi_det)),
                                     scaled_qfi_volume(spec.with_function(*partner)),
                                     kMainTol * v.scale);
  }
  return v;
}

MonotonicityCheck compare_volumes(TildeOrder order, double v_self, double v_partner,
                                  double det_noise) {
  MonotonicityCheck m{order, v_self, v_partner, std::nullopt};
  const double slack = kMonotoneSlack * std::max({1.0, v_self, v_partner});
  // V is a square root of a determinant, so determinant rounding of size
  // det_noise shows up as sqrt(det_noise) in V; compare squares in that case.
  auto at_least = [&](double hi, double lo) {
    return hi >= lo - slack || lo * lo - hi * hi <= det_noise;
  };
  switch (order) {
    case TildeOrder::FirstBelow: m.holds = at_least(v_self, v_partner); break;
    case TildeOrder::SecondBelow: m.holds = at_least(v_partner, v_self); break;
    case TildeOrder::Equal:
      m.holds = at_least(v_self, v_partner) && at_least(v_partner, v_self);
      break;
    case TildeOrder::Incomparable: break;
  }
  return m;
}

// ---------------------------------------------------------------------------

RMatrix hessian_generalized_variance(const RVector& p, const RVector& x, const RVector& y) {
  const Eigen::Index n = p.size();
  if (x.size() != n || y.size() != n) {
    throw DimensionMismatch("hessian_generalized_variance: vector lengths differ");
  }
  if (n == 0 || (p.array() <= 0.0).any() || std::abs(p.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "hessian_generalized_variance: p must be strictly positive and sum to 1");
  }
  const double ex = p.dot(x);
  const double ey = p.dot(y);
  const double var_x = p.dot(x.cwiseProduct(x)) - ex * ex;
  const double var_y = p.dot(y.cwiseProduct(y)) - ey * ey;
  const double cov = p.dot(x.cwiseProduct(y)) - ex * ey;

  // first derivatives of Var(X), Var(Y), Cov(X,Y)
  const RVector dvx = x.cwiseProduct(x) - 2.0 * ex * x;
  const RVector dvy = y.cwiseProduct(y) - 2.0 * ey * y;
  const RVector dc = x.cwiseProduct(y) - ey * x - ex * y;

  RMatrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = -2.0 * x(i) * x(j) * var_y + dvx(i) * dvy(j) - 2.0 * y(i) * y(j) * var_x +
                dvy(i) * dvx(j) - 2.0 * dc(i) * dc(j) + 2.0 * cov * (x(i) * y(j) + y(i) * x(j));
    }
  }
  return h;
}

double quadratic_form(const RMatrix& h, const RVector& v) {
  if (h.rows() != v.size() || h.cols() != v.size()) {
    throw DimensionMismatch("quadratic_form: size mismatch");
  }
  return v.dot(h * v);
}

}  // namespace qfivol
