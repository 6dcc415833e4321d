#include "qfivol/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <thread>

#include "qfivol/qfi_metrics.hpp"
#include "qfivol/volume_inequalities.hpp"

namespace qfivol {

namespace {

CheckLine check(std::string label, double value, double expected, double tol) {
  return {std::move(label), value, expected, tol, std::abs(value - expected) <= tol};
}

CheckLine flag(std::string label, bool ok) {
  return {std::move(label), ok ? 1.0 : 0.0, 1.0, 0.0, ok};
}

RMatrix rows4(std::initializer_list<double> v) {
  RMatrix m(4, 4);
  auto it = v.begin();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = *it++;
  }
  return m;
}

std::vector<MonotoneFunction> parse_functions(const std::vector<std::string>& specs) {
  std::vector<MonotoneFunction> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(parse_function(s));
  return out;
}

SampleRecord make_record(SweepEnsemble ensemble, int n, Eigen::Index dim, std::uint64_t seed,
                         std::uint64_t index, const GramSpec& spec, const VolumeReport& report) {
  const ConjectureVerdict v = check_conjectures(spec, report);
  SampleRecord r;
  r.seed = seed;
  r.index = index;
  r.ensemble = std::string(sweep_ensemble_name(ensemble));
  r.n = n;
  r.dim = static_cast<long>(dim);
  r.function = spec.function().name();
  r.cov_det = report.cov_det;
  r.qfi_det = report.qfi_det;
  r.gap = report.gap;
  r.scale = v.scale;
  r.robertson = report.robertson_det;
  r.decomposition = report.decomposition;
  r.main_holds = v.main_holds;
  r.dependent = v.dependent;
  r.equality_consistent = v.equality_consistent;
  r.candidate = v.candidate_counterexample;
  r.proven = v.proven_case;
  return r;
}

PartnerRecord make_partner(const MonotoneFunction& f, const MonotoneFunction& g, double qfi_det_f,
                           double qfi_det_g, double scale) {
  const MonotonicityCheck m =
      compare_volumes(tilde_order(f, g), std::sqrt(std::max(0.0, qfi_det_f)),
                      std::sqrt(std::max(0.0, qfi_det_g)), kMainTol * scale);
  return {g.name(), std::string(tilde_order_name(m.order)), m.v_self, m.v_partner, m.holds};
}

struct Aggregator {
  explicit Aggregator(const std::vector<MonotoneFunction>& fs) {
    for (const auto& f : fs) {
      stats.push_back({f.name(), std::numeric_limits<double>::infinity(), 0.0, 0});
      sums.push_back(0.0);
    }
  }

  void add(const SampleRecord& r, std::size_t fi) {
    ++summary.records;
    FunctionStats& s = stats[fi];
    s.min_gap = std::min(s.min_gap, r.gap);
    sums[fi] += r.gap;
    ++s.count;
    if (r.gap < summary.min_gap || summary.records == 1) {
      summary.min_gap = r.gap;
      summary.argmin_index = r.index;
      summary.argmin_function = r.function;
    }
    if (r.candidate) {
      ++summary.violations;
      if (r.proven) ++summary.proven_violations;
    }
    for (const auto& p : r.partners) {
      if (p.holds && !*p.holds) ++summary.monotonicity_failures;
    }
  }

  SweepSummary finish(std::uint64_t samples) {
    for (std::size_t i = 0; i < stats.size(); ++i) {
      stats[i].mean_gap = stats[i].count ? sums[i] / static_cast<double>(stats[i].count) : 0.0;
    }
    summary.samples = samples;
    summary.per_function = stats;
    return summary;
  }

  SweepSummary summary;
  std::vector<FunctionStats> stats;
  std::vector<double> sums;
};

std::string json_string_list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += '"' + v[i] + '"';
  }
  return out + "]";
}

}  // namespace

// ---------------------------------------------------------------------------

bool ReproReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

std::string ReproReport::render() const {
  std::string out = title + "\n";
  for (const auto& c : checks) {
    out += fmt::format("  [{}] {}: {} (expected {}, tol {:.0e})\n", c.pass ? "PASS" : "FAIL",
                       c.label, format_double(c.value), format_double(c.expected), c.tolerance);
  }
  for (const auto& n : notes) out += "  note: " + n + "\n";
  out += passed() ? "  verdict: all checks pass\n" : "  verdict: FAILED\n";
  return out;
}

ReproReport repro_entanglement() {
  ReproReport rep;
  rep.title = "entanglement: covariance vs metric adjusted correlation";

  // separable mixture (|00><00| + |11><11|)/2 and Bell state |Phi+><Phi+|
  const DensityMatrix mixture(CMatrix(
      (0.5 * rows4({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1})).cast<Complex>()));
  const DensityMatrix bell(CMatrix(
      (0.5 * rows4({1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1})).cast<Complex>()));

  // A = sigma_z (x) I; B has unit entries. The half-scaled pair (A/2, B/2)
  // is reported alongside: every quantity here is bilinear, so it scales by 1/4.
  const HermitianMatrix a = HermitianMatrix::from_real(
      rows4({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1}));
  const HermitianMatrix b = HermitianMatrix::from_real(
      rows4({1, 0, 0, 1, 0, -1, 0, 0, 0, 0, 1, 0, 1, 0, 0, -1}));
  const HermitianMatrix a_half = a * 0.5;
  const HermitianMatrix b_half = b * 0.5;

  constexpr double tol = 1e-12;
  rep.checks.push_back(check("Cov_mixture(A,B)", covariance(mixture, a, b), 1.0, tol));
  rep.checks.push_back(check("Cov_bell(A,B)", covariance(bell, a, b), 1.0, tol));
  for (const char* spec : {"sld", "wy", "wyd:0.25"}) {
    const MonotoneFunction f = parse_function(spec);
    const MetricContext mix_ctx(mixture, f);
    const MetricContext bell_ctx(bell, f);
    rep.checks.push_back(
        check(fmt::format("Corr^{}_mixture(A,B)", spec), f_correlation(mix_ctx, a, b), 0.0, tol));
    rep.checks.push_back(
        check(fmt::format("Corr^{}_bell(A,B)", spec), f_correlation(bell_ctx, a, b), 1.0, tol));
    rep.checks.push_back(check(fmt::format("Corr^{}_bell(A/2,B/2)", spec),
                               f_correlation(bell_ctx, a_half, b_half), 0.25, tol));
    rep.checks.push_back(check(fmt::format("Corr^{}_mixture(A/2,B/2)", spec),
                               f_correlation(mix_ctx, a_half, b_half), 0.0, tol));
  }
  rep.checks.push_back(check("Cov_bell(A/2,B/2)", covariance(bell, a_half, b_half), 0.25, tol));
  rep.notes.push_back(
      "covariance cannot tell the separable mixture from the Bell state; the f-correlation can");
  return rep;
}

ReproReport repro_hessian() {
  ReproReport rep;
  rep.title = "hessian of Var(X)Var(Y) - Cov(X,Y)^2 at uniform p on 3 points";
  const RVector p = RVector::Constant(3, 1.0 / 3.0);
  const RVector x = (RVector(3) << 1, 0, -1).finished();
  const RVector y = (RVector(3) << 1, -2, 1).finished();
  const RMatrix h = hessian_generalized_variance(p, x, y);
  const double along_p = quadratic_form(h, p);
  const double along_e2 = quadratic_form(h, RVector::Unit(3, 1));
  rep.checks.push_back(check("p^T H p", along_p, 8.0 / 3.0, 1e-12));
  rep.checks.push_back(check("e2^T H e2", along_e2, -16.0 / 3.0, 1e-12));
  const bool indefinite = along_p > 0.0 && along_e2 < 0.0;
  rep.checks.push_back(flag("indefinite", indefinite));
  rep.notes.push_back(std::string("verdict: ") + (indefinite ? "indefinite" : "not shown indefinite"));
  return rep;
}

ReproReport repro_pure_volume(Eigen::Index dim, int n, std::uint64_t seed) {
  if (n < 1 || n > 3) throw std::invalid_argument("pure-volume: n must be 1, 2 or 3");
  if (dim < 2 || dim > 6) throw std::invalid_argument("pure-volume: dim must lie in [2, 6]");
  ReproReport rep;
  rep.title = fmt::format("pure-state volumes: dim {}, n {}, seed {}", dim, n, seed);

  const DensityMatrix pure = sample_pure_state(seed, dim, 0);
  std::vector<HermitianMatrix> obs;
  for (int k = 0; k < n; ++k) {
    obs.push_back(sample_hermitian({seed, dim, Ensemble::ComplexHermitian},
                                   static_cast<std::uint64_t>(k) + 1));
  }
  const CMatrix projector = pure.entries();

  for (const char* spec : {"sld", "wy", "wyd:0.25"}) {
    const MonotoneFunction f = parse_function(spec);
    const GramSpec g(pure, obs, f);
    const double vc = volume(g, VolumeKind::Covariance);
    const double vq = volume(g, VolumeKind::Qfi);
    rep.checks.push_back(check(fmt::format("{}: Vol_cov - V(f)", spec), vc - vq, 0.0, 1e-8));
    if (n == 1) rep.checks.push_back(check(fmt::format("{}: F", spec), gap_F(g).gap, 0.0, 1e-8));

    double previous = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string trail;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const CMatrix mixed = (1.0 - eps) * projector +
                            CMatrix::Identity(dim, dim) * Complex(eps / static_cast<double>(dim));
      const GramSpec ge(DensityMatrix(mixed), obs, f);
      const double gap = std::abs(volume(ge, VolumeKind::Covariance) - volume(ge, VolumeKind::Qfi));
      decreasing = decreasing && gap <= previous;
      previous = gap;
      trail += fmt::format(" eps={:.0e}:{:.3e}", eps, gap);
    }
    rep.checks.push_back(flag(fmt::format("{}: near-pure gap shrinks", spec), decreasing));
    rep.notes.push_back(fmt::format("{} near-pure gaps{}", spec, trail));
  }
  return rep;
}

std::vector<FunctionRow> list_functions() {
  std::vector<FunctionRow> rows;
  for (const char* spec : {"sld", "wy", "rld", "wyd:0.25", "wyd:0.1"}) {
    const MonotoneFunction f = parse_function(spec);
    rows.push_back({f.name(), f.formula(), f.value_at_zero(), f.regular(),
                    f.regular() ? f.tilde_formula().value_or("-") : "-"});
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string_view sweep_ensemble_name(SweepEnsemble e) {
  switch (e) {
    case SweepEnsemble::Complex: return "complex";
    case SweepEnsemble::Real: return "real";
    case SweepEnsemble::Structured: return "structured";
  }
  return "unknown";
}

SweepEnsemble parse_sweep_ensemble(std::string_view tag) {
  if (tag == "complex" || tag == "complex-hermitian" || tag == "density") {
    return SweepEnsemble::Complex;
  }
  if (tag == "real" || tag == "real-symmetric" || tag == "real-density" ||
      tag == "real-density+real-symmetric") {
    return SweepEnsemble::Real;
  }
  if (tag == "structured" || tag == "pauli-like-structured") return SweepEnsemble::Structured;
  throw std::invalid_argument("unknown ensemble '" + std::string(tag) + "'");
}

Instance draw_instance(SweepEnsemble ensemble, int n, Eigen::Index dim, std::uint64_t seed,
                       std::uint64_t index) {
  if (n < 1 || n > kMaxObservables) throw std::invalid_argument("draw_instance: bad n");
  const std::uint64_t key = derive_seed(seed, index);
  switch (ensemble) {
    case SweepEnsemble::Complex:
    case SweepEnsemble::Real: {
      const bool real = ensemble == SweepEnsemble::Real;
      DensityMatrix rho =
          sample_density({key, dim, real ? Ensemble::RealDensity : Ensemble::Density}, 0);
      std::vector<HermitianMatrix> obs;
      for (int k = 0; k < n; ++k) {
        obs.push_back(sample_hermitian(
            {key, dim, real ? Ensemble::RealSymmetric : Ensemble::ComplexHermitian},
            static_cast<std::uint64_t>(k) + 1));
      }
      return {std::move(rho), std::move(obs)};
    }
    case SweepEnsemble::Structured: {
      if (n > 3) throw std::invalid_argument("draw_instance: structured ensemble has n <= 3");
      const DensityMatrix full = sample_density({key, dim, Ensemble::Density}, 0);
      RVector p = full.entries().diagonal().real();
      p /= p.sum();
      StructuredTriple t = sample_structured({key, dim, Ensemble::PauliLikeStructured}, 1);
      std::vector<HermitianMatrix> obs{t.a, t.b, t.c};
      obs.resize(static_cast<std::size_t>(n), HermitianMatrix::zero(dim));
      return {DensityMatrix::diagonal(p), std::move(obs)};
    }
  }
  throw std::invalid_argument("draw_instance: unknown ensemble");
}

Eigen::Index sample_dim(const SweepConfig& cfg, std::uint64_t index) {
  const auto span = static_cast<std::uint64_t>(cfg.dim_hi - cfg.dim_lo + 1);
  return cfg.dim_lo + static_cast<Eigen::Index>(index % span);
}

void validate(const SweepConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 3) throw std::invalid_argument("sweep: n must be 1, 2 or 3");
  if (cfg.dim_lo < 2 || cfg.dim_hi > 8 || cfg.dim_lo > cfg.dim_hi) {
    throw std::invalid_argument("sweep: dimensions must satisfy 2 <= lo <= hi <= 8");
  }
  if (cfg.samples < 1) throw std::invalid_argument("sweep: samples must be >= 1");
  if (cfg.functions.empty()) throw std::invalid_argument("sweep: no functions given");
  for (const auto& f : parse_functions(cfg.functions)) {
    if (!f.regular()) {
      throw std::invalid_argument("sweep: function '" + f.name() + "' is not regular");
    }
  }
  if (cfg.decompose && cfg.n == 3 && cfg.dim_hi > kMaxDecompositionDim) {
    throw std::invalid_argument("sweep: decomposition for n = 3 needs dim <= 6");
  }
}

std::vector<SampleRecord> evaluate_sample(const SweepConfig& cfg,
                                          const std::vector<MonotoneFunction>& functions,
                                          std::uint64_t index) {
  const Eigen::Index dim = sample_dim(cfg, index);
  const Instance inst = draw_instance(cfg.ensemble, cfg.n, dim, cfg.seed, index);
  std::vector<SampleRecord> out;
  std::vector<double> qfi_dets;
  out.reserve(functions.size());
  for (const auto& f : functions) {
    const GramSpec spec(inst.state, inst.observables, f);
    const VolumeReport report = gap_F(spec, cfg.decompose);
    out.push_back(make_record(cfg.ensemble, cfg.n, dim, cfg.seed, index, spec, report));
    qfi_dets.push_back(report.qfi_det);
  }
  for (std::size_t i = 0; i < functions.size(); ++i) {
    for (std::size_t j = 0; j < functions.size(); ++j) {
      if (i == j || tilde_order(functions[i], functions[j]) == TildeOrder::Incomparable) continue;
      out[i].partners.push_back(
          make_partner(functions[i], functions[j], qfi_dets[i], qfi_dets[j], out[i].scale));
    }
  }
  return out;
}

SweepSummary run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<MonotoneFunction> functions = parse_functions(cfg.functions);

  std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file '" + cfg.out.string() + "'");

  Aggregator agg(functions);
  constexpr std::uint64_t kBlock = 4096;
  std::vector<std::vector<SampleRecord>> slots(std::min<std::uint64_t>(kBlock, cfg.samples));
  const unsigned workers = std::max(1u, cfg.parallelism);

  for (std::uint64_t first = 0; first < cfg.samples; first += kBlock) {
    const std::uint64_t count = std::min(kBlock, cfg.samples - first);
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
      try {
        for (std::uint64_t k = next++; k < count; k = next++) {
          slots[k] = evaluate_sample(cfg, functions, first + k);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    const auto extra = static_cast<unsigned>(std::min<std::uint64_t>(workers, count)) - 1;
    for (unsigned w = 1; w <= extra; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    for (std::uint64_t k = 0; k < count; ++k) {
      for (std::size_t fi = 0; fi < slots[k].size(); ++fi) {
        out << to_line(slots[k][fi]) << '\n';
        agg.add(slots[k][fi], fi);
      }
    }
    if (!out) throw std::runtime_error("write to '" + cfg.out.string() + "' failed");
  }

  SweepSummary summary = agg.finish(cfg.samples);
  out << summary_line(cfg, summary) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to '" + cfg.out.string() + "' failed");
  summary.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

std::string summary_line(const SweepConfig& cfg, const SweepSummary& s) {
  std::string per;
  for (std::size_t i = 0; i < s.per_function.size(); ++i) {
    const auto& f = s.per_function[i];
    if (i) per += ',';
    per += fmt::format(R"({{"function":"{}","minF":{},"meanF":{},"count":{}}})", f.function,
                       format_double(f.min_gap), format_double(f.mean_gap), f.count);
  }
  return fmt::format(
      R"({{"kind":"summary","n":{},"dimLo":{},"dimHi":{},"samples":{},"seed":{},"ensemble":"{}",)"
      R"("functions":{},"records":{},"minF":{},"argminIndex":{},"argminFunction":"{}",)"
      R"("violations":{},"provenViolations":{},"monotonicityFailures":{},"perFunction":[{}]}})",
      cfg.n, cfg.dim_lo, cfg.dim_hi, s.samples, cfg.seed, sweep_ensemble_name(cfg.ensemble),
      json_string_list(cfg.functions), s.records, format_double(s.min_gap), s.argmin_index,
      s.argmin_function, s.violations, s.proven_violations, s.monotonicity_failures, per);
}

std::string render_summary(const SweepConfig& cfg, const SweepSummary& s) {
  std::string out = fmt::format(
      "sweep n={} dim={}..{} ensemble={} samples={} seed={} parallelism={}\n", cfg.n, cfg.dim_lo,
      cfg.dim_hi, sweep_ensemble_name(cfg.ensemble), s.samples, cfg.seed, cfg.parallelism);
  out += fmt::format("  records: {}  elapsed: {:.2f} s\n", s.records, s.elapsed_seconds);
  out += fmt::format("  min F: {} (index {}, function {})\n", format_double(s.min_gap),
                     s.argmin_index, s.argmin_function);
  for (const auto& f : s.per_function) {
    out += fmt::format("  {:>10}: min F {:>24}  mean F {:>24}\n", f.function,
                       format_double(f.min_gap), format_double(f.mean_gap));
  }
  out += fmt::format("  candidate counterexamples: {} (in proven cases: {})\n", s.violations,
                     s.proven_violations);
  out += fmt::format("  monotonicity failures: {}\n", s.monotonicity_failures);
  if (s.violations > 0) {
    out += "  replay a flagged record with: qfivol replay --record " + cfg.out.string() +
           ":<line>\n";
  }
  return out;
}

SampleRecord replay(const SampleRecord& r) {
  const SweepEnsemble ensemble = parse_sweep_ensemble(r.ensemble);
  const auto dim = static_cast<Eigen::Index>(r.dim);
  const Instance inst = draw_instance(ensemble, r.n, dim, r.seed, r.index);
  const MonotoneFunction f = parse_function(r.function);
  const GramSpec spec(inst.state, inst.observables, f);
  const VolumeReport report = gap_F(spec, r.decomposition.has_value());
  SampleRecord out = make_record(ensemble, r.n, dim, r.seed, r.index, spec, report);
  for (const auto& p : r.partners) {
    const MonotoneFunction g = parse_function(p.function);
    const VolumeReport other = gap_F(spec.with_function(g));
    out.partners.push_back(make_partner(f, g, report.qfi_det, other.qfi_det, out.scale));
  }
  return out;
}

}  // namespace qfivol
