// Acceptance run: one line per criterion, "[PASS] AC<n> ..." or "[FAIL] AC<n> ...".
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qfivol/experiments.hpp"
#include "qfivol/qfi_metrics.hpp"
#include "qfivol/volume_inequalities.hpp"

using namespace qfivol;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& what, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, "exception"};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = o.pass && dt < budget_s;
  failures += !ok;
  fmt::print("[{}] AC{} {} -- {} ({:.2f} s, budget {:.0f} s)\n", ok ? "PASS" : "FAIL", id, what,
             o.detail, dt, budget_s);
  std::fflush(stdout);
}

std::vector<MonotoneFunction> regular_builtins() { return {sld(), wy(), wyd(0.25), wyd(0.1)}; }

std::vector<HermitianMatrix> draw_obs(std::uint64_t seed, Eigen::Index dim, int n, Ensemble e) {
  std::vector<HermitianMatrix> obs;
  for (int k = 0; k < n; ++k) obs.push_back(sample_hermitian({seed, dim, e}, k + 1));
  return obs;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "entanglement example: Cov = 1, 1; Corr = 0, 1 for sld, wy, wyd:0.25 (abs 1e-12)", 1,
            [] {
              const ReproReport r = repro_entanglement();
              double worst = 0.0;
              for (const auto& c : r.checks) worst = std::max(worst, std::abs(c.value - c.expected));
              return Outcome{r.passed(), fmt::format("{} checks, max deviation {:.1e}",
                                                     r.checks.size(), worst)};
            });

  criterion(2, "hessian: p^T H p = 8/3, e2^T H e2 = -16/3 (abs 1e-12)", 1, [] {
    const ReproReport r = repro_hessian();
    return Outcome{r.passed(), fmt::format("{} / {}", format_double(r.checks[0].value),
                                           format_double(r.checks[1].value))};
  });

  criterion(3, "metric identity: direct vs tilde-trace, 100 samples per f, dims 2-6 (rel 1e-9)", 10,
            [] {
              double worst = 0.0;
              for (const auto& f : regular_builtins()) {
                for (std::uint64_t k = 0; k < 100; ++k) {
                  const Eigen::Index dim = 2 + static_cast<Eigen::Index>(k % 5);
                  const DensityMatrix rho = sample_density({31 + k, dim, Ensemble::Density}, 0);
                  const auto obs = draw_obs(31 + k, dim, 2, Ensemble::ComplexHermitian);
                  const MetricContext ctx(rho, f);
                  worst = std::max(worst, identity_residual(ctx, obs[0], obs[1]) /
                                              std::max(1.0, std::abs(f_correlation(ctx, obs[0], obs[1]))));
                }
              }
              return Outcome{worst <= 1e-9, fmt::format("max relative residual {:.2e}", worst)};
            });

  criterion(4, "decomposition equals determinant gap, N = 1, 2, 3, dims 2-5, all f (rel 1e-8)", 60,
            [] {
              double worst = 0.0;
              for (int n = 1; n <= 3; ++n) {
                for (std::uint64_t k = 0; k < 100; ++k) {
                  const Eigen::Index dim = 2 + static_cast<Eigen::Index>(k % 4);
                  const std::uint64_t seed = 4000 + 100 * n + k;
                  const DensityMatrix rho = sample_density({seed, dim, Ensemble::Density}, 0);
                  const auto obs = draw_obs(seed, dim, n, Ensemble::ComplexHermitian);
                  for (const auto& f : regular_builtins()) {
                    const VolumeReport r = gap_F(GramSpec(rho, obs, f), true);
                    worst = std::max(worst, std::abs(*r.decomposition - r.gap) /
                                                std::max(1.0, std::abs(r.cov_det)));
                  }
                }
              }
              return Outcome{worst <= 1e-8, fmt::format("max relative gap {:.2e}", worst)};
            });

  criterion(5, "real K equals squared 3x3 determinant, 1000 probes (abs 1e-10)", 5, [] {
    std::mt19937_64 gen(55);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const Eigen::Index dim = 2 + static_cast<Eigen::Index>(k % 4);
      const DensityMatrix rho = sample_density({5000 + k, dim, Ensemble::RealDensity}, 0);
      const auto obs = draw_obs(5000 + k, dim, 3, Ensemble::RealSymmetric);
      const EigenframeMatrix a = to_eigenframe(obs[0], rho), b = to_eigenframe(obs[1], rho),
                             c = to_eigenframe(obs[2], rho);
      std::uniform_int_distribution<Eigen::Index> idx(0, dim - 1);
      const IndexPair ps[] = {{idx(gen), idx(gen)}, {idx(gen), idx(gen)}, {idx(gen), idx(gen)}};
      RMatrix m(3, 3);
      for (int s = 0; s < 3; ++s) {
        m(0, s) = a(ps[s].row, ps[s].col).real();
        m(1, s) = b(ps[s].row, ps[s].col).real();
        m(2, s) = c(ps[s].row, ps[s].col).real();
      }
      const double d = oracle::leibniz_det(m);
      worst = std::max(worst, std::abs(k_term(a, b, c, ps[0], ps[1], ps[2]) - d * d));
    }
    return Outcome{worst <= 1e-10, fmt::format("max deviation {:.2e}", worst)};
  });

  criterion(6, "proved cases: F >= -1e-10 scale (N=1,2 complex; N=3 real; N=3 structured)", 120,
            [] {
              struct Case {
                const char* label;
                int n;
                SweepEnsemble e;
              };
              const Case cases[] = {{"N=1 complex", 1, SweepEnsemble::Complex},
                                    {"N=2 complex", 2, SweepEnsemble::Complex},
                                    {"N=3 real", 3, SweepEnsemble::Real},
                                    {"N=3 structured", 3, SweepEnsemble::Structured}};
              std::uint64_t violations = 0;
              std::string detail;
              for (const Case& c : cases) {
                double lowest = 1e300;
                for (std::uint64_t k = 0; k < 1000; ++k) {
                  const Eigen::Index dim = 2 + static_cast<Eigen::Index>(k % 5);
                  const Instance in = draw_instance(c.e, c.n, dim, 6000, k);
                  const MonotoneFunction f = regular_builtins()[k % 4];
                  const ConjectureVerdict v = check_conjectures(GramSpec(in.state, in.observables, f));
                  violations += !v.main_holds || !v.proven_case;
                  lowest = std::min(lowest, v.gap / v.scale);
                }
                detail += fmt::format("{}: min F/scale {:.2e}; ", c.label, lowest);
              }
              return Outcome{violations == 0, detail + fmt::format("violations {}", violations)};
            });

  criterion(7, "V(sld) >= V(wy) >= V(wyd:0.25) >= V(wyd:0.1), N = 3 real, 200 triples (slack 1e-10)",
            30, [] {
              const std::vector<MonotoneFunction> chain = regular_builtins();
              std::uint64_t broken = 0;
              double worst = 0.0;
              for (std::uint64_t k = 0; k < 200; ++k) {
                const Eigen::Index dim = 3 + static_cast<Eigen::Index>(k % 4);
                const Instance in = draw_instance(SweepEnsemble::Real, 3, dim, 7000, k);
                std::vector<double> v;
                for (const auto& f : chain) v.push_back(scaled_qfi_volume(GramSpec(in.state, in.observables, f)));
                for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                  const double slack = kMonotoneSlack * std::max({1.0, v[i], v[i + 1]});
                  worst = std::max(worst, v[i + 1] - v[i]);
                  broken += v[i] < v[i + 1] - slack;
                }
              }
              return Outcome{broken == 0, fmt::format("broken links {}, max excess {:.2e}", broken, worst)};
            });

  criterion(8, "pure states: covariance volume = qfi volume, n = 1..3, dims 2-6, 100 samples (1e-8)",
            10, [] {
              double worst = 0.0;
              for (std::uint64_t k = 0; k < 100; ++k) {
                const Eigen::Index dim = 2 + static_cast<Eigen::Index>(k % 5);
                const int n = 1 + static_cast<int>(k % 3);
                const DensityMatrix pure = sample_pure_state(8000 + k, dim, 0);
                const auto obs = draw_obs(8000 + k, dim, n, Ensemble::ComplexHermitian);
                for (const auto& f : regular_builtins()) {
                  const GramSpec s(pure, obs, f);
                  worst = std::max(worst, std::abs(volume(s, VolumeKind::Covariance) -
                                                   volume(s, VolumeKind::Qfi)));
                }
              }
              return Outcome{worst <= 1e-8, fmt::format("max volume gap {:.2e}", worst)};
            });

  criterion(9, "sandwich bounds, f~ non-regular, mean identity, 1000 points per f", 5, [] {
    std::mt19937_64 gen(909);
    std::uniform_real_distribution<double> u(std::log(1e-6), std::log(1e6));
    double sandwich = 0.0, identity = 0.0;
    bool tilde_ok = true;
    for (const auto& f : regular_builtins()) {
      const MonotoneFunction t = tilde(f);
      tilde_ok = tilde_ok && t.value_at_zero() == 0.0 && !t.regular();
      for (int k = 0; k < 1000; ++k) {
        const double x = std::exp(u(gen)), y = std::exp(u(gen));
        const double lo = 2 * x / (1 + x), hi = (1 + x) / 2;
        sandwich = std::max({sandwich, (lo - f(x)) / hi, (f(x) - hi) / hi});
        const double lhs = (x + y) / 2 - scalar_mean(t, x, y);
        const double rhs = f.value_at_zero() * (x - y) * (x - y) / (2 * scalar_mean(f, x, y));
        identity = std::max(identity, std::abs(lhs - rhs) / std::max({1.0, std::abs(rhs), (x + y) / 2}));
      }
    }
    return Outcome{sandwich <= 1e-12 && identity <= 1e-10 && tilde_ok,
                   fmt::format("sandwich excess {:.1e}, identity {:.1e}, f~(0) = 0: {}", sandwich,
                               identity, tilde_ok)};
  });

  criterion(10, "exploratory sweep: 1e5 complex N = 3 samples, dims 2-4, identical for 1 and 4 workers",
            900, [] {
              const auto dir = std::filesystem::temp_directory_path() / "qfivol_acceptance";
              std::filesystem::create_directories(dir);
              SweepConfig cfg;
              cfg.n = 3;
              cfg.dim_lo = 2;
              cfg.dim_hi = 4;
              cfg.samples = 100000;
              cfg.seed = 20240601;
              cfg.parallelism = 1;
              cfg.out = dir / "sweep_p1.jsonl";
              const SweepSummary s1 = run_sweep(cfg);
              cfg.parallelism = 4;
              cfg.out = dir / "sweep_p4.jsonl";
              const SweepSummary s4 = run_sweep(cfg);
              const bool same = slurp(dir / "sweep_p1.jsonl") == slurp(dir / "sweep_p4.jsonl");

              // every flagged record must replay exactly
              std::uint64_t replayed = 0, mismatched = 0;
              std::ifstream in(dir / "sweep_p1.jsonl");
              for (std::string line; std::getline(in, line);) {
                if (line.find(R"("candidate":true)") == std::string::npos) continue;
                ++replayed;
                mismatched += to_line(replay(parse_record(line))) != line;
              }
              return Outcome{same && s1.samples == 100000 && mismatched == 0 &&
                                 s1.min_gap == s4.min_gap,
                             fmt::format("minF {} at index {} ({}), candidates {}, replayed {}, "
                                         "byte-identical {}",
                                         format_double(s1.min_gap), s1.argmin_index,
                                         s1.argmin_function, s1.violations, replayed, same)};
            });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
