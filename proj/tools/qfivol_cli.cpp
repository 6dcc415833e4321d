// qfivol: reproductions, sweeps and replay for the volume inequalities.
//
// Exit codes: 0 ok, 1 usage or runtime error, 2 a reproduced value (or a
// replayed record) did not match, 3 candidate counterexample under --strict.

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "qfivol/experiments.hpp"

namespace {

using namespace qfivol;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitCandidate = 3;

template <typename T>
T env_or(const char* name, T fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  T value{};
  const char* end = raw + std::char_traits<char>::length(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(fmt::format("environment variable {}='{}' is not valid", name, raw));
  }
  return value;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// "D" or "LO-HI"
std::pair<long, long> parse_dim_range(const std::string& s) {
  auto parse = [&](std::string_view part) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw std::invalid_argument("bad --dim '" + s + "'");
    }
    return v;
  };
  const auto dash = s.find('-');
  if (dash == std::string::npos) {
    const long d = parse(s);
    return {d, d};
  }
  return {parse(std::string_view(s).substr(0, dash)), parse(std::string_view(s).substr(dash + 1))};
}

int report_exit(const ReproReport& r) {
  std::cout << r.render();
  return r.passed() ? kExitOk : kExitMismatch;
}

bool same_bits(double a, double b) {
  return format_double(a) == format_double(b);
}

int run_replay(const std::string& where) {
  const auto colon = where.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("--record expects FILE:LINE");
  const std::string path = where.substr(0, colon);
  const long line_no = std::stol(where.substr(colon + 1));
  if (line_no < 1) throw std::invalid_argument("line numbers start at 1");

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  for (long k = 0; k < line_no; ++k) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument(fmt::format("'{}' has fewer than {} lines", path, line_no));
    }
  }
  const SampleRecord stored = parse_record(line);
  const SampleRecord fresh = replay(stored);
  const std::string fresh_line = to_line(fresh);

  std::cout << fmt::format("record {}: seed {} index {} ensemble {} n {} dim {} function {}\n",
                           where, stored.seed, stored.index, stored.ensemble, stored.n, stored.dim,
                           stored.function);
  std::cout << fmt::format("  F stored  {}\n  F replay  {}\n", format_double(stored.gap),
                           format_double(fresh.gap));
  if (fresh_line == to_line(stored) && same_bits(stored.gap, fresh.gap)) {
    std::cout << "  replay: identical\n";
    return kExitOk;
  }
  std::cout << "  replay: MISMATCH\n  stored: " << to_line(stored) << "\n  replay: " << fresh_line
            << "\n";
  return kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfivol: quantum Fisher information volumes and covariance determinants"};
  app.require_subcommand(1);

  auto* repro = app.add_subcommand("repro", "Reproduce a fixed worked example");
  repro->require_subcommand(1);
  auto* ent = repro->add_subcommand("entanglement", "Separable mixture vs Bell state");
  auto* hess = repro->add_subcommand("hessian", "Indefinite Hessian of the generalized variance");
  auto* pure = repro->add_subcommand("pure-volume", "Volume equality on pure states");
  long pure_dim = 3;
  int pure_n = 2;
  std::uint64_t pure_seed = 0;
  pure->add_option("--dim", pure_dim, "state dimension (2..6)")->required();
  pure->add_option("--n", pure_n, "number of observables (1..3)")->required();
  auto* pure_seed_opt = pure->add_option("--seed", pure_seed, "seed (default $QFIVOL_SEED or 0)");

  auto* sweep = app.add_subcommand("sweep", "Seeded random sweep over the conjectures");
  SweepConfig cfg;
  std::string dims = "2";
  std::string functions = "sld,wy,wyd:0.25";
  std::string ensemble = "complex";
  std::string out_path;
  bool strict = false;
  sweep->add_option("--n", cfg.n, "number of observables (1..3)")->required();
  sweep->add_option("--dim", dims, "dimension D or range LO-HI (2..8)")->required();
  sweep->add_option("--samples", cfg.samples, "number of samples")->required();
  sweep->add_option("--functions", functions, "comma separated function specs");
  sweep->add_option("--ensemble", ensemble, "complex | real | structured");
  auto* seed_opt = sweep->add_option("--seed", cfg.seed, "seed (default $QFIVOL_SEED or 0)");
  auto* par_opt =
      sweep->add_option("--parallelism", cfg.parallelism, "workers (default $QFIVOL_PARALLELISM)");
  sweep->add_option("--out", out_path, "record stream path")->required();
  sweep->add_flag("--strict", strict, "exit 3 when a candidate counterexample is found");
  sweep->add_flag("--decompose", cfg.decompose, "also record the H.K decomposition of F");

  auto* list = app.add_subcommand("list-functions", "Built-in operator monotone functions");

  auto* rep = app.add_subcommand("replay", "Recompute a sweep record bit for bit");
  std::string record;
  rep->add_option("--record", record, "FILE:LINE (1-based)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (ent->parsed()) return report_exit(repro_entanglement());
    if (hess->parsed()) return report_exit(repro_hessian());
    if (pure->parsed()) {
      if (pure_seed_opt->count() == 0) pure_seed = env_or<std::uint64_t>("QFIVOL_SEED", 0);
      return report_exit(repro_pure_volume(pure_dim, pure_n, pure_seed));
    }
    if (list->parsed()) {
      std::cout << fmt::format("{:<10} {:<44} {:>8} {:>8}  {}\n", "id", "formula", "f(0)",
                               "regular", "tilde");
      for (const auto& row : list_functions()) {
        std::cout << fmt::format("{:<10} {:<44} {:>8} {:>8}  {}\n", row.id, row.formula,
                                 fmt::format("{:g}", row.value_at_zero), row.regular ? "true" : "false",
                                 row.tilde_formula);
      }
      return kExitOk;
    }
    if (rep->parsed()) return run_replay(record);
    if (sweep->parsed()) {
      if (seed_opt->count() == 0) cfg.seed = env_or<std::uint64_t>("QFIVOL_SEED", 0);
      if (par_opt->count() == 0) {
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        cfg.parallelism = env_or<unsigned>("QFIVOL_PARALLELISM", hw);
      }
      const auto [lo, hi] = parse_dim_range(dims);
      cfg.dim_lo = lo;
      cfg.dim_hi = hi;
      cfg.functions = split_commas(functions);
      cfg.ensemble = parse_sweep_ensemble(ensemble);
      cfg.out = out_path;
      validate(cfg);
      const SweepSummary s = run_sweep(cfg);
      std::cout << render_summary(cfg, s);
      return strict && s.violations > 0 ? kExitCandidate : kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
