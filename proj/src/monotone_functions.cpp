#include "qfivol/monotone_functions.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

namespace qfivol {

namespace {

constexpr double kRegistrationTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;

// Below this distance from 1 the WYD quotient is replaced by its Taylor
// polynomial 1 + s/2 - (1 - b(1-b)) s^2 / 12, s = x - 1.
constexpr double kWydSeriesRadius = 1e-4;

double sld_eval(double x) { return 0.5 * (1.0 + x); }

double wy_eval(double x) {
  const double h = 0.5 * (1.0 + std::sqrt(x));
  return h * h;
}

double rld_eval(double x) { return 2.0 * x / (1.0 + x); }

// x in (0, 1]
double wyd_core(double beta, double x) {
  const double s = x - 1.0;
  const double p = beta * (1.0 - beta);
  if (std::abs(s) < kWydSeriesRadius) {
    return 1.0 + 0.5 * s - (1.0 - p) / 12.0 * s * s;
  }
  const double t = std::log(x);
  const double num = std::expm1(t);
  return p * num * num / (std::expm1(beta * t) * std::expm1((1.0 - beta) * t));
}

double wyd_eval(double beta, double x) {
  // f(x) = x f(1/x) keeps the core on (0, 1]
  if (x > 1.0) return x * wyd_core(beta, 1.0 / x);
  return wyd_core(beta, x);
}

void check_registration(const std::string& name, const MonotoneFunction::Evaluator& f) {
  const double one = f(1.0);
  if (!(std::abs(one - 1.0) <= kRegistrationTol)) {
    throw RegistrationError(fmt::format("{}: f(1) = {:.17g}, expected 1", name, one));
  }
  for (double x : registration_grid()) {
    const double fx = f(x);
    const double mirrored = x * f(1.0 / x);
    if (!(std::abs(fx - mirrored) <= kSymmetryTol * std::max(std::abs(fx), std::abs(mirrored)))) {
      throw RegistrationError(
          fmt::format("{}: symmetry f(x) = x f(1/x) fails at x = {:.6g}", name, x));
    }
    const double lo = 2.0 * x / (1.0 + x);
    const double hi = 0.5 * (1.0 + x);
    if (!(fx >= lo * (1.0 - kRegistrationTol) && fx <= hi * (1.0 + kRegistrationTol))) {
      throw RegistrationError(
          fmt::format("{}: f({:.6g}) = {:.17g} leaves the harmonic/arithmetic band", name, x, fx));
    }
  }
}

std::string format_beta(double beta) { return fmt::format("{}", beta); }

}  // namespace

std::span<const double> registration_grid() {
  static const std::array<double, 64> grid = [] {
    std::array<double, 64> g{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = std::pow(10.0, -6.0 + 12.0 * static_cast<double>(i) / 63.0);
    }
    return g;
  }();
  return grid;
}

double MonotoneFunction::operator()(double x) const {
  if (x == 0.0) return impl_->value_at_zero;
  if (!(x > 0.0)) {
    throw std::domain_error(fmt::format("{}: argument {} outside (0, inf)", impl_->name, x));
  }
  return impl_->eval(x);
}

MonotoneFunction MonotoneFunction::registered(Impl impl) {
  check_registration(impl.name, impl.eval);
  return MonotoneFunction(std::make_shared<const Impl>(std::move(impl)));
}

MonotoneFunction MonotoneFunction::custom(std::string name, Evaluator f, double value_at_zero,
                                          std::string formula) {
  if (!(value_at_zero >= 0.0)) {
    throw RegistrationError(name + ": f(0) must be non-negative");
  }
  return registered(Impl{FunctionId::Custom, std::nullopt, std::move(name), std::move(formula),
                         std::nullopt, value_at_zero, std::move(f), nullptr});
}

MonotoneFunction builtin(FunctionId id, std::optional<double> beta) {
  using Impl = MonotoneFunction::Impl;
  switch (id) {
    case FunctionId::SLD:
      return MonotoneFunction::registered(Impl{id, std::nullopt, "sld", "(1+x)/2", "2x/(x+1)",
                                               0.5, sld_eval, nullptr});
    case FunctionId::WY:
      return MonotoneFunction::registered(Impl{id, std::nullopt, "wy", "((1+sqrt(x))/2)^2",
                                               "sqrt(x)", 0.25, wy_eval, nullptr});
    case FunctionId::RLD:
      return MonotoneFunction::registered(
          Impl{id, std::nullopt, "rld", "2x/(1+x)", std::nullopt, 0.0, rld_eval, nullptr});
    case FunctionId::WYD: {
      if (!beta || !(*beta > 0.0 && *beta < 0.5)) {
        throw std::invalid_argument("wyd: beta must lie in (0, 1/2)");
      }
      const double b = *beta;
      const std::string bs = format_beta(b);
      return MonotoneFunction::registered(
          Impl{id, b, "wyd:" + bs,
               fmt::format("{0}(1-{0})(x-1)^2/((x^{0}-1)(x^(1-{0})-1))", bs),
               fmt::format("(x^{0}+x^(1-{0}))/2", bs), b * (1.0 - b),
               [b](double x) { return wyd_eval(b, x); }, nullptr});
    }
    case FunctionId::Custom:
    case FunctionId::Tilde:
      break;
  }
  throw std::invalid_argument("builtin: not a builtin function id");
}

MonotoneFunction parse_function(std::string_view spec) {
  std::string s(spec);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "sld") return sld();
  if (s == "wy") return wy();
  if (s == "rld") return rld();
  if (s.starts_with("wyd:")) {
    const std::string rest = s.substr(4);
    double b = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), b);
    if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
      throw std::invalid_argument("invalid function spec '" + std::string(spec) + "'");
    }
    return wyd(b);
  }
  throw std::invalid_argument("invalid function spec '" + std::string(spec) + "'");
}

MonotoneFunction tilde(const MonotoneFunction& f) {
  using Impl = MonotoneFunction::Impl;
  if (!f.regular()) {
    throw NonRegularFunction("tilde undefined: " + f.name() + " is not regular (f(0) = 0)");
  }
  auto base = std::make_shared<const MonotoneFunction>(f);
  MonotoneFunction::Evaluator eval;
  switch (f.id()) {
    case FunctionId::SLD:
      eval = [](double x) { return 2.0 * x / (x + 1.0); };
      break;
    case FunctionId::WY:
      eval = [](double x) { return std::sqrt(x); };
      break;
    case FunctionId::WYD: {
      const double b = *f.beta();
      eval = [b](double x) { return 0.5 * (std::pow(x, b) + std::pow(x, 1.0 - b)); };
      break;
    }
    default: {
      const double f0 = f.value_at_zero();
      eval = [f, f0](double x) {
        const double d = x - 1.0;
        return 0.5 * ((x + 1.0) - d * d * f0 / f(x));
      };
      break;
    }
  }
  std::string formula = f.tilde_formula().value_or(
      fmt::format("((x+1)-(x-1)^2 f(0)/f(x))/2, f = {}", f.name()));
  return MonotoneFunction::registered(Impl{FunctionId::Tilde, f.beta(), "tilde(" + f.name() + ")",
                                           std::move(formula), std::nullopt, 0.0,
                                           std::move(eval), std::move(base)});
}

double scalar_mean(const MonotoneFunction& f, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::domain_error(fmt::format("scalar_mean: negative argument ({}, {})", x, y));
  }
  if (x == y) return x;
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  if (lo == 0.0) return hi * f.value_at_zero();
  return hi * f(lo / hi);
}

std::string_view tilde_order_name(TildeOrder o) {
  switch (o) {
    case TildeOrder::Equal: return "equal";
    case TildeOrder::FirstBelow: return "first<=second";
    case TildeOrder::SecondBelow: return "second<=first";
    case TildeOrder::Incomparable: return "incomparable";
  }
  return "unknown";
}

TildeOrder tilde_order(const MonotoneFunction& f, const MonotoneFunction& g,
                       std::span<const double> grid) {
  if (!f.regular() || !g.regular()) {
    throw NonRegularFunction("tilde_order: both functions must be regular");
  }
  if (grid.empty()) grid = registration_grid();
  bool f_below = true;  // f(0)/f(t) >= g(0)/g(t) everywhere  <=>  f~ <= g~
  bool g_below = true;
  for (double t : grid) {
    const double rf = f.value_at_zero() / f(t);
    const double rg = g.value_at_zero() / g(t);
    const double tol = 1e-12 * std::max(std::abs(rf), std::abs(rg));
    if (rf < rg - tol) f_below = false;
    if (rg < rf - tol) g_below = false;
  }
  if (f_below && g_below) return TildeOrder::Equal;
  if (f_below) return TildeOrder::FirstBelow;
  if (g_below) return TildeOrder::SecondBelow;
  return TildeOrder::Incomparable;
}

ScalarMeanTable mean_table(const MonotoneFunction& f,
                           std::span<const std::pair<double, double>> points) {
  ScalarMeanTable t{f.name(), {}};
  t.pairs.reserve(points.size());
  for (const auto& [x, y] : points) t.pairs.push_back({x, y, scalar_mean(f, x, y)});
  return t;
}

}  // namespace qfivol
