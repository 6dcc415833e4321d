#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qfivol {

class RegistrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonRegularFunction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FunctionId { SLD, WY, RLD, WYD, Custom, Tilde };

/// A normalized symmetric operator monotone function f: (0, inf) -> (0, inf).
///
/// Every instance has passed the registration checks on the 64-point grid
/// (see registration_grid): f(1) = 1, f(x) = x f(1/x), and the
/// harmonic/arithmetic sandwich 2x/(1+x) <= f(x) <= (1+x)/2. These checks are
/// necessary, not sufficient: operator monotonicity of a custom evaluator is
/// taken on trust.
class MonotoneFunction {
 public:
  using Evaluator = std::function<double(double)>;

  /// Registers a user-supplied function. Throws RegistrationError when a grid
  /// check fails.
  static MonotoneFunction custom(std::string name, Evaluator f, double value_at_zero,
                                 std::string formula = "custom");

  /// f(x) for x > 0; f(0) returns value_at_zero().
  double operator()(double x) const;

  double value_at_zero() const { return impl_->value_at_zero; }
  bool regular() const { return impl_->value_at_zero != 0.0; }
  FunctionId id() const { return impl_->id; }
  std::optional<double> beta() const { return impl_->beta; }
  /// Short spec string: "sld", "wy", "rld", "wyd:0.25", "tilde(wy)", or the custom name.
  const std::string& name() const { return impl_->name; }
  const std::string& formula() const { return impl_->formula; }
  /// Closed form of the tilde transform, when one is known.
  const std::optional<std::string>& tilde_formula() const { return impl_->tilde_formula; }
  /// For a tilde function: the regular function it was built from.
  const MonotoneFunction* base() const { return impl_->base.get(); }

 private:
  struct Impl {
    FunctionId id;
    std::optional<double> beta;
    std::string name;
    std::string formula;
    std::optional<std::string> tilde_formula;
    double value_at_zero;
    Evaluator eval;
    std::shared_ptr<const MonotoneFunction> base;
  };

  explicit MonotoneFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static MonotoneFunction registered(Impl impl);

  friend MonotoneFunction builtin(FunctionId, std::optional<double>);
  friend MonotoneFunction tilde(const MonotoneFunction&);

  std::shared_ptr<const Impl> impl_;
};

/// SLD, WY, RLD or WYD(beta) with beta in (0, 1/2).
MonotoneFunction builtin(FunctionId id, std::optional<double> beta = std::nullopt);
inline MonotoneFunction sld() { return builtin(FunctionId::SLD); }
inline MonotoneFunction wy() { return builtin(FunctionId::WY); }
inline MonotoneFunction rld() { return builtin(FunctionId::RLD); }
inline MonotoneFunction wyd(double beta) { return builtin(FunctionId::WYD, beta); }

/// Parses "sld", "wy", "rld", "wyd:<beta>" (case-insensitive).
MonotoneFunction parse_function(std::string_view spec);

/// f~(x) = ((x+1) - (x-1)^2 f(0)/f(x)) / 2 for regular f. Known bases use
/// their closed forms (SLD: 2x/(x+1), WY: sqrt(x), WYD(b): (x^b + x^(1-b))/2).
/// Throws NonRegularFunction when f(0) = 0.
MonotoneFunction tilde(const MonotoneFunction& f);

/// Scalar Kubo-Ando mean m_f(x, y) = max(x,y) f(min/max) on [0, inf)^2, with
/// m_f(x, x) = x, m_f(x, 0) = x f(0) and m_f(0, 0) = 0. Symmetric by construction.
double scalar_mean(const MonotoneFunction& f, double x, double y);

enum class TildeOrder {
  Equal,         // both f~ <= g~ and g~ <= f~ on the grid
  FirstBelow,    // f~ <= g~
  SecondBelow,   // g~ <= f~
  Incomparable,  // strict violations both ways
};

std::string_view tilde_order_name(TildeOrder o);

/// Decides the pointwise order of f~ and g~ from f(0)/f(t) >= g(0)/g(t) on the
/// grid (tolerance 1e-12 relative). Defaults to registration_grid().
TildeOrder tilde_order(const MonotoneFunction& f, const MonotoneFunction& g,
                       std::span<const double> grid = {});

/// 64 log-spaced points on [1e-6, 1e6].
std::span<const double> registration_grid();

/// x-y pairs with their mean, kept for report emission.
struct ScalarMeanTable {
  std::string function;
  struct Entry {
    double x;
    double y;
    double mean;
  };
  std::vector<Entry> pairs;
};

ScalarMeanTable mean_table(const MonotoneFunction& f,
                           std::span<const std::pair<double, double>> points);

}  // namespace qfivol
