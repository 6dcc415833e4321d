#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfivol {

/// Monotonicity check against one partner function.
struct PartnerRecord {
  std::string function;
  std::string order;  // tilde_order_name
  double v_self = 0.0;
  double v_partner = 0.0;
  std::optional<bool> holds;
};

/// One (sample, function) line of a sweep. Field order on the wire is the
/// declaration order below; doubles are written with 17 significant digits.
struct SampleRecord {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::string ensemble;
  int n = 0;
  long dim = 0;
  std::string function;
  double cov_det = 0.0;
  double qfi_det = 0.0;
  double gap = 0.0;
  double scale = 1.0;
  std::optional<double> robertson;
  std::optional<double> decomposition;
  bool main_holds = true;
  bool dependent = false;
  bool equality_consistent = true;
  bool candidate = false;
  bool proven = false;
  std::vector<PartnerRecord> partners;
};

/// "%.17g", or "null" for non-finite values.
std::string format_double(double v);

std::string to_line(const SampleRecord& r);

/// Parses a line produced by to_line. Throws std::invalid_argument on
/// malformed input or a non-sample line.
SampleRecord parse_record(std::string_view line);

}  // namespace qfivol
