#include "qfivol/records.hpp"

#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <stdexcept>

#include <json.hpp>

namespace qfivol {

namespace {

std::string opt_double(const std::optional<double>& v) {
  return v ? format_double(*v) : "null";
}

std::string opt_bool(const std::optional<bool>& v) {
  return v ? (*v ? "true" : "false") : "null";
}

const char* boolean(bool b) { return b ? "true" : "false"; }

double get_double(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nan("");
  return v.get<double>();
}

std::optional<double> get_opt_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_line(const SampleRecord& r) {
  std::string out = fmt::format(
      R"({{"kind":"sample","seed":{},"index":{},"ensemble":"{}","n":{},"dim":{},"function":"{}",)"
      R"("covDet":{},"qfiDet":{},"F":{},"scale":{},"robertson":{},"decomposition":{},)"
      R"("mainHolds":{},"dependent":{},"equalityConsistent":{},"candidate":{},"proven":{},"partners":[)",
      r.seed, r.index, r.ensemble, r.n, r.dim, r.function, format_double(r.cov_det),
      format_double(r.qfi_det), format_double(r.gap), format_double(r.scale),
      opt_double(r.robertson), opt_double(r.decomposition), boolean(r.main_holds),
      boolean(r.dependent), boolean(r.equality_consistent), boolean(r.candidate),
      boolean(r.proven));
  for (std::size_t i = 0; i < r.partners.size(); ++i) {
    const PartnerRecord& p = r.partners[i];
    if (i > 0) out += ',';
    out += fmt::format(R"({{"function":"{}","order":"{}","vSelf":{},"vPartner":{},"holds":{}}})",
                       p.function, p.order, format_double(p.v_self), format_double(p.v_partner),
                       opt_bool(p.holds));
  }
  out += "]}";
  return out;
}

SampleRecord parse_record(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("record is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("kind", "") != "sample") {
      throw std::invalid_argument("record is not a sample line");
    }
    SampleRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.index = j.at("index").get<std::uint64_t>();
    r.ensemble = j.at("ensemble").get<std::string>();
    r.n = j.at("n").get<int>();
    r.dim = j.at("dim").get<long>();
    r.function = j.at("function").get<std::string>();
    r.cov_det = get_double(j, "covDet");
    r.qfi_det = get_double(j, "qfiDet");
    r.gap = get_double(j, "F");
    r.scale = get_double(j, "scale");
    r.robertson = get_opt_double(j, "robertson");
    r.decomposition = get_opt_double(j, "decomposition");
    r.main_holds = j.at("mainHolds").get<bool>();
    r.dependent = j.at("dependent").get<bool>();
    r.equality_consistent = j.at("equalityConsistent").get<bool>();
    r.candidate = j.at("candidate").get<bool>();
    r.proven = j.at("proven").get<bool>();
    for (const auto& p : j.at("partners")) {
      PartnerRecord pr;
      pr.function = p.at("function").get<std::string>();
      pr.order = p.at("order").get<std::string>();
      pr.v_self = get_double(p, "vSelf");
      pr.v_partner = get_double(p, "vPartner");
      if (!p.at("holds").is_null()) pr.holds = p.at("holds").get<bool>();
      r.partners.push_back(std::move(pr));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  }
}

}  // namespace qfivol
