#include "metriclab/report.hpp"

#include <cmath>
#include <fstream>

#include "metriclab/errors.hpp"

namespace metriclab {

using nlohmann::json;

json real_to_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

namespace {

json tuple_json(const std::vector<Point>& t) {
  json out = json::array();
  for (const Point& p : t) out.push_back(to_json(p));
  return out;
}

}  // namespace

json to_json(const RunManifest& m) {
  return {{"command", m.command},   {"config_hash", m.config_hash},
          {"seed", m.seed},        {"budget", m.budget},
          {"tool_version", kToolVersion}, {"outcome", m.outcome},
          {"wall_ms", m.wall_ms}};
}

json to_json(const AxiomResult& r) {
  json j = {{"name", axiom_name(r.name)},
            {"status", r.passed ? "pass" : "fail"},
            {"coverage", r.coverage == Coverage::Exhaustive ? "exhaustive" : "statistical"},
            {"checked", r.checked},
            {"worst_ratio", real_to_json(r.worst)}};
  // +inf worst ratios come from zero denominators; keep them distinguishable from null.
  if (std::isinf(r.worst)) j["worst_ratio_unbounded"] = true;
  if (!r.witness.empty()) j["witness"] = tuple_json(r.witness);
  if (r.witness_index) j["witness_index"] = *r.witness_index;
  if (r.name == AxiomName::RelaxedTriangle) {
    json b = json::array();
    for (const auto& t : r.binding) b.push_back(tuple_json(t));
    j["binding"] = std::move(b);
    j["binding_count"] = r.binding_count;
  }
  return j;
}

json to_json(const AxiomReport& r) {
  json axioms = json::array();
  for (const auto& a : r.axioms) axioms.push_back(to_json(a));
  json j = {{"family", family_name(r.family.kind)},
            {"mode", r.mode == Mode::TwoPoint ? "two_point" : "s_mode"},
            {"status", r.passed() ? "pass" : "fail"},
            {"axioms", std::move(axioms)}};
  if (r.family.kind == FamilyKind::BMetric || r.family.kind == FamilyKind::PerturbedB ||
      r.family.kind == FamilyKind::SbMetric) {
    j["s"] = r.family.s;
  }
  return j;
}

json to_json(const CoefficientResult& r) {
  return {{"s_star", real_to_json(r.s_star)},
          {"unbounded", r.unbounded},
          {"witness", tuple_json(r.witness)},
          {"checked", r.checked},
          {"coverage", r.exhaustive ? "exhaustive" : "statistical"},
          {"warnings", r.warnings}};
}

json to_json(const ContinuityResult& r) {
  return {{"limit_along_approach", real_to_json(r.limit_along_approach)},
          {"value_at_target", real_to_json(r.value_at_target)},
          {"discontinuous", r.discontinuous},
          {"richardson", real_to_json(r.richardson)},
          {"tail_spread", real_to_json(r.tail_spread)}};
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot replace '" + path.string() + "'");
  }
}

}  // namespace metriclab
