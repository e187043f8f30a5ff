#include "vopt/report.hpp"

#include <cmath>
#include <cstdio>

#include "vopt/parser.hpp"

namespace vopt {

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (v == 0.0) return 0.0;  // drop the sign of negative zero
  return v;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
  return a;
}

Json rays_json(const std::vector<Eigen::VectorXd>& rays) {
  Json a = Json::array();
  for (const auto& r : rays) a.push_back(vector_json(r));
  return a;
}

Json cone_json(const PolyhedralCone& cone) {
  Json j;
  j["dim"] = cone.ambient_dim();
  j["generators"] = rays_json(cone.generators());
  j["halfspace_normals"] = rays_json(cone.halfspace_normals());
  return j;
}

Json tolerances_json(const Tolerances& tol) {
  Json j;
  j["membership"] = tol.membership;
  j["strict"] = tol.strict;
  j["stationarity"] = tol.stationarity;
  j["slackness"] = tol.slackness;
  j["activity"] = tol.activity;
  j["strict_margin"] = tol.strict_margin;
  return j;
}

Json multiplier_json(const MultiplierPair& pair) {
  Json j;
  j["lambda"] = vector_json(pair.lambda);
  j["mu"] = vector_json(pair.mu);
  j["coeff_a"] = vector_json(pair.coeff_a);
  j["coeff_b"] = vector_json(pair.coeff_b);
  j["stationarity_residual"] = json_number(pair.stationarity_residual);
  j["slackness_residual"] = json_number(pair.slackness_residual);
  j["degenerate_stationarity"] = pair.degenerate_stationarity;
  return j;
}

Json critical_cone_json(const CriticalCone& cone) {
  Json j;
  j["dim"] = cone.dim;
  j["rows"] = rays_json(cone.rows);
  j["whole_space"] = cone.whole_space();
  return j;
}

Json candidate_check_json(const CandidateCheck& check) {
  Json j;
  j["point"] = vector_json(check.point);
  switch (check.verdict) {
    case CandidateCheck::Verdict::kConsistent: j["verdict"] = "consistent"; break;
    case CandidateCheck::Verdict::kRefutedFirstOrder: j["verdict"] = "refuted-first-order"; break;
    case CandidateCheck::Verdict::kRefutedSecondOrder:
      j["verdict"] = "refuted-second-order";
      break;
  }
  j["note"] = check.note;
  j["first_order"] = check.first_order ? multiplier_json(*check.first_order) : Json(nullptr);
  j["critical_cone"] = critical_cone_json(check.cone);
  j["directions"] = rays_json(check.directions);
  j["second_order"] = check.second_order ? multiplier_json(*check.second_order) : Json(nullptr);
  return j;
}

Json witness_json(const ConvexityWitness& witness) {
  Json j;
  j["xbar"] = vector_json(witness.xbar);
  j["x"] = vector_json(witness.x);
  j["violated_clause"] = witness.violated_clause;
  Json m;
  for (const auto& [key, value] : witness.measured) m[key] = json_number(value);
  j["measured"] = m;
  return j;
}

Json sufficiency_json(const SufficiencyVerdict& verdict) {
  Json j;
  j["certified"] = verdict.certified;
  j["label"] = verdict.label;
  j["detail"] = verdict.detail;
  j["witness"] = verdict.witness ? witness_json(*verdict.witness) : Json(nullptr);
  j["samples_examined"] = verdict.samples_examined;
  return j;
}

Json isolated_json(const IsolatedVerdict& verdict) {
  Json j;
  j["certified"] = verdict.certified;
  j["label"] = verdict.label;
  j["detail"] = verdict.detail;
  j["direction_minimum"] = json_number(verdict.direction_minimum);
  j["worst_direction"] = vector_json(verdict.worst_direction);
  j["direction_count"] = verdict.direction_count;
  j["epsilon"] = json_number(verdict.epsilon);
  j["neighborhood_samples"] = verdict.neighborhood_samples;
  return j;
}

Json oracle_json(const OracleResult& result) {
  Json j;
  j["weak_local_min"] = result.weak_local_min;
  j["dominator"] = result.dominator ? vector_json(*result.dominator) : Json(nullptr);
  j["points_scanned"] = result.points_scanned;
  j["feasible_count"] = result.feasible_count;
  j["truncated"] = result.truncated;
  return j;
}

std::string problem_digest(const VectorProblem& problem) {
  const std::string text = serialize_problem(problem);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

bool all_scalars(const Json& a) {
  for (const auto& v : a)
    if (v.is_object() || v.is_array()) return false;
  return true;
}

void flatten(const Json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (node.is_array() && !all_scalars(node)) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten(node[i], prefix + "." + std::to_string(i), out);
  } else {
    out += prefix;
    out += " = ";
    out += node.dump();
    out += "\n";
  }
}

}  // namespace

std::string render_text(const Json& report) {
  std::string out;
  flatten(report, "", out);
  return out;
}

}  // namespace vopt
