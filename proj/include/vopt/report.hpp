#pragma once

// JSON building blocks for the CLI reports plus the canonical problem digest
// and the flattened text rendering. Insertion order is preserved, so two
// identical result structures serialize to identical bytes.

#include <string>

#include "json.hpp"

#include "vopt/certificates.hpp"
#include "vopt/oracle.hpp"
#include "vopt/sufficiency.hpp"

namespace vopt {

using Json = nlohmann::ordered_json;

// Reports must not carry non-finite numbers; inf/nan map to null.
Json json_number(double v);
Json vector_json(const Eigen::VectorXd& v);
Json rays_json(const std::vector<Eigen::VectorXd>& rays);
Json cone_json(const PolyhedralCone& cone);
Json tolerances_json(const Tolerances& tol);
Json multiplier_json(const MultiplierPair& pair);
Json critical_cone_json(const CriticalCone& cone);
Json candidate_check_json(const CandidateCheck& check);
Json witness_json(const ConvexityWitness& witness);
Json sufficiency_json(const SufficiencyVerdict& verdict);
Json isolated_json(const IsolatedVerdict& verdict);
Json oracle_json(const OracleResult& result);

// FNV-1a hash (64-bit, hex) of the canonical problem serialization.
std::string problem_digest(const VectorProblem& problem);

// One "dotted.path = value" line per leaf; scalar arrays stay inline.
std::string render_text(const Json& report);

}  // namespace vopt
