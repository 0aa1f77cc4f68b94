#pragma once

#include "catbary/solver.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace catbary {

/// A barycenter problem as read from a problem file.
struct Problem {
    WeightedPointSet set;
    double exponent = 1.0;
};

/// Parses a problem document. Syntax and schema errors raise invalid_input
/// with "<source>:<line>: <field>: <message>"; solver hypotheses (such as
/// the k > 0 diameter bound) are checked at load.
Problem parse_problem(std::string_view text, std::string_view source = "<input>");

/// Reads a file, or standard input for "-".
Problem load_problem(const std::string& path);

nlohmann::ordered_json space_to_json(const GeodesicSpace& space);
nlohmann::ordered_json point_to_json(const GeodesicSpace& space, const SpacePoint& x);
SpacePoint point_from_json(const GeodesicSpace& space, const nlohmann::json& value);

nlohmann::ordered_json problem_to_json(const Problem& problem);
nlohmann::ordered_json result_to_json(const Problem& problem, const BarycenterResult& result);

/// max_p u(p) d(x, p)^t for the problem's exponent t.
double problem_objective(const Problem& problem, const SpacePoint& x);

/// |problem_objective(barycenter) - baryradius| for a result record.
double recheck_result(const Problem& problem, const nlohmann::json& result);

} // namespace catbary
