#include "catbary/report.hpp"

#include "catbary/error.hpp"

#include <cmath>

namespace catbary {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_input:
        return "invalid-input";
    case ErrorCode::numeric_domain:
        return "numeric-domain";
    case ErrorCode::no_unique_geodesic:
        return "no-unique-geodesic";
    case ErrorCode::infeasible_triangle:
        return "infeasible-triangle";
    case ErrorCode::convexity_violation:
        return "convexity-violation";
    case ErrorCode::diameter_bound:
        return "diameter-bound";
    case ErrorCode::non_convergence:
        return "non-convergence";
    case ErrorCode::unsupported:
        return "unsupported";
    case ErrorCode::hypothesis_violation:
        return "hypothesis-violation";
    case ErrorCode::uncovered_point:
        return "uncovered-point";
    case ErrorCode::not_applicable:
        return "not-applicable";
    case ErrorCode::insufficient_cover:
        return "insufficient-cover";
    }
    return "unknown";
}

namespace {

// JSON has no infinities; they are written as strings.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

} // namespace

nlohmann::ordered_json to_json(const CheckRecord& record) {
    nlohmann::ordered_json j;
    j["suite"] = record.suite;
    j["instance"] = record.instance;
    j["bound"] = number(record.bound);
    j["measured"] = number(record.measured);
    j["pass"] = record.pass;
    for (const auto& [key, value] : record.values) j[key] = number(value);
    if (!record.note.empty()) j["note"] = record.note;
    return j;
}

Summary summarize(const std::vector<CheckRecord>& records) {
    Summary s;
    for (const CheckRecord& r : records) {
        ++s.total;
        if (r.pass) ++s.passed;
    }
    return s;
}

} // namespace catbary
