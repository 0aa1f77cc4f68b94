#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace catbary {

/// One verification outcome: a measured quantity against its bound.
struct CheckRecord {
    std::string suite;
    std::string instance;
    double bound = 0.0;
    double measured = 0.0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> values;
    std::string note;

    CheckRecord& with(std::string key, double value) {
        values.emplace_back(std::move(key), value);
        return *this;
    }
};

nlohmann::ordered_json to_json(const CheckRecord& record);

/// Aggregate pass/fail over a batch of records.
struct Summary {
    std::size_t total = 0;
    std::size_t passed = 0;
    bool all_pass() const noexcept { return total == passed; }
};

Summary summarize(const std::vector<CheckRecord>& records);

} // namespace catbary
