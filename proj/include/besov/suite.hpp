#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "besov/applications.hpp"

namespace besov {

// One manifest line, "id: key=v1,v2; key2=w", expanded into its grid.
struct ManifestEntry {
    std::string id;
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    int line = 0;

    // Cartesian product, last key varying fastest
    std::vector<std::map<std::string, std::string>> expand() const;
};

std::vector<ManifestEntry> parse_manifest(const std::string& text);
std::vector<ManifestEntry> load_manifest(const std::string& path_or_name);  // "all" is built in
const std::string& default_manifest();
std::vector<std::string> validator_ids();

// split at top-level separators, ignoring those inside (), []
std::vector<std::string> split_top(const std::string& s, char sep);

struct SuiteResult {
    std::vector<EstimateReport> reports;  // sorted by estimate_id, stable
    std::vector<Curve> curves;
    std::uint64_t seed = 42;

    bool all_pass() const;
    int failed() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

SuiteResult run_suite(const std::vector<ManifestEntry>& manifest, const QuadratureConfig& cfg = {},
                      std::uint64_t seed = 42);

}  // namespace besov
