#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracmix/basis.hpp"
#include "fracmix/solver.hpp"
#include "fracmix/verify.hpp"

namespace fracmix::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    unsolvable = 2,
    bad_config = 3,
    verify_failed = 4,
};

struct GridOptions {
    int nx = 51;
    int nt = 41;
};

struct RunConfig {
    FracProblem problem;
    nlohmann::json doc;
    std::filesystem::path base;  // directory of the config file, for relative sample paths
    GridOptions grid;
    std::filesystem::path out = ".";
    Thresholds thresholds;

    bool has(const std::string& key) const { return doc.contains(key) && !doc[key].is_null(); }
    // Data descriptor under `key`; a missing key is the zero function.
    SpatialFunction data(const std::string& key) const;
};

// Reads and validates a config file. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// Data descriptors:
//   {"atoms": [{"fn": "cos"|"sin", "k": 1, "power": 0, "amp": 1.0}, ...]}
//   {"coefficients": {"c0": .., "c1": [..], "c2": [..]}}
//   {"samples": "file.csv"}  two columns x,value covering [0,1]
//   {"zero": true}
SpatialFunction parse_data(const nlohmann::json& j, const std::filesystem::path& base);

CoefficientSet coefficients_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CoefficientSet& c);
nlohmann::json to_json(const FracProblem& p);
FracProblem problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolutionField& f);
SolutionField field_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const std::vector<RegularityCheck>& checks);

// JSON text with every floating-point number printed to 17 significant digits.
std::string dump(const nlohmann::json& j);

int cmd_inverse(const RunConfig& cfg);
int cmd_forward(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& field_file);
int cmd_specfun_table(const RunConfig& cfg);

// Entry point: parses arguments, runs one subcommand, maps errors to exit codes.
int run(int argc, char** argv);

}  // namespace fracmix::cli
