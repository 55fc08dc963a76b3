#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safeset/io.hpp"
#include "safeset/oss.hpp"
#include "safeset/quantify.hpp"
#include "safeset/scenario.hpp"

namespace safeset {

struct SystemConfig {
    std::string name;
    Json params = Json::object();
};

/// A complete experiment record: the system under test, the OSS, the
/// confidence parameters and the run budgets.
struct CampaignConfig {
    SystemConfig system;
    OssSpec oss;
    double epsilon = 0.05;
    double beta = 0.001;
    std::uint64_t seed = 0;
    std::size_t max_runs = 100'000;
    std::size_t oracle_trials = 200;
    std::string output_dir = "out";
    std::size_t capacity = kDefaultCapacity;

    QuantifyConfig quantify_config() const;

    /// Canonical JSON form; parse_config(to_json()) reproduces this config.
    Json to_json() const;
};

/// Parses and validates a config document. Unknown keys are rejected at every
/// level. Throws ParseError for shape problems, SpecError or DomainError for
/// invalid values, including system parameters that do not fit the OSS.
CampaignConfig parse_config(const Json& doc);

CampaignConfig load_config(const std::string& path);

/// Registered system names.
std::vector<std::string> system_names();

/// Builds the named system. Throws SpecError for an unknown name, invalid
/// parameters or a state layout that does not match spec.
std::unique_ptr<SystemModel> make_system(const SystemConfig& cfg, const OssSpec& spec);

}  // namespace safeset
