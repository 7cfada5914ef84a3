#pragma once

#include "contgrow/geometry.hpp"
#include "contgrow/process.hpp"
#include "contgrow/radius.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contgrow {

/// Validated experiment description parsed from a flat key = value config.
/// `entries` holds the canonicalized raw pairs (including defaults the user
/// set explicitly; untouched defaults are not materialized).
struct ExperimentSpec {
    std::string kind;
    std::map<std::string, std::string> entries;

    // typed, validated view
    std::size_t d = 2;
    GrowthMode mode = GrowthMode::two_type;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    std::optional<RadiusDistribution> radius;  // always set after validation
    bool allow_inadmissible = false;
    double horizon = 10.0;
    long max_events = 1000000;
    std::uint64_t seed = 1;
    long replicas = 200;
    StripeConstraint stripe;
    double covering_resolution = 0.0;
    double cell_side = 0.0;
    std::vector<Ball> initial1, initial2;
    std::vector<double> mu_distances = {10.0, 20.0, 30.0};
    double shape_t = 40.0;
    long shape_directions = 32;
    double shape_max_deviation = 0.15;
    long shape_replicas = 20;
    double coexist_window = 8.0;
    std::string couple_kind = "all";
    double couple_lambda = 0.5;
    std::vector<double> couple_lambdas = {0.25, 0.5, 0.75, 1.0};
    long audit_points = 1000;
    long population_cap = 1000000;
    bool iid_ancestor = false;
    double region_radius = 1.0;

    /// Process config for the growth-engine kinds.
    ProcessConfig process_config() const;

    bool operator==(const ExperimentSpec& other) const {
        return kind == other.kind && entries == other.entries;
    }
};

struct ParseOutcome {
    std::optional<ExperimentSpec> spec;
    std::vector<std::string> errors;  // every problem found, not just the first
};

/// Parse a flat `key = value` document ('#' starts a comment). All
/// validation errors are collected.
ParseOutcome parse_spec(const std::string& text);

/// Sorted `key = value` lines; parsing this text reproduces an equal spec.
std::string canonical_spec(const ExperimentSpec& spec);

/// FNV-1a over the canonical form, as a 16-digit hex string.
std::string config_hash(const ExperimentSpec& spec);

/// Manifest body: hash and wall time as comments, then the canonical echo.
std::string manifest_text(const ExperimentSpec& spec, double wall_time_s);

extern const std::vector<std::string> kExperimentKinds;

}  // namespace contgrow
