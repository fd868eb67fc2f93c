#pragma once

#include "plugflow/follow_leaf.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace plugflow {

enum class PlugChoice : std::uint8_t { w3, wn, pl_wilson, v9, v9_double };

PlugChoice plug_choice_from_string(const std::string& s);
const char* plug_choice_name(PlugChoice p);

/// Flat key=value run configuration. Every key can be overridden by a
/// command-line flag of the same name; the seed is recorded in every
/// output header.
struct RunConfig {
    PlugChoice plug = PlugChoice::w3;
    bool insertion = true;
    int grid_n = 50;
    int n_dim = 4;  // torus dimension for the wn family
    double step = 1e-3;
    double match_tol = 1e-6;
    double recurrence_eps = 1e-4;
    double stackbound_eps = 0.1;
    int growth_threshold = 3;
    int k_max = 2;
    int n_max = 6;
    long seed = 20260810;
    double sample_dt = 0.1;
    Budgets budgets;  // max_transitions, max_depth, time_budget, crossing_budget
    std::string out;

    std::map<std::string, std::string> as_map() const;
    void set(const std::string& key, const std::string& value);  // throws on unknown key
    std::string canonical_text() const;
    std::uint64_t config_hash() const;
};

RunConfig load_config_file(const std::string& path);

/// FNV-1a, stable across platforms and runs.
std::uint64_t fnv1a(const std::string& s);

extern const char* kToolVersion;

}  // namespace plugflow
