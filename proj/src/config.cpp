#include "plugflow/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plugflow {

const char* kToolVersion = "0.1.0";

PlugChoice plug_choice_from_string(const std::string& s) {
    if (s == "w3") return PlugChoice::w3;
    if (s == "wn") return PlugChoice::wn;
    if (s == "pl_wilson") return PlugChoice::pl_wilson;
    if (s == "v9") return PlugChoice::v9;
    if (s == "v9_double") return PlugChoice::v9_double;
    throw std::invalid_argument("unknown plug: " + s);
}

const char* plug_choice_name(PlugChoice p) {
    switch (p) {
        case PlugChoice::w3: return "w3";
        case PlugChoice::wn: return "wn";
        case PlugChoice::pl_wilson: return "pl_wilson";
        case PlugChoice::v9: return "v9";
        case PlugChoice::v9_double: return "v9_double";
    }
    return "unknown";
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::map<std::string, std::string> RunConfig::as_map() const {
    std::map<std::string, std::string> m;
    m["plug"] = plug_choice_name(plug);
    m["insertion"] = insertion ? "true" : "false";
    m["grid_n"] = std::to_string(grid_n);
    m["n_dim"] = std::to_string(n_dim);
    m["step"] = fmt_double(step);
    m["match_tol"] = fmt_double(match_tol);
    m["recurrence_eps"] = fmt_double(recurrence_eps);
    m["stackbound_eps"] = fmt_double(stackbound_eps);
    m["growth_threshold"] = std::to_string(growth_threshold);
    m["k_max"] = std::to_string(k_max);
    m["n_max"] = std::to_string(n_max);
    m["seed"] = std::to_string(seed);
    m["sample_dt"] = fmt_double(sample_dt);
    m["max_transitions"] = std::to_string(budgets.max_transitions);
    m["max_depth"] = std::to_string(budgets.max_depth);
    m["time_budget"] = fmt_double(budgets.time_budget);
    m["crossing_budget"] = std::to_string(budgets.crossing_budget);
    m["out"] = out;
    return m;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "plug")
            plug = plug_choice_from_string(value);
        else if (key == "insertion")
            insertion = value == "true" || value == "1" || value == "on";
        else if (key == "grid_n")
            grid_n = std::stoi(value);
        else if (key == "n_dim")
            n_dim = std::stoi(value);
        else if (key == "step")
            step = std::stod(value);
        else if (key == "match_tol")
            match_tol = std::stod(value);
        else if (key == "recurrence_eps")
            recurrence_eps = std::stod(value);
        else if (key == "stackbound_eps")
            stackbound_eps = std::stod(value);
        else if (key == "growth_threshold")
            growth_threshold = std::stoi(value);
        else if (key == "k_max")
            k_max = std::stoi(value);
        else if (key == "n_max")
            n_max = std::stoi(value);
        else if (key == "seed")
            seed = std::stol(value);
        else if (key == "sample_dt")
            sample_dt = std::stod(value);
        else if (key == "max_transitions")
            budgets.max_transitions = std::stoi(value);
        else if (key == "max_depth")
            budgets.max_depth = std::stoi(value);
        else if (key == "time_budget")
            budgets.time_budget = std::stod(value);
        else if (key == "crossing_budget")
            budgets.crossing_budget = std::stol(value);
        else if (key == "out")
            out = value;
        else
            throw std::invalid_argument("unknown configuration key: " + key);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for key " + key + ": " + value);
    }
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : as_map()) os << k << " = " << v << "\n";
    return os.str();
}

std::uint64_t RunConfig::config_hash() const { return fnv1a(canonical_text()); }

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.set(key, value);
    }
    return cfg;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace plugflow
