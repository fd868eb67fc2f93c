#include "plugflow/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> sets;  // key=value overrides, applied in order
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
    cmd->add_option("--config", opts->config_file, "flat key = value configuration file");
    cmd->add_option("--set", opts->sets, "override a configuration key (key=value)")
        ->take_all();
    // every configuration key is also a flag of the same name
    for (const auto& key :
         {"plug", "insertion", "grid_n", "n_dim", "step", "match_tol", "recurrence_eps",
          "stackbound_eps", "growth_threshold", "k_max", "n_max", "seed", "sample_dt",
          "max_transitions", "max_depth", "time_budget", "crossing_budget", "out"}) {
        std::string name = std::string("--") + key;
        cmd->add_option_function<std::string>(
            name,
            [opts, key = std::string(key)](const std::string& v) {
                opts->sets.push_back(key + "=" + v);
            },
            "set " + std::string(key));
    }
}

plugflow::RunConfig build_config(const CommonOpts& opts) {
    plugflow::RunConfig cfg;
    if (!opts.config_file.empty()) cfg = plugflow::load_config_file(opts.config_file);
    for (const auto& kv : opts.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must be key=value: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int with_output(const plugflow::RunConfig& cfg, const std::function<int(std::ostream&)>& fn) {
    if (cfg.out.empty()) return fn(std::cout);
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file: " << cfg.out << "\n";
        return 2;
    }
    return fn(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification toolkit for aperiodic plug constructions"};
    app.require_subcommand(1);

    CommonOpts trace_opts, verify_opts, symbolic_opts, asym_opts;
    std::string start_text, suite;
    int count = 24, n_rows = 100;

    CLI::App* trace = app.add_subcommand("trace", "trace a leaf and export CSV");
    add_common(trace, &trace_opts);
    trace->add_option("--start", start_text, "start point: 'r,theta' or 'r,theta,z[,upper]'")
        ->required();

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite, export JSON");
    add_common(verify, &verify_opts);
    verify
        ->add_option("--suite", suite,
                     "radius|matching|aperiodic|stackbound|content|annulus|hierarchy|matched_ends")
        ->required();

    CLI::App* symbolic = app.add_subcommand("symbolic", "emit the disk-following sequence");
    add_common(symbolic, &symbolic_opts);
    symbolic->add_option("--count", count, "number of pairs to emit");

    CLI::App* asym = app.add_subcommand("asymptotics", "export the minimal-set crossing table");
    add_common(asym, &asym_opts);
    asym->add_option("--n-max", n_rows, "last row index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (trace->parsed()) {
            auto cfg = build_config(trace_opts);
            return with_output(cfg, [&](std::ostream& out) {
                return plugflow::cmd_trace(cfg, start_text, out, std::cerr);
            });
        }
        if (verify->parsed()) {
            auto cfg = build_config(verify_opts);
            return with_output(cfg, [&](std::ostream& out) {
                return plugflow::cmd_verify(cfg, suite, out, std::cerr);
            });
        }
        if (symbolic->parsed()) {
            auto cfg = build_config(symbolic_opts);
            return with_output(cfg, [&](std::ostream& out) {
                return plugflow::cmd_symbolic(cfg, count, out, std::cerr);
            });
        }
        if (asym->parsed()) {
            auto cfg = build_config(asym_opts);
            return with_output(cfg, [&](std::ostream& out) {
                return plugflow::cmd_asymptotics(cfg, n_rows, out, std::cerr);
            });
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
