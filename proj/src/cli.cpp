#include "plugflow/cli.hpp"

#include "plugflow/disks.hpp"
#include "plugflow/parallel.hpp"
#include "plugflow/plplug.hpp"
#include "plugflow/plug.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace plugflow {

namespace {

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

WilsonPlugConfig wilson_config(const RunConfig& cfg) {
    WilsonPlugConfig w;
    w.inserted = cfg.insertion;
    w.step = cfg.step;
    w.recurrence_eps = cfg.recurrence_eps;
    return w;
}

}  // namespace

std::string provenance_comment(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# plugflow " << kToolVersion << " config_hash=" << hash_hex(cfg.config_hash())
       << " seed=" << cfg.seed << "\n";
    return os.str();
}

double sup_gap_mod10(std::vector<double> values) {
    if (values.empty()) return 10.0;
    for (auto& v : values) {
        v = std::fmod(v, 10.0);
        if (v < 0) v += 10.0;
    }
    std::sort(values.begin(), values.end());
    double gap = values.front() + 10.0 - values.back();
    for (size_t i = 1; i < values.size(); ++i) gap = std::max(gap, values[i] - values[i - 1]);
    return gap;
}

namespace {

// ---- radius suites -------------------------------------------------------

SuiteReport radius_suite_w3(const RunConfig&) {
    SuiteReport rep;
    rep.suite = "radius";
    rep.plug = "w3";
    const int n = 200;
    for (SigmaComponent comp : {SigmaComponent::D_s, SigmaComponent::D_bar_s}) {
        double cth = comp == SigmaComponent::D_s ? 2.0 : 8.0;
        int zero_count = 0, neg_count = 0, samples = 0;
        bool zero_at_critical_only = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double r = -1.0 + 2.0 * i / n;
                double th = cth - 1.0 + 2.0 * j / n;
                if (r - 0.25 * r * r - 2.0 * (th - cth) * (th - cth) < -1.0) continue;
                ++samples;
                double d = radius_defect_w3(r, th, comp);
                if (d < 0) ++neg_count;
                if (std::abs(d) <= 1e-12) {
                    ++zero_count;
                    if (!(r == 0.0 && th == cth)) zero_at_critical_only = false;
                }
            }
        std::string tag = comp == SigmaComponent::D_s ? "D_s" : "D_bar_s";
        rep.add("defect_nonnegative_" + tag, neg_count == 0,
                std::to_string(samples) + " samples");
        rep.add("defect_zero_only_at_critical_" + tag,
                zero_count == 1 && zero_at_critical_only,
                "zeros found: " + std::to_string(zero_count));
    }
    return rep;
}

SuiteReport radius_suite_wn(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "radius";
    rep.plug = "wn";
    const int n_dim = cfg.n_dim;
    const int m = 20;
    for (SigmaComponent comp : {SigmaComponent::D_s, SigmaComponent::D_bar_s}) {
        double cth = comp == SigmaComponent::D_s ? 2.0 : 8.0;
        bool nonneg = true, zero_only_center = true;
        for (int i = 0; i <= m; ++i) {
            double r = -1.0 + 2.0 * i / m;
            for (int a = 0; a <= m; ++a)
                for (int b = 0; b <= m; ++b) {
                    std::vector<double> th(static_cast<size_t>(n_dim) - 2, cth);
                    th[0] = cth - 1.0 + 2.0 * a / m;
                    th[1] = cth - 1.0 + 2.0 * b / m;
                    double d = radius_defect_wn(r, th, comp);
                    if (d < 0) nonneg = false;
                    bool center = r == 0.0 && th[0] == cth && th[1] == cth;
                    if (d == 0 && !center) zero_only_center = false;
                }
        }
        std::string tag = comp == SigmaComponent::D_s ? "D_s" : "D_bar_s";
        rep.add("defect_nonnegative_" + tag, nonneg);
        rep.add("defect_zero_only_at_center_" + tag, zero_only_center);
    }
    return rep;
}

SuiteReport radius_suite_v9(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "radius";
    rep.plug = "v9";
    std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));
    std::uniform_int_distribution<int> num(0, 240);
    bool contraction_ok = true, roundtrip_ok = true, strict_ok = true;
    int samples = 0;
    while (samples < 400) {
        Rat r(num(rng), 96);  // r in [0, 5/2]
        if (r > Rat(5, 2)) continue;
        Rat span = r / 4 - r / 12;
        Rat theta = Rat(1, 3) + r / 12 + span * Rat(num(rng), 240);
        if (!v9_in_B(r, theta)) continue;
        ++samples;
        RPoint img = sigma_v_fiber(r, theta);
        if (img.x > r / 2) contraction_ok = false;
        if (r > 0 && !(img.x < r)) strict_ok = false;
        auto back = v9_pullback(img.x, img.y);
        if (!back || back->r != r || back->theta != theta) roundtrip_ok = false;
    }
    rep.add("image_radius_at_most_half", contraction_ok, std::to_string(samples) + " samples");
    rep.add("strict_decrease_off_zero", strict_ok);
    rep.add("pullback_roundtrip_exact", roundtrip_ok);
    return rep;
}

// ---- matching suite ------------------------------------------------------

SuiteReport matching_suite(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "matching";
    rep.plug = plug_choice_name(cfg.plug);
    std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));

    int finite_needed = 100, found = 0, attempts = 0;
    bool all_ok = true;
    std::string first_fail;

    if (cfg.plug == PlugChoice::w3) {
        WilsonPlugConfig plug = wilson_config(cfg);
        std::uniform_real_distribution<double> ur(-1.0, 1.0), ut(0.0, 10.0);
        while (found < finite_needed && attempts < finite_needed * 40) {
            ++attempts;
            BasePointD q{ur(rng), ut(rng)};
            if (std::abs(q.r) < 0.05) continue;  // keep traces inside the budget
            auto h = follow_leaf(plug, q, cfg.budgets);
            if (h.classification != HistoryClass::finite) continue;
            ++found;
            SuiteReport one = verify_matching_lemma(h, cfg.match_tol, rep.plug);
            if (!one.pass) {
                all_ok = false;
                if (first_fail.empty()) first_fail = "r=" + fmt(q.r) + " theta=" + fmt(q.theta);
            }
        }
    } else if (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double) {
        PLPlug plug = build_v9_plug(cfg.plug == PlugChoice::v9_double, cfg.insertion);
        std::uniform_int_distribution<int> num(-96, 240);
        std::uniform_int_distribution<int> tnum(0, 24 * plug.lower.theta_length - 1);
        while (found < finite_needed && attempts < finite_needed * 40) {
            ++attempts;
            Rat r(num(rng), 96);
            if (r < -1 || r > Rat(5, 2)) continue;
            BasePointR q{r, Rat(tnum(rng), 24)};
            auto h = follow_leaf_pl(plug, q, cfg.budgets);
            if (h.classification != HistoryClass::finite) continue;
            ++found;
            bool ok = matching_is_noncrossing(h);
            // exact interrupted-leaf law and endpoint pairing
            for (size_t i = 0; i < h.events.size(); ++i) {
                const auto& e = h.events[i];
                if (e.kind == TransitionKind::internal_exit && h.matching[i] >= 0)
                    ok = ok && e.base_point.r == e.expected.r &&
                         rat_mod(e.base_point.theta - e.expected.theta,
                                 Rat(plug.lower.theta_length)) == 0;
            }
            ok = ok && h.matching.front() == static_cast<int>(h.events.size()) - 1;
            for (int m : h.matching) ok = ok && m >= 0;
            if (!ok) {
                all_ok = false;
                if (first_fail.empty()) first_fail = "r=" + rat_str(q.r);
            }
        }
    } else {
        throw std::invalid_argument("matching suite: unsupported plug");
    }

    rep.add("finite_histories_found", found == finite_needed,
            std::to_string(found) + " of " + std::to_string(finite_needed) + " (" +
                std::to_string(attempts) + " attempts)");
    rep.add("matching_laws_hold", all_ok, first_fail);
    return rep;
}

// ---- aperiodicity (PL plugs: exact circle hunt) ---------------------------

SuiteReport aperiodic_suite_pl(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "aperiodic";
    rep.plug = std::string(plug_choice_name(cfg.plug)) + (cfg.insertion ? "" : "-uninserted");

    PLPlug plug = cfg.plug == PlugChoice::pl_wilson
                      ? build_pl_wilson_plug(cfg.insertion)
                      : build_v9_plug(cfg.plug == PlugChoice::v9_double, cfg.insertion);
    const Rat z_lo = plug.lower.z_lo, z_hi = plug.lower.z_hi;
    const Rat r_lo = plug.lower.r_lo, r_hi = plug.lower.r_hi;

    int closed_count = 0;
    std::string first;
    const int nr = 12, nz = 12;
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= nz; ++j) {
            Rat r = r_lo + (r_hi - r_lo) * Rat(i, nr);
            Rat z = z_lo + (z_hi - z_lo) * Rat(j, nz);
            Budgets b = cfg.budgets;
            b.crossing_budget = std::min<long>(b.crossing_budget, 2000);
            auto tr = trace_plug_interior(plug, {Half::lower, r, 0, z}, b);
            if (tr.closed) {
                ++closed_count;
                if (first.empty())
                    first = "(r=" + rat_str(r) + ", z=" + rat_str(z) +
                            ") period=" + rat_str(tr.period);
            }
        }
    rep.add("no_closed_leaves", closed_count == 0,
            std::to_string(closed_count) + " closed" + (first.empty() ? "" : "; first " + first));
    return rep;
}

// ---- annulus / circle structure suite (exact) ------------------------------

SuiteReport annulus_suite(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "annulus";
    rep.plug = plug_choice_name(cfg.plug);

    if (cfg.plug == PlugChoice::pl_wilson) {
        SlantedSuspension susp = suspend(build_collar_map(), 1, 20);
        bool all_closed = true, lengths_exact = true;
        for (int k = 0; k <= 10; ++k) {
            PLState start{0, 0, Rat(-k, 10)};
            PLLeafTrace tr = trace_pl_leaf(susp, start, 500);
            if (tr.termination != Termination::closed_up) all_closed = false;
            else if (tr.theta_length != 20) lengths_exact = false;
        }
        rep.add("annulus_circles_close", all_closed, "11 rational z in [-1,0]");
        rep.add("theta_length_exactly_20", lengths_exact);

        bool none_closed = true;
        for (int k = 1; k <= 10; ++k)
            for (int sgn : {-1, 1}) {
                PLState start{Rat(sgn * k, 20), 0, 0};
                PLLeafTrace tr = trace_pl_leaf(susp, start, 200);
                if (tr.termination == Termination::closed_up) none_closed = false;
            }
        rep.add("no_closure_off_core", none_closed, "20 starts with r != 0, 200 crossings");
    } else if (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double) {
        SlantedSuspension susp = suspend(build_symbolic_map(), Rat(3, 2), 1);
        PLLeafTrace tr = trace_pl_leaf(susp, {0, 0, Rat(-3, 2)}, 50);
        rep.add("circle_through_0_1_0_closes",
                tr.termination == Termination::closed_up && tr.theta_length == 1,
                "theta length " + rat_str(tr.theta_length));
        bool none_closed = true;
        for (int k = 1; k <= 10; ++k) {
            PLLeafTrace t2 = trace_pl_leaf(susp, {Rat(k, 8), 0, Rat(-3, 2)}, 200);
            if (t2.termination == Termination::closed_up) none_closed = false;
        }
        rep.add("no_closure_off_core", none_closed);
    } else {
        throw std::invalid_argument("annulus suite: PL plugs only");
    }
    return rep;
}

// ---- hierarchy suite -------------------------------------------------------

SuiteReport hierarchy_suite(const RunConfig& cfg) {
    DiskHierarchy h = build_hierarchy(cfg.k_max, cfg.n_max);
    CantorStats stats = cantor_cross_section_stats(h);
    return stats.report;
}

// ---- matched ends ----------------------------------------------------------

SuiteReport matched_ends_suite(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "matched_ends";
    rep.plug = plug_choice_name(cfg.plug);

    if (cfg.plug == PlugChoice::w3) {
        FlowBordismDescriptor ws = wilson_semi_plug_descriptor();
        FlowBordismDescriptor w = concatenate(ws, mirror_image(ws));
        auto grid = base_grid(cfg.grid_n);
        MatchedEndsReport r = check_matched_ends(w, grid, cfg.budgets.time_budget, cfg.match_tol);
        rep.add("zero_violations", r.violations.empty(),
                std::to_string(r.violations.size()) + " violations, worst gap " +
                    fmt(r.worst_gap));
        rep.add("stopped_set_nonempty", !r.stopped.empty(),
                std::to_string(r.stopped.size()) + " stopped of " + std::to_string(r.checked));
    } else if (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double ||
               cfg.plug == PlugChoice::pl_wilson) {
        PLPlug plug = cfg.plug == PlugChoice::pl_wilson
                          ? build_pl_wilson_plug(cfg.insertion)
                          : build_v9_plug(cfg.plug == PlugChoice::v9_double, cfg.insertion);
        const Rat L(plug.lower.theta_length);
        int violations = 0, stopped = 0, checked = 0;
        for (int i = 0; i <= 16; ++i)
            for (int j = 0; j < 8; ++j) {
                Rat r = plug.lower.r_lo + (plug.lower.r_hi - plug.lower.r_lo) * Rat(i, 16);
                BasePointR q{r, L * Rat(j, 8)};
                Budgets b = cfg.budgets;
                b.crossing_budget = std::min<long>(b.crossing_budget, 5000);
                auto h = follow_leaf_pl(plug, q, b);
                ++checked;
                if (h.classification != HistoryClass::finite) {
                    ++stopped;
                    continue;
                }
                const auto& exit = h.events.back();
                if (!(exit.base_point.r == q.r &&
                      rat_mod(exit.base_point.theta - q.theta, L) == 0))
                    ++violations;
            }
        rep.add("zero_violations", violations == 0,
                std::to_string(violations) + " of " + std::to_string(checked) + " (exact)");
        rep.add("stopped_points_flagged", true, std::to_string(stopped) + " stopped");
    } else {
        throw std::invalid_argument("matched_ends suite: unsupported plug");
    }
    return rep;
}

}  // namespace

SuiteReport run_suite(const RunConfig& cfg, const std::string& suite) {
    if (suite == "radius") {
        switch (cfg.plug) {
            case PlugChoice::w3: return radius_suite_w3(cfg);
            case PlugChoice::wn: return radius_suite_wn(cfg);
            case PlugChoice::v9:
            case PlugChoice::v9_double: return radius_suite_v9(cfg);
            case PlugChoice::pl_wilson: {
                SuiteReport rep = verify_pl_wilson_sigma();
                rep.suite = "radius";
                return rep;
            }
        }
    }
    if (suite == "matching") return matching_suite(cfg);
    if (suite == "aperiodic") {
        if (cfg.plug == PlugChoice::w3) {
            WilsonPlugConfig plug = wilson_config(cfg);
            return verify_aperiodicity(plug, cfg.grid_n, cfg.budgets);
        }
        if (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double ||
            cfg.plug == PlugChoice::pl_wilson)
            return aperiodic_suite_pl(cfg);
    }
    if (suite == "stackbound" && cfg.plug == PlugChoice::w3) {
        StackBoundResult r = stack_height_bound(cfg.stackbound_eps, cfg.grid_n, cfg.budgets);
        return r.report;
    }
    if (suite == "content" && cfg.plug == PlugChoice::w3) {
        Budgets b = cfg.budgets;
        b.max_transitions = std::min(b.max_transitions, 8000);
        b.time_budget = std::max(b.time_budget, 1e6);
        return verify_content_stopping({-1.0 / 80, -1.0 / 40, -3.0 / 80}, 16, b,
                                       cfg.growth_threshold);
    }
    if (suite == "annulus") return annulus_suite(cfg);
    if (suite == "hierarchy" && (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double))
        return hierarchy_suite(cfg);
    if (suite == "matched_ends") return matched_ends_suite(cfg);
    throw std::invalid_argument("suite '" + suite + "' is not applicable to plug '" +
                                plug_choice_name(cfg.plug) + "'");
}

std::string report_json(const RunConfig& cfg, const SuiteReport& rep) {
    nlohmann::ordered_json j;
    j["provenance"] = {{"tool", "plugflow"},
                       {"version", kToolVersion},
                       {"config_hash", hash_hex(cfg.config_hash())},
                       {"seed", cfg.seed}};
    j["suite"] = rep.suite;
    j["plug"] = rep.plug;
    nlohmann::ordered_json params;
    for (const auto& [k, v] : cfg.as_map()) params[k] = v;
    j["parameters"] = params;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    j["pass"] = rep.pass;
    return j.dump(2) + "\n";
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out,
               std::ostream& err) {
    try {
        SuiteReport rep = run_suite(cfg, suite);
        out << report_json(cfg, rep);
        return rep.pass ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_symbolic(const RunConfig& cfg, int count, std::ostream& out, std::ostream& err) {
    if (count < 1) {
        err << "error: count must be >= 1\n";
        return 2;
    }
    out << provenance_comment(cfg);
    for (const auto& p : followdisks(1, std::nullopt, count))
        out << "(" << p.j << "," << p.n << ")\n";
    return 0;
}

int cmd_asymptotics(const RunConfig& cfg, int n_max, std::ostream& out, std::ostream& err) {
    if (n_max < 1) {
        err << "error: n_max must be >= 1\n";
        return 2;
    }
    out << provenance_comment(cfg);
    out << "n,z_n,theta_n,r_n,theta_prime_n,theta_prime_mod10\n";
    std::vector<double> thetas;
    double a_inf = antiderivative_A(std::numeric_limits<double>::infinity());
    std::vector<AsymptoticRecord> recs(static_cast<size_t>(n_max) + 1);
    parallel_for(recs.size(), [&](size_t i) { recs[i] = asymptotic_record(static_cast<int>(i)); });
    for (const auto& rec : recs) {
        double mod10 = std::fmod(rec.theta_prime_n, 10.0);
        out << rec.n << "," << fmt(rec.z_n) << "," << fmt(rec.theta_n) << "," << fmt(rec.r_n)
            << "," << fmt(rec.theta_prime_n) << "," << fmt(mod10) << "\n";
        thetas.push_back(rec.theta_prime_n);
    }
    out << "# supgap," << n_max << "," << fmt(sup_gap_mod10(thetas)) << "\n";
    if (n_max >= 1) {
        const auto& last = recs.back();
        double denom = 2.0 + std::cbrt(2.0) * std::pow(21.0 + 50.0 * n_max, 2.0 / 3.0) * a_inf;
        out << "# ratio_to_published_asymptotic," << n_max << ","
            << fmt(last.theta_prime_n / denom) << "\n";
    }
    return 0;
}

int cmd_trace(const RunConfig& cfg, const std::string& start_text, std::ostream& out,
              std::ostream& err) {
    // parse "r,theta" (base point) or "r,theta,z[,upper]" (interior)
    std::vector<std::string> parts;
    {
        std::stringstream ss(start_text);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
    }
    if (parts.size() < 2 || parts.size() > 4) {
        err << "error: start must be 'r,theta' or 'r,theta,z[,upper]'\n";
        return 2;
    }

    try {
        out << provenance_comment(cfg);
        out << "t,r,theta,z,half,depth\n";

        if (cfg.plug == PlugChoice::w3) {
            if (parts.size() != 2) {
                err << "error: w3 traces start from a base point 'r,theta'\n";
                return 2;
            }
            BasePointD q{std::stod(parts[0]), std::stod(parts[1])};
            WilsonPlugConfig plug = wilson_config(cfg);
            std::vector<SectionCrossing> crossings;
            auto h = follow_leaf(plug, q, cfg.budgets, nullptr, &crossings);
            out << "0," << fmt(q.r) << "," << fmt(q.theta) << ",-1,lower,0\n";
            for (const auto& c : crossings)
                out << fmt(c.time) << "," << fmt(c.r) << "," << fmt(c.theta) << "," << fmt(c.z)
                    << "," << (c.half == Half::lower ? "lower" : "upper") << "," << c.depth
                    << "\n";
            for (size_t i = 0; i < h.events.size(); ++i) {
                const auto& e = h.events[i];
                out << "# event," << transition_kind_name(e.kind) << "," << fmt(e.time) << ","
                    << fmt(e.base_point.r) << "," << fmt(e.base_point.theta) << "\n";
            }
            const char* cls = h.classification == HistoryClass::finite ? "finite"
                              : h.classification == HistoryClass::infinite_suspected
                                  ? "infinite_suspected"
                                  : "budget_exhausted";
            out << "# termination," << cls << "\n";
            return 0;
        }

        if (cfg.plug == PlugChoice::v9 || cfg.plug == PlugChoice::v9_double ||
            cfg.plug == PlugChoice::pl_wilson) {
            if (parts.size() < 3) {
                err << "error: PL traces start from an interior point 'r,theta,z[,upper]'\n";
                return 2;
            }
            PLPlug plug = cfg.plug == PlugChoice::pl_wilson
                              ? build_pl_wilson_plug(cfg.insertion)
                              : build_v9_plug(cfg.plug == PlugChoice::v9_double, cfg.insertion);
            PLPlugState s;
            s.r = rat_parse(parts[0]);
            s.theta = rat_parse(parts[1]);
            s.z = rat_parse(parts[2]);
            s.half = parts.size() == 4 && parts[3] == "upper" ? Half::upper : Half::lower;
            auto tr = trace_plug_interior(plug, s, cfg.budgets);
            for (const auto& [st, t] : tr.samples)
                out << rat_str(t) << "," << rat_str(st.r) << "," << rat_str(st.theta) << ","
                    << rat_str(st.z) << "," << (st.half == Half::lower ? "lower" : "upper")
                    << ",0\n";
            for (const auto& e : tr.history.events)
                out << "# event," << transition_kind_name(e.kind) << "," << rat_str(e.time) << ","
                    << rat_str(e.base_point.r) << "," << rat_str(e.base_point.theta) << "\n";
            if (tr.closed)
                out << "# termination,closed_up,theta_length=" << rat_str(tr.period) << "\n";
            else
                out << "# termination,"
                    << (tr.history.classification == HistoryClass::finite ? "finite"
                                                                          : "budget_exhausted")
                    << "\n";
            return 0;
        }

        err << "error: trace is not implemented for plug '" << plug_choice_name(cfg.plug)
            << "'\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace plugflow
