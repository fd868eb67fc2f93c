#include "plugflow/insertion.hpp"

#include "plugflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace plugflow {

const char* transition_kind_name(TransitionKind k) {
    switch (k) {
        case TransitionKind::external_entry: return "external_entry";
        case TransitionKind::internal_entry: return "internal_entry";
        case TransitionKind::internal_exit: return "internal_exit";
        case TransitionKind::external_exit: return "external_exit";
    }
    return "unknown";
}

namespace {

constexpr double kSlack = 1e-9;

double wrap10(double theta) {
    double m = std::fmod(theta, kThetaPeriod);
    if (m < 0) m += kThetaPeriod;
    return m;
}

double circ_dist10(double a, double b) {
    double d = std::abs(wrap10(a) - wrap10(b));
    return std::min(d, kThetaPeriod - d);
}

double sigma_center(SigmaComponent c) { return c == SigmaComponent::D_s ? 2.0 : 8.0; }

}  // namespace

CylPoint sigma_w3(double r, double theta, SigmaComponent c) {
    double cth = sigma_center(c);
    double d = theta - cth;
    double r_img = r - 0.25 * r * r - 2.0 * d * d;
    double z_img = c == SigmaComponent::D_s ? 2.0 - theta : theta - 8.0;
    if (std::abs(r) > 1 + kSlack || r_img < -1 - kSlack || std::abs(z_img) > 1 + kSlack)
        throw std::domain_error("sigma_w3: point outside insertion domain");
    CylPoint p;
    p.r = r_img;
    p.theta = c == SigmaComponent::D_s ? 6.0 : 4.0;
    p.z = z_img;
    p.half = c == SigmaComponent::D_s ? Half::lower : Half::upper;
    return p;
}

double radius_defect_w3(double r, double theta, SigmaComponent c) {
    double d = theta - sigma_center(c);
    return 0.25 * r * r + 2.0 * d * d;
}

std::vector<double> sigma_wn(double r, const std::vector<double>& thetas, SigmaComponent c,
                             int n) {
    if (n < 4) throw std::domain_error("sigma_wn: n must be at least 4");
    if (static_cast<int>(thetas.size()) != n - 2)
        throw std::domain_error("sigma_wn: expected n-2 torus coordinates");
    double cth = sigma_center(c);
    double defect = radius_defect_wn(r, thetas, c);
    double r_img = r - defect;
    double z_img;
    if (c == SigmaComponent::D_s) {
        z_img = 2.0 - thetas[0];
        for (size_t i = 1; i < thetas.size(); ++i) z_img += thetas[i] - 2.0;
    } else {
        z_img = 0.0;
        for (double th : thetas) z_img += th - 8.0;
    }
    if (std::abs(r) > 1 + kSlack || r_img < -1 - kSlack || std::abs(z_img) > 1 + kSlack)
        throw std::domain_error("sigma_wn: point outside insertion domain");
    std::vector<double> out;
    out.push_back(r_img);
    for (int i = 0; i < n - 2; ++i) out.push_back(c == SigmaComponent::D_s ? 6.0 : 4.0);
    out.push_back(z_img);
    (void)cth;
    return out;
}

double radius_defect_wn(double r, const std::vector<double>& thetas, SigmaComponent c) {
    double cth = sigma_center(c);
    double s = 0.25 * r * r;
    for (double th : thetas) s += 2.0 * (th - cth) * (th - cth);
    return s;
}

std::optional<BasePointD> sigma_w3_pullback(double rho, double zeta, SigmaComponent c) {
    if (std::abs(zeta) > 1.0) return std::nullopt;
    double w = rho + 2.0 * zeta * zeta;
    if (w > 0.75 || w < -1.25) return std::nullopt;
    double r = 2.0 - 2.0 * std::sqrt(1.0 - w);
    double theta = c == SigmaComponent::D_s ? 2.0 - zeta : 8.0 + zeta;
    return BasePointD{r, theta};
}

namespace {

// Engine adapter for the analytic plug. The flow is integrated one section
// leg at a time: theta is linear in time, so only z needs the RK4 stepper.
struct WilsonDyn {
    using Scalar = double;
    struct State {
        Half half = Half::lower;
        double r = 0;
        double theta = 0;
        double z = 0;
    };
    struct Step {
        StepWhat what = StepWhat::budget;
        int component = -1;
        BasePointT<double> base{};
        State resume{};
        double cost = 0;
        double leaf_radius = 0;
    };

    const WilsonPlugConfig& cfg;
    std::vector<SectionCrossing>* crossings = nullptr;
    std::optional<CandidateCircle> candidate;

    // recurrence bookkeeping (only populated when cfg.detect_recurrence)
    std::vector<BasePointD> cur_stack;
    struct LoggedCrossing {
        SectionCrossing c;
        std::vector<BasePointD> stack;
    };
    std::vector<LoggedCrossing> log;

    explicit WilsonDyn(const WilsonPlugConfig& c) : cfg(c) {}

    State enter(const BasePointT<double>& q) { return {Half::lower, q.r, wrap10(q.theta), -1.0}; }
    void note_push(const BasePointT<double>& q) { cur_stack.push_back(q); }
    void note_pop() { cur_stack.pop_back(); }

    bool stacks_close(const std::vector<BasePointD>& a, const std::vector<BasePointD>& b,
                      double eps) const {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i].r - b[i].r) > eps || circ_dist10(a[i].theta, b[i].theta) > eps)
                return false;
        return true;
    }

    // Returns true when the crossing recurs near an earlier one with the
    // same stack; fills `candidate`.
    bool check_recurrence(const SectionCrossing& now) {
        for (const auto& prev : log) {
            if (prev.c.half != now.half || prev.c.depth != now.depth) continue;
            if (std::abs(prev.c.r - now.r) > cfg.recurrence_eps ||
                std::abs(prev.c.z - now.z) > cfg.recurrence_eps)
                continue;
            if (!stacks_close(prev.stack, cur_stack, cfg.recurrence_eps)) continue;
            candidate = CandidateCircle{now, prev.c};
            return true;
        }
        log.push_back({now, cur_stack});
        return false;
    }

    Step advance(State& s, const Budgets& budgets, double t_now) {
        Step step;
        double cost = 0;
        while (true) {
            double remaining = budgets.time_budget - (t_now + cost);
            if (remaining <= 0) return {StepWhat::budget, -1, {}, s, cost, 0};

            bool lower = s.half == Half::lower;
            double section = lower ? 6.0 : 4.0;
            double target;
            {
                double k = std::floor((s.theta - section) / kThetaPeriod);
                if (lower) {
                    target = section + k * kThetaPeriod;
                    while (target <= s.theta) target += kThetaPeriod;
                } else {
                    target = section + (k + 1) * kThetaPeriod;
                    while (target >= s.theta) target -= kThetaPeriod;
                }
            }
            double dt_theta = std::abs(target - s.theta);
            double leg = std::min(dt_theta, remaining);
            ZAdvanceResult adv = advance_z(s.r, s.z, leg, 1.0, cfg.step);
            cost += adv.elapsed;
            s.theta += (lower ? 1.0 : -1.0) * adv.elapsed;
            s.z = adv.z;

            if (adv.hit_stop) {
                if (lower) {  // glued to the bottom of the mirror half
                    s.half = Half::upper;
                    s.z = -1.0;
                    continue;
                }
                return {StepWhat::exit, -1, {s.r, wrap10(s.theta)}, s, cost, 0};
            }
            if (leg < dt_theta) return {StepWhat::budget, -1, {}, s, cost, 0};

            s.theta = target;  // exact: theta is linear in time
            if (crossings != nullptr)
                crossings->push_back({s.half, s.r, s.theta, s.z, t_now + cost,
                                      static_cast<int>(cur_stack.size())});
            if (cfg.detect_recurrence) {
                SectionCrossing now{s.half, s.r, s.theta, s.z, t_now + cost,
                                    static_cast<int>(cur_stack.size())};
                if (check_recurrence(now)) return {StepWhat::abort_recurrence, -1, {}, s, cost, 0};
            }
            if (cfg.inserted) {
                SigmaComponent comp = lower ? SigmaComponent::D_s : SigmaComponent::D_bar_s;
                auto q = sigma_w3_pullback(s.r, s.z, comp);
                if (q) {
                    // state already sits past the crossing: the next section
                    // target is strictly ahead, so resuming cannot re-fire
                    return {StepWhat::surface, static_cast<int>(comp), *q, s, cost, s.r};
                }
            }
        }
    }
};

}  // namespace

TransitionHistoryD follow_leaf(const WilsonPlugConfig& plug, BasePointD start,
                               const Budgets& budgets,
                               std::optional<CandidateCircle>* candidate,
                               std::vector<SectionCrossing>* crossings) {
    if (std::abs(start.r) > 1 + kSlack)
        throw std::domain_error("follow_leaf: start outside base");
    if (budgets.max_transitions <= 0 || budgets.max_depth <= 0 || budgets.time_budget <= 0)
        throw std::domain_error("follow_leaf: budgets must be positive");
    WilsonDyn dyn(plug);
    dyn.crossings = crossings;
    auto h = follow_leaf_engine(dyn, start, budgets);
    if (candidate != nullptr) *candidate = dyn.candidate;
    return h;
}

std::vector<BasePointD> base_grid(int n) {
    std::vector<BasePointD> g;
    g.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.push_back({-1.0 + 2.0 * i / n, kThetaPeriod * j / n});
    return g;
}

SuiteReport verify_matching_lemma(const TransitionHistoryD& h, double tol,
                                  const std::string& plug_name) {
    SuiteReport rep;
    rep.suite = "matching";
    rep.plug = plug_name;

    rep.add("non_crossing", matching_is_noncrossing(h));

    int bad_pairs = 0, pairs = 0;
    double worst = 0;
    for (size_t i = 0; i < h.events.size(); ++i) {
        const auto& e = h.events[i];
        if (e.kind != TransitionKind::internal_exit || h.matching[i] < 0) continue;
        ++pairs;
        double dr = std::abs(e.base_point.r - e.expected.r);
        double dth = circ_dist10(e.base_point.theta, e.expected.theta);
        worst = std::max({worst, dr, dth});
        if (dr > tol || dth > tol) ++bad_pairs;
    }
    {
        std::ostringstream os;
        os << pairs << " pairs, worst gap " << worst;
        rep.add("interrupted_leaf_law", bad_pairs == 0, os.str());
    }

    if (h.classification == HistoryClass::finite) {
        bool endpoint_ok = !h.events.empty() &&
                           h.events.front().kind == TransitionKind::external_entry &&
                           h.events.back().kind == TransitionKind::external_exit &&
                           h.matching.front() == static_cast<int>(h.events.size()) - 1;
        rep.add("endpoints_pair_first_to_last", endpoint_ok);
        bool all_matched = true;
        for (int m : h.matching) all_matched = all_matched && m >= 0;
        rep.add("finite_history_fully_matched", all_matched);
    }
    return rep;
}

SuiteReport verify_aperiodicity(const WilsonPlugConfig& plug, int grid_n, const Budgets& budgets) {
    SuiteReport rep;
    rep.suite = "aperiodic";
    rep.plug = plug.inserted ? "w3" : "w3-uninserted";

    auto grid = base_grid(grid_n);
    struct Row {
        bool candidate = false;
        SectionCrossing where{};
        int strict_violations = 0;
        double start_r = 0;
    };
    std::vector<Row> rows(grid.size());

    WilsonPlugConfig cfg = plug;
    cfg.detect_recurrence = true;

    parallel_for(grid.size(), [&](size_t i) {
        std::optional<CandidateCircle> cand;
        auto h = follow_leaf(cfg, grid[i], budgets, &cand);
        Row& row = rows[i];
        row.start_r = grid[i].r;
        if (cand) {
            row.candidate = true;
            row.where = cand->now;
        }
        for (const auto& e : h.events)
            if (e.kind == TransitionKind::internal_entry && !(e.base_point.r > e.leaf_radius))
                ++row.strict_violations;
    });

    int candidates = 0, violations = 0;
    std::ostringstream where;
    for (const auto& row : rows) {
        if (row.candidate) {
            if (candidates == 0)
                where << "first candidate at r=" << row.where.r << " z=" << row.where.z
                      << " depth=" << row.where.depth;
            ++candidates;
        }
        violations += row.strict_violations;
    }

    rep.add("stack_radii_strictly_decreasing", violations == 0,
            std::to_string(violations) + " violations");
    {
        std::ostringstream os;
        os << candidates << " candidates";
        if (candidates > 0) os << "; " << where.str();
        rep.add("no_recurrence_candidates", candidates == 0, os.str());
    }
    return rep;
}

std::vector<StackBoundResult> stack_height_bounds(const std::vector<double>& eps_list,
                                                  int grid_n, const Budgets& budgets) {
    double min_eps = std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        if (eps <= 0) throw std::domain_error("stack_height_bound: eps must be positive");
        min_eps = std::min(min_eps, eps);
    }

    // one trace pass over the grid away from the narrowest band
    auto grid = base_grid(grid_n);
    struct Row {
        double min_radius = -1;  // -1: not traced
        int max_depth = 0;
    };
    std::vector<Row> rows(grid.size());
    WilsonPlugConfig cfg;
    parallel_for(grid.size(), [&](size_t i) {
        if (std::abs(grid[i].r) < min_eps) return;
        auto h = follow_leaf(cfg, grid[i], budgets);
        double min_radius = std::abs(grid[i].r);
        for (const auto& e : h.events)
            if (e.kind == TransitionKind::internal_entry)
                min_radius = std::min(min_radius, std::abs(e.base_point.r));
        rows[i] = {min_radius, h.max_depth};
    });

    std::vector<StackBoundResult> out;
    for (double eps : eps_list) {
        StackBoundResult res;
        res.report.suite = "stackbound";
        res.report.plug = "w3";

        // minimum defect over both sigma domains away from the critical points
        double C = std::numeric_limits<double>::infinity();
        const int m = 600;
        for (SigmaComponent comp : {SigmaComponent::D_s, SigmaComponent::D_bar_s}) {
            double cth = sigma_center(comp);
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= m; ++j) {
                    double r = -1.0 + 2.0 * i / m;
                    double th = cth - 1.0 + 2.0 * j / m;
                    double d = th - cth;
                    if (r - 0.25 * r * r - 2.0 * d * d < -1.0) continue;  // outside the domain
                    if (r * r + d * d < eps * eps) continue;
                    C = std::min(C, radius_defect_w3(r, th, comp));
                }
        }
        res.C = C;
        res.bound = std::ceil(2.0 / C);

        int observed = 0, eligible = 0;
        for (const auto& row : rows)
            if (row.min_radius >= eps) {
                ++eligible;
                observed = std::max(observed, row.max_depth);
            }
        res.observed_max = observed;

        std::ostringstream os;
        os << "eps=" << eps << " C=" << res.C << " bound=" << res.bound
           << " observed=" << observed << " over " << eligible << " traces";
        res.report.add("observed_height_within_bound", observed <= res.bound, os.str());
        out.push_back(std::move(res));
    }
    return out;
}

StackBoundResult stack_height_bound(double eps, int grid_n, const Budgets& budgets) {
    return stack_height_bounds({eps}, grid_n, budgets).front();
}

SuiteReport verify_content_stopping(const std::vector<double>& radii, int n_theta,
                                    const Budgets& budgets, int growth_threshold) {
    SuiteReport rep;
    rep.suite = "content";
    rep.plug = "w3";

    for (double r : radii)
        if (!(r > -0.05 && r < 0.0))
            throw std::domain_error("verify_content_stopping: radii must lie in (-1/20, 0)");

    std::vector<BasePointD> grid;
    for (double r : radii)
        for (int j = 0; j < n_theta; ++j) grid.push_back({r, kThetaPeriod * j / n_theta});

    struct Row {
        bool exhausted_transitions = false;
        int final_depth = 0;
        int max_depth = 0;
    };
    std::vector<Row> rows(grid.size());
    WilsonPlugConfig cfg;
    parallel_for(grid.size(), [&](size_t i) {
        auto h = follow_leaf(cfg, grid[i], budgets);
        rows[i] = {h.classification == HistoryClass::budget_exhausted &&
                       h.budget_cause == BudgetCause::transitions,
                   h.final_depth, h.max_depth};
    });

    int not_exhausted = 0, shallow = 0, min_final = std::numeric_limits<int>::max();
    for (const auto& row : rows) {
        if (!row.exhausted_transitions) ++not_exhausted;
        if (row.final_depth < growth_threshold) ++shallow;
        min_final = std::min(min_final, row.final_depth);
    }
    {
        std::ostringstream os;
        os << grid.size() << " traces, " << not_exhausted << " not transition-bounded";
        rep.add("all_exhaust_transition_budget", not_exhausted == 0, os.str());
    }
    {
        std::ostringstream os;
        os << "min final depth " << min_final << ", threshold " << growth_threshold;
        rep.add("stack_growth", shallow == 0, os.str());
    }

    // slope bound on the region r <= -2 z^2
    int slope_bad = 0;
    double sqrt2 = std::sqrt(2.0);
    for (double r : radii) {
        double zmax = std::sqrt(-r / 2.0);
        for (int j = 0; j <= 100; ++j) {
            double z = -zmax + 2.0 * zmax * j / 100;
            double z3 = z * z * z;
            if (!(r * r + z3 * z3 <= sqrt2 * r * r + 1e-15)) ++slope_bad;
        }
    }
    rep.add("slope_bound", slope_bad == 0,
            slope_bad == 0 ? "r^2+z^6 <= sqrt(2) r^2 on sampled region" : "violations found");
    return rep;
}

}  // namespace plugflow
