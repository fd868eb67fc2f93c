#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace plugflow {

enum class TransitionKind : std::uint8_t {
    external_entry,
    internal_entry,
    internal_exit,
    external_exit
};

const char* transition_kind_name(TransitionKind k);

enum class HistoryClass : std::uint8_t { finite, infinite_suspected, budget_exhausted };

enum class BudgetCause : std::uint8_t { none, transitions, depth, cost };

template <typename Scalar>
struct BasePointT {
    Scalar r{};
    Scalar theta{};
};

template <typename Scalar>
struct TransitionEventT {
    TransitionKind kind = TransitionKind::external_entry;
    BasePointT<Scalar> base_point{};  // entries: pushed point; exits: observed exit point
    Scalar time{};
    int stack_depth_after = 0;
    int component = -1;               // insertion component index (entries)
    BasePointT<Scalar> expected{};    // internal_exit: base point pushed at the matching entry
    Scalar leaf_radius{};             // internal_entry: radius of the interrupted leaf
};

template <typename Scalar>
struct TransitionHistoryT {
    std::vector<TransitionEventT<Scalar>> events;
    std::vector<int> matching;  // partner event index, -1 when unmatched
    HistoryClass classification = HistoryClass::budget_exhausted;
    BudgetCause budget_cause = BudgetCause::none;
    int max_depth = 0;
    int final_depth = 0;
    Scalar total_cost{};

    /// Stack of the last traced point, innermost leaf first (the order in
    /// which frame radii strictly decrease for radius-inequality insertions).
    std::vector<BasePointT<Scalar>> final_stack_innermost_first;
};

/// Computes the unique non-crossing pairing by the inductive rule: adjacent
/// entry/exit pairs are matched, and an entry matches an exit when everything
/// between them is matched. Implemented as a scan with a pushdown stack.
/// Unpartnered events keep -1. Throws std::invalid_argument when an exit
/// appears with no open entry.
template <typename Scalar>
void match_transitions(TransitionHistoryT<Scalar>& h) {
    h.matching.assign(h.events.size(), -1);
    std::vector<int> open;
    for (size_t i = 0; i < h.events.size(); ++i) {
        switch (h.events[i].kind) {
            case TransitionKind::external_entry:
            case TransitionKind::internal_entry:
                open.push_back(static_cast<int>(i));
                break;
            case TransitionKind::internal_exit:
            case TransitionKind::external_exit:
                if (open.empty())
                    throw std::invalid_argument("match_transitions: exit with no open entry");
                h.matching[i] = open.back();
                h.matching[open.back()] = static_cast<int>(i);
                open.pop_back();
                break;
        }
    }
}

/// True when matched pairs nest like balanced parentheses.
template <typename Scalar>
bool matching_is_noncrossing(const TransitionHistoryT<Scalar>& h) {
    const auto& m = h.matching;
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i] < 0 || static_cast<size_t>(m[i]) <= i) continue;
        size_t j = static_cast<size_t>(m[i]);
        for (size_t k = i + 1; k < j; ++k) {
            if (m[k] < 0) continue;
            size_t l = static_cast<size_t>(m[k]);
            if (l < i || l > j) return false;
        }
    }
    return true;
}

struct Budgets {
    int max_transitions = 10000;    // internal entry + exit events
    int max_depth = 100;            // pushdown stack height
    double time_budget = 1e4;       // analytic plugs: total integration time
    long crossing_budget = 200000;  // PL plugs: total seam crossings
};

enum class StepWhat : std::uint8_t { surface, exit, budget, abort_recurrence };

/// Runs the leaf-following recursion with an explicit stack.
///
/// Dyn provides: types Scalar, State, a nested Step type, and
///   State enter(const BasePointT<Scalar>&)
///   Step  advance(State&, const Budgets&, Scalar cost_so_far)
///   void  note_push(const BasePointT<Scalar>&), note_pop()
///
/// advance() moves the state to its next event: a hit of an insertion
/// surface (base point pulled back through sigma, interrupted state saved
/// for resumption past the crossing), an exit through the top of the plug,
/// the cost budget, or a detected recurrence. On a surface hit the engine
/// descends into the interrupting leaf; popping resumes the saved state.
template <class Dyn>
TransitionHistoryT<typename Dyn::Scalar> follow_leaf_engine(
    Dyn& dyn, const BasePointT<typename Dyn::Scalar>& start, const Budgets& budgets) {
    using Scalar = typename Dyn::Scalar;
    using State = typename Dyn::State;

    struct Frame {
        BasePointT<Scalar> q;
        State resume;
    };

    TransitionHistoryT<Scalar> h;
    std::vector<Frame> stack;
    State state = dyn.enter(start);
    Scalar t{};
    int transitions = 0;

    h.events.push_back({TransitionKind::external_entry, start, t, 0, -1, {}, {}});
    h.classification = HistoryClass::budget_exhausted;

    while (true) {
        if (transitions >= budgets.max_transitions) {
            h.budget_cause = BudgetCause::transitions;
            break;
        }
        auto step = dyn.advance(state, budgets, t);
        t += step.cost;
        h.total_cost = t;
        if (step.what == StepWhat::budget) {
            h.budget_cause = BudgetCause::cost;
            break;
        }
        if (step.what == StepWhat::abort_recurrence) {
            h.classification = HistoryClass::infinite_suspected;
            break;
        }
        if (step.what == StepWhat::surface) {
            ++transitions;
            int depth = static_cast<int>(stack.size()) + 1;
            h.events.push_back({TransitionKind::internal_entry, step.base, t, depth,
                                step.component, {}, step.leaf_radius});
            if (depth > h.max_depth) h.max_depth = depth;
            if (depth >= budgets.max_depth) {
                h.budget_cause = BudgetCause::depth;
                stack.push_back({step.base, step.resume});
                break;
            }
            stack.push_back({step.base, step.resume});
            dyn.note_push(step.base);
            state = dyn.enter(step.base);
            continue;
        }
        // StepWhat::exit: step.base carries the observed exit base point
        if (stack.empty()) {
            h.events.push_back({TransitionKind::external_exit, step.base, t, 0, -1, {}, {}});
            h.classification = HistoryClass::finite;
            break;
        }
        ++transitions;
        Frame f = stack.back();
        stack.pop_back();
        dyn.note_pop();
        h.events.push_back({TransitionKind::internal_exit, step.base, t,
                            static_cast<int>(stack.size()), step.component, f.q, {}});
        state = f.resume;
    }

    h.final_depth = static_cast<int>(stack.size());
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        h.final_stack_innermost_first.push_back(it->q);
    h.final_stack_innermost_first.push_back(start);  // outermost leaf
    match_transitions(h);
    return h;
}

}  // namespace plugflow
