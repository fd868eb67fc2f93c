#pragma once

#include "plugflow/follow_leaf.hpp"
#include "plugflow/integrate.hpp"
#include "plugflow/wilson.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace plugflow {

/// The two components of the analytic self-insertion: D_s maps into the
/// lower half at the section theta = 6, D_bar_s into the mirror half at
/// theta = 4.
enum class SigmaComponent : std::uint8_t { D_s, D_bar_s };

/// sigma(r,theta) = (r - r^2/4 - 2(theta-2)^2, 6, 2-theta)           on D_s
/// sigma(r,theta) = (r - r^2/4 - 2(theta-8)^2, 4, theta-8)           on D_bar_s
/// Throws std::domain_error when the image leaves the support.
CylPoint sigma_w3(double r, double theta, SigmaComponent c);

/// r - r_image = r^2/4 + 2(theta-c)^2 with c = 2 (D_s) or 8 (D_bar_s).
double radius_defect_w3(double r, double theta, SigmaComponent c);

/// n-dimensional analogue (n >= 4): thetas has n-2 entries; returns the
/// image coordinates (r', 6,...,6, z') resp. (r', 4,...,4, z').
std::vector<double> sigma_wn(double r, const std::vector<double>& thetas, SigmaComponent c,
                             int n);
double radius_defect_wn(double r, const std::vector<double>& thetas, SigmaComponent c);

using BasePointD = BasePointT<double>;
using TransitionHistoryD = TransitionHistoryT<double>;

/// A section crossing seen while following a leaf (used for recurrence
/// detection and by tests).
struct SectionCrossing {
    Half half = Half::lower;
    double r = 0;
    double theta = 0;  // lift within the current leaf
    double z = 0;
    double time = 0;
    int depth = 0;
};

struct CandidateCircle {
    SectionCrossing now;
    SectionCrossing before;
};

/// The self-inserted analytic plug (or the plain mirror-image plug when
/// `inserted` is false). Purely configuration; traces are independent.
struct WilsonPlugConfig {
    bool inserted = true;
    double step = 1e-3;
    bool detect_recurrence = false;
    double recurrence_eps = 1e-4;
};

/// Membership test of a section fiber (rho, zeta) in the image of one sigma
/// component; returns the base-point preimage when inside.
std::optional<BasePointD> sigma_w3_pullback(double rho, double zeta, SigmaComponent c);

/// Executes the leaf-following recursion from a base point of the plug.
/// Every transition event is recorded; the matching is filled in.
/// When recurrence detection is on, a near-return to an earlier section
/// crossing with identical stack aborts the trace as infinite_suspected;
/// the candidate pair is returned through `candidate` if given.
TransitionHistoryD follow_leaf(const WilsonPlugConfig& plug, BasePointD start,
                               const Budgets& budgets,
                               std::optional<CandidateCircle>* candidate = nullptr,
                               std::vector<SectionCrossing>* crossings = nullptr);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::string plug;
    std::vector<CheckResult> checks;
    bool pass = true;

    void add(const std::string& name, bool ok, const std::string& detail = "") {
        checks.push_back({name, ok, detail});
        pass = pass && ok;
    }
};

/// Uniform half-open base grid: r = -1 + 2k/n, theta = 10j/n. Contains the
/// r = 0 column, so the stopped circle is always sampled.
std::vector<BasePointD> base_grid(int n);

/// Lemma checks on a single history: matched pairs agree on the pushed /
/// popped base point within `tol`, pairs nest, and finite histories pair
/// the first external entry with the last external exit.
SuiteReport verify_matching_lemma(const TransitionHistoryD& h, double tol,
                                  const std::string& plug_name = "w3");

/// Aperiodicity property suite: traces every grid point, asserts strictly
/// increasing call-stack radii at entries (the stack of any point has
/// strictly decreasing radii read outward) and reports recurrence
/// candidates. The uninserted plug is expected to produce candidates on
/// the r = 0 column.
SuiteReport verify_aperiodicity(const WilsonPlugConfig& plug, int grid_n, const Budgets& budgets);

struct StackBoundResult {
    double C = 0;
    double bound = 0;
    int observed_max = 0;
    SuiteReport report;
};

/// C = min radius defect over domain points at distance >= eps from the
/// critical points (0,2), (0,8); asserts observed stack height <= ceil(2/C)
/// on traces whose radii avoid (-eps, eps).
StackBoundResult stack_height_bound(double eps, int grid_n, const Budgets& budgets);

/// Same check for several eps values out of a single trace pass over the
/// grid restricted to |r| >= min(eps).
std::vector<StackBoundResult> stack_height_bounds(const std::vector<double>& eps_list,
                                                  int grid_n, const Budgets& budgets);

/// Content stopping: every trace started in the stated negative-radius band
/// exhausts its transition budget with the stack still deep, and the slope
/// bound r^2 + z^6 <= sqrt(2) r^2 holds on the region r <= -2 z^2.
SuiteReport verify_content_stopping(const std::vector<double>& radii, int n_theta,
                                    const Budgets& budgets, int growth_threshold);

}  // namespace plugflow
