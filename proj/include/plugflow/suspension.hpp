#pragma once

#include "plugflow/integrate.hpp"
#include "plugflow/plmap.hpp"
#include "plugflow/rational.hpp"

#include <optional>

namespace plugflow {

/// Slanted suspension of a PL homeomorphism: leaves satisfy dz/dtheta = slant
/// between integer theta values; crossing a seam applies the return map to
/// the (r, z) fiber; theta is taken mod theta_length.
struct SlantedSuspension {
    PLMap return_map;
    PLMap return_map_inv;
    Rat slant = 1;
    int theta_length = 1;
    Rat r_lo, r_hi;  // fiber x range
    Rat z_lo, z_hi;  // fiber y range

    Rat fiber(const Rat& r, const Rat& z) const { return return_map.apply_fiber(r, z); }
    Rat fiber_inv(const Rat& r, const Rat& z) const { return return_map_inv.apply_fiber(r, z); }
};

/// theta_length >= 1 lays that many fundamental domains along theta, with
/// the return map applied at every integer crossing (a finite cover of the
/// basic suspension).
SlantedSuspension suspend(const PLMap& f, const Rat& slant, int theta_length);

/// State inside one suspension half: theta position in [0, theta_length).
struct PLState {
    Rat r;
    Rat theta;
    Rat z;
};

struct PLSegment {
    Rat theta_from;  // lift coordinates (monotone along the trace)
    Rat theta_to;
    Rat r;
    Rat z_from;
    Rat z_to;
};

struct PLLeafTrace {
    std::vector<PLSegment> segments;
    Termination termination = Termination::budget_exhausted;
    Rat theta_length;  // lift traversed up to termination (closure: the period)
    PLState final_state;
    long crossings = 0;
};

/// Exact forward trace inside a single suspension (no mirror half): climbs
/// z at the slant, applies the return map at seams, exits through z_hi,
/// closes on exact state equality with the start (anywhere along a
/// segment, not only at seams).
PLLeafTrace trace_pl_leaf(const SlantedSuspension& s, const PLState& start, long crossing_budget);

/// The same dynamics traced against the orientation; used to check
/// exactness. When `target` is given the trace stops with hit_event the
/// moment it passes exactly through that state.
PLLeafTrace trace_pl_leaf_backward(const SlantedSuspension& s, const PLState& start,
                                   long crossing_budget, const PLState* target = nullptr);

}  // namespace plugflow
