#include "plugflow/suspension.hpp"

#include <stdexcept>

namespace plugflow {

SlantedSuspension suspend(const PLMap& f, const Rat& slant, int theta_length) {
    if (slant <= 0) throw std::domain_error("suspend: slant must be positive");
    if (theta_length < 1) throw std::domain_error("suspend: theta_length must be >= 1");
    SlantedSuspension s;
    s.return_map = f;
    s.return_map_inv = f.inverse();
    s.slant = slant;
    s.theta_length = theta_length;
    s.r_lo = f.dom_lo.x;
    s.r_hi = f.dom_hi.x;
    s.z_lo = f.dom_lo.y;
    s.z_hi = f.dom_hi.y;
    return s;
}

namespace {

void check_in_support(const SlantedSuspension& s, const PLState& p) {
    if (p.r < s.r_lo || p.r > s.r_hi || p.z < s.z_lo || p.z > s.z_hi || p.theta < 0 ||
        p.theta >= Rat(s.theta_length))
        throw std::domain_error("pl trace: start outside support");
}

}  // namespace

PLLeafTrace trace_pl_leaf(const SlantedSuspension& s, const PLState& start, long crossing_budget) {
    check_in_support(s, start);
    const Rat L(s.theta_length);

    PLLeafTrace trace;
    Rat theta = start.theta;  // position in [0, L); an integer position holds the post-seam fiber
    Rat z = start.z;
    Rat lift = 0;

    while (true) {
        Rat dth_seam = Rat(rat_floor(theta)) + 1 - theta;
        Rat dth_exit = (s.z_hi - z) / s.slant;
        bool seam_ends = dth_seam < dth_exit;
        Rat dth = seam_ends ? dth_seam : dth_exit;

        // exact closure against the start state anywhere on this segment;
        // the seam endpoint itself is checked after the return map applies
        if (z <= start.z) {
            Rat u = (start.z - z) / s.slant;
            if ((u < dth || (u == dth && !seam_ends)) && lift + u > 0 &&
                rat_mod(theta + u - start.theta, L) == 0) {
                trace.segments.push_back({lift, lift + u, start.r, z, start.z});
                trace.termination = Termination::closed_up;
                trace.theta_length = lift + u;
                trace.final_state = start;
                return trace;
            }
        }

        trace.segments.push_back({lift, lift + dth, start.r, z, z + s.slant * dth});

        if (!seam_ends) {
            trace.termination = Termination::exited_boundary;
            trace.theta_length = lift + dth_exit;
            trace.final_state = {start.r, rat_mod(theta + dth_exit, L), s.z_hi};
            return trace;
        }
        if (trace.crossings >= crossing_budget) {
            trace.termination = Termination::budget_exhausted;
            trace.theta_length = lift + dth_seam;
            trace.final_state = {start.r, rat_mod(theta + dth_seam, L), z + s.slant * dth_seam};
            return trace;
        }

        Rat seam_theta = Rat(rat_floor(theta)) + 1;
        lift += dth_seam;
        z = s.fiber(start.r, z + s.slant * dth_seam);
        theta = rat_mod(seam_theta, L);
        ++trace.crossings;
    }
}

PLLeafTrace trace_pl_leaf_backward(const SlantedSuspension& s, const PLState& start,
                                   long crossing_budget, const PLState* target) {
    check_in_support(s, start);
    const Rat L(s.theta_length);

    PLLeafTrace trace;
    Rat theta = start.theta;
    Rat z = start.z;
    Rat lift = 0;

    // an integer position holds the post-seam fiber: undo that seam first
    if (Rat(rat_floor(theta)) == theta) {
        z = s.fiber_inv(start.r, z);
        ++trace.crossings;
        if (theta == 0) theta = L;
    }

    while (true) {
        Rat fl = Rat(rat_floor(theta));
        Rat prev_seam = (fl == theta) ? theta - 1 : fl;
        Rat dth_seam = theta - prev_seam;
        Rat dth_exit = (z - s.z_lo) / s.slant;
        bool seam_ends = dth_seam < dth_exit;
        Rat dth = seam_ends ? dth_seam : dth_exit;

        if (target != nullptr && z >= target->z && start.r == target->r) {
            Rat u = (z - target->z) / s.slant;
            if ((u < dth || (u == dth && !seam_ends)) &&
                rat_mod(theta - u - target->theta, L) == 0) {
                trace.segments.push_back({lift, lift + u, start.r, z, target->z});
                trace.termination = Termination::hit_event;
                trace.theta_length = lift + u;
                trace.final_state = *target;
                return trace;
            }
        }

        trace.segments.push_back({lift, lift + dth, start.r, z, z - s.slant * dth});

        if (!seam_ends) {
            trace.termination = Termination::exited_boundary;
            trace.theta_length = lift + dth_exit;
            trace.final_state = {start.r, rat_mod(theta - dth_exit, L), s.z_lo};
            return trace;
        }
        if (trace.crossings >= crossing_budget) {
            trace.termination = Termination::budget_exhausted;
            trace.theta_length = lift + dth_seam;
            trace.final_state = {start.r, rat_mod(prev_seam, L), z - s.slant * dth_seam};
            return trace;
        }
        lift += dth_seam;
        z = s.fiber_inv(start.r, z - s.slant * dth_seam);
        theta = prev_seam == 0 ? L : prev_seam;
        ++trace.crossings;
    }
}

}  // namespace plugflow
