#include "plugflow/plug.hpp"

#include "plugflow/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace plugflow {

namespace {

std::vector<BoundaryRegion> semi_plug_regions() {
    return {{RegionKind::transverse_entry, FaceId::z_bottom},
            {RegionKind::transverse_exit, FaceId::z_top},
            {RegionKind::parallel, FaceId::r_wall_low},
            {RegionKind::parallel, FaceId::r_wall_high},
            {RegionKind::corner_separation, FaceId::corner}};
}

double wrap(double theta, double period) {
    double m = std::fmod(theta, period);
    if (m < 0) m += period;
    return m;
}

}  // namespace

FlowBordismDescriptor wilson_semi_plug_descriptor() {
    FlowBordismDescriptor d;
    d.name = "wilson_semi_plug";
    d.dynamics = DynamicsKind::analytic_wilson;
    d.support = {-1, 1, 10, -1, 1};
    d.regions = semi_plug_regions();
    return d;
}

FlowBordismDescriptor symbolic_semi_plug_descriptor() {
    FlowBordismDescriptor d;
    d.name = "symbolic_semi_plug";
    d.dynamics = DynamicsKind::pl_symbolic_suspension;
    d.support = {-1, 2.5, 1, -3, 1.5};
    d.regions = semi_plug_regions();
    return d;
}

FlowBordismDescriptor collar_semi_plug_descriptor() {
    FlowBordismDescriptor d;
    d.name = "collar_semi_plug";
    d.dynamics = DynamicsKind::pl_collar_suspension;
    d.support = {-1, 1, 20, -2, 2};
    d.regions = semi_plug_regions();
    return d;
}

FlowBordismDescriptor mirror_image(const FlowBordismDescriptor& d) {
    FlowBordismDescriptor m = d;
    m.orientation = -d.orientation;
    m.z_reversed = !d.z_reversed;  // the conventional relabeling z -> -z
    // reversing the leaves turns each entry region into an exit region in place
    for (auto& reg : m.regions) {
        if (reg.kind == RegionKind::transverse_entry)
            reg.kind = RegionKind::transverse_exit;
        else if (reg.kind == RegionKind::transverse_exit)
            reg.kind = RegionKind::transverse_entry;
    }
    return m;
}

FlowBordismDescriptor concatenate(const FlowBordismDescriptor& p,
                                  const FlowBordismDescriptor& q) {
    if (p.halves != 1 || q.halves != 1)
        throw std::invalid_argument("concatenate: operands must be semi-plugs");
    if (p.dynamics != q.dynamics || !(p.support == q.support))
        throw std::invalid_argument("concatenate: exit region of p does not match entry of q");
    // p needs an exit face and q an entry face of the same base geometry
    bool p_exits = false, q_enters = false;
    for (const auto& reg : p.regions)
        if (reg.kind == RegionKind::transverse_exit) p_exits = true;
    for (const auto& reg : q.regions)
        if (reg.kind == RegionKind::transverse_entry) q_enters = true;
    if (!p_exits || !q_enters)
        throw std::invalid_argument("concatenate: boundary regions do not line up");

    FlowBordismDescriptor out = p;
    out.name = p.name + "+" + q.name;
    out.halves = 2;
    // matched ends arise exactly from the mirror-image construction
    out.has_base_maps = (q == mirror_image(p));
    return out;
}

bool validate_boundary_regions(const FlowBordismDescriptor& d) {
    if (d.dynamics != DynamicsKind::analytic_wilson) return true;  // PL slant is constant
    for (const auto& reg : d.regions) {
        if (reg.kind != RegionKind::transverse_entry && reg.kind != RegionKind::transverse_exit)
            continue;
        double z = reg.face == FaceId::z_bottom ? d.support.z_lo : d.support.z_hi;
        for (int i = 0; i <= 20; ++i) {
            double r = d.support.r_lo + (d.support.r_hi - d.support.r_lo) * i / 20.0;
            CylPoint p{r, 0.0, z, Half::lower};
            if (eval_wilson_field(p).d_z <= 0.0) return false;
        }
    }
    return true;
}

Longevity measure_longevity(const FlowBordismDescriptor& d, const CylPoint& p, double budget) {
    if (d.dynamics != DynamicsKind::analytic_wilson)
        throw std::logic_error("measure_longevity: analytic dynamics only");
    Longevity lv;
    IntegrateOptions opt;
    opt.budget = budget;
    opt.sample_dt = budget;  // endpoints only
    opt.concatenated = d.halves == 2;

    LeafTrace fwd = integrate_leaf(p, opt, {});
    lv.future = fwd.final_time;
    lv.future_infinite = fwd.termination == Termination::budget_exhausted;

    opt.backward = true;
    LeafTrace bwd = integrate_leaf(p, opt, {});
    lv.past = bwd.final_time;
    lv.past_infinite = bwd.termination == Termination::budget_exhausted;
    return lv;
}

MatchedEndsReport check_matched_ends(const FlowBordismDescriptor& d,
                                     const std::vector<BasePointD>& grid, double budget,
                                     double tol) {
    if (!d.has_base_maps)
        throw std::logic_error("check_matched_ends: descriptor has no base maps");
    if (d.dynamics != DynamicsKind::analytic_wilson)
        throw std::logic_error("check_matched_ends: analytic dynamics only");

    MatchedEndsReport rep;
    rep.checked = grid.size();
    std::vector<int> status(grid.size(), 0);  // 0 ok, 1 stopped, 2 violation
    std::vector<double> gaps(grid.size(), 0.0);

    IntegrateOptions opt;
    opt.budget = budget;
    opt.sample_dt = budget;
    opt.concatenated = true;

    parallel_for(grid.size(), [&](size_t i) {
        CylPoint start{grid[i].r, grid[i].theta, -1.0, Half::lower};
        LeafTrace tr = integrate_leaf(start, opt, {});
        if (tr.termination != Termination::exited_boundary) {
            status[i] = 1;
            return;
        }
        double dr = std::abs(tr.final_point.r - grid[i].r);
        double dth = std::abs(wrap(tr.final_point.theta, 10.0) - wrap(grid[i].theta, 10.0));
        dth = std::min(dth, 10.0 - dth);
        gaps[i] = std::max(dr, dth);
        if (gaps[i] > tol) status[i] = 2;
    });

    for (size_t i = 0; i < grid.size(); ++i) {
        if (status[i] == 1) rep.stopped.push_back(i);
        if (status[i] == 2) rep.violations.push_back(i);
        rep.worst_gap = std::max(rep.worst_gap, gaps[i]);
    }
    return rep;
}

StoppedSetSample stopped_set_sample(const FlowBordismDescriptor& d,
                                    const std::vector<BasePointD>& grid, double budget) {
    if (d.dynamics != DynamicsKind::analytic_wilson)
        throw std::logic_error("stopped_set_sample: analytic dynamics only");
    StoppedSetSample out;
    out.grid = grid;
    out.stopped.assign(grid.size(), false);

    IntegrateOptions opt;
    opt.budget = budget;
    opt.sample_dt = budget;
    opt.concatenated = d.halves == 2;

    std::vector<char> flags(grid.size(), 0);
    parallel_for(grid.size(), [&](size_t i) {
        CylPoint start{grid[i].r, grid[i].theta, -1.0, Half::lower};
        LeafTrace tr = integrate_leaf(start, opt, {});
        flags[i] = tr.termination == Termination::budget_exhausted ? 1 : 0;
    });
    for (size_t i = 0; i < grid.size(); ++i) out.stopped[i] = flags[i] != 0;
    return out;
}

}  // namespace plugflow
