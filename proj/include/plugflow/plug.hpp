#pragma once

#include "plugflow/insertion.hpp"
#include "plugflow/integrate.hpp"
#include "plugflow/wilson.hpp"

#include <string>
#include <vector>

namespace plugflow {

enum class RegionKind : std::uint8_t {
    transverse_entry,
    transverse_exit,
    parallel,
    corner_separation
};

enum class FaceId : std::uint8_t { z_bottom, z_top, r_wall_low, r_wall_high, corner };

struct BoundaryRegion {
    RegionKind kind = RegionKind::parallel;
    FaceId face = FaceId::z_bottom;
    bool operator==(const BoundaryRegion&) const = default;
};

enum class DynamicsKind : std::uint8_t {
    analytic_wilson,       // dtheta = +/-1, dz = r^2 + z^6
    pl_collar_suspension,  // slant 1 suspension of the collar map, 20-fold cover
    pl_symbolic_suspension // slant 3/2 suspension of the four-ray map
};

struct SupportBox {
    double r_lo = -1, r_hi = 1;
    double theta_period = 10;
    double z_lo = -1, z_hi = 1;
    bool operator==(const SupportBox&) const = default;
};

/// Declarative description of a flow bordism: support, dynamics reference,
/// declared boundary regions, and whether base maps (matched ends) exist.
/// The boundary classification is declared, not inferred; a sampled
/// transversality check validates it.
struct FlowBordismDescriptor {
    std::string name;
    DynamicsKind dynamics = DynamicsKind::analytic_wilson;
    int orientation = +1;    // sign of dtheta on the first half
    bool z_reversed = false; // mirror-image marker
    int halves = 1;          // 1: semi-plug, 2: mirror-image concatenation
    SupportBox support;
    std::vector<BoundaryRegion> regions;
    bool has_base_maps = false;  // alpha_-: F -> bottom, alpha_+: F -> top

    bool operator==(const FlowBordismDescriptor&) const = default;
};

FlowBordismDescriptor wilson_semi_plug_descriptor();
FlowBordismDescriptor symbolic_semi_plug_descriptor();
FlowBordismDescriptor collar_semi_plug_descriptor();

/// Reverses the orientation of the leaves: entry and exit regions swap,
/// dtheta flips sign, and the z coordinate is read reversed.
FlowBordismDescriptor mirror_image(const FlowBordismDescriptor& d);

/// Identifies the exit region of p with the entry region of q.
/// Throws std::invalid_argument when the regions do not match. The result
/// has matched-end base maps exactly when q is the mirror image of p.
FlowBordismDescriptor concatenate(const FlowBordismDescriptor& p,
                                  const FlowBordismDescriptor& q);

/// Samples the declared transverse regions and checks the field is not
/// tangent to them (analytic dynamics only; the PL slant is constant).
bool validate_boundary_regions(const FlowBordismDescriptor& d);

struct Longevity {
    double past = 0;
    double future = 0;
    bool past_infinite = false;   // budget exhausted: reported as a sentinel
    bool future_infinite = false;
};

/// Trace forward/backward until a boundary exit or the budget runs out.
/// Only implemented for analytic dynamics; requires p inside the support.
Longevity measure_longevity(const FlowBordismDescriptor& d, const CylPoint& p, double budget);

struct MatchedEndsReport {
    std::vector<size_t> stopped;     // grid indices whose trace exhausted the budget
    std::vector<size_t> violations;  // grid indices with exit != entry beyond tolerance
    double worst_gap = 0;
    size_t checked = 0;
};

/// For each grid base point whose leaf passes through within the budget,
/// the exit base point must equal the entry base point within `tol`.
/// Throws std::logic_error when d has no base maps.
MatchedEndsReport check_matched_ends(const FlowBordismDescriptor& d,
                                     const std::vector<BasePointD>& grid, double budget,
                                     double tol = 1e-6);

struct StoppedSetSample {
    std::vector<BasePointD> grid;
    std::vector<bool> stopped;
};

/// Flags exactly those grid points whose forward trace exhausts the budget.
StoppedSetSample stopped_set_sample(const FlowBordismDescriptor& d,
                                    const std::vector<BasePointD>& grid, double budget);

}  // namespace plugflow
