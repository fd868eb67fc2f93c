#pragma once

#include "plugflow/follow_leaf.hpp"
#include "plugflow/insertion.hpp"
#include "plugflow/suspension.hpp"

#include <functional>
#include <optional>
#include <string>

namespace plugflow {

using BasePointR = BasePointT<Rat>;
using TransitionHistoryR = TransitionHistoryT<Rat>;

/// State inside a two-half PL plug. Lower: theta in [0,L) ascending, fiber
/// climbs z_lo -> z_hi; an integer theta position holds the post-seam fiber.
/// Upper (the mirror half in its own coordinates): theta in (0,L]
/// descending, fiber climbs -z_hi -> -z_lo; an integer position means the
/// seam there has been crossed.
struct PLPlugState {
    Half half = Half::lower;
    Rat r;
    Rat theta;
    Rat z;
    bool operator==(const PLPlugState&) const = default;
};

/// One component of a PL self-insertion. The image is a region of a seam
/// section; membership is tested on the seam fiber in the stated chart and
/// inverted exactly.
struct PLSigmaComponent {
    int id = 1;          // lift index j
    Half half = Half::lower;
    long seam = 1;       // lower: ascending target in 1..L; upper: integer approached descending (0..L-1)
    bool test_post = false;  // test the post-seam fiber instead of the approach fiber
    std::string name;
    std::function<std::optional<BasePointR>(const Rat& r, const Rat& z)> pullback;
    std::vector<RPolygon> image_pieces;  // image region in the tested chart
};

struct PLPlug {
    std::string name;
    SlantedSuspension lower;  // the mirror half is derived from it
    bool inserted = true;
    std::vector<PLSigmaComponent> components;

    Rat upper_top() const { return -lower.z_lo; }  // exit level of the mirror half
};

/// Self-insertion map sigma = h . g of the symbolic-suspension plug,
/// defined exactly on B = { r >= 0, r/12 <= theta - 1/3 <= r/4 }.
/// Returns the (r, z) fiber of the image in the theta = 1 section.
/// Throws std::domain_error outside B.
RPoint sigma_v_fiber(const Rat& r, const Rat& theta);

/// Inverse on the image: which base point maps to the section fiber
/// (rho, zeta); nullopt when the fiber is outside the image of B.
std::optional<BasePointR> v9_pullback(const Rat& rho, const Rat& zeta);

/// Image of sigma|_B in the section: the exact rectangle [0,5/4] x [-5/4,5/8].
RPolygon v9_image_rectangle();

bool v9_in_B(const Rat& r, const Rat& theta);

/// The n-band of the nested disks: smallest n >= 1 with
/// 4*2^-n - 2*4^-n <= r <= 4*2^-n + 2*4^-n, or 0 when r is in no band.
int v9_band_of_radius(const Rat& r);

/// Symbolic-suspension plug (slant 3/2). double_cover doubles the theta
/// period and installs the conjugated second component
/// sigma_2 = beta . gamma . sigma_1 . beta next to the lift sigma_1.
PLPlug build_v9_plug(bool double_cover, bool inserted = true);

/// Twenty-fold collar suspension plug with the segment-to-segment
/// insertion: base points near {0} x [9,10] map onto the full stopped
/// segment of the lower circles at theta = 20, and near {0} x [14,15]
/// onto the mirror segment at theta = 5. Each component extends the core
/// segment to a polygonal domain with radius defect |r|/4 + 5 dist(theta).
/// Throws std::runtime_error when the construction checks fail.
PLPlug build_pl_wilson_plug(bool inserted = true);

/// Forward map of the PL Wilson insertion (component 1 at theta = 20 /
/// component 2 at theta = 5); returns the image fiber in the component's
/// chart. Throws outside the domain.
RPoint pl_wilson_sigma_fiber(const Rat& r, const Rat& theta, int component);
Rat pl_wilson_defect(const Rat& r, const Rat& theta, int component);

/// Exact verification of the PL Wilson insertion: image inside the
/// support, component images disjoint, defect nonnegative with zeros only
/// on the core segments, and boundary-wall leaves crossing the image at
/// most once.
SuiteReport verify_pl_wilson_sigma();

/// Leaf-following recursion with exact arithmetic, from a base point.
TransitionHistoryR follow_leaf_pl(const PLPlug& plug, const BasePointR& start,
                                  const Budgets& budgets);

struct PLInteriorTrace {
    bool closed = false;
    Rat period;  // theta-length of the detected circle
    TransitionHistoryR history;
    std::vector<std::pair<PLPlugState, Rat>> samples;  // depth-0 post-seam states
};

/// Follows the flow from an interior state, detecting exact circles:
/// a repeat of a depth-0 post-seam state closes the leaf.
PLInteriorTrace trace_plug_interior(const PLPlug& plug, const PLPlugState& start,
                                    const Budgets& budgets);

/// Pushes a convex region through one affine chart of a PL map, splitting
/// along piece boundaries. Returns the image pieces.
std::vector<RPolygon> map_region_through(const PLMap& f, const RPolygon& region);

}  // namespace plugflow
