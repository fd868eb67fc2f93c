#pragma once

#include "plugflow/geom2d.hpp"

#include <string>
#include <vector>

namespace plugflow {

/// One affine piece of a PL homeomorphism: a convex region with rational
/// vertices and the affine map applied on it.
struct AffinePiece {
    RPolygon region;
    RAffine map;
};

/// Piecewise-affine homeomorphism of a rectangle. Pieces tile the domain,
/// adjacent maps agree along shared edges, and the image pieces tile the
/// domain again.
struct PLMap {
    std::vector<AffinePiece> pieces;
    RPoint dom_lo, dom_hi;  // rectangle corners
    std::string name;

    bool in_domain(const RPoint& p) const {
        return p.x >= dom_lo.x && p.x <= dom_hi.x && p.y >= dom_lo.y && p.y <= dom_hi.y;
    }

    /// Evaluates the map; shared edges are consistent by global continuity.
    RPoint apply(const RPoint& p) const;

    /// Fiber form: x is the invariant coordinate, y the moved one.
    Rat apply_fiber(const Rat& x, const Rat& y) const { return apply({x, y}).y; }

    PLMap inverse() const;
};

/// Exact validity report for a PLMap.
struct PLMapValidation {
    bool tiles_domain = false;       // piece areas fill the rectangle, interiors disjoint
    bool globally_continuous = false;  // adjacent pieces agree on shared edges
    bool image_tiles_domain = false;   // bijectivity onto the rectangle
    bool ok() const { return tiles_domain && globally_continuous && image_tiles_domain; }
};
PLMapValidation validate_pl_map(const PLMap& f);

/// The four-ray map on [-1,5/2] x [-3,3/2]: upper sector z -> 2z - 3/2,
/// lower sector z -> z/2 - 3/2, and the unique continuous affine fills on
/// the side sectors (right: z -> r/2 + z - 3/2, left: z -> -r + z - 3/2).
PLMap build_symbolic_map();

/// PL homeomorphism of [-1,1] x [-2,2], identity on the boundary, moving
/// (0,0) to (0,-1) and (0,1) to (0,0). Decomposed into two trapezoids
/// meeting along the segment {0} x [0,1] (both restrict to z -> z-1 there)
/// and two triangles against the top and bottom edges:
///   left  trapezoid (-1,-2),(0,0),(0,1),(-1,2):  z -> z - r - 1
///   right trapezoid (0,0),(1,-2),(1,2),(0,1):    z -> z + r - 1
///   top triangle   (-1,2),(0,1),(1,2):           z -> 2z - 2
///   bottom triangle (-1,-2),(1,-2),(0,0):        z -> z/2 - 1
PLMap build_collar_map();

PLMap build_identity_map(const RPoint& lo, const RPoint& hi);

/// Exact minimum of f_z(r,z) - z over the domain. The minimum of an affine
/// function on a convex piece is attained at vertices; `vertices` lists all
/// piece vertices attaining it and `unique_point` says whether the minimal
/// face is a single point.
struct MinZDisplacement {
    Rat value;
    std::vector<RPoint> vertices;
    bool unique_point = false;
};
MinZDisplacement min_z_displacement(const PLMap& f);

}  // namespace plugflow
