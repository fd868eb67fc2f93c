#pragma once

#include "plugflow/geom2d.hpp"
#include "plugflow/insertion.hpp"

#include <optional>
#include <vector>

namespace plugflow {

struct SymbolicPair {
    int j = 1;
    int n = 1;
    bool operator==(const SymbolicPair&) const = default;
};

/// Runs the recursive disk-following procedure and returns the first
/// `pair_budget` printed pairs. n = nullopt is the unbounded top call
/// (prints nothing itself; its step-3 loop enumerates lazily forever).
/// Calls with n = 0 print nothing and return. `repeat` is the number of
/// times step 4 calls the next level down (2 for this construction).
std::vector<SymbolicPair> followdisks(int j, std::optional<int> n, int pair_budget,
                                      int repeat = 2);

/// The disk E_n = { (r,theta) in B : 4*2^-n - 2*4^-n <= r <= 4*2^-n + 2*4^-n }.
struct DiskInterval {
    int n = 1;
    Rat r_lo, r_hi;
    RPolygon trapezoid;  // E_n cut to B
};
DiskInterval disk_E(int n);

struct HierarchyDisk {
    int level = 0;
    int band = 0;     // the E_band containing it
    int parent = -1;  // previous-level disk containing it
    int source = -1;  // previous-level disk whose tube produced it
    std::vector<int> children;
    std::vector<RPolygon> pieces;
    Rat diam2;
    // children of this disk are supplied by the same-level disks inside its
    // source disk; when the band range cut that supply off, the disk is
    // marked incomplete and exempt from the multiplicity check
    bool children_complete = false;
};

struct DiskHierarchy {
    int k_max = 0;
    int n_max = 0;
    std::vector<HierarchyDisk> disks;
    std::vector<std::vector<int>> levels;  // disk indices per level
    bool budget_hit = false;
    bool containment_ok = true;  // every piece landed inside a band disk of the level above
};

/// Builds the nested-disk hierarchy by exact tube tracing: the tube over
/// each level-k disk is pushed through the seam map crossing by crossing,
/// intersected with the image of sigma|_B, and pulled back to the base.
/// Components of the pullback form the level-(k+1) disks.
DiskHierarchy build_hierarchy(int k_max, int n_max, long seam_step_cap = 4000);

struct CantorStats {
    std::vector<Rat> level_max_diam2;
    SuiteReport report;
};

/// Finite-level Cantor certificate: strictly shrinking level diameters,
/// multiplicity >= 2 for disks whose children are within range, exact
/// disjointness per level, and containment along branches.
CantorStats cantor_cross_section_stats(const DiskHierarchy& h);

}  // namespace plugflow
