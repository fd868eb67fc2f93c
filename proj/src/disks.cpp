#include "plugflow/disks.hpp"

#include "plugflow/plmap.hpp"
#include "plugflow/plplug.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace plugflow {

namespace {

struct Emitter {
    std::vector<SymbolicPair> out;
    int budget;
    bool emit(int j, int n) {
        if (static_cast<int>(out.size()) >= budget) return false;
        out.push_back({j, n});
        return static_cast<int>(out.size()) < budget;
    }
};

// n < 0 encodes the unbounded call. Returns false once the budget is hit.
bool fd(int j, int n, int repeat, Emitter& em) {
    if (n == 0) return true;
    if (n > 0 && !em.emit(j, n)) return false;
    for (int i = 1; i <= 2; ++i) {
        if (n < 0) {
            for (int k = 1;; ++k)
                if ((j + k) % 2 == 1 && !fd(i, k, repeat, em)) return false;
        }
        for (int k = 1; k <= n - 2; ++k)
            if ((j + k) % 2 == 1 && !fd(i, k, repeat, em)) return false;
        for (int t = 0; t < repeat; ++t)
            if (!fd(i, n - 1, repeat, em)) return false;
        for (int k = n - 2; k >= 1; --k)
            if ((j + k) % 2 == 0 && !fd(i, k, repeat, em)) return false;
    }
    return true;
}

}  // namespace

std::vector<SymbolicPair> followdisks(int j, std::optional<int> n, int pair_budget, int repeat) {
    if (j != 1 && j != 2) throw std::domain_error("followdisks: j must be 1 or 2");
    if (n && *n < 0) throw std::domain_error("followdisks: n must be nonnegative");
    if (pair_budget < 0) throw std::domain_error("followdisks: pair budget must be nonnegative");
    Emitter em;
    em.budget = pair_budget;
    fd(j, n ? *n : -1, repeat, em);
    return em.out;
}

DiskInterval disk_E(int n) {
    if (n < 1) throw std::domain_error("disk_E: n must be >= 1");
    Rat two_n = 1;
    for (int i = 0; i < n; ++i) two_n *= 2;
    DiskInterval d;
    d.n = n;
    d.r_lo = 4 / two_n - 2 / (two_n * two_n);
    d.r_hi = 4 / two_n + 2 / (two_n * two_n);
    auto theta_lo = [](const Rat& r) { return Rat(1, 3) + r / 12; };
    auto theta_hi = [](const Rat& r) { return Rat(1, 3) + r / 4; };
    d.trapezoid = {{d.r_lo, theta_lo(d.r_lo)},
                   {d.r_hi, theta_lo(d.r_hi)},
                   {d.r_hi, theta_hi(d.r_hi)},
                   {d.r_lo, theta_hi(d.r_lo)}};
    return d;
}

namespace {

// branch regions of Im(sigma|_B) in section fiber coordinates, with their
// exact affine inverses back to the base
struct Branch {
    RPolygon region;
    RAffine inverse;
};

std::vector<Branch> image_branches() {
    std::vector<Branch> out;
    Rat q58(5, 8), q54(5, 4), third(1, 3);
    {
        // z = x/2 branch: zeta >= rho/2, r = 4 zeta, theta = zeta - rho/18 + 1/3
        Branch b;
        b.region = make_ccw({{0, 0}, {q54, q58}, {0, q58}});
        b.inverse = {0, 4, Rat(-1, 18), 1, 0, third};
        out.push_back(b);
    }
    {
        // middle branch: -rho <= zeta <= rho/2, r = 2 rho,
        // theta = 7 rho/18 + zeta/9 + 1/3
        Branch b;
        b.region = make_ccw({{0, 0}, {q54, -q54}, {q54, q58}});
        b.inverse = {2, 0, Rat(7, 18), Rat(1, 9), 0, third};
        out.push_back(b);
    }
    {
        // z = -x branch: zeta <= -rho, r = -2 zeta,
        // theta = rho/9 - zeta/6 + 1/3
        Branch b;
        b.region = make_ccw({{0, 0}, {0, -q54}, {q54, -q54}});
        b.inverse = {0, -2, Rat(1, 9), Rat(-1, 6), 0, third};
        out.push_back(b);
    }
    return out;
}

// union-find grouping of polygon pieces that share area or an edge
std::vector<std::vector<size_t>> group_pieces(const std::vector<RPolygon>& pieces) {
    std::vector<size_t> parent(pieces.size());
    std::iota(parent.begin(), parent.end(), size_t{0});
    std::function<size_t(size_t)> find = [&](size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (size_t i = 0; i < pieces.size(); ++i)
        for (size_t j = i + 1; j < pieces.size(); ++j) {
            RPolygon shared = clip_convex(pieces[i], pieces[j]);
            size_t distinct = 0;
            for (size_t a = 0; a < shared.size(); ++a) {
                bool dup = false;
                for (size_t b = 0; b < a; ++b) dup = dup || shared[a] == shared[b];
                if (!dup) ++distinct;
            }
            if (distinct >= 2) parent[find(i)] = find(j);
        }
    std::vector<std::vector<size_t>> groups;
    std::vector<long> slot(pieces.size(), -1);
    for (size_t i = 0; i < pieces.size(); ++i) {
        size_t root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<size_t>(slot[root])].push_back(i);
    }
    return groups;
}

Rat pieces_diam2(const std::vector<RPolygon>& pieces) {
    std::vector<RPoint> verts;
    for (const auto& p : pieces)
        for (const auto& v : p) verts.push_back(v);
    return diameter2(verts);
}

bool union_contains(const std::vector<RPolygon>& pieces, const RPoint& p) {
    for (const auto& poly : pieces)
        if (polygon_contains(poly, p)) return true;
    return false;
}

}  // namespace

DiskHierarchy build_hierarchy(int k_max, int n_max, long seam_step_cap) {
    if (k_max < 1 || n_max < 2)
        throw std::domain_error("build_hierarchy: need k_max >= 1 and n_max >= 2");

    DiskHierarchy h;
    h.k_max = k_max;
    h.n_max = n_max;

    PLMap f = build_symbolic_map();
    const Rat z_top(3, 2);
    // base (r,theta) -> fiber (r, z) at the first section crossing
    const RAffine to_section{1, 0, 0, Rat(-3, 2), 0, Rat(-3, 2)};
    std::vector<Branch> branches = image_branches();

    h.levels.emplace_back();
    for (int n = 1; n <= n_max; ++n) {
        DiskInterval e = disk_E(n);
        HierarchyDisk d;
        d.level = 0;
        d.band = n;
        d.pieces = {e.trapezoid};
        d.diam2 = pieces_diam2(d.pieces);
        h.levels[0].push_back(static_cast<int>(h.disks.size()));
        h.disks.push_back(d);
    }

    long steps = 0;
    for (int level = 0; level < k_max; ++level) {
        // pull every level tube back through sigma in one pool
        std::vector<RPolygon> pool;
        std::vector<int> pool_source;
        for (int idx : h.levels[level]) {
            std::vector<RPolygon> fibers;
            for (const auto& piece : h.disks[idx].pieces) fibers.push_back(to_section.apply(piece));
            while (!fibers.empty()) {
                if (++steps > seam_step_cap) {
                    h.budget_hit = true;
                    break;
                }
                // intersect the current section fibers with Im(sigma|_B)
                for (const auto& fp : fibers)
                    for (const auto& br : branches) {
                        RPolygon c = clip_convex(fp, br.region);
                        if (c.size() >= 3 && area2(c) != 0) {
                            pool.push_back(br.inverse.apply(c));
                            pool_source.push_back(idx);
                        }
                    }
                // advance one seam: apply f, climb 3/2, keep what stays below the gluing
                std::vector<RPolygon> next;
                for (const auto& fp : fibers)
                    for (RPolygon piece : map_region_through(f, fp)) {
                        for (auto& v : piece) v.y += z_top;
                        piece = clip_halfplane(piece, 0, 1, z_top);
                        if (piece.size() >= 3 && area2(piece) != 0) next.push_back(piece);
                    }
                fibers = std::move(next);
            }
            if (h.budget_hit) break;
        }
        if (h.budget_hit) break;

        h.levels.emplace_back();
        for (const auto& group : group_pieces(pool)) {
            HierarchyDisk d;
            d.level = level + 1;
            d.source = pool_source[group[0]];
            for (size_t pi : group) {
                d.pieces.push_back(pool[pi]);
                // disjoint tubes pull back to disjoint regions
                if (pool_source[pi] != d.source) h.containment_ok = false;
            }
            d.diam2 = pieces_diam2(d.pieces);

            // the band: every vertex must lie in one E_band trapezoid
            int band = v9_band_of_radius(d.pieces[0][0].x);
            bool contained = band > 0;
            if (contained) {
                DiskInterval e = disk_E(band);
                for (const auto& piece : d.pieces)
                    for (const auto& v : piece)
                        if (!polygon_contains(e.trapezoid, v)) contained = false;
            }
            d.band = band;
            if (!contained) h.containment_ok = false;

            // parent: the unique previous-level disk containing the component
            for (int pidx : h.levels[level]) {
                bool inside = true;
                for (const auto& piece : d.pieces)
                    for (const auto& v : piece)
                        inside = inside && union_contains(h.disks[pidx].pieces, v);
                if (inside) {
                    d.parent = pidx;
                    break;
                }
            }
            if (d.parent < 0) h.containment_ok = false;

            int self = static_cast<int>(h.disks.size());
            h.levels[level + 1].push_back(self);
            if (d.parent >= 0) h.disks[d.parent].children.push_back(self);
            h.disks.push_back(d);
        }
    }

    // children of a level-0 band-b disk come from the tubes over deeper
    // bands; at level k >= 1 the suppliers are the same-level disks inside
    // the source disk, so the supply is complete only when the source kept
    // at least two children of its own
    for (int idx : h.levels[0]) {
        bool deeper = false;
        for (int other : h.levels[0]) deeper = deeper || h.disks[other].band > h.disks[idx].band;
        h.disks[idx].children_complete = deeper;
    }
    for (size_t level = 1; level < h.levels.size(); ++level)
        for (int idx : h.levels[level]) {
            int src = h.disks[idx].source;
            h.disks[idx].children_complete =
                src >= 0 && h.disks[src].children.size() >= 2;
        }
    return h;
}

CantorStats cantor_cross_section_stats(const DiskHierarchy& h) {
    CantorStats stats;
    stats.report.suite = "hierarchy";
    stats.report.plug = "v9";

    for (const auto& level : h.levels) {
        Rat m = 0;
        for (int idx : level) m = std::max(m, h.disks[idx].diam2);
        stats.level_max_diam2.push_back(m);
    }

    bool shrinking = true;
    for (size_t k = 1; k < stats.level_max_diam2.size(); ++k)
        shrinking = shrinking && stats.level_max_diam2[k] < stats.level_max_diam2[k - 1];
    {
        std::ostringstream os;
        for (const auto& d : stats.level_max_diam2) os << rat_double(d) << " ";
        stats.report.add("level_diameters_strictly_decreasing", shrinking, os.str());
    }

    bool branch_shrinking = true;
    for (const auto& d : h.disks)
        if (d.parent >= 0 && !(d.diam2 < h.disks[d.parent].diam2)) branch_shrinking = false;
    stats.report.add("branch_diameters_strictly_decreasing", branch_shrinking);

    int min_mult = -1;
    bool mult_ok = true;
    for (size_t level = 0; level + 1 < h.levels.size(); ++level)
        for (int idx : h.levels[level]) {
            const auto& d = h.disks[idx];
            if (!d.children_complete) continue;
            int c = static_cast<int>(d.children.size());
            if (min_mult < 0 || c < min_mult) min_mult = c;
            if (c < 2) mult_ok = false;
        }
    stats.report.add("multiplicity_at_least_two", mult_ok,
                     "min children over complete disks: " + std::to_string(min_mult));

    bool disjoint = true;
    for (const auto& level : h.levels)
        for (size_t a = 0; a < level.size(); ++a)
            for (size_t b = a + 1; b < level.size(); ++b)
                for (const auto& pa : h.disks[level[a]].pieces)
                    for (const auto& pb : h.disks[level[b]].pieces)
                        if (!polygons_interior_disjoint(pa, pb)) disjoint = false;
    stats.report.add("same_level_disks_disjoint", disjoint);

    stats.report.add("containment", h.containment_ok && !h.budget_hit,
                     h.budget_hit ? "budget hit: partial hierarchy" : "");
    return stats;
}

}  // namespace plugflow
