#include "plugflow/plmap.hpp"

#include <algorithm>
#include <stdexcept>

namespace plugflow {

RPoint PLMap::apply(const RPoint& p) const {
    for (const auto& piece : pieces)
        if (polygon_contains(piece.region, p)) return piece.map.apply(p);
    throw std::domain_error("PLMap::apply: point outside domain (" + name + ")");
}

PLMap PLMap::inverse() const {
    PLMap inv;
    inv.dom_lo = dom_lo;
    inv.dom_hi = dom_hi;
    inv.name = name + "_inv";
    for (const auto& piece : pieces)
        inv.pieces.push_back({piece.map.apply(piece.region), piece.map.inverse()});
    return inv;
}

PLMapValidation validate_pl_map(const PLMap& f) {
    PLMapValidation v;
    Rat dom_area = 2 * (f.dom_hi.x - f.dom_lo.x) * (f.dom_hi.y - f.dom_lo.y);

    auto tiles = [&](bool image) {
        Rat total = 0;
        for (const auto& piece : f.pieces) {
            RPolygon poly = image ? piece.map.apply(piece.region) : piece.region;
            total += rat_abs(area2(poly));
        }
        if (total != dom_area) return false;
        for (size_t i = 0; i < f.pieces.size(); ++i)
            for (size_t j = i + 1; j < f.pieces.size(); ++j) {
                RPolygon a = image ? f.pieces[i].map.apply(f.pieces[i].region) : f.pieces[i].region;
                RPolygon b = image ? f.pieces[j].map.apply(f.pieces[j].region) : f.pieces[j].region;
                if (!polygons_interior_disjoint(a, b)) return false;
            }
        return true;
    };
    v.tiles_domain = tiles(false);
    v.image_tiles_domain = tiles(true);

    v.globally_continuous = true;
    for (size_t i = 0; i < f.pieces.size() && v.globally_continuous; ++i)
        for (size_t j = i + 1; j < f.pieces.size() && v.globally_continuous; ++j) {
            RPolygon shared = clip_convex(f.pieces[i].region, f.pieces[j].region);
            if (shared.size() < 2) continue;
            for (const auto& p : shared)
                if (!(f.pieces[i].map.apply(p) == f.pieces[j].map.apply(p)))
                    v.globally_continuous = false;
        }
    return v;
}

namespace {

RAffine fiber_map(const Rat& m_r, const Rat& m_z, const Rat& t) {
    RAffine a;
    a.m00 = 1;
    a.m01 = 0;
    a.m10 = m_r;
    a.m11 = m_z;
    a.ty = t;
    return a;
}

}  // namespace

PLMap build_symbolic_map() {
    PLMap f;
    f.name = "symbolic_four_ray";
    f.dom_lo = {-1, -3};
    f.dom_hi = {Rat(5, 2), Rat(3, 2)};

    // sectors cut by z = -r (r >= 0), z = -r (r <= 0), z = r/2 (r >= 0), z = 2r (r <= 0)
    RPolygon upper = {{0, 0}, {Rat(5, 2), Rat(5, 4)}, {Rat(5, 2), Rat(3, 2)}, {-1, Rat(3, 2)}, {-1, 1}};
    RPolygon lower = {{0, 0}, {-1, -2}, {-1, -3}, {Rat(5, 2), -3}, {Rat(5, 2), Rat(-5, 2)}};
    RPolygon right = {{0, 0}, {Rat(5, 2), Rat(-5, 2)}, {Rat(5, 2), Rat(5, 4)}};
    RPolygon left = {{0, 0}, {-1, 1}, {-1, -2}};

    f.pieces.push_back({make_ccw(upper), fiber_map(0, 2, Rat(-3, 2))});
    f.pieces.push_back({make_ccw(lower), fiber_map(0, Rat(1, 2), Rat(-3, 2))});
    f.pieces.push_back({make_ccw(right), fiber_map(Rat(1, 2), 1, Rat(-3, 2))});
    f.pieces.push_back({make_ccw(left), fiber_map(-1, 1, Rat(-3, 2))});
    return f;
}

PLMap build_collar_map() {
    PLMap f;
    f.name = "collar";
    f.dom_lo = {-1, -2};
    f.dom_hi = {1, 2};

    RPolygon trap_l = {{-1, -2}, {0, 0}, {0, 1}, {-1, 2}};
    RPolygon trap_r = {{0, 0}, {1, -2}, {1, 2}, {0, 1}};
    RPolygon tri_t = {{-1, 2}, {0, 1}, {1, 2}};
    RPolygon tri_b = {{-1, -2}, {1, -2}, {0, 0}};

    f.pieces.push_back({make_ccw(trap_l), fiber_map(-1, 1, -1)});
    f.pieces.push_back({make_ccw(trap_r), fiber_map(1, 1, -1)});
    f.pieces.push_back({make_ccw(tri_t), fiber_map(0, 2, -2)});
    f.pieces.push_back({make_ccw(tri_b), fiber_map(0, Rat(1, 2), -1)});
    return f;
}

PLMap build_identity_map(const RPoint& lo, const RPoint& hi) {
    PLMap f;
    f.name = "identity";
    f.dom_lo = lo;
    f.dom_hi = hi;
    RPolygon box = {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
    f.pieces.push_back({box, RAffine{}});
    return f;
}

MinZDisplacement min_z_displacement(const PLMap& f) {
    MinZDisplacement out;
    bool first = true;
    for (const auto& piece : f.pieces) {
        for (const auto& v : piece.region) {
            Rat disp = piece.map.apply(v).y - v.y;
            if (first || disp < out.value) {
                out.value = disp;
                out.vertices.clear();
                first = false;
            }
            if (disp == out.value) {
                bool seen = false;
                for (const auto& w : out.vertices) seen = seen || w == v;
                if (!seen) out.vertices.push_back(v);
            }
        }
    }
    // the minimal face is a single point iff no piece edge attains the
    // minimum at both endpoints
    out.unique_point = out.vertices.size() == 1;
    if (out.unique_point) {
        for (const auto& piece : f.pieces) {
            const size_t n = piece.region.size();
            for (size_t i = 0; i < n; ++i) {
                const RPoint& a = piece.region[i];
                const RPoint& b = piece.region[(i + 1) % n];
                Rat da = piece.map.apply(a).y - a.y;
                Rat db = piece.map.apply(b).y - b.y;
                if (da == out.value && db == out.value && !(a == b)) out.unique_point = false;
            }
        }
    }
    return out;
}

}  // namespace plugflow
