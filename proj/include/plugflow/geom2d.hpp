#pragma once

#include "plugflow/rational.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace plugflow {

/// Exact point in a 2-dimensional section or base chart.
struct RPoint {
    Rat x, y;
    bool operator==(const RPoint& o) const { return x == o.x && y == o.y; }
    bool operator!=(const RPoint& o) const { return !(*this == o); }
};

/// Convex polygon with rational vertices, counter-clockwise, no repeats.
using RPolygon = std::vector<RPoint>;

inline Rat cross3(const RPoint& a, const RPoint& b, const RPoint& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Twice the signed area (positive for counter-clockwise orientation).
inline Rat area2(const RPolygon& p) {
    Rat s = 0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const RPoint& a = p[i];
        const RPoint& b = p[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return s;
}

inline RPolygon make_ccw(RPolygon p) {
    if (p.size() >= 3 && area2(p) < 0) std::reverse(p.begin(), p.end());
    return p;
}

/// Drops consecutive duplicate and collinear vertices.
inline RPolygon normalize_polygon(const RPolygon& p) {
    RPolygon q;
    for (const auto& v : p)
        if (q.empty() || !(q.back() == v)) q.push_back(v);
    while (q.size() >= 2 && q.front() == q.back()) q.pop_back();
    if (q.size() < 3) return q;
    RPolygon r;
    const size_t n = q.size();
    for (size_t i = 0; i < n; ++i) {
        const RPoint& prev = q[(i + n - 1) % n];
        const RPoint& cur = q[i];
        const RPoint& next = q[(i + 1) % n];
        if (cross3(prev, cur, next) != 0) r.push_back(cur);
    }
    return r;
}

/// Closed-halfplane membership test for convex `p` (vertices CCW).
inline bool polygon_contains(const RPolygon& p, const RPoint& q) {
    const size_t n = p.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i)
        if (cross3(p[i], p[(i + 1) % n], q) < 0) return false;
    return true;
}

/// Clips `p` against the closed halfplane a*x + b*y <= c (Sutherland-Hodgman step).
inline RPolygon clip_halfplane(const RPolygon& p, const Rat& a, const Rat& b, const Rat& c) {
    RPolygon out;
    const size_t n = p.size();
    if (n == 0) return out;
    auto val = [&](const RPoint& v) { return a * v.x + b * v.y - c; };
    for (size_t i = 0; i < n; ++i) {
        const RPoint& cur = p[i];
        const RPoint& nxt = p[(i + 1) % n];
        Rat vc = val(cur), vn = val(nxt);
        if (vc <= 0) out.push_back(cur);
        if ((vc < 0 && vn > 0) || (vc > 0 && vn < 0)) {
            Rat t = vc / (vc - vn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return normalize_polygon(out);
}

/// Exact intersection of two convex polygons (possibly empty or degenerate).
inline RPolygon clip_convex(const RPolygon& subject, const RPolygon& clip) {
    RPolygon out = subject;
    const size_t n = clip.size();
    for (size_t i = 0; i < n && !out.empty(); ++i) {
        const RPoint& a = clip[i];
        const RPoint& b = clip[(i + 1) % n];
        // inside of CCW edge (a,b): cross3(a,b,q) >= 0  <=>  -dy*x + dx*y <= dx*a.y - dy*a.x
        Rat dx = b.x - a.x, dy = b.y - a.y;
        out = clip_halfplane(out, dy, -dx, dy * a.x - dx * a.y);
    }
    return out;
}

inline bool polygons_interior_disjoint(const RPolygon& a, const RPolygon& b) {
    RPolygon c = clip_convex(a, b);
    return c.size() < 3 || area2(c) == 0;
}

/// Squared Euclidean diameter of a vertex set, exact.
inline Rat diameter2(const std::vector<RPoint>& pts) {
    Rat best = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            Rat dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            Rat d = dx * dx + dy * dy;
            if (d > best) best = d;
        }
    return best;
}

/// Affine map v -> M v + t with rational entries.
struct RAffine {
    Rat m00 = 1, m01 = 0, m10 = 0, m11 = 1, tx = 0, ty = 0;

    RPoint apply(const RPoint& p) const {
        return {m00 * p.x + m01 * p.y + tx, m10 * p.x + m11 * p.y + ty};
    }
    RPolygon apply(const RPolygon& p) const {
        RPolygon q;
        q.reserve(p.size());
        for (const auto& v : p) q.push_back(apply(v));
        return make_ccw(q);
    }
    Rat det() const { return m00 * m11 - m01 * m10; }
    RAffine inverse() const {
        Rat d = det();
        if (d == 0) throw std::domain_error("RAffine::inverse: singular map");
        RAffine r;
        r.m00 = m11 / d;
        r.m01 = -m01 / d;
        r.m10 = -m10 / d;
        r.m11 = m00 / d;
        r.tx = -(r.m00 * tx + r.m01 * ty);
        r.ty = -(r.m10 * tx + r.m11 * ty);
        return r;
    }
    bool operator==(const RAffine& o) const {
        return m00 == o.m00 && m01 == o.m01 && m10 == o.m10 && m11 == o.m11 && tx == o.tx &&
               ty == o.ty;
    }
};

}  // namespace plugflow
