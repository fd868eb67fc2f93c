#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plugflow/plplug.hpp"
#include "plugflow/plmap.hpp"
#include "plugflow/suspension.hpp"

#include <random>

using namespace plugflow;

TEST_CASE("symbolic map pieces") {
    PLMap f = build_symbolic_map();
    RPoint img = f.apply({0, 0});
    CHECK(img.x == 0);
    CHECK(img.y == Rat(-3, 2));

    // upper sector doubles, lower halves
    CHECK(f.apply({0, 1}).y == Rat(1, 2));
    CHECK(f.apply({0, -1}).y == -2);

    // side pieces carry the unique continuous affine maps
    bool right_found = false, left_found = false;
    for (const auto& piece : f.pieces) {
        if (polygon_contains(piece.region, {1, 0}) && piece.map.m10 == Rat(1, 2)) {
            CHECK(piece.map.m11 == 1);
            CHECK(piece.map.ty == Rat(-3, 2));
            right_found = true;
        }
        if (polygon_contains(piece.region, {Rat(-1, 2), 0}) && piece.map.m10 == -1) {
            CHECK(piece.map.m11 == 1);
            CHECK(piece.map.ty == Rat(-3, 2));
            left_found = true;
        }
    }
    CHECK(right_found);
    CHECK(left_found);

    PLMapValidation v = validate_pl_map(f);
    CHECK(v.tiles_domain);
    CHECK(v.globally_continuous);
    CHECK(v.image_tiles_domain);
}

TEST_CASE("symbolic map minimum displacement") {
    MinZDisplacement d = min_z_displacement(build_symbolic_map());
    CHECK(d.value == Rat(-3, 2));
    REQUIRE(d.vertices.size() == 1);
    CHECK(d.vertices[0] == RPoint{0, 0});
    CHECK(d.unique_point);
}

TEST_CASE("collar map constraints") {
    PLMap f = build_collar_map();
    CHECK(f.apply({0, 0}) == RPoint{0, -1});
    CHECK(f.apply({0, 1}) == RPoint{0, 0});
    CHECK(f.apply({0, Rat(1, 2)}) == RPoint{0, Rat(-1, 2)});

    // identity on the boundary of [-1,1] x [-2,2]
    for (int k = -4; k <= 4; ++k) {
        Rat t(k, 2);
        CHECK(f.apply({-1, t}) == RPoint{-1, t});
        CHECK(f.apply({1, t}) == RPoint{1, t});
    }
    for (int k = -2; k <= 2; ++k) {
        Rat t(k, 2);
        CHECK(f.apply({t, 2}) == RPoint{t, 2});
        CHECK(f.apply({t, -2}) == RPoint{t, -2});
    }

    PLMapValidation v = validate_pl_map(f);
    CHECK(v.tiles_domain);
    CHECK(v.globally_continuous);
    CHECK(v.image_tiles_domain);

    MinZDisplacement d = min_z_displacement(f);
    CHECK(d.value == -1);
    CHECK_FALSE(d.unique_point);  // attained along the whole central segment
    bool has00 = false, has01 = false;
    for (const auto& p : d.vertices) {
        has00 = has00 || p == RPoint{0, 0};
        has01 = has01 || p == RPoint{0, 1};
    }
    CHECK(has00);
    CHECK(has01);

    MinZDisplacement id = min_z_displacement(build_identity_map({-1, -2}, {1, 2}));
    CHECK(id.value == 0);
    CHECK_FALSE(id.unique_point);
}

TEST_CASE("map inverse round-trips") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> num(-24, 24);
    for (const PLMap& f : {build_symbolic_map(), build_collar_map()}) {
        PLMap inv = f.inverse();
        for (int i = 0; i < 60; ++i) {
            Rat x = f.dom_lo.x + (f.dom_hi.x - f.dom_lo.x) * Rat(num(rng) + 24, 48);
            Rat y = f.dom_lo.y + (f.dom_hi.y - f.dom_lo.y) * Rat(num(rng) + 24, 48);
            RPoint p{x, y};
            CHECK(inv.apply(f.apply(p)) == p);
        }
    }
}

TEST_CASE("suspension circles of the symbolic flow") {
    SlantedSuspension susp = suspend(build_symbolic_map(), Rat(3, 2), 1);
    PLLeafTrace tr = trace_pl_leaf(susp, {0, 0, Rat(-3, 2)}, 50);
    CHECK(tr.termination == Termination::closed_up);
    CHECK(tr.theta_length == 1);

    // nearby radii never close
    for (int k = 1; k <= 8; ++k) {
        PLLeafTrace t2 = trace_pl_leaf(susp, {Rat(k, 8), 0, Rat(-3, 2)}, 200);
        CHECK(t2.termination != Termination::closed_up);
    }
}

TEST_CASE("twenty-fold collar suspension has the annulus of circles") {
    SlantedSuspension susp = suspend(build_collar_map(), 1, 20);
    for (int k = 0; k <= 10; ++k) {
        PLLeafTrace tr = trace_pl_leaf(susp, {0, 0, Rat(-k, 10)}, 500);
        CHECK(tr.termination == Termination::closed_up);
        CHECK(tr.theta_length == 20);
    }
    // a leaf off the core drifts upward and leaves through z = 2
    PLLeafTrace drift = trace_pl_leaf(susp, {Rat(1, 2), 0, 0}, 500);
    CHECK(drift.termination == Termination::exited_boundary);
    CHECK(drift.final_state.z == 2);
    CHECK(drift.final_state.theta == 3);

    for (int k = 1; k <= 10; ++k)
        for (int sgn : {-1, 1}) {
            PLLeafTrace t2 = trace_pl_leaf(susp, {Rat(sgn * k, 20), 0, 0}, 200);
            CHECK(t2.termination != Termination::closed_up);
        }
}

TEST_CASE("identity suspension is a trivial flow") {
    SlantedSuspension susp = suspend(build_identity_map({-1, -2}, {1, 2}), Rat(1, 2), 1);
    PLLeafTrace tr = trace_pl_leaf(susp, {Rat(1, 3), Rat(1, 4), 0}, 100);
    CHECK(tr.termination == Termination::exited_boundary);
}

TEST_CASE("backward tracing recovers the start exactly") {
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> num(0, 63);
    SlantedSuspension susp = suspend(build_symbolic_map(), Rat(3, 2), 1);
    int done = 0;
    while (done < 20) {
        Rat r = Rat(num(rng), 63) * Rat(7, 2) - 1;
        Rat theta(num(rng), 64);
        Rat z = Rat(num(rng), 63) * Rat(9, 2) - 3;
        PLState start{r, theta, z};
        PLLeafTrace fwd = trace_pl_leaf(susp, start, 25);
        if (fwd.termination == Termination::closed_up) continue;
        ++done;
        PLLeafTrace back =
            trace_pl_leaf_backward(susp, fwd.final_state, fwd.crossings + 2, &start);
        CHECK(back.termination == Termination::hit_event);
        CHECK(back.final_state.r == start.r);
        CHECK(back.final_state.theta == start.theta);
        CHECK(back.final_state.z == start.z);
    }
}

TEST_CASE("sigma_v formulas") {
    RPoint p = sigma_v_fiber(0, Rat(1, 3));
    CHECK(p == RPoint{0, 0});  // the point of T in the theta = 1 section

    p = sigma_v_fiber(1, Rat(5, 12));
    CHECK(p == RPoint{0, Rat(-1, 2)});

    p = sigma_v_fiber(1, Rat(1, 2));
    CHECK(p == RPoint{Rat(1, 2), Rat(-1, 4)});

    CHECK_THROWS_AS(sigma_v_fiber(1, Rat(2, 3)), std::domain_error);
    CHECK_THROWS_AS(sigma_v_fiber(-1, Rat(1, 3)), std::domain_error);
}

TEST_CASE("sigma_v radius inequality and exact inverse") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> num(0, 480);
    int samples = 0;
    while (samples < 300) {
        Rat r(num(rng), 192);  // up to 5/2
        Rat span = r / 4 - r / 12;
        Rat theta = Rat(1, 3) + r / 12 + span * Rat(num(rng), 480);
        if (!v9_in_B(r, theta)) continue;
        ++samples;
        RPoint img = sigma_v_fiber(r, theta);
        CHECK(img.x <= r / 2);
        if (r > 0) CHECK(img.x < r);
        auto back = v9_pullback(img.x, img.y);
        REQUIRE(back.has_value());
        CHECK(back->r == r);
        CHECK(back->theta == theta);
    }
    // the image region is the exact rectangle
    CHECK(polygon_contains(v9_image_rectangle(), {Rat(5, 4), Rat(5, 8)}));
    CHECK_FALSE(v9_pullback(Rat(13, 10), 0).has_value());
    CHECK_FALSE(v9_pullback(0, Rat(-27, 20)).has_value());
}

TEST_CASE("double cover components") {
    PLPlug plug = build_v9_plug(true);
    REQUIRE(plug.components.size() == 2);
    CHECK(plug.components[0].half == Half::lower);
    CHECK(plug.components[0].seam == 1);
    CHECK(plug.components[1].half == Half::upper);
    CHECK(plug.components[1].seam == 0);

    // the circle T meets Im(sigma_1): its seam fiber is (0,0)
    auto q1 = plug.components[0].pullback(0, 0);
    REQUIRE(q1.has_value());
    CHECK(q1->r == 0);
    CHECK(q1->theta == Rat(1, 3));

    // the mirror circle meets Im(sigma_2): approach fiber (0, 3/2)
    auto q2 = plug.components[1].pullback(0, Rat(3, 2));
    REQUIRE(q2.has_value());
    CHECK(q2->r == 0);
    CHECK(q2->theta == Rat(4, 3));  // deck translate of (0, 1/3)

    // images live on different seam sections, hence disjoint
    CHECK((plug.components[0].half != plug.components[1].half ||
           plug.components[0].seam != plug.components[1].seam));
    CHECK(!plug.components[1].image_pieces.empty());
}

TEST_CASE("interior circles close exactly and the insertion breaks them") {
    // single cover: T has theta-length 1
    PLPlug v_plain = build_v9_plug(false, false);
    Budgets b;
    b.crossing_budget = 400;
    auto t1 = trace_plug_interior(v_plain, {Half::lower, 0, 0, Rat(-3, 2)}, b);
    CHECK(t1.closed);
    CHECK(t1.period == 1);

    // double cover: both lifted circles have theta-length 2
    PLPlug vd_plain = build_v9_plug(true, false);
    auto t2 = trace_plug_interior(vd_plain, {Half::lower, 0, 1, Rat(-3, 2)}, b);
    CHECK(t2.closed);
    CHECK(t2.period == 2);
    auto t3 = trace_plug_interior(vd_plain, {Half::upper, 0, 1, 0}, b);
    CHECK(t3.closed);
    CHECK(t3.period == 2);

    // with the insertion active the circles are interrupted instead
    PLPlug vd = build_v9_plug(true, true);
    Budgets small = b;
    small.max_transitions = 40;
    auto t4 = trace_plug_interior(vd, {Half::lower, 0, 1, Rat(-3, 2)}, small);
    CHECK_FALSE(t4.closed);
    bool entered = false;
    for (const auto& e : t4.history.events)
        entered = entered || e.kind == TransitionKind::internal_entry;
    CHECK(entered);
    auto t5 = trace_plug_interior(vd, {Half::upper, 0, 1, 0}, small);
    CHECK_FALSE(t5.closed);
}

TEST_CASE("the leaf from (1, 5/12) reproduces the derived transition data") {
    PLPlug plug = build_v9_plug(true);
    Budgets b;
    auto h = follow_leaf_pl(plug, {1, Rat(5, 12)}, b);
    REQUIRE(h.classification == HistoryClass::finite);

    std::vector<TransitionEventT<Rat>> entries;
    for (const auto& e : h.events)
        if (e.kind == TransitionKind::internal_entry) entries.push_back(e);
    REQUIRE(entries.size() == 4);

    CHECK(entries[0].component == 1);
    CHECK(entries[0].base_point.r == 2);
    CHECK(entries[0].base_point.theta == Rat(191, 288));

    CHECK(entries[1].component == 1);
    CHECK(entries[1].base_point.r == 2);
    CHECK(entries[1].base_point.theta == Rat(223, 288));

    CHECK(entries[2].component == 2);
    CHECK(entries[2].base_point.r == 2);
    CHECK(entries[2].base_point.theta == Rat(55, 32));

    CHECK(entries[3].component == 2);
    CHECK(entries[3].base_point.r == Rat(17, 8));
    CHECK(entries[3].base_point.theta == Rat(467, 288));

    // matched ends, exactly
    const auto& exit = h.events.back();
    CHECK(exit.kind == TransitionKind::external_exit);
    CHECK(exit.base_point.r == 1);
    CHECK(rat_mod(exit.base_point.theta - Rat(5, 12), Rat(2)) == 0);

    // every interrupting radius strictly exceeds the interrupted one
    for (const auto& e : entries) CHECK(e.base_point.r > e.leaf_radius);

    CHECK(matching_is_noncrossing(h));
    for (int m : h.matching) CHECK(m >= 0);
}

TEST_CASE("pl matched ends are exact across the mirror") {
    PLPlug plug = build_v9_plug(false);
    Budgets b;
    for (int k = 0; k < 12; ++k) {
        BasePointR q{Rat(2 * k - 11, 12), Rat(k, 16)};
        auto h = follow_leaf_pl(plug, q, b);
        if (h.classification != HistoryClass::finite) continue;
        const auto& exit = h.events.back();
        CHECK(exit.base_point.r == q.r);
        CHECK(rat_mod(exit.base_point.theta - q.theta, Rat(1)) == 0);
    }
}

TEST_CASE("pl wilson insertion construction") {
    SuiteReport rep = verify_pl_wilson_sigma();
    CHECK(rep.pass);

    RPoint mid = pl_wilson_sigma_fiber(0, Rat(19, 2), 1);
    CHECK(mid == RPoint{0, Rat(-1, 2)});  // midpoint of the broken segment
    RPoint end = pl_wilson_sigma_fiber(0, 9, 1);
    CHECK(end == RPoint{0, -1});
    RPoint top = pl_wilson_sigma_fiber(0, 14, 2);
    CHECK(top == RPoint{0, 0});

    CHECK(pl_wilson_defect(0, Rat(19, 2), 1) == 0);
    CHECK(pl_wilson_defect(Rat(1, 2), Rat(19, 2), 1) == Rat(1, 8));
    CHECK(pl_wilson_defect(0, Rat(91, 10), 2) > 0);

    // any off-core point maps strictly inward
    for (int k = 1; k <= 8; ++k) {
        Rat r(k, 8);
        CHECK(pl_wilson_sigma_fiber(r, Rat(19, 2), 1).x < r);
        if (k <= 6) CHECK(pl_wilson_sigma_fiber(-r, Rat(19, 2), 1).x < -r);
    }
    // beyond r = -4/5 the image would leave the support
    CHECK_THROWS_AS(pl_wilson_sigma_fiber(Rat(-7, 8), Rat(19, 2), 1), std::domain_error);
}

TEST_CASE("pl wilson circles close when plain and break when inserted") {
    PLPlug plain = build_pl_wilson_plug(false);
    Budgets b;
    b.crossing_budget = 2000;
    auto t = trace_plug_interior(plain, {Half::lower, 0, 0, Rat(-1, 2)}, b);
    CHECK(t.closed);
    CHECK(t.period == 20);
    auto tu = trace_plug_interior(plain, {Half::upper, 0, 20, Rat(-1, 2)}, b);
    CHECK(tu.closed);
    CHECK(tu.period == 20);

    PLPlug plug = build_pl_wilson_plug(true);
    Budgets small;
    small.max_transitions = 30;
    small.crossing_budget = 4000;
    auto tb = trace_plug_interior(plug, {Half::lower, 0, 0, Rat(-1, 2)}, small);
    CHECK_FALSE(tb.closed);
    int entries = 0, depth = 0;
    for (const auto& e : tb.history.events)
        if (e.kind == TransitionKind::internal_entry) {
            ++entries;
            depth = std::max(depth, e.stack_depth_after);
        }
    CHECK(entries >= 3);
    CHECK(depth >= 3);  // the stopped core recurses on itself
}
