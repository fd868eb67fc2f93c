#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plugflow/insertion.hpp"

#include <cmath>
#include <random>

using namespace plugflow;

TEST_CASE("sigma_w3 values") {
    CylPoint p = sigma_w3(0, 2, SigmaComponent::D_s);
    CHECK(p.r == 0.0);
    CHECK(p.theta == 6.0);
    CHECK(p.z == 0.0);
    CHECK(p.half == Half::lower);  // lands on the circle T

    p = sigma_w3(0, 8, SigmaComponent::D_bar_s);
    CHECK(p.r == 0.0);
    CHECK(p.theta == 4.0);
    CHECK(p.z == 0.0);
    CHECK(p.half == Half::upper);  // lands on the mirror circle

    p = sigma_w3(1, 2, SigmaComponent::D_s);
    CHECK(p.r == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(p.z == 0.0);

    CHECK_THROWS_AS(sigma_w3(-1, 3, SigmaComponent::D_s), std::domain_error);
    CHECK_THROWS_AS(sigma_w3(0, 4, SigmaComponent::D_s), std::domain_error);
}

TEST_CASE("sigma_wn values for n = 4") {
    auto img = sigma_wn(0, {2, 2}, SigmaComponent::D_s, 4);
    REQUIRE(img.size() == 4);
    CHECK(img[0] == 0.0);
    CHECK(img[1] == 6.0);
    CHECK(img[2] == 6.0);
    CHECK(img[3] == 0.0);

    img = sigma_wn(0, {8, 8}, SigmaComponent::D_bar_s, 4);
    CHECK(img[0] == 0.0);
    CHECK(img[1] == 4.0);
    CHECK(img[2] == 4.0);
    CHECK(img[3] == 0.0);

    img = sigma_wn(1, {2, 2}, SigmaComponent::D_s, 4);
    CHECK(img[0] == doctest::Approx(0.75).epsilon(1e-15));

    CHECK_THROWS_AS(sigma_wn(0, {2}, SigmaComponent::D_s, 3), std::domain_error);
}

TEST_CASE("radius defect closed form") {
    CHECK(radius_defect_w3(0, 2, SigmaComponent::D_s) == 0.0);
    CHECK(radius_defect_w3(1, 2, SigmaComponent::D_s) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(radius_defect_w3(0, 3, SigmaComponent::D_s) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(radius_defect_w3(0, 8, SigmaComponent::D_bar_s) == 0.0);
}

TEST_CASE("pullback inverts sigma on its image") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ur(-0.9, 0.9), ut(1.2, 2.8);
    for (int i = 0; i < 200; ++i) {
        double r = ur(rng), th = ut(rng);
        CylPoint img;
        try {
            img = sigma_w3(r, th, SigmaComponent::D_s);
        } catch (const std::domain_error&) {
            continue;
        }
        auto q = sigma_w3_pullback(img.r, img.z, SigmaComponent::D_s);
        REQUIRE(q.has_value());
        CHECK(std::abs(q->r - r) < 1e-12);
        CHECK(std::abs(q->theta - th) < 1e-12);
    }
    CHECK_FALSE(sigma_w3_pullback(0.9, 0.0, SigmaComponent::D_s).has_value());
    CHECK_FALSE(sigma_w3_pullback(0.0, 1.5, SigmaComponent::D_s).has_value());
}

namespace {

TransitionHistoryD history_of(const std::vector<TransitionKind>& kinds) {
    TransitionHistoryD h;
    for (const auto& k : kinds) h.events.push_back({k, {}, 0.0, 0, -1, {}, {}});
    return h;
}

}  // namespace

TEST_CASE("matching follows the inductive rule") {
    using K = TransitionKind;
    TransitionHistoryD h = history_of({K::external_entry, K::internal_entry, K::internal_entry,
                                       K::internal_exit, K::internal_exit, K::external_exit});
    match_transitions(h);
    CHECK(h.matching == std::vector<int>{5, 4, 3, 2, 1, 0});
    CHECK(matching_is_noncrossing(h));

    TransitionHistoryD open = history_of(
        {K::external_entry, K::internal_entry, K::internal_entry, K::internal_entry});
    match_transitions(open);
    for (int m : open.matching) CHECK(m == -1);

    TransitionHistoryD empty;
    match_transitions(empty);
    CHECK(empty.matching.empty());

    TransitionHistoryD bad = history_of({K::internal_exit});
    CHECK_THROWS_AS(match_transitions(bad), std::invalid_argument);
}

TEST_CASE("follow_leaf on a leaf that misses the insertion") {
    WilsonPlugConfig plug;
    Budgets b;
    // theta = 0 start at large radius crosses theta = 6 at |z| close to 1,
    // outside the image of sigma
    auto h = follow_leaf(plug, {0.95, 0.45}, b);
    CHECK(h.classification == HistoryClass::finite);
    REQUIRE(h.events.size() >= 2);
    CHECK(h.events.front().kind == TransitionKind::external_entry);
    CHECK(h.events.back().kind == TransitionKind::external_exit);
    if (h.events.size() == 2) CHECK(h.matching == std::vector<int>{1, 0});
}

TEST_CASE("follow_leaf from the stopped point (0,2)") {
    WilsonPlugConfig plug;
    Budgets b;
    b.time_budget = 2000;
    auto h = follow_leaf(plug, {0.0, 2.0}, b);
    CHECK(h.classification == HistoryClass::budget_exhausted);
    int entries = 0;
    bool lower_comp = false, upper_comp = false;
    for (const auto& e : h.events)
        if (e.kind == TransitionKind::internal_entry) {
            ++entries;
            lower_comp = lower_comp || e.component == static_cast<int>(SigmaComponent::D_s);
            upper_comp = upper_comp || e.component == static_cast<int>(SigmaComponent::D_bar_s);
        }
    CHECK(entries >= 5);  // the interruptions keep coming
    CHECK(lower_comp);
    CHECK(upper_comp);  // nested leaves reach the mirror-half component too
    // interrupting radii strictly exceed the interrupted radius 0
    for (const auto& e : h.events)
        if (e.kind == TransitionKind::internal_entry) CHECK(e.base_point.r > e.leaf_radius);
}

TEST_CASE("finite histories pair first entry with last exit") {
    WilsonPlugConfig plug;
    Budgets b;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ur(0.1, 1.0), ut(0.0, 10.0);
    int checked = 0;
    while (checked < 12) {
        BasePointD q{ur(rng), ut(rng)};
        auto h = follow_leaf(plug, q, b);
        if (h.classification != HistoryClass::finite) continue;
        ++checked;
        SuiteReport rep = verify_matching_lemma(h, 1e-6);
        CHECK(rep.pass);
        // exit base point equals the entry base point (matched ends)
        CHECK(std::abs(h.events.back().base_point.r - q.r) < 1e-6);
    }
}

TEST_CASE("perturbed history is reported as a violation") {
    WilsonPlugConfig plug;
    Budgets b;
    // pick a start whose history has internal pairs
    auto h = follow_leaf(plug, {0.0, 2.0}, b);
    bool found = false;
    for (auto& e : h.events)
        if (e.kind == TransitionKind::internal_exit) {
            e.base_point.r += 1e-3;  // corrupt the observed exit
            found = true;
            break;
        }
    REQUIRE(found);
    SuiteReport rep = verify_matching_lemma(h, 1e-6);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("aperiodicity: inserted plug clean, uninserted detects T") {
    Budgets b;
    b.time_budget = 4000;

    WilsonPlugConfig inserted;
    SuiteReport rep = verify_aperiodicity(inserted, 10, b);
    CHECK(rep.pass);

    WilsonPlugConfig plain;
    plain.inserted = false;
    SuiteReport neg = verify_aperiodicity(plain, 10, b);
    CHECK_FALSE(neg.pass);
    bool circle_flagged = false;
    for (const auto& c : neg.checks)
        if (c.name == "no_recurrence_candidates" && !c.pass) circle_flagged = true;
    CHECK(circle_flagged);
}

TEST_CASE("stack height bound") {
    Budgets b;
    b.time_budget = 3000;
    StackBoundResult res = stack_height_bound(0.1, 16, b);
    CHECK(res.C > 0);
    CHECK(res.C <= 0.1 * 0.1 / 4.0 + 1e-3);  // the minimum sits near the eps circle
    CHECK(res.observed_max <= res.bound);
    CHECK(res.report.pass);

    // away from the core the defect floor is larger and stacks stay short
    StackBoundResult far = stack_height_bound(0.5, 10, b);
    CHECK(far.observed_max <= far.bound);
    CHECK(far.observed_max <= 6);
}

TEST_CASE("content stopping band") {
    Budgets b;
    b.max_transitions = 600;
    b.time_budget = 1e6;
    SuiteReport rep = verify_content_stopping({-1.0 / 40}, 4, b, 2);
    CHECK(rep.pass);

    // sampled slope bound at the worked point
    double r = -0.03, z = 0.1;
    CHECK(r <= -2.0 * z * z);
    CHECK(r * r + std::pow(z, 6) <= std::sqrt(2.0) * r * r);

    CHECK_THROWS_AS(verify_content_stopping({-0.5}, 4, b, 2), std::domain_error);
}
