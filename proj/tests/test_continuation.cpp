#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twistmap/continuation.hpp"
#include "twistmap/errors.hpp"
#include "twistmap/oracles.hpp"

using namespace twistmap;
using std::numbers::pi;

namespace {

const CellParams kRef(pi / 6, pi / 4);

double tilde(const OrbitParam& p) { return p.alpha_tilde(); }

double root_tol(double L) { return 1e-10 * (1.0 + 2.0 * L); }

}  // namespace

TEST_CASE("fold locations") {
    CHECK(has_fold(kRef, {BranchKind::Cl, 0}));
    CHECK(has_fold(kRef, {BranchKind::A, 1}));
    CHECK_FALSE(has_fold(kRef, {BranchKind::A, 0}));
    CHECK_FALSE(has_fold(kRef, {BranchKind::Cr, 0}));
    CHECK_FALSE(has_fold(kRef, {BranchKind::D, 2}));
    CHECK(has_fold(mirror(kRef), {BranchKind::Cr, 0}));
    CHECK_FALSE(has_fold(mirror(kRef), {BranchKind::Cl, 0}));
    CHECK_FALSE(has_fold(CellParams(0.6, 0.6), {BranchKind::Cl, 0}));
}

TEST_CASE("saddle-node of Cl with k = 0") {
    const SaddleNode sn = find_saddle_node(kRef, {BranchKind::Cl, 0});
    const CriticalOrbits c = critical_times(kRef, 0);
    CHECK(sn.L_sn < c.T_upper / 2);
    CHECK(sn.L_sn < 1.6748);
    CHECK(sn.T_min == doctest::Approx(2.0 * sn.L_sn).epsilon(1e-15));
    // strict minimum on either side
    const double t = tilde(sn.param_at_min);
    for (double d : {1e-3, 1e-2}) {
        for (double s : {-1.0, 1.0}) {
            const OrbitParam q = OrbitParam::closed(std::asin(std::sqrt(t + s * d)));
            CHECK(branch_time(kRef, {BranchKind::Cl, 0}, q) > sn.T_min);
        }
    }
    CHECK(std::abs(branch_slope(kRef, {BranchKind::Cl, 0}, sn.param_at_min)) < 1e-6);
}

TEST_CASE("saddle-node of A with k = 1") {
    const SaddleNode sn = find_saddle_node(kRef, {BranchKind::A, 1});
    CHECK(sn.L_sn < critical_times(kRef, 1).T_star / 2);
    CHECK(sn.L_sn > critical_times(kRef, 0).T_upper / 2);
}

TEST_CASE("saddle-node approaches the symmetric pitchfork") {
    const double phi1 = pi / 4;
    double prev_gap = std::numeric_limits<double>::infinity();
    // the gap closes roughly like sqrt(delta)
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const CellParams cell(phi1 - delta, phi1);
        const double gap = critical_times(cell, 0).T_upper / 2 - find_saddle_node(cell, {BranchKind::Cl, 0}).L_sn;
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("saddle-node on a monotone branch") {
    CHECK_THROWS_AS(find_saddle_node(kRef, {BranchKind::Cr, 0}), DomainError);
    CHECK_THROWS_AS(find_saddle_node(kRef, {BranchKind::A, 0}), DomainError);
    CHECK_THROWS_AS(find_saddle_node(kRef, {BranchKind::D, 1}), DomainError);
    CHECK_THROWS_AS(find_saddle_node(CellParams(0.6, 0.6), {BranchKind::Cl, 0}), DomainError);
}

TEST_CASE("solve at L on the folded branch") {
    const BranchId cl{BranchKind::Cl, 0};
    const SaddleNode sn = find_saddle_node(kRef, cl);
    const double L_upper = critical_times(kRef, 0).T_upper / 2;
    const double L = 0.5 * (sn.L_sn + L_upper);
    const auto roots = solve_at_L(kRef, cl, L);
    REQUIRE(roots.size() == 2);
    CHECK(tilde(roots[0]) < tilde(sn.param_at_min));
    CHECK(tilde(roots[1]) > tilde(sn.param_at_min));
    for (const auto& r : roots)
        CHECK(std::abs(branch_time(kRef, cl, r) - 2.0 * L) <= root_tol(L));
    CHECK(solve_at_L(kRef, cl, sn.L_sn - 1e-3).empty());
    CHECK(solve_at_L(kRef, cl, sn.L_sn).size() == 1);
    // above gamma^* only the far-side root survives
    CHECK(solve_at_L(kRef, cl, L_upper + 0.1).size() == 1);
    CHECK(solve_at_L(kRef, cl, L_upper).size() == 1);
}

TEST_CASE("solve at L on monotone branches") {
    const CriticalOrbits c = critical_times(kRef, 0);
    for (double L : {c.T_star / 2 + 1e-3, 1.5, 3.0, 6.0}) {
        const auto roots = solve_at_L(kRef, {BranchKind::Cr, 0}, L);
        REQUIRE(roots.size() == 1);
        CHECK(std::abs(branch_time(kRef, {BranchKind::Cr, 0}, roots[0]) - 2.0 * L) <= root_tol(L));
    }
    CHECK(solve_at_L(kRef, {BranchKind::Cr, 0}, c.T_star / 2 - 1e-3).empty());
    for (double L : {0.05, 0.3, 0.9}) {
        const auto roots = solve_at_L(kRef, {BranchKind::A, 0}, L);
        REQUIRE(roots.size() == 1);
        CHECK(std::abs(branch_time(kRef, {BranchKind::A, 0}, roots[0]) - 2.0 * L) <= root_tol(L));
    }
    CHECK_FALSE(solve_at_L(kRef, {BranchKind::A, 0}, 0.05)[0].is_closed());
    CHECK(solve_at_L(kRef, {BranchKind::A, 0}, c.T_star / 2 + 1e-3).empty());
    CHECK(solve_at_L(kRef, {BranchKind::D, 0}, c.T_upper / 2 - 1e-3).empty());
    CHECK(solve_at_L(kRef, {BranchKind::D, 0}, c.T_upper / 2 + 1e-3).size() == 1);
    CHECK_THROWS_AS(solve_at_L(kRef, {BranchKind::D, 0}, 0.0), DomainError);
}

TEST_CASE("solve at L inverts branch time") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> tilde_dist(std::pow(std::sin(kRef.phi_max()), 2) + 1e-4, 0.999);
    for (auto kind : {BranchKind::A, BranchKind::Cr, BranchKind::Cl, BranchKind::D}) {
        for (int k = 0; k < 2; ++k) {
            const BranchId id{kind, k};
            for (int i = 0; i < 8; ++i) {
                const OrbitParam p = OrbitParam::closed(std::asin(std::sqrt(tilde_dist(rng))));
                if (has_fold(kRef, id)) {
                    const double t_sn = tilde(find_saddle_node(kRef, id).param_at_min);
                    if (std::abs(p.alpha_tilde() - t_sn) < 1e-2)
                        continue;
                }
                const double L = 0.5 * branch_time(kRef, id, p);
                const auto roots = solve_at_L(kRef, id, L);
                double best = std::numeric_limits<double>::infinity();
                for (const auto& r : roots)
                    best = std::min(best, std::abs(r.alpha() - p.alpha()));
                CHECK(best < 1e-8);
            }
        }
    }
}

TEST_CASE("tracing the reference branches") {
    const CriticalOrbits c = critical_times(kRef, 0);
    const auto a0 = trace_branch(kRef, {BranchKind::A, 0}, 80, 4.0);
    REQUIRE(a0.size() == 80);
    CHECK(a0.front().L == doctest::Approx(c.T_star / 2).epsilon(1e-14));
    CHECK(a0.back().L < 0.2);
    CHECK_FALSE(a0.back().param.is_closed());

    const auto d0 = trace_branch(kRef, {BranchKind::D, 0}, 80, 4.0);
    REQUIRE(!d0.empty());
    for (std::size_t i = 1; i < d0.size(); ++i)
        CHECK(d0[i].L > c.T_upper / 2);

    const auto cl = trace_branch(kRef, {BranchKind::Cl, 0}, 80, 4.0);
    bool dipped = false;
    bool rose = false;
    for (const auto& p : cl) {
        dipped = dipped || p.L < c.T_upper / 2 - 1e-3;
        rose = rose || (dipped && p.L > c.T_upper / 2 + 1e-3);
    }
    CHECK(dipped);
    CHECK(rose);
    for (const auto& p : cl)
        CHECK(p.L <= 4.0 * (1.0 + 1e-12));
    CHECK(cl.back().L == doctest::Approx(4.0).epsilon(1e-9));

    CHECK(trace_branch(kRef, {BranchKind::D, 3}, 50, 4.0).empty());
    CHECK_THROWS_AS(trace_branch(kRef, {BranchKind::D, 0}, 1, 4.0), DomainError);
    CHECK_THROWS_AS(trace_branch(kRef, {BranchKind::D, 0}, 10, -1.0), DomainError);
}

TEST_CASE("traced points are consistent") {
    const Diagram d = build_diagram(kRef, 1, 5.0, 60);
    for (const auto& b : d.branches) {
        for (const auto& p : b.points) {
            CHECK(p.branch == b.branch);
            CHECK(std::abs(branch_time(kRef, b.branch, p.param) - 2.0 * p.L) <= 1e-8 * 2.0 * p.L);
            CHECK(p.lambda == doctest::Approx(8.0 * p.L * p.L).epsilon(1e-15));
            CHECK(shoot_check(kRef, p) <= kShootTolerance);
        }
        for (std::size_t i = 1; i < b.points.size(); ++i)
            CHECK(b.points[i].param.energy() > b.points[i - 1].param.energy());
    }
}

TEST_CASE("reference diagram structure") {
    const Diagram d = build_diagram(kRef, 0, 4.0, 50);
    CHECK(d.branches.size() == 4);
    CHECK(d.criticals.size() == 1);
    REQUIRE(d.saddles.size() == 1);
    CHECK(d.saddles[0].branch == BranchId{BranchKind::Cl, 0});
    CHECK(d.symmetric_overlay == nullptr);

    const Diagram d2 = build_diagram(kRef, 2, 8.0, 30, true);
    CHECK(d2.branches.size() == 12);
    CHECK(d2.criticals.size() == 3);
    CHECK(d2.saddles.size() == 5);
    for (std::size_t i = 1; i < d2.branches.size(); ++i)
        CHECK(d2.branches[i - 1].branch < d2.branches[i].branch);
    REQUIRE(d2.symmetric_overlay != nullptr);
    CHECK(d2.symmetric_overlay->cell.symmetric());
    // A_k still folds when phi0 = phi1; only Cl loses its fold
    for (const auto& sn : d2.symmetric_overlay->saddles)
        CHECK(sn.branch.kind == BranchKind::A);
    CHECK(d2.symmetric_overlay->saddles.size() == 2);

    CHECK_THROWS_AS(build_diagram(kRef, -1, 4.0, 50), DomainError);
}

TEST_CASE("k = 0 branches tile the half-length axis") {
    const CriticalOrbits c = critical_times(kRef, 0);
    const double L_sn = find_saddle_node(kRef, {BranchKind::Cl, 0}).L_sn;
    const Diagram d = build_diagram(kRef, 0, 4.0, 120);
    for (const auto& b : d.branches) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& p : b.points) {
            lo = std::min(lo, p.L);
            hi = std::max(hi, p.L);
        }
        switch (b.branch.kind) {
        case BranchKind::A:
            CHECK(hi == doctest::Approx(c.T_star / 2).epsilon(1e-14));
            CHECK(lo < 0.1);
            break;
        case BranchKind::Cr:
            CHECK(lo == doctest::Approx(c.T_star / 2).epsilon(1e-14));
            CHECK(hi == doctest::Approx(4.0).epsilon(1e-9));
            break;
        case BranchKind::Cl:
            CHECK(lo >= L_sn - 1e-12);
            CHECK(lo < L_sn + 1e-3);
            break;
        case BranchKind::D:
            CHECK(lo == doctest::Approx(c.T_upper / 2).epsilon(1e-14));
            break;
        }
    }
}

TEST_CASE("mirrored cell gives the mirrored diagram") {
    const Diagram a = build_diagram(kRef, 1, 4.0, 40);
    const Diagram b = build_diagram(mirror(kRef), 1, 4.0, 40);
    const Diagram m = mirror(a);
    REQUIRE(b.branches.size() == m.branches.size());
    for (std::size_t i = 0; i < b.branches.size(); ++i) {
        CHECK(b.branches[i].branch == m.branches[i].branch);
        REQUIRE(b.branches[i].points.size() == m.branches[i].points.size());
        for (std::size_t j = 0; j < b.branches[i].points.size(); ++j) {
            const auto& p = b.branches[i].points[j];
            const auto& q = m.branches[i].points[j];
            CHECK(std::abs(p.L - q.L) < 1e-12);
            CHECK(std::abs(p.y_minus - q.y_minus) < 1e-12);
            CHECK(std::abs(p.y_plus - q.y_plus) < 1e-12);
            CHECK(p.stability == q.stability);
        }
    }
    const Diagram back = mirror(mirror(a));
    for (std::size_t i = 0; i < a.branches.size(); ++i)
        for (std::size_t j = 0; j < a.branches[i].points.size(); ++j) {
            CHECK(back.branches[i].points[j].y_minus == a.branches[i].points[j].y_minus);
            CHECK(back.branches[i].points[j].L == a.branches[i].points[j].L);
        }
    REQUIRE(b.saddles.size() == 3);
    CHECK(b.saddles[0].branch == BranchId{BranchKind::A, 1});
    CHECK(b.saddles[1].branch == BranchId{BranchKind::Cr, 0});
    CHECK(b.saddles[2].branch == BranchId{BranchKind::Cr, 1});
}

TEST_CASE("diagram is deterministic") {
    const Diagram a = build_diagram(kRef, 2, 6.0, 40);
    const Diagram b = build_diagram(kRef, 2, 6.0, 40);
    REQUIRE(a.point_count() == b.point_count());
    for (std::size_t i = 0; i < a.branches.size(); ++i)
        for (std::size_t j = 0; j < a.branches[i].points.size(); ++j) {
            CHECK(a.branches[i].points[j].L == b.branches[i].points[j].L);
            CHECK(a.branches[i].points[j].param.value() == b.branches[i].points[j].param.value());
        }
}
