#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twistmap/continuation.hpp"
#include "twistmap/oracles.hpp"
#include "twistmap/stability.hpp"

using namespace twistmap;
using std::numbers::pi;

namespace {

const CellParams kRef(pi / 6, pi / 4);

OrbitParam from_tilde(double t) { return OrbitParam::closed(std::asin(std::sqrt(t))); }

}  // namespace

TEST_CASE("zero counts") {
    CHECK(zero_count({BranchKind::A, 0}) == 0);
    CHECK(zero_count({BranchKind::Cr, 0}) == 1);
    CHECK(zero_count({BranchKind::Cl, 0}) == 1);
    CHECK(zero_count({BranchKind::D, 0}) == 2);
    CHECK(zero_count({BranchKind::Cr, 1}) == 3);
    CHECK(zero_count({BranchKind::A, 2}) == 4);
    CHECK(zero_count({BranchKind::D, 2}) == 6);
}

TEST_CASE("verdicts on k = 0 branches") {
    for (double a : {0.8, 1.0, 1.3, 1.55}) {
        const OrbitParam p = OrbitParam::closed(a);
        const StabilityVerdict cr = classify(kRef, {BranchKind::Cr, 0}, p);
        CHECK(cr.verdict == Stability::AsymptoticallyStable);
        CHECK(cr.rule == StabilityRule::SingleZeroSlope);
        const StabilityVerdict d = classify(kRef, {BranchKind::D, 0}, p);
        CHECK(d.verdict == Stability::Unstable);
        CHECK(d.rule == StabilityRule::TwoOrMore);
        const StabilityVerdict a0 = classify(kRef, {BranchKind::A, 0}, p);
        CHECK(a0.verdict == Stability::AsymptoticallyStable);
        CHECK(a0.rule == StabilityRule::NoZeros);
    }
    CHECK(classify(kRef, {BranchKind::A, 0}, OrbitParam::open(3.0)).verdict ==
          Stability::AsymptoticallyStable);
}

TEST_CASE("verdicts with winding") {
    for (int k = 1; k <= 3; ++k)
        for (auto kind : {BranchKind::A, BranchKind::Cr, BranchKind::Cl, BranchKind::D})
            for (double a : {0.8, 1.2}) {
                const StabilityVerdict v = classify(kRef, {kind, k}, OrbitParam::closed(a));
                CHECK(v.verdict == Stability::Unstable);
                CHECK(v.zero_count >= 2);
            }
}

TEST_CASE("Cl verdict flips at the saddle-node") {
    const BranchId cl{BranchKind::Cl, 0};
    const double t_sn = find_saddle_node(kRef, cl).param_at_min.alpha_tilde();
    CHECK(classify(kRef, cl, from_tilde(t_sn - 1e-6)).verdict == Stability::Unstable);
    CHECK(classify(kRef, cl, from_tilde(t_sn + 1e-6)).verdict == Stability::AsymptoticallyStable);
    const double lo = std::pow(std::sin(kRef.phi_max()), 2);
    for (int i = 1; i < 50; ++i) {
        const double t = lo + (t_sn - lo) * i / 50.0;
        CHECK(classify(kRef, cl, from_tilde(t)).verdict == Stability::Unstable);
        const double u = t_sn + (0.999 - t_sn) * i / 50.0;
        CHECK(classify(kRef, cl, from_tilde(u)).verdict == Stability::AsymptoticallyStable);
    }
}

TEST_CASE("critical orbits") {
    const OrbitParam crit = OrbitParam::closed(kRef.phi_max());
    const StabilityVerdict star = classify(kRef, {BranchKind::A, 0}, crit);
    CHECK(star.verdict == Stability::AsymptoticallyStable);
    CHECK(star.rule == StabilityRule::NoZeros);
    const StabilityVerdict upper = classify(kRef, {BranchKind::D, 0}, crit);
    CHECK(upper.verdict == Stability::Undetermined);
    CHECK(upper.rule == StabilityRule::SingleZeroSlope);
    CHECK(classify(kRef, {BranchKind::Cl, 0}, crit).verdict == Stability::Undetermined);
    CHECK(classify(kRef, {BranchKind::Cr, 1}, crit).verdict == Stability::Unstable);
    CHECK(classify(kRef, {BranchKind::D, 1}, crit).verdict == Stability::Unstable);
}

TEST_CASE("verdicts are mirror invariant") {
    const CellParams m = mirror(kRef);
    for (auto kind : {BranchKind::A, BranchKind::Cr, BranchKind::Cl, BranchKind::D})
        for (int k = 0; k < 2; ++k)
            for (double a : {0.8, 0.9, 1.1, 1.4}) {
                const BranchId id{kind, k};
                const OrbitParam p = OrbitParam::closed(a);
                CHECK(classify(kRef, id, p).verdict == classify(m, mirror(id), p).verdict);
            }
    // in the mirrored cell Cr carries the fold and the unstable inner part
    CHECK(classify(m, {BranchKind::Cr, 0}, OrbitParam::closed(pi / 4 + 1e-3)).verdict ==
          Stability::Unstable);
    CHECK(classify(m, {BranchKind::Cl, 0}, OrbitParam::closed(pi / 4 + 1e-3)).verdict ==
          Stability::AsymptoticallyStable);
}

TEST_CASE("zero counts match sign changes along the integrated orbit") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> alpha(kRef.phi_max() + 0.02, 1.4);
    std::uniform_int_distribution<int> kind_dist(0, 3);
    std::uniform_int_distribution<int> k_dist(0, 2);
    for (int i = 0; i < 20; ++i) {
        const BranchId id{static_cast<BranchKind>(kind_dist(rng)), k_dist(rng)};
        const OrbitParam p = OrbitParam::closed(alpha(rng));
        const double L = 0.5 * branch_time(kRef, id, p);
        const auto [ym, yp] = endpoint_ordinates(kRef, id, p);
        const OrbitTrace tr = integrate_orbit({-kRef.phi0(), ym}, 2.0 * L, 1e-12, -L);
        CHECK(tr.accepted());
        CAPTURE(to_string(id));
        CHECK(tr.sign_changes() == zero_count(id));
        CHECK(std::abs(tr.samples.back().y - yp) < 1e-6);
    }
}
