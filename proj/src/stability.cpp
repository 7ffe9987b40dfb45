#include "twistmap/stability.hpp"

#include <cmath>

namespace twistmap {

int zero_count(BranchId branch) {
    int base = 0;
    switch (branch.kind) {
    case BranchKind::A: base = 0; break;
    case BranchKind::Cr:
    case BranchKind::Cl: base = 1; break;
    case BranchKind::D: base = 2; break;
    }
    return base + 2 * branch.k;
}

StabilityVerdict classify(const CellParams& cell, BranchId branch, const OrbitParam& param,
                          const QuadConfig& cfg) {
    if (!cell.canonical())
        return classify(mirror(cell), mirror(branch), param, cfg);

    StabilityVerdict out;
    if (is_critical_param(cell, param)) {
        // The extra zero sits on the boundary. gamma_{*k} drops one interior
        // zero relative to Cr, gamma^*_k keeps the one at x = -alpha.
        const bool lower = branch.kind == BranchKind::A || branch.kind == BranchKind::Cr;
        out.zero_count = 2 * branch.k + (lower ? 0 : 1);
        if (out.zero_count == 0) {
            out.rule = StabilityRule::NoZeros;
            out.verdict = Stability::AsymptoticallyStable;
        } else if (out.zero_count >= 2) {
            out.rule = StabilityRule::TwoOrMore;
            out.verdict = Stability::Unstable;
        } else {
            out.rule = StabilityRule::SingleZeroSlope;
            out.verdict = Stability::Undetermined;
        }
        return out;
    }

    out.zero_count = zero_count(branch);
    if (out.zero_count == 0) {
        out.rule = StabilityRule::NoZeros;
        out.verdict = Stability::AsymptoticallyStable;
        return out;
    }
    if (out.zero_count >= 2) {
        out.rule = StabilityRule::TwoOrMore;
        out.verdict = Stability::Unstable;
        return out;
    }
    out.rule = StabilityRule::SingleZeroSlope;
    const double alpha = param.alpha();
    const double slope = std::sin(2.0 * alpha) * branch_slope(cell, branch, param, cfg);
    if (std::abs(slope) < kSlopeDeadband)
        out.verdict = Stability::Undetermined;
    else
        out.verdict = slope > 0.0 ? Stability::AsymptoticallyStable : Stability::Unstable;
    return out;
}

}  // namespace twistmap
