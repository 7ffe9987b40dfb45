#pragma once

// Stability of equilibria of the gradient flow phi_s = phi_zz + lambda sin(phi) cos(phi),
// read off from the zeros of y = x' along the equilibrium orbit:
//   no zeros in [-L, L) or (-L, L]  -> asymptotically stable
//   two or more zeros               -> unstable
//   a single interior zero          -> sign of the time-map slope decides

#include "twistmap/branches.hpp"

namespace twistmap {

enum class StabilityRule { NoZeros, TwoOrMore, SingleZeroSlope };

struct StabilityVerdict {
    Stability verdict = Stability::Undetermined;
    int zero_count = 0;
    StabilityRule rule = StabilityRule::NoZeros;
};

/// Turning points of y in the open interval (-L, L) for a generic point of the branch.
int zero_count(BranchId branch);

/// Slopes with magnitude below this are treated as the fold itself.
inline constexpr double kSlopeDeadband = 1e-12;

StabilityVerdict classify(const CellParams& cell, BranchId branch, const OrbitParam& param,
                          const QuadConfig& cfg = {});

}  // namespace twistmap
