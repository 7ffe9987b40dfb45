#pragma once

// Branch tracing, inversion of the transit-time formulas at prescribed L,
// fold location, and assembly of complete bifurcation diagrams.

#include <memory>
#include <vector>

#include "twistmap/branches.hpp"

namespace twistmap {

struct ContinuationConfig {
    QuadConfig quad;
    /// Sampling bound for the open part of the A branch.
    double beta_max = kDefaultBetaMax;
};

/// Fold of a convex branch: the minimum of its transit time.
struct SaddleNode {
    BranchId branch;
    OrbitParam param_at_min = OrbitParam::closed(0.5);
    double L_sn = 0.0;
    double T_min = 0.0;
};

struct BranchTrace {
    BranchId branch;
    /// Ordered by increasing orbit energy, starting at the critical orbit.
    std::vector<BranchPoint> points;
};

struct Diagram {
    CellParams cell{0.5, 0.5};
    int k_max = 0;
    double L_max = 0.0;
    int n_points = 0;
    /// Ordered by BranchId.
    std::vector<BranchTrace> branches;
    std::vector<CriticalOrbits> criticals;
    std::vector<SaddleNode> saddles;
    /// Diagram of the symmetric cell phi0 = phi1 = (phi0 + phi1)/2, if requested.
    std::shared_ptr<const Diagram> symmetric_overlay;

    std::size_t point_count() const;
};

/// Cl (any k) and A (k >= 1) fold; A with k = 0, Cr and D are monotone.
/// In the descending orientation Cr plays the role of Cl.
bool has_fold(const CellParams& cell, BranchId branch);

/// Minimum of the branch transit time, located by bisection on the sign of
/// its sin^2(alpha)-derivative. Throws DomainError for monotone branches.
SaddleNode find_saddle_node(const CellParams& cell, BranchId branch,
                            const ContinuationConfig& cfg = {});

/// All parameters in the open branch domain with branch_time = 2L, ordered
/// by increasing sin^2(alpha) (energy). At most two on folded branches.
std::vector<OrbitParam> solve_at_L(const CellParams& cell, BranchId branch, double L,
                                   const ContinuationConfig& cfg = {});

/// Samples a branch outward from its critical orbit, keeping points with L <= L_max.
/// Sampling is uniform in s where the energy-like coordinate (sin^2 alpha, or E for
/// A with k = 0) is offset by s^2 from its critical value, clustering points at the
/// critical orbit. Empty if the whole branch lies beyond L_max.
std::vector<BranchPoint> trace_branch(const CellParams& cell, BranchId branch, int n_points,
                                      double L_max, const ContinuationConfig& cfg = {});

/// Traces every branch with k = 0..k_max, attaches critical orbits, folds and
/// stability. Branches are traced concurrently; the result is deterministic.
Diagram build_diagram(const CellParams& cell, int k_max, double L_max, int n_points,
                      bool overlay_symmetric = false, const ContinuationConfig& cfg = {});

/// The same diagram seen from the mirrored cell.
Diagram mirror(const Diagram& diagram);

}  // namespace twistmap
