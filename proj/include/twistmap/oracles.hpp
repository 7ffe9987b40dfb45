#pragma once

// Independent checks on the time-map machinery:
//  - quad_oracle integrates the untransformed time-map integrals with its own
//    Gauss-Legendre rule and dyadic clustering at the singular endpoint;
//  - integrate_orbit / shoot_check integrate x' = y, y' = -sin 2x directly;
//  - relax runs the parabolic gradient flow from a perturbed equilibrium.
// None of this code calls into the quadrature used by the time-map kernels.

#include <array>
#include <vector>

#include "twistmap/branches.hpp"

namespace twistmap {

enum class TimeMap { T, T1, T2 };

struct TimeMapArgs {
    double alpha = 0.0;
    double phi = 0.0;
    double beta = 0.0;
};

/// Brute-force value of T(alpha), T1(alpha, phi) or T2(beta, phi).
/// Throws AccuracyError if the two Gauss-Legendre orders disagree beyond 1e-11.
double quad_oracle(TimeMap map, const TimeMapArgs& args, int split_depth = 30);

struct OrbitSample {
    double t;
    double x;
    double y;
};

struct OrbitTrace {
    std::vector<OrbitSample> samples;
    /// max |V(x, y) - V(x0, y0)| with V = y^2 - cos 2x.
    double energy_drift = 0.0;

    static constexpr double kMaxDrift = 1e-8;
    bool accepted() const { return energy_drift <= kMaxDrift; }
    /// Sign changes of y strictly inside the trace.
    int sign_changes() const;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) trajectory from `start` at time t0 for `duration`.
OrbitTrace integrate_orbit(std::array<double, 2> start, double duration, double tol = 1e-13,
                           double t0 = 0.0);

/// |x(L) - phi1| + |y(L) - y_plus| after integrating from (-phi0, y_minus) over [-L, L].
/// Integrates in long double; `tol` is the step controller's absolute and relative tolerance.
double shoot_check(const CellParams& cell, const BranchPoint& point, double tol = 1e-16);

inline constexpr double kShootTolerance = 1e-6;

/// phi(zeta_i) on zeta_i = i/(n+1), i = 0..n+1, with t = 2L (zeta - 1/2).
std::vector<double> equilibrium_profile(const CellParams& cell, const BranchPoint& point, int n);

enum class RelaxOutcome { ReturnedToStart, EscapedToOther, Inconclusive };

std::string_view to_string(RelaxOutcome o);

struct RelaxOptions {
    double perturbation = 1e-3;
    double t_final = 50.0;
    /// Interior nodes of the zeta grid.
    int grid_size = 201;
};

struct RelaxationRun {
    double L = 0.0;
    double lambda = 0.0;
    int grid_size = 0;
    /// Equilibrium of the discretised problem (boundary nodes included).
    std::vector<double> profile_initial;
    std::vector<double> profile_final;
    double t_final = 0.0;
    std::size_t steps = 0;
    /// Sup-norm distance between profile_final and profile_initial.
    double distance = 0.0;
    RelaxOutcome outcome = RelaxOutcome::Inconclusive;
};

/// Explicit method-of-lines run of phi_s = phi_zz + lambda sin(phi) cos(phi) from
/// equilibrium + perturbation * sin(pi zeta). The sampled equilibrium is first
/// polished by Newton's method on the discrete system so that the start is an
/// exact discrete equilibrium.
RelaxationRun relax(const CellParams& cell, const BranchPoint& point, const RelaxOptions& opts = {});

}  // namespace twistmap
