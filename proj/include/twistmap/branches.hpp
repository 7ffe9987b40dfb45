#pragma once

// Solution branches of the Dirichlet problem x(-L) = -phi0, x(L) = phi1.
//
// Every solution is an arc of a phase-plane orbit whose transit time equals
// 2L. Four geometric families exist for each winding number k:
//
//   A   y > 0 at both ends              (no turning point when k = 0)
//   Cr  y(-L) > 0, y(L) < 0             (turns once at x = +alpha)
//   Cl  y(-L) < 0, y(L) > 0             (turns once at x = -alpha)
//   D   y < 0 at both ends              (turns at -alpha and +alpha)
//
// Each full loop around the origin adds 4 T(alpha). The families meet at the
// critical orbits alpha = max(phi0, phi1): A and Cr at gamma_{*k}, Cl and D
// at gamma^*_k. Formulas are written for phi0 <= phi1; the other orientation
// is reached through mirror(), which exchanges Cr and Cl.

#include <string>
#include <string_view>
#include <utility>

#include "twistmap/timemaps.hpp"

namespace twistmap {

enum class BranchKind { A, Cr, Cl, D };

std::string_view to_string(BranchKind kind);
/// Accepts "A", "Cr", "Cl" (also "Cℓ"), "D"; throws DomainError otherwise.
BranchKind parse_branch_kind(std::string_view text);

struct BranchId {
    BranchKind kind = BranchKind::A;
    int k = 0;

    friend auto operator<=>(const BranchId&, const BranchId&) = default;
};

std::string to_string(const BranchId& id);

enum class Stability { AsymptoticallyStable, Unstable, Undetermined };

std::string_view to_string(Stability s);
Stability parse_stability(std::string_view text);

struct BranchPoint {
    BranchId branch;
    OrbitParam param = OrbitParam::closed(0.5);
    double L = 0.0;
    double lambda = 0.0;
    double y_minus = 0.0;
    double y_plus = 0.0;
    Stability stability = Stability::Undetermined;
};

/// Transit times of the two critical orbits with winding k.
struct CriticalOrbits {
    int k = 0;
    /// gamma_{*k}, junction of A and Cr.
    double T_star = 0.0;
    /// gamma^*_k, junction of Cl and D.
    double T_upper = 0.0;
    /// |y(-L)| shared by both critical orbits.
    double y_abs = 0.0;
};

/// Admissible parameters of a branch.
///
/// Closed amplitudes fill (alpha_lo, alpha_hi]; alpha_lo itself is the
/// critical orbit, accepted by branch_time as the closure point. The A branch
/// with k = 0 continues above the separatrix with beta in [sqrt2, beta_max).
struct BranchDomain {
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    bool has_open = false;
    double beta_max = 0.0;

    bool contains(const OrbitParam& p) const;
};

/// Upper crossing height used for the open part of the A branch.
inline constexpr double kDefaultBetaMax = 8.0;

BranchDomain branch_domain(const CellParams& cell, BranchId branch, const QuadConfig& cfg = {},
                           double beta_max = kDefaultBetaMax);

/// Total transit time 2L of the orbit arc on `branch` with parameter `param`.
double branch_time(const CellParams& cell, BranchId branch, const OrbitParam& param,
                   const QuadConfig& cfg = {});

/// d(branch_time)/d(sin^2 alpha) for closed parameters. Infinite at the critical orbit.
double branch_slope(const CellParams& cell, BranchId branch, const OrbitParam& param,
                    const QuadConfig& cfg = {});

CriticalOrbits critical_times(const CellParams& cell, int k, const QuadConfig& cfg = {});

/// (y(-L), y(L)) from energy conservation with the family's sign pattern.
std::pair<double, double> endpoint_ordinates(const CellParams& cell, BranchId branch,
                                             const OrbitParam& param);

/// True when `param` is the critical orbit closing `branch` (alpha = max(phi0, phi1)).
bool is_critical_param(const CellParams& cell, const OrbitParam& param);

/// Swaps phi0 and phi1. Solutions map by x(t) -> -x(-t), so y(-L) and y(L) trade places.
CellParams mirror(const CellParams& cell);
/// Cr and Cl exchange roles under the mirror; A and D are fixed.
BranchId mirror(BranchId branch);
BranchPoint mirror(const BranchPoint& point);

double lambda_of_L(double L);
double L_of_lambda(double lambda);

}  // namespace twistmap
