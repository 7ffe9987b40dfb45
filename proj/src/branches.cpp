#include "twistmap/branches.hpp"

#include <cmath>
#include <sstream>

#include "twistmap/errors.hpp"

namespace twistmap {

std::string_view to_string(BranchKind kind) {
    switch (kind) {
    case BranchKind::A: return "A";
    case BranchKind::Cr: return "Cr";
    case BranchKind::Cl: return "Cl";
    case BranchKind::D: return "D";
    }
    return "?";
}

BranchKind parse_branch_kind(std::string_view text) {
    if (text == "A") return BranchKind::A;
    if (text == "Cr") return BranchKind::Cr;
    if (text == "Cl" || text == "Cℓ") return BranchKind::Cl;
    if (text == "D") return BranchKind::D;
    throw DomainError("unknown branch kind '" + std::string(text) + "'");
}

std::string to_string(const BranchId& id) {
    return std::string(to_string(id.kind)) + "_" + std::to_string(id.k);
}

std::string_view to_string(Stability s) {
    switch (s) {
    case Stability::AsymptoticallyStable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Undetermined: return "undetermined";
    }
    return "?";
}

Stability parse_stability(std::string_view text) {
    if (text == "stable") return Stability::AsymptoticallyStable;
    if (text == "unstable") return Stability::Unstable;
    if (text == "undetermined") return Stability::Undetermined;
    throw DomainError("unknown stability label '" + std::string(text) + "'");
}

namespace {

void check_branch(BranchId branch) {
    if (branch.k < 0)
        throw DomainError("winding number must be non-negative");
}

void check_param(const CellParams& cell, BranchId branch, const OrbitParam& p,
                 const QuadConfig& cfg) {
    check_branch(branch);
    if (p.is_closed()) {
        if (p.alpha() < cell.phi_max() || p.alpha() > cfg.alpha_cap) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "branch " << to_string(branch) << ": amplitude " << p.alpha()
                << " outside [" << cell.phi_max() << ", " << cfg.alpha_cap << "]";
            throw DomainError(msg.str());
        }
    } else if (branch.kind != BranchKind::A || branch.k != 0) {
        throw DomainError("branch " + to_string(branch) +
                          ": only A with k = 0 continues above the separatrix");
    }
}

// Transit time for phi0 <= phi1.
double canonical_time(const CellParams& cell, BranchId b, const OrbitParam& p,
                      const QuadConfig& cfg) {
    if (!p.is_closed())
        return time_above(p.beta(), cell.phi0(), cfg) + time_above(p.beta(), cell.phi1(), cfg);
    const double alpha = p.alpha();
    const double t0 = time_to_line(alpha, cell.phi0(), cfg);
    const double t1 = time_to_line(alpha, cell.phi1(), cfg);
    const double k = b.k;
    switch (b.kind) {
    case BranchKind::A:
        return (k == 0 ? 0.0 : 4.0 * k * quarter_period(alpha, cfg)) + t0 + t1;
    case BranchKind::Cr: return (4.0 * k + 2.0) * quarter_period(alpha, cfg) + t0 - t1;
    case BranchKind::Cl: return (4.0 * k + 2.0) * quarter_period(alpha, cfg) - t0 + t1;
    case BranchKind::D: return 4.0 * (k + 1.0) * quarter_period(alpha, cfg) - t0 - t1;
    }
    return NAN;
}

double canonical_slope(const CellParams& cell, BranchId b, const OrbitParam& p,
                       const QuadConfig& cfg) {
    const double alpha = p.alpha();
    const double d0 = d_time_to_line_dtilde(alpha, cell.phi0(), cfg);
    const double d1 = d_time_to_line_dtilde(alpha, cell.phi1(), cfg);
    auto periods = [&](double n) { return n == 0.0 ? 0.0 : n * d_quarter_period_dtilde(alpha, cfg); };
    const double k = b.k;
    switch (b.kind) {
    case BranchKind::A: return periods(4.0 * k) + d0 + d1;
    case BranchKind::Cr: return periods(4.0 * k + 2.0) + d0 - d1;
    case BranchKind::Cl: return periods(4.0 * k + 2.0) - d0 + d1;
    case BranchKind::D: return periods(4.0 * (k + 1.0)) - d0 - d1;
    }
    return NAN;
}

}  // namespace

bool BranchDomain::contains(const OrbitParam& p) const {
    if (p.is_closed())
        return p.alpha() > alpha_lo && p.alpha() <= alpha_hi;
    return has_open && p.beta() < beta_max;
}

BranchDomain branch_domain(const CellParams& cell, BranchId branch, const QuadConfig& cfg,
                           double beta_max) {
    check_branch(branch);
    BranchDomain dom;
    dom.alpha_lo = cell.phi_max();
    dom.alpha_hi = cfg.alpha_cap;
    if (branch.kind == BranchKind::A && branch.k == 0) {
        dom.has_open = true;
        dom.beta_max = beta_max;
    }
    return dom;
}

double branch_time(const CellParams& cell, BranchId branch, const OrbitParam& param,
                   const QuadConfig& cfg) {
    if (!cell.canonical())
        return branch_time(mirror(cell), mirror(branch), param, cfg);
    check_param(cell, branch, param, cfg);
    return canonical_time(cell, branch, param, cfg);
}

double branch_slope(const CellParams& cell, BranchId branch, const OrbitParam& param,
                    const QuadConfig& cfg) {
    if (!cell.canonical())
        return branch_slope(mirror(cell), mirror(branch), param, cfg);
    check_param(cell, branch, param, cfg);
    if (!param.is_closed())
        throw DomainError("branch_slope: defined for closed orbits only");
    return canonical_slope(cell, branch, param, cfg);
}

CriticalOrbits critical_times(const CellParams& cell, int k, const QuadConfig& cfg) {
    if (k < 0)
        throw DomainError("critical_times: winding number must be non-negative");
    const double hi = cell.phi_max();
    const double lo = cell.phi_min();
    const double period = quarter_period(hi, cfg);
    const double partial = time_to_line(hi, lo, cfg);
    CriticalOrbits c;
    c.k = k;
    c.T_star = (4.0 * k + 1.0) * period + partial;
    c.T_upper = (4.0 * k + 3.0) * period - partial;
    // cos 2phi_lo - cos 2phi_hi
    c.y_abs = std::sqrt(2.0 * std::sin(hi - lo) * std::sin(hi + lo));
    return c;
}

namespace {

// E + cos 2phi, the squared speed on the line x = +-phi.
double squared_speed(const OrbitParam& p, double phi) {
    if (p.is_closed())
        return 2.0 * std::sin(p.alpha() - phi) * std::sin(p.alpha() + phi);
    const double s = std::sin(phi);
    return p.beta() * p.beta() - 2.0 * s * s;
}

}  // namespace

std::pair<double, double> endpoint_ordinates(const CellParams& cell, BranchId branch,
                                             const OrbitParam& param) {
    if (!cell.canonical()) {
        const auto [ym, yp] = endpoint_ordinates(mirror(cell), mirror(branch), param);
        return {yp, ym};
    }
    const double q0 = squared_speed(param, cell.phi0());
    const double q1 = squared_speed(param, cell.phi1());
    if (q0 < 0.0 || q1 < 0.0)
        throw DomainError("endpoint_ordinates: orbit does not reach a boundary line");
    const double m = std::sqrt(q0);
    const double p = std::sqrt(q1);
    switch (branch.kind) {
    case BranchKind::A: return {m, p};
    case BranchKind::Cr: return {m, -p};
    case BranchKind::Cl: return {-m, p};
    case BranchKind::D: return {-m, -p};
    }
    return {NAN, NAN};
}

bool is_critical_param(const CellParams& cell, const OrbitParam& param) {
    return param.is_closed() && param.alpha() == cell.phi_max();
}

CellParams mirror(const CellParams& cell) { return {cell.phi1(), cell.phi0()}; }

BranchId mirror(BranchId branch) {
    switch (branch.kind) {
    case BranchKind::Cr: return {BranchKind::Cl, branch.k};
    case BranchKind::Cl: return {BranchKind::Cr, branch.k};
    default: return branch;
    }
}

BranchPoint mirror(const BranchPoint& point) {
    BranchPoint out = point;
    out.branch = mirror(point.branch);
    out.y_minus = point.y_plus;
    out.y_plus = point.y_minus;
    return out;
}

double lambda_of_L(double L) {
    if (!(L > 0.0))
        throw DomainError("lambda_of_L: half-length must be positive");
    return 8.0 * L * L;
}

double L_of_lambda(double lambda) {
    if (!(lambda > 0.0))
        throw DomainError("L_of_lambda: field parameter must be positive");
    return std::sqrt(lambda / 8.0);
}

}  // namespace twistmap
