#include "twistmap/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "twistmap/errors.hpp"
#include "twistmap/stability.hpp"

namespace twistmap {

std::size_t Diagram::point_count() const {
    std::size_t n = 0;
    for (const auto& b : branches)
        n += b.points.size();
    return n;
}

namespace {

// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign (or zero).
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double f_hi) {
    if (f_lo == 0.0)
        return lo;
    if (f_hi == 0.0)
        return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi))
            break;
        const double f_mid = f(mid);
        if (f_mid == 0.0)
            return mid;
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

double sin2(double a) {
    const double s = std::sin(a);
    return s * s;
}

double alpha_from_tilde(double tilde, const QuadConfig& q) {
    return std::min(std::asin(std::sqrt(tilde)), q.alpha_cap);
}

double root_tolerance(double L) { return 1e-10 * (1.0 + 2.0 * L); }

// Amplitude on the increasing part [from, cap] where the time reaches `target`.
// Returns cap when the branch never gets there inside the representable domain.
double rising_crossing(const CellParams& cell, BranchId b, double from, double target,
                       const QuadConfig& q) {
    auto f = [&](double a) { return branch_time(cell, b, OrbitParam::closed(a), q) - target; };
    const double f_hi = f(q.alpha_cap);
    if (f_hi <= 0.0)
        return q.alpha_cap;
    return bisect(f, from, q.alpha_cap, f(from), f_hi);
}

BranchPoint make_point(const CellParams& cell, BranchId b, const OrbitParam& p,
                       const QuadConfig& q) {
    BranchPoint pt;
    pt.branch = b;
    pt.param = p;
    pt.L = 0.5 * branch_time(cell, b, p, q);
    pt.lambda = lambda_of_L(pt.L);
    const auto [ym, yp] = endpoint_ordinates(cell, b, p);
    pt.y_minus = ym;
    pt.y_plus = yp;
    pt.stability = classify(cell, b, p, q).verdict;
    return pt;
}

BranchKind canonical_fold_kind(const CellParams& cell) {
    return cell.canonical() ? BranchKind::Cl : BranchKind::Cr;
}

}  // namespace

bool has_fold(const CellParams& cell, BranchId branch) {
    if (branch.kind == BranchKind::A)
        return branch.k >= 1;
    return branch.kind == canonical_fold_kind(cell) && !cell.symmetric();
}

SaddleNode find_saddle_node(const CellParams& cell, BranchId branch,
                            const ContinuationConfig& cfg) {
    if (!cell.canonical()) {
        SaddleNode sn = find_saddle_node(mirror(cell), mirror(branch), cfg);
        sn.branch = branch;
        return sn;
    }
    if (!has_fold(cell, branch))
        throw DomainError("find_saddle_node: branch " + to_string(branch) +
                          " is monotone and has no saddle-node");
    const QuadConfig& q = cfg.quad;
    auto slope = [&](double tilde) {
        return branch_slope(cell, branch, OrbitParam::closed(alpha_from_tilde(tilde, q)), q);
    };
    double lo = sin2(cell.phi_max());
    // Upper bracket: walk toward the separatrix until the branch is rising. The
    // slope integrals are not resolvable right at alpha_cap.
    double hi = lo;
    for (int j = 2;; ++j) {
        const double t = std::max(lo, 1.0 - std::pow(10.0, -j));
        if (t > lo && slope(t) > 0.0) {
            hi = t;
            break;
        }
        if (t >= sin2(q.alpha_cap) || j >= 12)
            throw AccuracyError("find_saddle_node: transit time still decreasing near the separatrix");
        lo = std::max(lo, t);
    }
    // The slope is -infinity at the critical orbit and changes sign once (convexity).
    while (hi - lo > 1e-12) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi))
            break;
        if (slope(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const OrbitParam p = OrbitParam::closed(alpha_from_tilde(lo + 0.5 * (hi - lo), q));
    SaddleNode sn;
    sn.branch = branch;
    sn.param_at_min = p;
    sn.T_min = branch_time(cell, branch, p, q);
    sn.L_sn = 0.5 * sn.T_min;
    return sn;
}

std::vector<OrbitParam> solve_at_L(const CellParams& cell, BranchId branch, double L,
                                   const ContinuationConfig& cfg) {
    if (!cell.canonical())
        return solve_at_L(mirror(cell), mirror(branch), L, cfg);
    if (!(L > 0.0))
        throw DomainError("solve_at_L: half-length must be positive");
    const QuadConfig& q = cfg.quad;
    const double target = 2.0 * L;
    const double lo_alpha = cell.phi_max();
    auto f_alpha = [&](double a) {
        return branch_time(cell, branch, OrbitParam::closed(a), q) - target;
    };
    std::vector<OrbitParam> roots;

    if (branch.kind == BranchKind::A && branch.k == 0) {
        // Decreasing in energy, from T_{*0} at the critical orbit to 0 as beta -> infinity.
        const double f_crit = f_alpha(lo_alpha);
        if (f_crit <= 0.0)
            return roots;
        const double sep = time_above(kSqrt2, cell.phi0(), q) + time_above(kSqrt2, cell.phi1(), q);
        if (sep < target) {
            const double f_cap = f_alpha(q.alpha_cap);
            if (f_cap >= 0.0)
                roots.push_back(OrbitParam::closed(q.alpha_cap));
            else
                roots.push_back(OrbitParam::closed(bisect(f_alpha, lo_alpha, q.alpha_cap, f_crit, f_cap)));
            return roots;
        }
        auto f_beta = [&](double b) {
            return branch_time(cell, branch, OrbitParam::open(b), q) - target;
        };
        double b_hi = std::max(cfg.beta_max, 2.0);
        double f_hi = f_beta(b_hi);
        while (f_hi > 0.0) {
            b_hi *= 2.0;
            f_hi = f_beta(b_hi);
        }
        roots.push_back(OrbitParam::open(bisect(f_beta, kSqrt2, b_hi, sep - target, f_hi)));
        return roots;
    }

    if (!has_fold(cell, branch)) {
        // Cr, D (and Cl in the symmetric cell) increase from the critical time to infinity.
        const double f_crit = f_alpha(lo_alpha);
        if (f_crit >= 0.0)
            return roots;
        const double f_cap = f_alpha(q.alpha_cap);
        if (f_cap < 0.0)
            return roots;
        roots.push_back(OrbitParam::closed(bisect(f_alpha, lo_alpha, q.alpha_cap, f_crit, f_cap)));
        return roots;
    }

    const SaddleNode sn = find_saddle_node(cell, branch, cfg);
    const double tol = root_tolerance(L);
    if (target < sn.T_min - tol)
        return roots;
    if (target <= sn.T_min + tol) {
        roots.push_back(sn.param_at_min);
        return roots;
    }
    const double a_sn = sn.param_at_min.alpha();
    const double f_sn = sn.T_min - target;
    const double f_crit = f_alpha(lo_alpha);
    if (f_crit > tol)
        roots.push_back(OrbitParam::closed(bisect(f_alpha, lo_alpha, a_sn, f_crit, f_sn)));
    const double f_cap = f_alpha(q.alpha_cap);
    if (f_cap >= 0.0)
        roots.push_back(OrbitParam::closed(bisect(f_alpha, a_sn, q.alpha_cap, f_sn, f_cap)));
    return roots;
}

std::vector<BranchPoint> trace_branch(const CellParams& cell, BranchId branch, int n_points,
                                      double L_max, const ContinuationConfig& cfg) {
    if (n_points < 2)
        throw DomainError("trace_branch: need at least two points");
    if (!(L_max > 0.0))
        throw DomainError("trace_branch: L_max must be positive");
    if (!cell.canonical()) {
        auto pts = trace_branch(mirror(cell), mirror(branch), n_points, L_max, cfg);
        for (auto& p : pts)
            p = mirror(p);
        return pts;
    }
    const QuadConfig& q = cfg.quad;
    const double target = 2.0 * L_max;
    const double keep = target * (1.0 + 1e-12);
    const double crit_alpha = cell.phi_max();
    std::vector<OrbitParam> params;
    params.reserve(static_cast<std::size_t>(n_points));

    if (branch.kind == BranchKind::A && branch.k == 0) {
        const double e_lo = -std::cos(2.0 * crit_alpha);
        const double e_hi = cfg.beta_max * cfg.beta_max - 1.0;
        params.push_back(OrbitParam::closed(crit_alpha));
        for (int i = 1; i < n_points; ++i) {
            const double s = static_cast<double>(i) / (n_points - 1);
            double e = e_lo + (e_hi - e_lo) * s * s;
            if (e < 1.0 && std::asin(std::sqrt(0.5 * (1.0 + e))) > q.alpha_cap)
                e = 1.0;
            params.push_back(OrbitParam::from_energy(e));
        }
    } else {
        double rise_from = crit_alpha;
        if (has_fold(cell, branch)) {
            const SaddleNode sn = find_saddle_node(cell, branch, cfg);
            if (sn.T_min > keep)
                return {};
            rise_from = sn.param_at_min.alpha();
        } else if (branch_time(cell, branch, OrbitParam::closed(crit_alpha), q) > keep) {
            return {};
        }
        const double end_alpha = rising_crossing(cell, branch, rise_from, target, q);
        const double t_lo = sin2(crit_alpha);
        const double t_hi = sin2(end_alpha);
        params.push_back(OrbitParam::closed(crit_alpha));
        for (int i = 1; i < n_points - 1; ++i) {
            const double s = static_cast<double>(i) / (n_points - 1);
            const double a = alpha_from_tilde(t_lo + (t_hi - t_lo) * s * s, q);
            params.push_back(OrbitParam::closed(std::clamp(a, crit_alpha, end_alpha)));
        }
        params.push_back(OrbitParam::closed(end_alpha));
    }

    std::vector<BranchPoint> out;
    out.reserve(params.size());
    for (const auto& p : params) {
        BranchPoint pt = make_point(cell, branch, p, q);
        if (2.0 * pt.L <= keep)
            out.push_back(pt);
    }
    return out;
}

Diagram build_diagram(const CellParams& cell, int k_max, double L_max, int n_points,
                      bool overlay_symmetric, const ContinuationConfig& cfg) {
    if (k_max < 0)
        throw DomainError("build_diagram: k_max must be non-negative");
    if (!cell.canonical())
        return mirror(build_diagram(mirror(cell), k_max, L_max, n_points, overlay_symmetric, cfg));

    Diagram d;
    d.cell = cell;
    d.k_max = k_max;
    d.L_max = L_max;
    d.n_points = n_points;

    std::vector<BranchId> ids;
    for (auto kind : {BranchKind::A, BranchKind::Cr, BranchKind::Cl, BranchKind::D})
        for (int k = 0; k <= k_max; ++k)
            ids.push_back({kind, k});

    std::vector<std::future<std::vector<BranchPoint>>> traces;
    traces.reserve(ids.size());
    for (const auto& id : ids)
        traces.push_back(std::async(std::launch::async, [&, id] {
            return trace_branch(cell, id, n_points, L_max, cfg);
        }));
    for (std::size_t i = 0; i < ids.size(); ++i)
        d.branches.push_back({ids[i], traces[i].get()});

    for (int k = 0; k <= k_max; ++k)
        d.criticals.push_back(critical_times(cell, k, cfg.quad));
    for (const auto& id : ids)
        if (has_fold(cell, id))
            d.saddles.push_back(find_saddle_node(cell, id, cfg));

    if (overlay_symmetric) {
        const double mid = 0.5 * (cell.phi0() + cell.phi1());
        d.symmetric_overlay = std::make_shared<const Diagram>(
            build_diagram(CellParams{mid, mid}, k_max, L_max, n_points, false, cfg));
    }
    return d;
}

Diagram mirror(const Diagram& diagram) {
    Diagram m;
    m.cell = mirror(diagram.cell);
    m.k_max = diagram.k_max;
    m.L_max = diagram.L_max;
    m.n_points = diagram.n_points;
    for (const auto& b : diagram.branches) {
        BranchTrace t{mirror(b.branch), {}};
        t.points.reserve(b.points.size());
        for (const auto& p : b.points)
            t.points.push_back(mirror(p));
        m.branches.push_back(std::move(t));
    }
    std::sort(m.branches.begin(), m.branches.end(),
              [](const BranchTrace& a, const BranchTrace& b) { return a.branch < b.branch; });
    m.criticals = diagram.criticals;
    for (auto sn : diagram.saddles) {
        sn.branch = mirror(sn.branch);
        m.saddles.push_back(sn);
    }
    std::sort(m.saddles.begin(), m.saddles.end(),
              [](const SaddleNode& a, const SaddleNode& b) { return a.branch < b.branch; });
    if (diagram.symmetric_overlay)
        m.symmetric_overlay = std::make_shared<const Diagram>(mirror(*diagram.symmetric_overlay));
    return m;
}

}  // namespace twistmap
