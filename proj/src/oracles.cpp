#include "twistmap/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "twistmap/errors.hpp"

namespace twistmap {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

using State = std::array<double, 2>;

void pendulum(const State& q, State& dq, double /*t*/) {
    dq[0] = q[1];
    dq[1] = -std::sin(2.0 * q[0]);
}

double energy(double x, double y) { return y * y - std::cos(2.0 * x); }

// pi/2 - v with the low part of pi/2 restored.
double co_half_pi(double v) { return (1.5707963267948966 - v) + 6.123233995736766e-17; }

// sin(sum - d), given co_sum = pi - sum; uses the reflected form when sum - d is past pi/2.
double sin_near_pi(double sum, double co_sum, double d) {
    const double r = co_sum + d;
    return r < kHalfPi ? std::sin(r) : std::sin(sum - d);
}

template <class F>
std::array<double, 2> gauss_pair(F&& f, double a, double b) {
    using boost::math::quadrature::gauss;
    return {gauss<double, 20>::integrate(f, a, b), gauss<double, 30>::integrate(f, a, b)};
}

}  // namespace

double quad_oracle(TimeMap map, const TimeMapArgs& args, int split_depth) {
    if (split_depth < 1 || split_depth > 60)
        throw DomainError("quad_oracle: split_depth must lie in [1, 60]");
    const double alpha = args.alpha;
    const double phi = args.phi;
    const double beta = args.beta;

    double upper = 0.0;
    bool singular_end = false;
    std::function<double(double)> integrand;
    switch (map) {
    case TimeMap::T:
        if (!(alpha > 0.0 && alpha < kHalfPi))
            throw DomainError("quad_oracle: alpha outside (0, pi/2)");
        upper = alpha;
        singular_end = true;
        break;
    case TimeMap::T1:
        if (!(alpha > 0.0 && alpha < kHalfPi) || !(phi > 0.0 && phi <= alpha))
            throw DomainError("quad_oracle: need 0 < phi <= alpha < pi/2");
        upper = phi;
        singular_end = phi == alpha;
        break;
    case TimeMap::T2:
        if (!(beta >= std::numbers::sqrt2) || !(phi > 0.0 && phi <= kHalfPi))
            throw DomainError("quad_oracle: need beta >= sqrt(2) and 0 < phi <= pi/2");
        upper = phi;
        break;
    }
    // Integrands in d = upper - x, so that no digits are lost next to the endpoint.
    if (map == TimeMap::T2) {
        const double shift = beta * beta - 1.0;
        integrand = [shift, upper](double d) {
            return 1.0 / std::sqrt(shift + std::cos(2.0 * (upper - d)));
        };
    } else {
        // cos 2x - cos 2alpha = 2 sin(alpha - x) sin(alpha + x)
        const double gap = alpha - upper;
        const double sum = alpha + upper;
        const double co_sum = co_half_pi(alpha) + co_half_pi(upper);
        integrand = [gap, sum, co_sum](double d) {
            return 1.0 / std::sqrt(2.0 * std::sin(gap + d) * sin_near_pi(sum, co_sum, d));
        };
    }

    // Dyadic pieces d in [w/2, w] with w = upper, upper/2, ..., clustering at d = 0.
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    double width = upper;
    for (int j = 0; j < split_depth; ++j) {
        const auto [g20, g30] = gauss_pair(integrand, 0.5 * width, width);
        lo_sum += g20;
        hi_sum += g30;
        width *= 0.5;
    }
    // Last piece d in [0, w].
    if (singular_end) {
        // d = u^2 removes the inverse square-root singularity.
        const double sum = 2.0 * alpha;
        const double co_sum = 2.0 * co_half_pi(alpha);
        auto smooth = [sum, co_sum](double u) {
            const double d = u * u;
            const double s = d == 0.0 ? 1.0 : std::sin(d) / d;
            return 2.0 / std::sqrt(2.0 * s * sin_near_pi(sum, co_sum, d));
        };
        const auto [g20, g30] = gauss_pair(smooth, 0.0, std::sqrt(width));
        lo_sum += g20;
        hi_sum += g30;
    } else {
        const auto [g20, g30] = gauss_pair(integrand, 0.0, width);
        lo_sum += g20;
        hi_sum += g30;
    }
    if (!std::isfinite(hi_sum) || std::abs(hi_sum - lo_sum) > 1e-11 * std::abs(hi_sum)) {
        std::ostringstream msg;
        msg << "quad_oracle: rules disagree (" << lo_sum << " vs " << hi_sum << ")";
        throw AccuracyError(msg.str());
    }
    return hi_sum;
}

int OrbitTrace::sign_changes() const {
    int changes = 0;
    int last_sign = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double y = samples[i].y;
        const int s = (y > 0.0) - (y < 0.0);
        if (s == 0)
            continue;
        if (last_sign != 0 && s != last_sign)
            ++changes;
        last_sign = s;
    }
    return changes;
}

OrbitTrace integrate_orbit(State start, double duration, double tol, double t0) {
    if (!(duration > 0.0))
        throw DomainError("integrate_orbit: duration must be positive");
    if (!(tol > 0.0))
        throw DomainError("integrate_orbit: tolerance must be positive");
    OrbitTrace trace;
    const double e0 = energy(start[0], start[1]);
    auto observer = [&](const State& q, double t) {
        trace.samples.push_back({t, q[0], q[1]});
        trace.energy_drift = std::max(trace.energy_drift, std::abs(energy(q[0], q[1]) - e0));
    };
    State q = start;
    try {
        odeint::integrate_adaptive(
            odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(tol, tol), pendulum, q, t0,
            t0 + duration, std::min(1e-2, duration), observer);
    } catch (const odeint::odeint_error& e) {
        throw AccuracyError(std::string("integrate_orbit: ") + e.what());
    }
    return trace;
}

namespace {

// Extended precision: near the separatrix the end state amplifies rounding by e^{sqrt2 t}.
using WideState = std::array<long double, 2>;

void pendulum_wide(const WideState& q, WideState& dq, long double /*t*/) {
    dq[0] = q[1];
    dq[1] = -std::sin(2.0L * q[0]);
}

WideState shoot(const CellParams& cell, const BranchPoint& point, double tol) {
    WideState q{-static_cast<long double>(cell.phi0()), point.y_minus};
    const long double t = tol;
    try {
        odeint::integrate_adaptive(
            odeint::make_controlled<odeint::runge_kutta_fehlberg78<WideState, long double>>(t, t),
            pendulum_wide, q, -static_cast<long double>(point.L), static_cast<long double>(point.L),
            std::min(1e-2L, static_cast<long double>(point.L)));
    } catch (const odeint::odeint_error& e) {
        throw AccuracyError(std::string("shoot_check: ") + e.what());
    }
    return q;
}

}  // namespace

double shoot_check(const CellParams& cell, const BranchPoint& point, double tol) {
    if (!(point.L > 0.0))
        throw DomainError("shoot_check: half-length must be positive");
    if (!(tol > 0.0))
        throw DomainError("shoot_check: tolerance must be positive");
    const WideState end = shoot(cell, point, tol);
    return static_cast<double>(std::abs(end[0] - cell.phi1()) + std::abs(end[1] - point.y_plus));
}

std::vector<double> equilibrium_profile(const CellParams& cell, const BranchPoint& point, int n) {
    if (n < 1)
        throw DomainError("equilibrium_profile: need at least one interior node");
    if (!(point.L > 0.0))
        throw DomainError("equilibrium_profile: half-length must be positive");
    std::vector<double> times(static_cast<std::size_t>(n) + 2);
    for (int i = 0; i <= n + 1; ++i)
        times[static_cast<std::size_t>(i)] = 2.0 * point.L * (static_cast<double>(i) / (n + 1) - 0.5);
    times.back() = point.L;

    std::vector<double> profile;
    profile.reserve(times.size());
    State q{-cell.phi0(), point.y_minus};
    auto observer = [&](const State& s, double) { profile.push_back(s[0]); };
    try {
        odeint::integrate_times(
            odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-13, 1e-13), pendulum, q,
            times.begin(), times.end(), 1e-3, observer);
    } catch (const odeint::odeint_error& e) {
        throw AccuracyError(std::string("equilibrium_profile: ") + e.what());
    }
    if (profile.size() != times.size())
        throw AccuracyError("equilibrium_profile: integrator skipped output nodes");
    if (std::abs(profile.back() - cell.phi1()) > kShootTolerance)
        throw AccuracyError("equilibrium_profile: point does not satisfy the boundary condition");
    profile.front() = -cell.phi0();
    profile.back() = cell.phi1();
    return profile;
}

std::string_view to_string(RelaxOutcome o) {
    switch (o) {
    case RelaxOutcome::ReturnedToStart: return "ReturnedToStart";
    case RelaxOutcome::EscapedToOther: return "EscapedToOther";
    case RelaxOutcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

// Newton's method for u'' + (lambda/2) sin 2u = 0 on the uniform grid, boundary nodes fixed.
void polish_equilibrium(std::vector<double>& u, double lambda) {
    const std::size_t n = u.size() - 2;
    const double h = 1.0 / static_cast<double>(n + 1);
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> diag(n), rhs(n), c_prime(n), d_prime(n);
    for (int iter = 0; iter < 30; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ui = u[i + 1];
            rhs[i] = -((u[i] - 2.0 * ui + u[i + 2]) * inv_h2 + 0.5 * lambda * std::sin(2.0 * ui));
            diag[i] = -2.0 * inv_h2 + lambda * std::cos(2.0 * ui);
        }
        // Thomas algorithm; off-diagonals are all inv_h2.
        double denom = diag[0];
        if (denom == 0.0)
            throw AccuracyError("relax: singular Jacobian while polishing the equilibrium");
        c_prime[0] = inv_h2 / denom;
        d_prime[0] = rhs[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = diag[i] - inv_h2 * c_prime[i - 1];
            if (denom == 0.0)
                throw AccuracyError("relax: singular Jacobian while polishing the equilibrium");
            c_prime[i] = inv_h2 / denom;
            d_prime[i] = (rhs[i] - inv_h2 * d_prime[i - 1]) / denom;
        }
        double step = d_prime[n - 1];
        u[n] += step;
        double max_step = std::abs(step);
        for (std::size_t i = n - 1; i-- > 0;) {
            step = d_prime[i] - c_prime[i] * step;
            u[i + 1] += step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step < 1e-13)
            return;
    }
    throw AccuracyError("relax: Newton polish of the discrete equilibrium did not converge");
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

RelaxationRun relax(const CellParams& cell, const BranchPoint& point, const RelaxOptions& opts) {
    if (opts.grid_size < 51)
        throw DomainError("relax: grid_size must be at least 51");
    if (!(std::abs(opts.perturbation) <= 0.05))
        throw DomainError("relax: perturbation amplitude must not exceed 0.05");
    if (!(opts.t_final > 0.0))
        throw DomainError("relax: t_final must be positive");
    // explicit stability bound dt <= 0.4 h^2
    const double grid_h = 1.0 / (opts.grid_size + 1);
    if (opts.t_final / (0.4 * grid_h * grid_h) > 1e9)
        throw DomainError("relax: t_final needs more than 1e9 explicit steps on this grid");

    RelaxationRun run;
    run.L = point.L;
    run.lambda = lambda_of_L(point.L);
    run.grid_size = opts.grid_size;
    run.t_final = opts.t_final;

    const int n = opts.grid_size;
    const double h = 1.0 / (n + 1);
    run.profile_initial = equilibrium_profile(cell, point, n);
    polish_equilibrium(run.profile_initial, run.lambda);

    const double max_dt = 0.4 * h * h;
    const double steps_real = std::ceil(opts.t_final / max_dt);
    run.steps = static_cast<std::size_t>(steps_real);
    const double dt = opts.t_final / steps_real;

    std::vector<double> u = run.profile_initial;
    for (int i = 1; i <= n; ++i)
        u[static_cast<std::size_t>(i)] += opts.perturbation * std::sin(std::numbers::pi * i * h);
    std::vector<double> next = u;
    const double r = dt / (h * h);
    const double react = 0.5 * run.lambda * dt;
    for (std::size_t s = 0; s < run.steps; ++s) {
        for (std::size_t i = 1; i <= static_cast<std::size_t>(n); ++i)
            next[i] = u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + react * std::sin(2.0 * u[i]);
        std::swap(u, next);
    }
    run.profile_final = u;
    run.distance = sup_distance(run.profile_final, run.profile_initial);
    const double amp = std::abs(opts.perturbation);
    if (run.distance < 0.1 * amp)
        run.outcome = RelaxOutcome::ReturnedToStart;
    else if (run.distance > 5.0 * amp)
        run.outcome = RelaxOutcome::EscapedToOther;
    else
        run.outcome = RelaxOutcome::Inconclusive;
    return run;
}

}  // namespace twistmap
