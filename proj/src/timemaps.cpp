#include "twistmap/timemaps.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twistmap/errors.hpp"

namespace twistmap {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this gap, arcsin(sin phi / sin alpha) is too ill-conditioned to trust.
constexpr double kCoincidentGap = 1e-10;

[[noreturn]] void domain_fail(const char* op, const char* what, double a, double b = NAN) {
    std::ostringstream msg;
    msg.precision(17);
    msg << op << ": " << what << " (" << a;
    if (!std::isnan(b))
        msg << ", " << b;
    msg << ")";
    throw DomainError(msg.str());
}

void check_alpha(const char* op, double alpha, const QuadConfig& cfg) {
    if (!(alpha > 0.0) || !(alpha <= cfg.alpha_cap))
        domain_fail(op, "alpha outside (0, alpha_cap]", alpha);
}

// 1 - sin^2(alpha) cos^2(psi) = sin^2(psi) + cos^2(alpha) cos^2(psi), psi = pi/2 - theta.
inline double modulus_gap(double psi, double cos2_alpha) {
    const double s = std::sin(psi);
    const double c = std::cos(psi);
    return s * s + cos2_alpha * c * c;
}

// pi/2 minus the upper limit of the transformed integral for the line x = phi.
inline double co_limit(double alpha, double phi) {
    return std::atan2(std::sqrt(std::sin(alpha - phi) * std::sin(alpha + phi)), std::sin(phi));
}

// Both kernels below are integrated in u with theta = pi/2 - psi, psi = cos(alpha) sinh(u).
// The integrand peak of width cos(alpha) at theta = pi/2 becomes a smooth plateau, and
// cos(theta) = sin(psi) carries no cancellation.
struct PeakMap {
    double c;
    double u_lo;
    double u_hi;
};

PeakMap peak_map(double alpha, double psi_lo) {
    const double c = std::cos(alpha);
    return {c, std::asinh(psi_lo / c), std::asinh(kHalfPi / c)};
}

// (1/sqrt2) * int_0^{pi/2 - psi_lo} dtheta / sqrt(1 - sin^2(alpha) sin^2(theta))
double first_kind(double alpha, double psi_lo, const QuadConfig& cfg) {
    const PeakMap m = peak_map(alpha, psi_lo);
    const double c2 = m.c * m.c;
    auto f = [&m, c2](double u) {
        const double psi = m.c * std::sinh(u);
        return m.c * std::cosh(u) / std::sqrt(modulus_gap(psi, c2));
    };
    return integrate_gk21(f, m.u_lo, m.u_hi, cfg).value / kSqrt2;
}

// (1/(2 sqrt2)) * int_0^{pi/2 - psi_lo} sin^2(theta) / (1 - sin^2(alpha) sin^2(theta))^{3/2} dtheta,
// the derivative of first_kind with respect to sin^2(alpha) at fixed upper limit.
double first_kind_dm(double alpha, double psi_lo, const QuadConfig& cfg) {
    const PeakMap m = peak_map(alpha, psi_lo);
    const double c2 = m.c * m.c;
    auto f = [&m, c2](double u) {
        const double psi = m.c * std::sinh(u);
        const double cp = std::cos(psi);
        const double g = modulus_gap(psi, c2);
        return cp * cp * m.c * std::cosh(u) / (g * std::sqrt(g));
    };
    return integrate_gk21(f, m.u_lo, m.u_hi, cfg).value / (2.0 * kSqrt2);
}

}  // namespace

CellParams::CellParams(double phi0, double phi1) : phi0_(phi0), phi1_(phi1) {
    if (!(phi0 > 0.0 && phi0 < kHalfPi) || !(phi1 > 0.0 && phi1 < kHalfPi))
        domain_fail("CellParams", "boundary angles must lie in (0, pi/2)", phi0, phi1);
}

Ordering CellParams::ordering() const {
    if (phi0_ < phi1_)
        return Ordering::Ascending;
    if (phi0_ > phi1_)
        return Ordering::Descending;
    return Ordering::Equal;
}

OrbitParam OrbitParam::closed(double alpha) {
    if (!(alpha > 0.0 && alpha < kHalfPi))
        domain_fail("OrbitParam::closed", "amplitude must lie in (0, pi/2)", alpha);
    return {Regime::Closed, alpha, -std::cos(2.0 * alpha)};
}

OrbitParam OrbitParam::open(double beta) {
    if (!(beta >= kSqrt2) || !std::isfinite(beta))
        domain_fail("OrbitParam::open", "crossing height must be >= sqrt(2)", beta);
    return {Regime::Open, beta, beta * beta - 1.0};
}

OrbitParam OrbitParam::from_energy(double energy) {
    if (!(energy > -1.0) || !std::isfinite(energy))
        domain_fail("OrbitParam::from_energy", "energy must exceed -1", energy);
    if (energy < 1.0)
        return closed(std::asin(std::sqrt(0.5 * (1.0 + energy))));
    return open(std::sqrt(1.0 + energy));
}

double OrbitParam::alpha() const {
    if (regime_ != Regime::Closed)
        throw DomainError("OrbitParam::alpha: open orbits have no turning point");
    return value_;
}

double OrbitParam::beta() const {
    return regime_ == Regime::Closed ? beta_of_alpha(value_) : value_;
}

double OrbitParam::alpha_tilde() const {
    const double s = std::sin(alpha());
    return s * s;
}

double quarter_period(double alpha, const QuadConfig& cfg) {
    check_alpha("quarter_period", alpha, cfg);
    return first_kind(alpha, 0.0, cfg);
}

double time_to_line(double alpha, double phi, const QuadConfig& cfg) {
    check_alpha("time_to_line", alpha, cfg);
    if (!(phi > 0.0) || phi > alpha)
        domain_fail("time_to_line", "need 0 < phi <= alpha", alpha, phi);
    if (alpha - phi < kCoincidentGap)
        return quarter_period(phi, cfg);
    return first_kind(alpha, co_limit(alpha, phi), cfg);
}

double time_above(double beta, double phi, const QuadConfig& cfg) {
    if (!(beta >= kSqrt2) || !std::isfinite(beta))
        domain_fail("time_above", "beta below the separatrix height sqrt(2)", beta);
    if (!(phi > 0.0) || phi > kHalfPi)
        domain_fail("time_above", "need 0 < phi <= pi/2", phi);
    // beta^2 + cos 2x - 1 = beta^2 (cos^2 x + (1 - 2/beta^2) sin^2 x)
    const double excess = (beta - kSqrt2) * (beta + kSqrt2) / (beta * beta);
    if (excess == 0.0 && std::cos(phi) < 1e-12)
        domain_fail("time_above", "the separatrix never reaches x = pi/2 in finite time", beta, phi);
    const double psi_lo = (kHalfPi - phi) + 6.123233995736766e-17;
    if (excess == 0.0) {
        auto f = [](double psi) { return 1.0 / std::sin(psi); };
        return integrate_gk21(f, psi_lo, kHalfPi, cfg).value / beta;
    }
    // Same peak map as the closed kernels, with sqrt(excess) in place of cos(alpha).
    const double c = std::sqrt(excess);
    auto f = [c, excess](double u) {
        const double psi = c * std::sinh(u);
        return c * std::cosh(u) / std::sqrt(modulus_gap(psi, excess));
    };
    return integrate_gk21(f, std::asinh(psi_lo / c), std::asinh(kHalfPi / c), cfg).value / beta;
}

double beta_of_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < kHalfPi))
        domain_fail("beta_of_alpha", "alpha outside (0, pi/2)", alpha);
    return kSqrt2 * std::sin(alpha);
}

double alpha_of_beta(double beta) {
    if (!(beta > 0.0) || !(beta < kSqrt2))
        domain_fail("alpha_of_beta", "no closed orbit crosses the y-axis at this height", beta);
    return std::asin(beta / kSqrt2);
}

double d_quarter_period_dtilde(double alpha, const QuadConfig& cfg) {
    check_alpha("d_quarter_period", alpha, cfg);
    return first_kind_dm(alpha, 0.0, cfg);
}

double d_quarter_period(double alpha, const QuadConfig& cfg) {
    return std::sin(2.0 * alpha) * d_quarter_period_dtilde(alpha, cfg);
}

double d_time_to_line_dtilde(double alpha, double phi, const QuadConfig& cfg) {
    check_alpha("d_time_to_line", alpha, cfg);
    if (!(phi > 0.0) || phi > alpha)
        domain_fail("d_time_to_line", "need 0 < phi <= alpha", alpha, phi);
    const double gap = std::sin(alpha - phi) * std::sin(alpha + phi);
    if (gap <= 0.0)
        return -kInf;
    // Leibniz: the integrand derivative plus the moving-endpoint term.
    const double sa = std::sin(alpha);
    const double endpoint =
        std::sin(phi) / (2.0 * kSqrt2 * sa * sa * std::cos(phi) * std::sqrt(gap));
    return first_kind_dm(alpha, co_limit(alpha, phi), cfg) - endpoint;
}

double d_time_to_line_dalpha(double alpha, double phi, const QuadConfig& cfg) {
    check_alpha("d_time_to_line_dalpha", alpha, cfg);
    if (!(phi > 0.0) || !(phi < alpha))
        domain_fail("d_time_to_line_dalpha", "need 0 < phi < alpha", alpha, phi);
    return std::sin(2.0 * alpha) * d_time_to_line_dtilde(alpha, phi, cfg);
}

}  // namespace twistmap
