#pragma once

// Time-maps of the planar system x' = y, y' = -sin 2x.
//
// Orbits lie on level sets of V(x, y) = y^2 - cos 2x. Closed orbits are
// labelled by the amplitude alpha where they cross the x-axis; open orbits
// (on or above the separatrix through (+-pi/2, 0)) by the height beta where
// they cross the y-axis. Every kernel is evaluated after the substitution
// sin x = sin(alpha) sin(theta), which leaves a bounded integrand.

#include <numbers>

#include "twistmap/quadrature.hpp"

namespace twistmap {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

enum class Ordering { Ascending, Equal, Descending };

/// Boundary angles of the cell: x(-L) = -phi0 and x(L) = phi1.
class CellParams {
public:
    /// Throws DomainError unless both angles lie in (0, pi/2).
    CellParams(double phi0, double phi1);

    double phi0() const { return phi0_; }
    double phi1() const { return phi1_; }
    double phi_min() const { return phi0_ < phi1_ ? phi0_ : phi1_; }
    double phi_max() const { return phi0_ < phi1_ ? phi1_ : phi0_; }
    Ordering ordering() const;
    bool symmetric() const { return phi0_ == phi1_; }
    /// phi0 <= phi1; all branch formulas are written for this orientation.
    bool canonical() const { return phi0_ <= phi1_; }

    friend bool operator==(const CellParams&, const CellParams&) = default;

private:
    double phi0_;
    double phi1_;
};

enum class Regime { Closed, Open };

/// Energy-level coordinate of an orbit.
///
/// Closed orbits carry the amplitude alpha in (0, pi/2) and energy -cos 2alpha;
/// open orbits carry the crossing height beta >= sqrt(2) and energy beta^2 - 1.
class OrbitParam {
public:
    static OrbitParam closed(double alpha);
    static OrbitParam open(double beta);
    /// Closed below the separatrix (E < 1), open on or above it.
    static OrbitParam from_energy(double energy);

    Regime regime() const { return regime_; }
    bool is_closed() const { return regime_ == Regime::Closed; }
    /// alpha for closed orbits, beta for open ones.
    double value() const { return value_; }
    double energy() const { return energy_; }
    double alpha() const;
    /// Height of the y-axis crossing; sqrt(2) sin(alpha) for closed orbits.
    double beta() const;
    /// sin^2(alpha), the convexity coordinate of the folded branches.
    double alpha_tilde() const;

    friend bool operator==(const OrbitParam&, const OrbitParam&) = default;

private:
    OrbitParam(Regime r, double v, double e) : regime_(r), value_(v), energy_(e) {}
    Regime regime_;
    double value_;
    double energy_;
};

/// T(alpha): time from the y-axis to the turning point (alpha, 0).
double quarter_period(double alpha, const QuadConfig& cfg = {});

/// T1(alpha, phi): time from the y-axis to the line x = phi on the orbit through (alpha, 0).
double time_to_line(double alpha, double phi, const QuadConfig& cfg = {});

/// T2(beta, phi): same, for orbits crossing the y-axis at height beta >= sqrt(2).
double time_above(double beta, double phi, const QuadConfig& cfg = {});

double beta_of_alpha(double alpha);
double alpha_of_beta(double beta);

/// dT/dalpha, by differentiation under the integral sign.
double d_quarter_period(double alpha, const QuadConfig& cfg = {});
/// dT/d(sin^2 alpha).
double d_quarter_period_dtilde(double alpha, const QuadConfig& cfg = {});

/// dT1/dalpha at fixed phi; requires phi < alpha.
double d_time_to_line_dalpha(double alpha, double phi, const QuadConfig& cfg = {});
/// dT1/d(sin^2 alpha) at fixed phi; diverges to -infinity as alpha -> phi.
double d_time_to_line_dtilde(double alpha, double phi, const QuadConfig& cfg = {});

}  // namespace twistmap
