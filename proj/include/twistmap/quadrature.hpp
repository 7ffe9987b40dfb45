#pragma once

#include <functional>
#include <numbers>

namespace twistmap {

/// Accuracy controls shared by every time-map evaluation.
struct QuadConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_subdivisions = 60;
    /// Largest admissible amplitude; the quarter period diverges logarithmically at pi/2.
    double alpha_cap = std::numbers::pi / 2 - 1e-9;

    /// Throws DomainError when a field violates its invariant.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
};

/// Globally adaptive 10/21-point Gauss-Kronrod quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |I|). Throws AccuracyError when
/// that needs more than cfg.max_subdivisions intervals.
QuadResult integrate_gk21(const std::function<double(double)>& f, double a, double b,
                          const QuadConfig& cfg);

}  // namespace twistmap
