#pragma once

#include <span>
#include <vector>

#include "calabi/profile.hpp"

namespace calabi {

/// Convex piecewise-linear function on [0, m], the combinatorial datum of a
/// test-configuration: breakpoints include both endpoints, successive
/// slopes are nondecreasing.
struct PiecewiseLinearConvex {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

/// Validating constructor; slope decreases up to slope_tol are accepted
/// (interpolation of discrete data carries quadrature-level jitter).
PiecewiseLinearConvex make_pl_convex(std::vector<double> breakpoints,
                                     std::vector<double> values,
                                     double slope_tol = 1e-9);

double pl_value(const PiecewiseLinearConvex& h, double tau);
double pl_integral(const PiecewiseLinearConvex& h);           // int h dtau, exact
double pl_weighted_integral(const PiecewiseLinearConvex& h);  // int h (1+tau) dtau

/// F(h) = h(0) + (1+m) h(m) - 2 int h dtau - S_hat int h (1+tau) dtau.
/// Piecewise-linear integrals are exact; scalar-field integrals use the
/// grid quadrature.
double futaki_invariant(const PiecewiseLinearConvex& h, double m);
double futaki_invariant(const ScalarField& h, double m);

/// ||h||^2 = int (h - h_bar)^2 (1+tau) dtau with h_bar the (1+tau)-average.
double futaki_norm(const PiecewiseLinearConvex& h, double m);
double futaki_norm(const ScalarField& h, double m);

struct FutakiIntegral {
    double value = 0.0;
    bool hypothesis_ok = true;  // h linear wherever phi does not vanish
};

/// F(h) computed as int h (S(phi) - S_hat)(1+tau) dtau. Equals the direct
/// formula when h is linear on every interval where phi > 0; otherwise the
/// value is still returned with hypothesis_ok = false.
FutakiIntegral futaki_via_integral(const PiecewiseLinearConvex& h, const Profile& phi);
FutakiIntegral futaki_via_integral(const ScalarField& h, const Profile& phi);

/// Convex PL interpolant of -S(phi) at k uniformly spaced breakpoints, with
/// the kink locations of S (endpoints of the zero runs of phi) added to the
/// breakpoint set. Requires S(phi) concave up to grid-order tolerance.
PiecewiseLinearConvex approximate_neg_S(const Profile& phi, int k);

struct SweepRow {
    int k = 0;
    double futaki = 0.0;
    double norm = 0.0;
    double ratio = 0.0;  // -F/||h||
};

/// Donaldson lower-bound sweep: ratios -F(h_k)/||h_k|| for the interpolants
/// of -S(phi); they approach ||S(phi) - S_hat|| from below as k grows.
std::vector<SweepRow> lower_bound_sweep(const Profile& phi, std::span<const int> ks);

}  // namespace calabi
