#pragma once

#include <span>
#include <vector>

namespace calabi {

/// Uniform grid on [0, m] with n nodes, tau_i = i*m/(n-1).
struct Grid {
    double m = 0.0;           // right endpoint (polarisation parameter)
    int n = 0;                // node count, >= 3
    double h = 0.0;           // spacing m/(n-1)
    std::vector<double> tau;  // nodes, tau[0] = 0, tau[n-1] = m
};

Grid make_grid(double m, int n);

bool same_grid(const Grid& a, const Grid& b);

enum class Weight { Plain, OnePlusTau };

/// Quadrature of f*w over [0, m]: composite Simpson when n is odd,
/// trapezoid otherwise.
double integrate(const Grid& g, std::span<const double> f,
                 Weight w = Weight::Plain);

/// Nodal first derivative: centered interior, 3-point one-sided at the ends.
std::vector<double> first_derivative(const Grid& g, std::span<const double> f);

/// Nodal second derivative: 3-point centered interior, second-order
/// 4-point one-sided at the ends.
std::vector<double> second_derivative(const Grid& g, std::span<const double> f);

}  // namespace calabi
