#include "calabi/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace calabi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double one_sided_slope_left(const Grid& g, const std::vector<double>& v) {
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * g.h);
}

double one_sided_slope_right(const Grid& g, const std::vector<double>& v) {
    const int n = g.n;
    return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * g.h);
}

}  // namespace

double calabi_functional(const Profile& phi) {
    const ScalarField s = scalar_curvature(phi);
    const AffineS line = formal_extremal_curvature(phi.grid.m);
    std::vector<double> f(phi.grid.n);
    for (int i = 0; i < phi.grid.n; ++i) {
        const double d = s.values[i] - line(phi.grid.tau[i]);
        f[i] = d * d;
    }
    return integrate(phi.grid, f, Weight::OnePlusTau);
}

namespace {

// int_0^m (a*tau + b)^2 (1+tau) dtau, exactly.
double affine_sq_weighted_integral(double a, double b, double m) {
    const double c3 = a * a;
    const double c2 = a * a + 2.0 * a * b;
    const double c1 = 2.0 * a * b + b * b;
    const double c0 = b * b;
    const double m2 = m * m;
    return c3 * m2 * m2 / 4.0 + c2 * m2 * m / 3.0 + c1 * m2 / 2.0 + c0 * m;
}

}  // namespace

double calabi_functional_alt(const Profile& phi) {
    const ScalarField s = scalar_curvature(phi);
    std::vector<double> f(phi.grid.n);
    for (int i = 0; i < phi.grid.n; ++i) f[i] = s.values[i] * s.values[i];
    const AffineS line = formal_extremal_curvature(phi.grid.m);
    return integrate(phi.grid, f, Weight::OnePlusTau) -
           affine_sq_weighted_integral(line.slope, line.intercept, phi.grid.m);
}

double formal_extremal_deviation_sq(double m) {
    const AffineS line = formal_extremal_curvature(m);
    const double sbar = average_scalar_curvature(m);
    return affine_sq_weighted_integral(line.slope, line.intercept - sbar, m);
}

double mabuchi_modified(const Profile& phi, const Profile& psi_min) {
    if (!same_grid(phi.grid, psi_min.grid))
        throw std::invalid_argument("mabuchi_modified: grids differ");
    const Grid& g = phi.grid;
    const int n = g.n;
    const auto& f = phi.values;
    const auto& psi = psi_min.values;

    // Interior zeros: +inf when the minimizer stays positive there, -inf
    // when both vanish on a band (the log term diverges).
    for (int i = 1; i < n - 1; ++i) {
        if (f[i] == 0.0 && psi[i] > 0.0) return kInf;
    }
    for (int i = 1; i < n - 2; ++i) {
        if (f[i] == 0.0 && f[i + 1] == 0.0) return -kInf;
    }

    // Ratio term by quadrature of the nodal Psi/phi, endpoint values from
    // one-sided slopes (both profiles vanish to first order there).
    std::vector<double> r(n);
    r[0] = one_sided_slope_left(g, psi) / one_sided_slope_left(g, f);
    r[n - 1] = one_sided_slope_right(g, psi) / one_sided_slope_right(g, f);
    for (int i = 1; i < n - 1; ++i) {
        if (f[i] > 0.0) {
            r[i] = psi[i] / f[i];
        } else {
            // isolated touching zero; ratio of the quadratic coefficients
            const double denom = f[i - 1] + f[i + 1];
            if (denom <= 0.0) return kInf;
            r[i] = (psi[i - 1] + psi[i + 1]) / denom;
        }
    }
    const double ratio_term = integrate(g, r, Weight::OnePlusTau);

    // Log term cell by cell. Regular cells use the trapezoid rule; cells
    // touching a zero of phi integrate the model phi ~ C * dist^p
    // analytically (p = 1 at the domain endpoints, p = 2 at interior zeros).
    const double h = g.h;
    double log_term = 0.0;
    auto wgt = [&](int i) { return 1.0 + g.tau[i]; };
    for (int i = 0; i < n - 1; ++i) {
        const bool lz = f[i] == 0.0, rz = f[i + 1] == 0.0;
        if (!lz && !rz) {
            log_term += 0.5 * h *
                        (std::log(f[i]) * wgt(i) + std::log(f[i + 1]) * wgt(i + 1));
        } else if (lz && i == 0) {
            // int_0^h log(f1 * tau/h) (1+tau) dtau
            log_term += std::log(f[1]) * (h + 0.5 * h * h) - h - 0.25 * h * h;
        } else if (rz && i == n - 2) {
            const double m = g.m;
            log_term += std::log(f[n - 2]) * h * (1.0 + m - 0.5 * h) -
                        (1.0 + m) * h + 0.25 * h * h;
        } else {
            const double wm = 1.0 + g.tau[i] + 0.5 * h;
            const double inner = lz ? f[i + 1] : f[i];
            log_term += wm * h * (std::log(inner) - 2.0);
        }
    }
    return ratio_term + log_term;
}

double f_functional(const Profile& phi, const Profile& theta) {
    if (!same_grid(phi.grid, theta.grid))
        throw std::invalid_argument("f_functional: grids differ");
    const Grid& g = phi.grid;
    const int n = g.n;
    const auto& f = phi.values;
    const auto& th = theta.values;
    std::vector<double> q(n);
    q[0] = one_sided_slope_left(g, th) / one_sided_slope_left(g, f);
    q[n - 1] = one_sided_slope_right(g, th) / one_sided_slope_right(g, f);
    for (int i = 1; i < n - 1; ++i) {
        if (f[i] > 0.0) {
            q[i] = th[i] / f[i];
        } else if (th[i] == 0.0) {
            const double denom = f[i - 1] + f[i + 1];
            if (denom <= 0.0) return kInf;
            q[i] = (th[i - 1] + th[i + 1]) / denom;
        } else {
            return kInf;
        }
    }
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) {
        if (!(q[i] > 0.0)) return kInf;
        integrand[i] = q[i] - std::log(q[i]);
    }
    return integrate(g, integrand, Weight::Plain);
}

double l_functional(const Profile& phi) {
    const ScalarField s = scalar_curvature(phi);
    const std::vector<double> spp = second_derivative(phi.grid, s.values);
    std::vector<double> f(phi.grid.n);
    for (int i = 0; i < phi.grid.n; ++i) {
        const double v = phi.values[i] * spp[i];
        f[i] = v * v;
    }
    return integrate(phi.grid, f, Weight::OnePlusTau);
}

EnergyReport energy_report(const Profile& phi, const Profile& psi_min,
                           const Profile& theta) {
    EnergyReport r;
    r.calabi = calabi_functional(phi);
    r.mabuchi = mabuchi_modified(phi, psi_min);
    r.f_functional = f_functional(phi, theta);
    r.l_functional = l_functional(phi);
    return r;
}

}  // namespace calabi
