#include "calabi/futaki.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "calabi/extremal.hpp"

namespace calabi {

PiecewiseLinearConvex make_pl_convex(std::vector<double> breakpoints,
                                     std::vector<double> values,
                                     double slope_tol) {
    const size_t k = breakpoints.size();
    if (k < 2 || values.size() != k)
        throw std::invalid_argument("make_pl_convex: need matching breakpoints/values");
    if (breakpoints.front() != 0.0)
        throw std::invalid_argument("make_pl_convex: first breakpoint must be 0");
    for (size_t i = 0; i + 1 < k; ++i)
        if (!(breakpoints[i + 1] > breakpoints[i]))
            throw std::invalid_argument("make_pl_convex: breakpoints must increase");
    double prev = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < k; ++i) {
        const double s =
            (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
        if (s < prev - slope_tol)
            throw std::invalid_argument("make_pl_convex: slopes must not decrease");
        prev = std::max(prev, s);
    }
    return PiecewiseLinearConvex{std::move(breakpoints), std::move(values)};
}

double pl_value(const PiecewiseLinearConvex& h, double tau) {
    const auto& x = h.breakpoints;
    if (tau <= x.front()) return h.values.front();
    if (tau >= x.back()) return h.values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), tau);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double t = (tau - x[i]) / (x[i + 1] - x[i]);
    return h.values[i] + t * (h.values[i + 1] - h.values[i]);
}

double pl_integral(const PiecewiseLinearConvex& h) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < h.breakpoints.size(); ++i)
        s += 0.5 * (h.values[i] + h.values[i + 1]) *
             (h.breakpoints[i + 1] - h.breakpoints[i]);
    return s;
}

double pl_weighted_integral(const PiecewiseLinearConvex& h) {
    // per segment: h = h0 + s*u, 1+tau = (1+x0) + u, u in [0, D]
    double total = 0.0;
    for (size_t i = 0; i + 1 < h.breakpoints.size(); ++i) {
        const double x0 = h.breakpoints[i];
        const double d = h.breakpoints[i + 1] - x0;
        const double h0 = h.values[i];
        const double s = (h.values[i + 1] - h0) / d;
        const double w0 = 1.0 + x0;
        total += h0 * w0 * d + (s * w0 + h0) * d * d / 2.0 + s * d * d * d / 3.0;
    }
    return total;
}

namespace {

// int (h - hbar)^2 (1+tau) over one segment, exact.
double segment_centered_sq(double x0, double d, double h0, double s, double hbar) {
    const double e0 = h0 - hbar;
    const double w0 = 1.0 + x0;
    const double a = e0 * e0 * w0;
    const double b = 2.0 * s * e0 * w0 + e0 * e0;
    const double c = s * s * w0 + 2.0 * s * e0;
    const double q = s * s;
    return a * d + b * d * d / 2.0 + c * d * d * d / 3.0 + q * d * d * d * d / 4.0;
}

double volume(double m) { return m + 0.5 * m * m; }  // int (1+tau) dtau

}  // namespace

double futaki_invariant(const PiecewiseLinearConvex& h, double m) {
    if (std::abs(h.breakpoints.back() - m) > 1e-9 * std::max(1.0, m))
        throw std::invalid_argument("futaki_invariant: h not defined on [0,m]");
    return h.values.front() + (1.0 + m) * h.values.back() - 2.0 * pl_integral(h) -
           average_scalar_curvature(m) * pl_weighted_integral(h);
}

double futaki_invariant(const ScalarField& h, double m) {
    if (std::abs(h.grid.m - m) > 1e-9 * std::max(1.0, m))
        throw std::invalid_argument("futaki_invariant: grid does not span [0,m]");
    return h.values.front() + (1.0 + m) * h.values.back() -
           2.0 * integrate(h.grid, h.values, Weight::Plain) -
           average_scalar_curvature(m) * integrate(h.grid, h.values, Weight::OnePlusTau);
}

double futaki_norm(const PiecewiseLinearConvex& h, double m) {
    const double hbar = pl_weighted_integral(h) / volume(m);
    double sq = 0.0;
    for (size_t i = 0; i + 1 < h.breakpoints.size(); ++i) {
        const double x0 = h.breakpoints[i];
        const double d = h.breakpoints[i + 1] - x0;
        const double s = (h.values[i + 1] - h.values[i]) / d;
        sq += segment_centered_sq(x0, d, h.values[i], s, hbar);
    }
    return std::sqrt(std::max(0.0, sq));
}

double futaki_norm(const ScalarField& h, double m) {
    const double hbar = integrate(h.grid, h.values, Weight::OnePlusTau) / volume(m);
    std::vector<double> f(h.grid.n);
    for (int i = 0; i < h.grid.n; ++i) {
        const double e = h.values[i] - hbar;
        f[i] = e * e;
    }
    return std::sqrt(std::max(0.0, integrate(h.grid, f, Weight::OnePlusTau)));
}

namespace {

// Zero runs of phi strictly inside (0, m); each run contributes its first
// and last node as locations where -S may legitimately kink.
std::vector<double> interior_zero_kinks(const Profile& phi) {
    std::vector<double> kinks;
    const int n = phi.grid.n;
    int i = 1;
    while (i < n - 1) {
        if (phi.values[i] == 0.0) {
            int j = i;
            while (j + 1 < n - 1 && phi.values[j + 1] == 0.0) ++j;
            kinks.push_back(phi.grid.tau[i]);
            if (j > i) kinks.push_back(phi.grid.tau[j]);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return kinks;
}

bool near_zero_of(const Profile& phi, double tau) {
    // the discrete S wobbles within a two-node footprint of a junction, so
    // kinks there are still consistent with the zero set of phi
    const double h = phi.grid.h;
    const int i = std::clamp(static_cast<int>(std::lround(tau / h)), 0,
                             phi.grid.n - 1);
    for (int j = std::max(0, i - 2); j <= std::min(phi.grid.n - 1, i + 2); ++j)
        if (phi.values[j] == 0.0) return true;
    return false;
}

double field_value_at(const ScalarField& f, double tau) {
    const double h = f.grid.h;
    const int n = f.grid.n;
    int i = static_cast<int>(std::floor(tau / h));
    i = std::clamp(i, 0, n - 2);
    const double t = (tau - f.grid.tau[i]) / h;
    return f.values[i] * (1.0 - t) + f.values[i + 1] * t;
}

}  // namespace

FutakiIntegral futaki_via_integral(const PiecewiseLinearConvex& h, const Profile& phi) {
    const Grid& g = phi.grid;
    const ScalarField s = scalar_curvature(phi);
    const double sbar = average_scalar_curvature(g.m);
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i)
        f[i] = pl_value(h, g.tau[i]) * (s.values[i] - sbar);
    FutakiIntegral out;
    out.value = integrate(g, f, Weight::OnePlusTau);
    // kinks of h must sit on the zero set of phi
    for (size_t i = 1; i + 1 < h.breakpoints.size(); ++i) {
        const double sl =
            (h.values[i] - h.values[i - 1]) / (h.breakpoints[i] - h.breakpoints[i - 1]);
        const double sr =
            (h.values[i + 1] - h.values[i]) / (h.breakpoints[i + 1] - h.breakpoints[i]);
        if (std::abs(sr - sl) > 1e-9 * (1.0 + std::abs(sl)) &&
            !near_zero_of(phi, h.breakpoints[i]))
            out.hypothesis_ok = false;
    }
    return out;
}

FutakiIntegral futaki_via_integral(const ScalarField& h, const Profile& phi) {
    if (!same_grid(h.grid, phi.grid))
        throw std::invalid_argument("futaki_via_integral: grids differ");
    const Grid& g = phi.grid;
    const ScalarField s = scalar_curvature(phi);
    const double sbar = average_scalar_curvature(g.m);
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = h.values[i] * (s.values[i] - sbar);
    FutakiIntegral out;
    out.value = integrate(g, f, Weight::OnePlusTau);
    // detect kinks of h against an O(1/h) threshold
    const auto d2 = second_derivative(g, h.values);
    double osc = *std::max_element(h.values.begin(), h.values.end()) -
                 *std::min_element(h.values.begin(), h.values.end());
    const double kink_tol = 1e-3 * (osc + 1e-12) / g.h;
    for (int i = 2; i < g.n - 2; ++i) {
        if (std::abs(d2[i]) > kink_tol && !near_zero_of(phi, g.tau[i]))
            out.hypothesis_ok = false;
    }
    return out;
}

PiecewiseLinearConvex approximate_neg_S(const Profile& phi, int k) {
    if (k < 2) throw std::invalid_argument("approximate_neg_S: need k >= 2");
    const Grid& g = phi.grid;
    const ScalarField s = scalar_curvature(phi);

    const OptimalityReport rep = check_optimality(phi);
    double osc = *std::max_element(s.values.begin(), s.values.end()) -
                 *std::min_element(s.values.begin(), s.values.end());
    if (rep.max_concavity_violation > 1e-3 * (osc + 1e-12))
        throw std::domain_error("approximate_neg_S: S(phi) is not concave");

    std::vector<double> bp(k);
    for (int i = 0; i < k; ++i) bp[i] = g.m * i / (k - 1);
    bp.back() = g.m;
    for (double kink : interior_zero_kinks(phi)) bp.push_back(kink);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [&](double a, double b) {
                             return std::abs(a - b) < 1e-12 * std::max(1.0, g.m);
                         }),
             bp.end());
    bp.front() = 0.0;
    bp.back() = g.m;

    std::vector<double> vals(bp.size());
    for (size_t i = 0; i < bp.size(); ++i) vals[i] = -field_value_at(s, bp[i]);

    // Interpolated discrete data wobbles at quadrature order; scale the
    // convexity slack accordingly.
    double min_gap = g.m;
    for (size_t i = 0; i + 1 < bp.size(); ++i)
        min_gap = std::min(min_gap, bp[i + 1] - bp[i]);
    const double slope_tol =
        1e-12 + 50.0 * g.h * g.h * (1.0 + osc) / std::max(min_gap, g.h);
    return make_pl_convex(std::move(bp), std::move(vals), slope_tol);
}

std::vector<SweepRow> lower_bound_sweep(const Profile& phi, std::span<const int> ks) {
    std::vector<SweepRow> rows;
    rows.reserve(ks.size());
    for (int k : ks) {
        const PiecewiseLinearConvex h = approximate_neg_S(phi, k);
        SweepRow r;
        r.k = k;
        r.futaki = futaki_invariant(h, phi.grid.m);
        r.norm = futaki_norm(h, phi.grid.m);
        r.ratio = r.norm > 0.0 ? -r.futaki / r.norm : 0.0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace calabi
