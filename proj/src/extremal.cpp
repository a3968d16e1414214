#include "calabi/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace calabi {

double extremal_quartic(double m) {
    return (((m - 16.0) * m - 52.0) * m - 48.0) * m - 12.0;
}

double piece_cubic(double c) { return ((c - 3.0) * c - 9.0) * c - 6.0; }

namespace {

// Unique positive root: scan (0, 100) in unit steps for a sign change,
// bisect, then polish with Newton. Guards against multiple sign changes.
double positive_root(double (*f)(double), double (*df)(double)) {
    double lo = 0.0, hi = 0.0;
    int changes = 0;
    double prev = f(1e-12);
    for (int i = 1; i <= 100; ++i) {
        double x = static_cast<double>(i);
        double fx = f(x);
        if (prev < 0.0 && fx >= 0.0) {
            ++changes;
            lo = x - 1.0;
            hi = x;
        } else if (prev > 0.0 && fx <= 0.0) {
            ++changes;
            lo = x - 1.0;
            hi = x;
        }
        prev = fx;
    }
    if (changes != 1)
        throw std::runtime_error("positive_root: expected exactly one root in (0,100)");
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 10; ++it) {
        double fx = f(x), dfx = df(x);
        if (dfx == 0.0) break;
        double step = fx / dfx;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    return x;
}

double quartic_deriv(double m) { return ((4.0 * m - 48.0) * m - 104.0) * m - 48.0; }
double cubic_deriv(double c) { return (3.0 * c - 6.0) * c - 9.0; }

}  // namespace

double solve_k1() {
    static const double k1 = positive_root(&extremal_quartic, &quartic_deriv);
    return k1;
}

double solve_k2() {
    static const double k2 = positive_root(&piece_cubic, &cubic_deriv);
    return k2;
}

double three_piece_threshold() {
    static const double t = solve_k2() * (solve_k2() + 2.0);
    return t;
}

CaseClassification classify(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("classify: m must be positive");
    CaseClassification c;
    c.m = m;
    if (m < solve_k1()) {
        c.regime = Regime::Extremal;
    } else if (m <= three_piece_threshold()) {
        c.regime = Regime::TwoPiece;
        c.junctions = {std::sqrt(m + 1.0) - 1.0};
    } else {
        c.regime = Regime::ThreePiece;
        const double k2 = solve_k2();
        c.junctions = {k2, (m + 1.0) / (k2 + 1.0) - 1.0};
    }
    return c;
}

AffineS formal_extremal_curvature(double m) {
    const double p = (m + 6.0) * m + 6.0;  // m^2 + 6m + 6
    AffineS s;
    s.slope = 24.0 * (m + 1.0) / (m * p);
    s.intercept =
        6.0 * (((-3.0 * m - 11.0) * m - 4.0) * m + 6.0) / (m * (m + 3.0) * p);
    return s;
}

namespace {

double case1_value(double m, double t) {
    if (t <= 0.0 || t >= m) return 0.0;
    const double p = (m + 6.0) * m + 6.0;
    const double bracket = t * t * (2.0 * m + 2.0) + t * (-m * m + 4.0 * m + 6.0) + p;
    return 2.0 * t * (m - t) * bracket / (m * p * (1.0 + t));
}

}  // namespace

std::vector<double> formal_extremal_values(double m, std::span<const double> tau) {
    std::vector<double> v(tau.size());
    for (size_t i = 0; i < tau.size(); ++i) v[i] = case1_value(m, tau[i]);
    return v;
}

Profile extremal_profile(double m, const Grid& grid) {
    if (!(m > 0.0))
        throw std::invalid_argument("extremal_profile: m must be positive");
    if (m >= solve_k1())
        throw std::domain_error(
            "extremal_profile: no positive solution for m >= k1");
    return make_profile(grid, formal_extremal_values(m, grid.tau),
                        ProfileKind::Regular);
}

std::vector<double> phi1_segment(double c, std::span<const double> tau) {
    if (!(c > 0.0) || c > solve_k2() * (1.0 + 1e-12))
        throw std::domain_error("phi1_segment: need 0 < c <= k2");
    const double p = (c + 6.0) * c + 6.0;
    std::vector<double> v(tau.size());
    for (size_t i = 0; i < tau.size(); ++i) {
        const double t = tau[i];
        if (t <= 0.0 || t >= c) {
            v[i] = 0.0;
            continue;
        }
        const double bracket = t * (-c * c + 2.0 * c + 3.0) + p;
        v[i] = 2.0 * t * (c - t) * (c - t) * bracket / (c * c * p * (1.0 + t));
    }
    return v;
}

std::vector<double> psi_segment(double d, std::span<const double> sigma) {
    if (!(d > 0.0) || d > solve_k2() * (1.0 + 1e-12))
        throw std::domain_error("psi_segment: need 0 < d <= k2");
    const double p = (d + 6.0) * d + 6.0;
    std::vector<double> v(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i) {
        const double s = sigma[i];
        if (s <= 0.0 || s >= d) {
            v[i] = 0.0;
            continue;
        }
        const double bracket =
            s * ((2.0 * d + 4.0) * d + 3.0) + (((-d + 3.0) * d + 9.0) * d + 6.0);
        v[i] = 2.0 * s * s * (d - s) * bracket / (d * d * p * (1.0 + s));
    }
    return v;
}

std::vector<double> phi2_segment(double c, double d, std::span<const double> tau) {
    if (c < 0.0) throw std::domain_error("phi2_segment: need c >= 0");
    std::vector<double> sigma(tau.size());
    for (size_t i = 0; i < tau.size(); ++i) sigma[i] = (tau[i] - c) / (c + 1.0);
    std::vector<double> v = psi_segment(d, sigma);
    for (double& x : v) x *= (c + 1.0);
    return v;
}

AffineS phi1_curvature(double c) {
    const double p = (c + 6.0) * c + 6.0;
    AffineS s;
    s.slope = 12.0 * (c * c - 2.0 * c - 3.0) / (c * c * p);
    s.intercept = -6.0 * (2.0 * c * c - c - 4.0) / (c * p);
    return s;
}

AffineS psi_curvature(double d) {
    const double p = (d + 6.0) * d + 6.0;
    AffineS s;
    s.slope = 12.0 * ((2.0 * d + 4.0) * d + 3.0) / (d * d * p);
    s.intercept = -6.0 * ((3.0 * d + 5.0) * d + 2.0) / (d * p);
    return s;
}

double phi2_curvature_at(double c, double d, double tau) {
    return psi_curvature(d)((tau - c) / (c + 1.0)) / (c + 1.0);
}

double minimizer_curvature(double m, double tau) {
    const CaseClassification cls = classify(m);
    switch (cls.regime) {
        case Regime::Extremal:
            return formal_extremal_curvature(m)(tau);
        case Regime::TwoPiece: {
            const double c = cls.junctions[0];
            if (tau <= c) return phi1_curvature(c)(tau);
            return phi2_curvature_at(c, c, tau);
        }
        case Regime::ThreePiece: {
            const double k2 = cls.junctions[0];
            const double c = cls.junctions[1];
            if (tau <= k2) return phi1_curvature(k2)(tau);
            if (tau >= c) return phi2_curvature_at(c, k2, tau);
            return -2.0 / (1.0 + tau);
        }
    }
    return 0.0;
}

int snap_node_count(double m, std::span<const double> junctions, int requested) {
    if (junctions.empty()) return requested;
    const int window = std::max(8, requested / 128);
    int best_n = requested;
    double best_score = std::numeric_limits<double>::max();
    for (int n = std::max(9, requested - window); n <= requested + window; ++n) {
        const double h = m / (n - 1);
        double score = 0.0;
        for (double j : junctions) {
            const double frac = std::abs(j / h - std::round(j / h));
            score = std::max(score, frac * h);
        }
        // prefer node counts closer to the request when scores tie
        score += 1e-15 * std::abs(n - requested);
        if (score < best_score) {
            best_score = score;
            best_n = n;
        }
    }
    return best_n;
}

namespace {

Profile build_minimizer(const CaseClassification& cls, const Grid& grid) {
    const double m = cls.m;
    const int n = grid.n;
    std::vector<double> v(n, 0.0);
    const double node_tol = 1e-9 * std::max(1.0, m);
    switch (cls.regime) {
        case Regime::Extremal:
            v = formal_extremal_values(m, grid.tau);
            break;
        case Regime::TwoPiece: {
            const double c = cls.junctions[0];
            for (int i = 1; i < n - 1; ++i) {
                const double t = grid.tau[i];
                if (std::abs(t - c) <= node_tol) {
                    v[i] = 0.0;
                } else if (t < c) {
                    v[i] = phi1_segment(c, std::span<const double>(&t, 1))[0];
                } else {
                    v[i] = phi2_segment(c, c, std::span<const double>(&t, 1))[0];
                }
            }
            break;
        }
        case Regime::ThreePiece: {
            const double k2 = cls.junctions[0];
            const double c = cls.junctions[1];
            for (int i = 1; i < n - 1; ++i) {
                const double t = grid.tau[i];
                if (t >= k2 - node_tol && t <= c + node_tol) {
                    v[i] = 0.0;
                } else if (t < k2) {
                    v[i] = phi1_segment(k2, std::span<const double>(&t, 1))[0];
                } else {
                    v[i] = phi2_segment(c, k2, std::span<const double>(&t, 1))[0];
                }
            }
            break;
        }
    }
    return make_profile(grid, std::move(v), ProfileKind::SingularAllowed);
}

}  // namespace

Profile minimizer(double m, const Grid& grid) {
    const CaseClassification cls = classify(m);
    const int n = snap_node_count(m, cls.junctions, grid.n);
    return build_minimizer(cls, n == grid.n ? grid : make_grid(m, n));
}

Profile minimizer_on_grid(double m, const Grid& grid) {
    return build_minimizer(classify(m), grid);
}

namespace {

// Zero-aware second derivative of the discrete scalar curvature, evaluated
// where phi > 0 with stencils that neither cross the zero set of phi nor
// touch the one-sided endpoint values of S. Entries 0 and n-1 are zero.
template <typename Real>
std::vector<Real> spp_kernel(std::span<const Real> tau, std::span<const Real> phi,
                             Real h) {
    const int n = static_cast<int>(tau.size());
    const Real h2 = h * h;
    std::vector<Real> g(n), sv(n);
    for (int i = 0; i < n; ++i) g[i] = (Real(1) + tau[i]) * phi[i];
    auto d2g = [&](int i) -> Real {
        if (i == 0) return (Real(2) * g[0] - Real(5) * g[1] + Real(4) * g[2] - g[3]) / h2;
        if (i == n - 1)
            return (Real(2) * g[n - 1] - Real(5) * g[n - 2] + Real(4) * g[n - 3] - g[n - 4]) / h2;
        return (g[i - 1] - Real(2) * g[i] + g[i + 1]) / h2;
    };
    for (int i = 0; i < n; ++i) {
        const Real w = Real(1) + tau[i];
        sv[i] = -Real(2) / w - d2g(i) / (Real(2) * w);
    }

    auto centered = [&](int i) { return (sv[i - 1] - Real(2) * sv[i] + sv[i + 1]) / h2; };
    auto right_sided = [&](int i) {
        return (Real(2) * sv[i] - Real(5) * sv[i + 1] + Real(4) * sv[i + 2] - sv[i + 3]) / h2;
    };
    auto left_sided = [&](int i) {
        return (Real(2) * sv[i] - Real(5) * sv[i - 1] + Real(4) * sv[i - 2] - sv[i - 3]) / h2;
    };

    std::vector<Real> spp(n, Real(0));
    auto zero = [&](int i) { return phi[i] <= Real(0); };
    for (int i = 1; i < n - 1; ++i) {
        // S at the endpoints carries a different truncation constant than
        // the interior values; keep the stencil away from them, and away
        // from the kinks sitting on the zero set of phi.
        if (i == 1 && n >= 6) {
            spp[i] = right_sided(1);
        } else if (i == n - 2 && n >= 6) {
            spp[i] = left_sided(n - 2);
        } else if (!zero(i) && zero(i + 1) && i >= 4) {
            spp[i] = left_sided(i);
        } else if (!zero(i) && zero(i - 1) && i + 3 <= n - 2) {
            spp[i] = right_sided(i);
        } else {
            spp[i] = centered(i);
        }
    }
    return spp;
}

template <typename Real>
OptimalityReport summarize(std::span<const Real> phi, std::span<const Real> spp) {
    OptimalityReport rep;
    const int n = static_cast<int>(phi.size());
    for (int i = 1; i < n - 1; ++i) {
        rep.sup_phi_spp =
            std::max(rep.sup_phi_spp, std::abs(static_cast<double>(phi[i] * spp[i])));
        rep.max_concavity_violation =
            std::max(rep.max_concavity_violation, static_cast<double>(spp[i]));
    }
    rep.max_concavity_violation = std::max(0.0, rep.max_concavity_violation);
    return rep;
}

}  // namespace

std::vector<double> curvature_second_derivative(const Profile& p) {
    std::vector<double> tau(p.grid.tau.begin(), p.grid.tau.end());
    return spp_kernel<double>(tau, p.values, p.grid.h);
}

std::vector<double> euler_lagrange_residual(const Profile& p) {
    std::vector<double> r = curvature_second_derivative(p);
    for (int i = 0; i < p.grid.n; ++i) r[i] *= p.values[i];
    return r;
}

OptimalityReport check_optimality(const Profile& p) {
    const std::vector<double> spp = curvature_second_derivative(p);
    OptimalityReport rep =
        summarize<double>(p.values, std::span<const double>(spp));
    rep.boundary = boundary_check(p);
    return rep;
}

OptimalityReport minimizer_residuals_precise(double m, int n) {
    // Extended-precision mirror of check_optimality(minimizer(m, .)): the
    // double-precision residual bottoms out near eps*phi^2/h^4, which hides
    // the truncation order in refinement studies at fine grids.
    using Real = long double;
    const CaseClassification cls = classify(m);
    n = snap_node_count(m, cls.junctions, n);
    const Real h = static_cast<Real>(m) / (n - 1);
    std::vector<Real> tau(n), phi(n, Real(0));
    for (int i = 0; i < n; ++i) tau[i] = i * h;
    tau[n - 1] = m;

    const Real k2 = solve_k2();
    auto phi1 = [&](Real c, Real t) -> Real {
        if (t <= 0 || t >= c) return 0;
        const Real p = (c + 6) * c + 6;
        const Real bracket = t * (-c * c + 2 * c + 3) + p;
        return 2 * t * (c - t) * (c - t) * bracket / (c * c * p * (1 + t));
    };
    auto psi = [&](Real d, Real s) -> Real {
        if (s <= 0 || s >= d) return 0;
        const Real p = (d + 6) * d + 6;
        const Real bracket = s * ((2 * d + 4) * d + 3) + (((-d + 3) * d + 9) * d + 6);
        return 2 * s * s * (d - s) * bracket / (d * d * p * (1 + s));
    };
    auto case1 = [&](Real t) -> Real {
        if (t <= 0 || t >= m) return 0;
        const Real mm = m;
        const Real p = (mm + 6) * mm + 6;
        const Real bracket = t * t * (2 * mm + 2) + t * (-mm * mm + 4 * mm + 6) + p;
        return 2 * t * (mm - t) * bracket / (mm * p * (1 + t));
    };
    const Real node_tol = 1e-9L * std::max(1.0, m);
    for (int i = 1; i < n - 1; ++i) {
        const Real t = tau[i];
        switch (cls.regime) {
            case Regime::Extremal:
                phi[i] = case1(t);
                break;
            case Regime::TwoPiece: {
                const Real c = cls.junctions[0];
                if (std::abs(t - c) <= node_tol)
                    phi[i] = 0;
                else if (t < c)
                    phi[i] = phi1(c, t);
                else
                    phi[i] = (c + 1) * psi(c, (t - c) / (c + 1));
                break;
            }
            case Regime::ThreePiece: {
                const Real c = cls.junctions[1];
                if (t >= k2 - node_tol && t <= c + node_tol)
                    phi[i] = 0;
                else if (t < k2)
                    phi[i] = phi1(k2, t);
                else
                    phi[i] = (c + 1) * psi(k2, (t - c) / (c + 1));
                break;
            }
        }
    }
    const std::vector<Real> spp = spp_kernel<Real>(tau, phi, h);
    OptimalityReport rep = summarize<Real>(phi, std::span<const Real>(spp));
    rep.grid_n = n;
    return rep;
}

}  // namespace calabi
