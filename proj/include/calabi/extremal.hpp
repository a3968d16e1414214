#pragma once

#include <span>
#include <vector>

#include "calabi/profile.hpp"

namespace calabi {

// Critical polarisation constants. k1 is the unique positive root of
// m^4 - 16m^3 - 52m^2 - 48m - 12 (largest m admitting a smooth extremal
// profile); k2 is the unique positive root of c^3 - 3c^2 - 9c - 6 (largest
// piece carrying a complete extremal profile). Computed once and cached.
double solve_k1();
double solve_k2();
double three_piece_threshold();  // k2*(k2+2)

double extremal_quartic(double m);  // residual polynomial for k1
double piece_cubic(double c);       // residual polynomial for k2

enum class Regime { Extremal, TwoPiece, ThreePiece };

/// Which of the three minimizer constructions applies at polarisation m,
/// with the junction locations (empty; {c}; or {k2, c}).
struct CaseClassification {
    Regime regime = Regime::Extremal;
    double m = 0.0;
    std::vector<double> junctions;
};

CaseClassification classify(double m);

/// Affine scalar curvature S = slope*tau + intercept.
struct AffineS {
    double slope = 0.0;
    double intercept = 0.0;
    double operator()(double tau) const { return slope * tau + intercept; }
};

/// S(Phi) of the formal solution of S'' = 0 with profile boundary
/// conditions, defined for every m > 0 (Phi itself need not be positive).
AffineS formal_extremal_curvature(double m);

/// Nodal values of the formal closed-form solution (ignores positivity).
std::vector<double> formal_extremal_values(double m, std::span<const double> tau);

/// The smooth extremal profile; requires m < k1.
Profile extremal_profile(double m, const Grid& grid);

// Building blocks of the glued minimizers. phi1 solves S''=0 on [0,c] with
// phi1(0)=phi1(c)=0, phi1'(0)=2, phi1'(c)=0 (requires 0 < c <= k2); psi is
// its mirror image normalised to [0,d]; phi2 is psi rescaled to live on
// [c, (c+1)d+c].
std::vector<double> phi1_segment(double c, std::span<const double> tau);
std::vector<double> psi_segment(double d, std::span<const double> sigma);
std::vector<double> phi2_segment(double c, double d, std::span<const double> tau);
AffineS phi1_curvature(double c);
AffineS psi_curvature(double d);
double phi2_curvature_at(double c, double d, double tau);

/// Exact scalar curvature of the minimizer at tau (piecewise affine, with
/// -2/(1+tau) on the collapsed band in the three-piece regime).
double minimizer_curvature(double m, double tau);

/// Node count near `requested` that places the junctions as close to nodes
/// as possible (exact when junction/m is rational with small denominator).
int snap_node_count(double m, std::span<const double> junctions, int requested);

/// The Calabi minimizer for any m > 0. May adjust the node count so that
/// junctions are nodal; the returned profile carries its own grid.
Profile minimizer(double m, const Grid& grid);

/// Same construction evaluated on the given grid unchanged (junctions may
/// fall between nodes). Used when a fixed grid is required, e.g. by the flow.
Profile minimizer_on_grid(double m, const Grid& grid);

/// S'' of the discrete scalar curvature, evaluated with stencils that stay
/// on one side of the zero set of phi and avoid the one-sided endpoint
/// values of S, so the result is uniformly second order where phi > 0.
/// Entries 0 and n-1 are unused and set to zero.
std::vector<double> curvature_second_derivative(const Profile& p);

/// Nodal Euler-Lagrange residual phi * S''.
std::vector<double> euler_lagrange_residual(const Profile& p);

struct OptimalityReport {
    double sup_phi_spp = 0.0;            // sup |phi * S''|
    double max_concavity_violation = 0.0;  // max positive part of S''
    BoundaryCheck boundary;
    int grid_n = 0;  // set by the precise path (after junction snapping)
    bool passes(double tol) const {
        return sup_phi_spp <= tol && max_concavity_violation <= tol && boundary.ok();
    }
};

OptimalityReport check_optimality(const Profile& p);

/// check_optimality of minimizer(m) on an n-node grid, with the profile and
/// both residuals evaluated in extended precision. In double the residual
/// bottoms out near eps*phi^2/h^4, which masks the truncation order in
/// refinement studies on fine grids; this path measures it cleanly.
OptimalityReport minimizer_residuals_precise(double m, int n);

}  // namespace calabi
