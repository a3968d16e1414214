#pragma once

#include <string>
#include <vector>

#include "calabi/grid.hpp"

namespace calabi {

enum class ProfileKind { Regular, SingularAllowed };

/// Momentum profile: nodal values of phi on a grid, phi(0) = phi(m) = 0,
/// phi'(0) = 2, phi'(m) = -2, phi >= 0 (strictly positive on the interior
/// for kind Regular).
struct Profile {
    Grid grid;
    std::vector<double> values;
    ProfileKind kind = ProfileKind::Regular;
};

/// Samples of a function of tau on the same grid as the profile that
/// produced it (e.g. the scalar curvature S(phi)).
struct ScalarField {
    Grid grid;
    std::vector<double> values;
};

struct BoundaryCheck {
    double left_value = 0.0;   // |phi(0)|
    double right_value = 0.0;  // |phi(m)|
    double left_slope = 0.0;   // |phi'(0) - 2|
    double right_slope = 0.0;  // |phi'(m) + 2|
    double tol = 0.0;          // 10*h^2
    bool ok() const {
        return left_value <= tol && right_value <= tol && left_slope <= tol &&
               right_slope <= tol;
    }
};

BoundaryCheck boundary_check(const Profile& p);

/// Validating constructor; throws std::invalid_argument on violated
/// invariants. Endpoint values within 1e-12 are snapped to exact zero.
Profile make_profile(Grid grid, std::vector<double> values, ProfileKind kind);

/// S(phi) = -2/(1+tau) - [(1+tau)phi]'' / (2(1+tau)), second derivative by
/// finite differences (exact up to roundoff whenever (1+tau)phi is cubic).
ScalarField scalar_curvature(const Profile& p);

double weighted_integral(const ScalarField& f, Weight w);

/// (1+tau)-average of S(phi) for any profile satisfying the boundary
/// conditions: 2(2-m)/(m(m+2)), independent of the profile.
double average_scalar_curvature(double m);

/// sqrt( int phi^2 + phi'^2 + phi''^2 dtau ) with discrete derivatives.
double h2_norm(const Profile& p);
double h2_distance(const Profile& a, const Profile& b);

/// sqrt( int f^2 (1+tau) dtau ).
double l2_weighted_norm(const ScalarField& f);

/// || S(phi) - S_hat || in the weighted L2 norm.
double s_deviation_norm(const Profile& p);

// Serialization. CSV carries a "tau,phi" header; JSON is {m, n, values}.
// Round trips preserve values to full double precision.
void write_profile_csv(const std::string& path, const Profile& p);
Profile read_profile_csv(const std::string& path,
                         ProfileKind kind = ProfileKind::SingularAllowed);
void write_profile_json(const std::string& path, const Profile& p);
Profile read_profile_json(const std::string& path,
                          ProfileKind kind = ProfileKind::SingularAllowed);

}  // namespace calabi
