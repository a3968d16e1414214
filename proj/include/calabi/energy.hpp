#pragma once

#include "calabi/extremal.hpp"
#include "calabi/profile.hpp"

namespace calabi {

struct EnergyReport {
    double calabi = 0.0;
    double mabuchi = 0.0;       // may be +-infinity
    double f_functional = 0.0;  // may be +infinity
    double l_functional = 0.0;
};

/// Cal(phi) = int (S(phi) - S(Phi))^2 (1+tau) dtau, with S(Phi) the affine
/// curvature of the formal extremal solution at the same m.
double calabi_functional(const Profile& phi);

/// Equivalent form int S(phi)^2 (1+tau) dtau - int S(Phi)^2 (1+tau) dtau
/// (the second integral in closed form). Kept as a cross-check.
double calabi_functional_alt(const Profile& phi);

/// || S(Phi) - S_hat ||^2 in closed form (exact polynomial integration).
double formal_extremal_deviation_sq(double m);

/// M(phi) = int (Psi/phi + log phi)(1+tau) dtau with Psi the minimizer for
/// the same m. Endpoint ratios use one-sided slopes; the log singularity on
/// the boundary cells is integrated analytically. Returns +inf when phi
/// vanishes in the interior where Psi does not, -inf when phi vanishes on
/// an interior band together with Psi.
double mabuchi_modified(const Profile& phi, const Profile& psi_min);

/// F(phi) = int Theta/phi - log(Theta/phi) dtau against a fixed reference
/// profile Theta. +inf if phi vanishes in the interior where Theta > 0.
double f_functional(const Profile& phi, const Profile& theta);

/// L(phi) = int (phi S(phi)'')^2 (1+tau) dtau.
double l_functional(const Profile& phi);

EnergyReport energy_report(const Profile& phi, const Profile& psi_min,
                           const Profile& theta);

}  // namespace calabi
