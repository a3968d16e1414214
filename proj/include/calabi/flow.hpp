#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "calabi/profile.hpp"

namespace calabi {

enum class FlowScheme { SemiImplicit, Explicit };

struct FlowConfig {
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 1.0;
    double accept_tol = 1e-10;  // relative cap on Cal increase per step
    double conv_tol = 1e-4;     // H2 distance to the minimizer
    double t_max = 100.0;
    FlowScheme scheme = FlowScheme::SemiImplicit;
    double theta = 1.0;         // implicitness weight of the frozen operator
    int grow_after = 5;         // consecutive accepts before dt grows
    double grow_factor = 1.2;
    long max_steps = 5'000'000;
};

struct FlowSample {
    double t = 0.0;
    double calabi = 0.0;
    double mabuchi = 0.0;
    double l_functional = 0.0;
    double f_functional = 0.0;
    double h2_dist = 0.0;
};

struct FlowState {
    Profile profile;
    double t = 0.0;
    double dt = 0.0;
    std::vector<FlowSample> history;
    long accepted = 0;
    long rejected = 0;
    int consecutive = 0;     // accepted steps since the last reject/growth
    double max_clamp = 0.0;  // largest negative undershoot clamped to zero
};

class flow_stagnation_error : public std::runtime_error {
  public:
    flow_stagnation_error(const std::string& what, double t, double dt, double cal)
        : std::runtime_error(what), t(t), dt(dt), calabi(cal) {}
    double t, dt, calabi;
};

/// phi0(tau) = 2 tau (m - tau) / m, the parabola satisfying the boundary
/// conditions exactly.
Profile default_initial(double m, const Grid& grid);

/// One accepted step of the Calabi flow dphi/dt = phi^2 S(phi)''. The
/// mobility phi^2 is frozen at the current iterate and the remaining linear
/// fourth-order operator is treated implicitly (pentadiagonal solve);
/// boundary values and slopes are reimposed through the boundary stencil
/// rows. A step that raises Cal beyond the acceptance tolerance is rejected
/// and retried with dt/2; dt under dt_min raises flow_stagnation_error.
FlowState step(const FlowState& state, const FlowConfig& config);

FlowState make_flow_state(Profile initial, const FlowConfig& config);

struct FlowResult {
    FlowState state;
    bool converged = false;
    std::string status;  // "converged", "t_max", "stagnation", "max_steps"
};

/// Integrate until the H2 distance to the minimizer drops below conv_tol or
/// t exceeds t_max, recording Cal, M, L, F and the H2 distance per step.
FlowResult run(double m, const Profile& initial, const FlowConfig& config);

void write_trajectory_csv(const std::string& path,
                          const std::vector<FlowSample>& history);

}  // namespace calabi
