#include "calabi/flow.hpp"

#include <cmath>
#include <fstream>

#include "calabi/banded.hpp"
#include "calabi/energy.hpp"
#include "calabi/extremal.hpp"

namespace calabi {

Profile default_initial(double m, const Grid& grid) {
    std::vector<double> v(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double t = grid.tau[i];
        v[i] = 2.0 * t * (m - t) / m;
    }
    v.front() = 0.0;
    v.back() = 0.0;
    return make_profile(grid, std::move(v), ProfileKind::Regular);
}

namespace {

struct StepOutcome {
    std::vector<double> values;
    double clamp = 0.0;
};

void validate_config(const FlowConfig& cfg) {
    if (!(cfg.dt_min <= cfg.dt_init && cfg.dt_init <= cfg.dt_max))
        throw std::invalid_argument("flow: need dt_min <= dt_init <= dt_max");
}

// The implicit solve enforces the boundary rows exactly; states entering
// the flow must satisfy the same rows or the first step sees a spurious
// dt-independent Cal jump.
void bc_project(const Grid& g, std::vector<double>& v) {
    const int n = g.n;
    const double h = g.h;
    v[0] = 0.0;
    v[n - 1] = 0.0;
    v[1] = (24.0 * h + 36.0 * v[2] - 16.0 * v[3] + 3.0 * v[4]) / 48.0;
    v[n - 2] =
        (24.0 * h + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / 48.0;
}

// One candidate step at fixed dt. The discrete velocity is
// phi^2 * D2(S(phi)); rows 0,1,n-2,n-1 of the update are the boundary
// conditions, interior rows use purely centered stencils.
StepOutcome attempt_step(const Grid& g, const std::vector<double>& phi, double dt,
                         double theta, FlowScheme scheme) {
    const int n = g.n;
    if (n < 9) throw std::invalid_argument("flow: need at least 9 nodes");
    const double h = g.h;
    const double h2 = h * h;

    std::vector<double> w(n), s0(n), gfun(n);
    for (int i = 0; i < n; ++i) {
        w[i] = 1.0 + g.tau[i];
        s0[i] = -2.0 / w[i];
        gfun[i] = w[i] * phi[i];
    }
    const std::vector<double> d2g = second_derivative(g, gfun);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = s0[i] - d2g[i] / (2.0 * w[i]);

    StepOutcome out;
    out.values.assign(n, 0.0);

    if (scheme == FlowScheme::Explicit) {
        std::vector<double> next = phi;
        for (int i = 2; i < n - 2; ++i) {
            const double spp = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / h2;
            next[i] = phi[i] + dt * phi[i] * phi[i] * spp;
        }
        next[0] = 0.0;
        next[n - 1] = 0.0;
        next[1] = (24.0 * h + 36.0 * next[2] - 16.0 * next[3] + 3.0 * next[4]) / 48.0;
        next[n - 2] = (24.0 * h + 36.0 * next[n - 3] - 16.0 * next[n - 4] +
                       3.0 * next[n - 5]) / 48.0;
        for (int i = 1; i < n - 1; ++i) {
            if (next[i] < 0.0) {
                out.clamp = std::max(out.clamp, -next[i]);
                next[i] = 0.0;
            }
        }
        out.values = std::move(next);
        return out;
    }

    // Slope rows use a fourth-order one-sided stencil; a lower-order row
    // would dominate the error of the discrete stationary profile.
    BandedMatrix a(n, 3, 3);
    std::vector<double> rhs(n, 0.0);

    a.at(0, 0) = 1.0;
    a.at(1, 0) = -25.0;
    a.at(1, 1) = 48.0;
    a.at(1, 2) = -36.0;
    a.at(1, 3) = 16.0;
    a.at(1, 4) = -3.0;
    rhs[1] = 24.0 * h;
    a.at(n - 2, n - 5) = 3.0;
    a.at(n - 2, n - 4) = -16.0;
    a.at(n - 2, n - 3) = 36.0;
    a.at(n - 2, n - 2) = -48.0;
    a.at(n - 2, n - 1) = 25.0;
    rhs[n - 2] = -24.0 * h;
    a.at(n - 1, n - 1) = 1.0;

    // K phi = -[w phi]'' / (2w) row by row (centered); D2K composes the
    // centered second difference with three K rows.
    auto k_coeff = [&](int j, int col) -> double {
        if (col == j - 1) return -w[j - 1] / (2.0 * w[j] * h2);
        if (col == j) return 1.0 / h2;
        if (col == j + 1) return -w[j + 1] / (2.0 * w[j] * h2);
        return 0.0;
    };

    for (int i = 2; i < n - 2; ++i) {
        const double mob = phi[i] * phi[i];
        double row[5] = {0.0, 0.0, 0.0, 0.0, 0.0};  // columns i-2 .. i+2
        const double d2c[3] = {1.0 / h2, -2.0 / h2, 1.0 / h2};
        for (int q = 0; q < 3; ++q) {
            const int j = i - 1 + q;
            for (int col = j - 1; col <= j + 1; ++col)
                row[col - (i - 2)] += d2c[q] * k_coeff(j, col);
        }
        for (int col = i - 2; col <= i + 2; ++col) {
            double v = -theta * dt * mob * row[col - (i - 2)];
            if (col == i) v += 1.0;
            a.at(i, col) = v;
        }
        const double spp = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / h2;
        const double d2s0 = (s0[i - 1] - 2.0 * s0[i] + s0[i + 1]) / h2;
        rhs[i] = phi[i] + dt * mob * ((1.0 - theta) * spp + theta * d2s0);
    }

    std::vector<double> next = a.solve(std::move(rhs));
    next[0] = 0.0;
    next[n - 1] = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        if (next[i] < 0.0) {
            out.clamp = std::max(out.clamp, -next[i]);
            next[i] = 0.0;
        }
    }
    out.values = std::move(next);
    return out;
}

struct CoreState {
    std::vector<double> phi;
    double t = 0.0;
    double dt = 0.0;
    double cal = 0.0;
    long accepted = 0;
    long rejected = 0;
    int consecutive = 0;
    double max_clamp = 0.0;
    bool singular = false;
};

double cal_of(const Grid& g, const std::vector<double>& phi) {
    Profile p{g, phi, ProfileKind::SingularAllowed};
    return calabi_functional(p);
}

// Advance by one accepted step, halving dt on rejection.
void core_step(const Grid& g, CoreState& st, const FlowConfig& cfg) {
    for (;;) {
        StepOutcome cand =
            attempt_step(g, st.phi, st.dt, cfg.theta, cfg.scheme);
        const double cal_new = cal_of(g, cand.values);
        if (cal_new <= st.cal + cfg.accept_tol * std::max(1.0, st.cal)) {
            st.t += st.dt;
            st.phi = std::move(cand.values);
            st.cal = cal_new;
            st.max_clamp = std::max(st.max_clamp, cand.clamp);
            if (cand.clamp > 0.0) st.singular = true;
            ++st.accepted;
            if (++st.consecutive >= cfg.grow_after) {
                st.dt = std::min(st.dt * cfg.grow_factor, cfg.dt_max);
                st.consecutive = 0;
            }
            return;
        }
        ++st.rejected;
        st.consecutive = 0;
        st.dt *= 0.5;
        if (st.dt < cfg.dt_min)
            throw flow_stagnation_error(
                "calabi flow stagnated: dt fell below dt_min", st.t, st.dt, st.cal);
    }
}

Profile to_profile(const Grid& g, const CoreState& st, ProfileKind kind0) {
    return Profile{g, st.phi,
                   st.singular ? ProfileKind::SingularAllowed : kind0};
}

}  // namespace

FlowState make_flow_state(Profile initial, const FlowConfig& config) {
    FlowState st;
    st.t = 0.0;
    st.dt = config.dt_init;
    st.profile = std::move(initial);
    return st;
}

FlowState step(const FlowState& state, const FlowConfig& config) {
    validate_config(config);
    CoreState core;
    core.phi = state.profile.values;
    bc_project(state.profile.grid, core.phi);
    core.t = state.t;
    core.dt = state.dt > 0.0 ? state.dt : config.dt_init;
    core.cal = cal_of(state.profile.grid, core.phi);
    core.accepted = state.accepted;
    core.rejected = state.rejected;
    core.consecutive = state.consecutive;
    core.max_clamp = state.max_clamp;
    core.singular = state.profile.kind == ProfileKind::SingularAllowed;
    core_step(state.profile.grid, core, config);
    FlowState out = state;
    out.profile = to_profile(state.profile.grid, core, state.profile.kind);
    out.t = core.t;
    out.dt = core.dt;
    out.accepted = core.accepted;
    out.rejected = core.rejected;
    out.consecutive = core.consecutive;
    out.max_clamp = core.max_clamp;
    return out;
}

FlowResult run(double m, const Profile& initial, const FlowConfig& config) {
    validate_config(config);
    const Grid& g = initial.grid;
    const Profile psi = minimizer_on_grid(m, g);
    const Profile theta = default_initial(m, g);

    CoreState core;
    core.phi = initial.values;
    bc_project(g, core.phi);
    core.dt = config.dt_init;
    core.cal = cal_of(g, core.phi);
    core.singular = initial.kind == ProfileKind::SingularAllowed;

    FlowResult result;
    auto sample = [&]() {
        Profile p = to_profile(g, core, initial.kind);
        FlowSample smp;
        smp.t = core.t;
        smp.calabi = core.cal;
        smp.mabuchi = mabuchi_modified(p, psi);
        smp.l_functional = l_functional(p);
        smp.f_functional = f_functional(p, theta);
        smp.h2_dist = h2_distance(p, psi);
        result.state.history.push_back(smp);
        return smp.h2_dist;
    };

    double h2 = sample();
    result.status = "t_max";
    try {
        for (long k = 0; k < config.max_steps; ++k) {
            if (h2 < config.conv_tol) {
                result.converged = true;
                result.status = "converged";
                break;
            }
            if (core.t >= config.t_max) {
                result.status = "t_max";
                break;
            }
            core_step(g, core, config);
            h2 = sample();
            if (k + 1 == config.max_steps) result.status = "max_steps";
        }
    } catch (const flow_stagnation_error&) {
        // Near the discrete minimizer rejection-driven dt collapse is a
        // normal end state; report it rather than failing the run.
        result.status = "stagnation";
        result.converged = h2 < config.conv_tol;
    }

    result.state.profile = to_profile(g, core, initial.kind);
    result.state.t = core.t;
    result.state.dt = core.dt;
    result.state.accepted = core.accepted;
    result.state.rejected = core.rejected;
    result.state.max_clamp = core.max_clamp;
    return result;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<FlowSample>& history) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    os.precision(17);
    os << "t,calabi,mabuchi,l,f,h2dist\n";
    for (const FlowSample& s : history)
        os << s.t << "," << s.calabi << "," << s.mabuchi << "," << s.l_functional
           << "," << s.f_functional << "," << s.h2_dist << "\n";
}

}  // namespace calabi
