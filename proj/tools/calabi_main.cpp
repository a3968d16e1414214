// Command-line front end: constants, minimize, report, futaki, flow.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.
// Each command accepts --config <json> mirroring its flags (explicit flags
// win) and echoes the effective configuration into the output directory.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "calabi/energy.hpp"
#include "calabi/extremal.hpp"
#include "calabi/flow.hpp"
#include "calabi/futaki.hpp"
#include "calabi/profile.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("CALABI_OUT_DIR");
    return env && *env ? env : ".";
}

// --config file provides defaults for flags the user did not pass
void apply_config(const CLI::App& cmd, const std::string& path,
                  const std::vector<std::pair<std::string, double*>>& nums,
                  const std::vector<std::pair<std::string, std::string*>>& strs) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("--config: cannot open " + path);
    json j;
    is >> j;
    for (auto& [key, dst] : nums) {
        const CLI::Option* opt = cmd.get_option("--" + key);
        if (opt->count() == 0 && j.contains(key)) *dst = j.at(key).get<double>();
    }
    for (auto& [key, dst] : strs) {
        const CLI::Option* opt = cmd.get_option("--" + key);
        if (opt->count() == 0 && j.contains(key)) *dst = j.at(key).get<std::string>();
    }
}

void echo_config(const fs::path& dir, const std::string& name, const json& j) {
    fs::create_directories(dir);
    std::ofstream os(dir / (name + "_config.json"));
    os << j.dump(2) << "\n";
}

// JSON has no infinities; emit them as strings
json json_num(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : "-inf";
}

json boundary_json(const calabi::BoundaryCheck& b) {
    return json{{"left_value", b.left_value},
                {"right_value", b.right_value},
                {"left_slope", b.left_slope},
                {"right_slope", b.right_slope},
                {"tolerance", b.tol}};
}

std::string regime_name(calabi::Regime r) {
    switch (r) {
        case calabi::Regime::Extremal: return "extremal";
        case calabi::Regime::TwoPiece: return "two_piece";
        case calabi::Regime::ThreePiece: return "three_piece";
    }
    return "?";
}

int cmd_constants() {
    const double k1 = calabi::solve_k1();
    const double k2 = calabi::solve_k2();
    json j{{"k1", k1},
           {"k1_residual", std::abs(calabi::extremal_quartic(k1))},
           {"k2", k2},
           {"k2_residual", std::abs(calabi::piece_cubic(k2))},
           {"k2_times_k2_plus_2", calabi::three_piece_threshold()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_minimize(double m, double n_req, const std::string& out) {
    const fs::path out_path(out);
    const fs::path dir = out_path.parent_path().empty() ? fs::path(".")
                                                        : out_path.parent_path();
    calabi::Grid grid = calabi::make_grid(m, static_cast<int>(n_req));
    calabi::Profile phi = calabi::minimizer(m, grid);
    fs::create_directories(dir);
    calabi::write_profile_csv(out, phi);

    const calabi::OptimalityReport rep = calabi::check_optimality(phi);
    const calabi::CaseClassification cls = calabi::classify(m);
    json j{{"m", m},
           {"n", phi.grid.n},
           {"regime", regime_name(cls.regime)},
           {"junctions", cls.junctions},
           {"sup_phi_spp", rep.sup_phi_spp},
           {"max_concavity_violation", rep.max_concavity_violation},
           {"boundary", boundary_json(rep.boundary)},
           {"calabi", calabi::calabi_functional(phi)}};
    std::ofstream os(out + ".report.json");
    os << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    echo_config(dir, "minimize", json{{"m", m}, {"n", n_req}, {"out", out}});
    return 0;
}

int cmd_report(double m, const std::string& profile_path, const std::string& out) {
    calabi::Profile phi = calabi::read_profile_csv(profile_path);
    if (std::abs(phi.grid.m - m) > 1e-9 * std::max(1.0, m))
        throw std::invalid_argument("report: profile does not live on [0,m]");
    calabi::Profile psi = calabi::minimizer_on_grid(m, phi.grid);
    calabi::Profile theta = calabi::default_initial(m, phi.grid);
    const calabi::EnergyReport er = calabi::energy_report(phi, psi, theta);
    json j{{"m", m},
           {"calabi", er.calabi},
           {"mabuchi", json_num(er.mabuchi)},
           {"f_functional", json_num(er.f_functional)},
           {"l_functional", er.l_functional}};
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(out);
        os << j.dump(2) << "\n";
        echo_config(fs::path(out).parent_path().empty()
                        ? fs::path(".")
                        : fs::path(out).parent_path(),
                    "report", json{{"m", m}, {"profile", profile_path}, {"out", out}});
    }
    return 0;
}

int cmd_futaki(double m, double n_req, const std::string& klist,
               const std::string& out) {
    std::vector<int> ks;
    std::stringstream ss(klist);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) ks.push_back(std::stoi(item));
    if (ks.empty()) throw std::invalid_argument("futaki: empty --k-list");

    calabi::Grid grid = calabi::make_grid(m, static_cast<int>(n_req));
    calabi::Profile phi = calabi::minimizer(m, grid);
    const double limit = calabi::s_deviation_norm(phi);
    const auto rows = calabi::lower_bound_sweep(phi, ks);

    const fs::path out_path(out);
    const fs::path dir = out_path.parent_path().empty() ? fs::path(".")
                                                        : out_path.parent_path();
    fs::create_directories(dir);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("futaki: cannot open " + out);
    os.precision(17);
    os << "k,F,norm,ratio,limit,slack\n";
    for (const auto& r : rows)
        os << r.k << "," << r.futaki << "," << r.norm << "," << r.ratio << ","
           << limit << "," << limit - r.ratio << "\n";
    echo_config(dir, "futaki",
                json{{"m", m}, {"n", n_req}, {"k_list", klist}, {"out", out}});
    std::cout << "wrote " << rows.size() << " sweep rows to " << out << "\n";
    return 0;
}

int cmd_flow(double m, double n_req, double t_max, double dt_init, double dt_max,
             double conv_tol, const std::string& scheme, const std::string& out_dir) {
    calabi::FlowConfig cfg;
    cfg.t_max = t_max;
    cfg.dt_init = dt_init;
    cfg.dt_max = dt_max;
    cfg.conv_tol = conv_tol;
    if (scheme == "explicit")
        cfg.scheme = calabi::FlowScheme::Explicit;
    else if (scheme != "semi-implicit")
        throw std::invalid_argument("flow: scheme must be semi-implicit or explicit");

    calabi::Grid grid = calabi::make_grid(m, static_cast<int>(n_req));
    calabi::Profile initial = calabi::default_initial(m, grid);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    echo_config(dir, "flow",
                json{{"m", m},
                     {"n", n_req},
                     {"t-max", t_max},
                     {"dt-init", dt_init},
                     {"dt-max", dt_max},
                     {"conv-tol", conv_tol},
                     {"scheme", scheme},
                     {"out-dir", out_dir}});

    calabi::FlowResult res = calabi::run(m, initial, cfg);
    calabi::write_trajectory_csv((dir / "trajectory.csv").string(),
                                 res.state.history);

    // profile snapshots at geometric time intervals, plus initial and final
    calabi::write_profile_csv((dir / "profile_initial.csv").string(), initial);
    {
        calabi::FlowState st = calabi::make_flow_state(initial, cfg);
        double next_snap = std::max(10.0 * cfg.dt_init, res.state.t / 1024.0);
        int idx = 0;
        while (st.t < res.state.t && idx < 12) {
            st = calabi::step(st, cfg);
            if (st.t >= next_snap) {
                std::ostringstream name;
                name << "profile_t" << idx++ << ".csv";
                calabi::write_profile_csv((dir / name.str()).string(), st.profile);
                next_snap *= 2.0;
            }
        }
    }
    calabi::write_profile_csv((dir / "profile_final.csv").string(),
                              res.state.profile);

    const calabi::OptimalityReport rep = calabi::check_optimality(res.state.profile);
    json status{{"converged", res.converged},
                {"status", res.status},
                {"t_final", res.state.t},
                {"steps_accepted", res.state.accepted},
                {"steps_rejected", res.state.rejected},
                {"max_clamp", res.state.max_clamp},
                {"residuals",
                 {{"calabi", res.state.history.back().calabi},
                  {"h2_dist_to_minimizer", res.state.history.back().h2_dist},
                  {"sup_phi_spp", rep.sup_phi_spp},
                  {"boundary", boundary_json(rep.boundary)}}}};
    std::ofstream os(dir / "status.json");
    os << status.dump(2) << "\n";
    std::cout << status.dump(2) << "\n";
    return res.status == "stagnation" && !res.converged ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calabi functional minimizers, Futaki invariants and Calabi "
                 "flow on a polarised ruled surface"};
    app.require_subcommand(1);

    auto* constants = app.add_subcommand(
        "constants", "print the critical constants k1, k2, k2(k2+2)");

    double m = 10.0, n = 2049;
    std::string out, config_path;

    auto* minimize =
        app.add_subcommand("minimize", "compute the Calabi minimizer profile");
    minimize->add_option("--m", m, "polarisation parameter");
    minimize->add_option("--n", n, "grid nodes (default 2049)");
    minimize->add_option("--out", out, "output CSV path");
    minimize->add_option("--config", config_path, "JSON config file");

    double rep_m = 10.0;
    std::string rep_profile, rep_out, rep_config;
    auto* report =
        app.add_subcommand("report", "energy functionals of a stored profile");
    report->add_option("--m", rep_m, "polarisation parameter");
    report->add_option("--profile", rep_profile, "profile CSV path");
    report->add_option("--out", rep_out, "output JSON path (stdout if omitted)");
    report->add_option("--config", rep_config, "JSON config file");

    double fut_m = 24.0, fut_n = 2049;
    std::string fut_klist = "10,50,200", fut_out, fut_config;
    auto* futaki = app.add_subcommand(
        "futaki", "Donaldson lower-bound sweep for the minimizer");
    futaki->add_option("--m", fut_m, "polarisation parameter");
    futaki->add_option("--n", fut_n, "grid nodes (default 2049)");
    futaki->add_option("--k-list", fut_klist, "breakpoint counts, comma separated");
    futaki->add_option("--out", fut_out, "output CSV path");
    futaki->add_option("--config", fut_config, "JSON config file");

    double flow_m = 10.0, flow_n = 513, flow_tmax = 100.0, flow_dt = 1e-3,
           flow_dtmax = 1.0, flow_conv = 1e-4;
    std::string flow_dir, flow_scheme = "semi-implicit", flow_config;
    auto* flow = app.add_subcommand("flow", "integrate the Calabi flow");
    flow->add_option("--m", flow_m, "polarisation parameter");
    flow->add_option("--n", flow_n, "grid nodes (default 513)");
    flow->add_option("--t-max", flow_tmax, "time horizon");
    flow->add_option("--dt-init", flow_dt, "initial step size");
    flow->add_option("--dt-max", flow_dtmax, "step size cap");
    flow->add_option("--conv-tol", flow_conv, "H2 convergence tolerance");
    flow->add_option("--scheme", flow_scheme, "semi-implicit | explicit");
    flow->add_option("--out-dir", flow_dir, "output directory");
    flow->add_option("--config", flow_config, "JSON config file");

    try {
        app.parse(argc, argv);

        if (constants->parsed()) return cmd_constants();
        if (minimize->parsed()) {
            apply_config(*minimize, config_path, {{"m", &m}, {"n", &n}},
                         {{"out", &out}});
            if (out.empty()) out = default_out_dir() + "/minimizer.csv";
            return cmd_minimize(m, n, out);
        }
        if (report->parsed()) {
            apply_config(*report, rep_config, {{"m", &rep_m}},
                         {{"profile", &rep_profile}, {"out", &rep_out}});
            if (rep_profile.empty())
                throw std::invalid_argument("report: --profile is required");
            return cmd_report(rep_m, rep_profile, rep_out);
        }
        if (futaki->parsed()) {
            apply_config(*futaki, fut_config, {{"m", &fut_m}, {"n", &fut_n}},
                         {{"k-list", &fut_klist}, {"out", &fut_out}});
            if (fut_out.empty()) fut_out = default_out_dir() + "/futaki_sweep.csv";
            return cmd_futaki(fut_m, fut_n, fut_klist, fut_out);
        }
        if (flow->parsed()) {
            apply_config(*flow, flow_config,
                         {{"m", &flow_m},
                          {"n", &flow_n},
                          {"t-max", &flow_tmax},
                          {"dt-init", &flow_dt},
                          {"dt-max", &flow_dtmax},
                          {"conv-tol", &flow_conv}},
                         {{"scheme", &flow_scheme}, {"out-dir", &flow_dir}});
            if (flow_dir.empty()) flow_dir = default_out_dir() + "/flow";
            return cmd_flow(flow_m, flow_n, flow_tmax, flow_dt, flow_dtmax,
                            flow_conv, flow_scheme, flow_dir);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const calabi::flow_stagnation_error& e) {
        std::cerr << "numerical failure: " << e.what() << " (t=" << e.t
                  << ", dt=" << e.dt << ", calabi=" << e.calabi << ")\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
