#include "calabi/profile.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace calabi {

BoundaryCheck boundary_check(const Profile& p) {
    const auto& v = p.values;
    const int n = p.grid.n;
    const double h = p.grid.h;
    BoundaryCheck b;
    b.tol = 10.0 * h * h;
    b.left_value = std::abs(v[0]);
    b.right_value = std::abs(v[n - 1]);
    b.left_slope = std::abs((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h) - 2.0);
    b.right_slope =
        std::abs((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h) + 2.0);
    return b;
}

Profile make_profile(Grid grid, std::vector<double> values, ProfileKind kind) {
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("make_profile: value count does not match grid");
    if (grid.n < 5)
        throw std::invalid_argument("make_profile: need at least 5 nodes");
    if (std::abs(values.front()) > 1e-12 || std::abs(values.back()) > 1e-12)
        throw std::invalid_argument("make_profile: phi must vanish at 0 and m");
    values.front() = 0.0;
    values.back() = 0.0;
    for (int i = 1; i < grid.n - 1; ++i) {
        if (values[i] < 0.0)
            throw std::invalid_argument("make_profile: phi must be nonnegative");
        if (kind == ProfileKind::Regular && values[i] == 0.0)
            throw std::invalid_argument(
                "make_profile: regular profile must be positive on the interior");
    }
    Profile p{std::move(grid), std::move(values), kind};
    BoundaryCheck b = boundary_check(p);
    if (!b.ok()) {
        std::ostringstream os;
        os << "make_profile: boundary slopes off by (" << b.left_slope << ", "
           << b.right_slope << "), tolerance " << b.tol;
        throw std::invalid_argument(os.str());
    }
    return p;
}

ScalarField scalar_curvature(const Profile& p) {
    const int n = p.grid.n;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = (1.0 + p.grid.tau[i]) * p.values[i];
    std::vector<double> d2 = second_derivative(p.grid, g);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        const double w = 1.0 + p.grid.tau[i];
        s[i] = -2.0 / w - d2[i] / (2.0 * w);
    }
    return ScalarField{p.grid, std::move(s)};
}

double weighted_integral(const ScalarField& f, Weight w) {
    return integrate(f.grid, f.values, w);
}

double average_scalar_curvature(double m) {
    if (!(m > 0.0))
        throw std::invalid_argument("average_scalar_curvature: m must be positive");
    return 2.0 * (2.0 - m) / (m * (m + 2.0));
}

double h2_norm(const Profile& p) {
    std::vector<double> d1 = first_derivative(p.grid, p.values);
    std::vector<double> d2 = second_derivative(p.grid, p.values);
    std::vector<double> f(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i)
        f[i] = p.values[i] * p.values[i] + d1[i] * d1[i] + d2[i] * d2[i];
    return std::sqrt(std::max(0.0, integrate(p.grid, f, Weight::Plain)));
}

double h2_distance(const Profile& a, const Profile& b) {
    if (!same_grid(a.grid, b.grid))
        throw std::invalid_argument("h2_distance: grids differ");
    Profile diff{a.grid, std::vector<double>(a.grid.n), ProfileKind::SingularAllowed};
    for (int i = 0; i < a.grid.n; ++i) diff.values[i] = a.values[i] - b.values[i];
    return h2_norm(diff);
}

double l2_weighted_norm(const ScalarField& f) {
    std::vector<double> sq(f.grid.n);
    for (int i = 0; i < f.grid.n; ++i) sq[i] = f.values[i] * f.values[i];
    return std::sqrt(std::max(0.0, integrate(f.grid, sq, Weight::OnePlusTau)));
}

double s_deviation_norm(const Profile& p) {
    ScalarField s = scalar_curvature(p);
    const double sbar = average_scalar_curvature(p.grid.m);
    for (double& v : s.values) v -= sbar;
    return l2_weighted_norm(s);
}

void write_profile_csv(const std::string& path, const Profile& p) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_profile_csv: cannot open " + path);
    os.precision(17);
    os << "tau,phi\n";
    for (int i = 0; i < p.grid.n; ++i)
        os << p.grid.tau[i] << "," << p.values[i] << "\n";
}

Profile read_profile_csv(const std::string& path, ProfileKind kind) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_profile_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("tau,phi", 0) != 0)
        throw std::runtime_error("read_profile_csv: missing tau,phi header");
    std::vector<double> tau, phi;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_profile_csv: malformed row");
        tau.push_back(std::stod(line.substr(0, comma)));
        phi.push_back(std::stod(line.substr(comma + 1)));
    }
    if (tau.size() < 5) throw std::runtime_error("read_profile_csv: too few rows");
    Grid g = make_grid(tau.back(), static_cast<int>(tau.size()));
    for (size_t i = 0; i < tau.size(); ++i)
        if (std::abs(tau[i] - g.tau[i]) > 1e-9 * std::max(1.0, g.m))
            throw std::runtime_error("read_profile_csv: nodes are not uniform");
    return make_profile(std::move(g), std::move(phi), kind);
}

void write_profile_json(const std::string& path, const Profile& p) {
    nlohmann::json j;
    j["m"] = p.grid.m;
    j["n"] = p.grid.n;
    j["values"] = p.values;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_profile_json: cannot open " + path);
    os << j.dump(2) << "\n";
}

Profile read_profile_json(const std::string& path, ProfileKind kind) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_profile_json: cannot open " + path);
    nlohmann::json j;
    is >> j;
    Grid g = make_grid(j.at("m").get<double>(), j.at("n").get<int>());
    return make_profile(std::move(g), j.at("values").get<std::vector<double>>(),
                        kind);
}

}  // namespace calabi
