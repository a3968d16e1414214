#include "calabi/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace calabi {

Grid make_grid(double m, int n) {
    if (!(m > 0.0)) throw std::invalid_argument("make_grid: m must be positive");
    if (n < 3) throw std::invalid_argument("make_grid: need at least 3 nodes");
    Grid g;
    g.m = m;
    g.n = n;
    g.h = m / (n - 1);
    g.tau.resize(n);
    for (int i = 0; i < n; ++i) g.tau[i] = i * g.h;
    g.tau[n - 1] = m;  // no roundoff at the right endpoint
    return g;
}

bool same_grid(const Grid& a, const Grid& b) {
    return a.n == b.n && std::abs(a.m - b.m) <= 1e-12 * std::max(1.0, a.m);
}

double integrate(const Grid& g, std::span<const double> f, Weight w) {
    if (static_cast<int>(f.size()) != g.n)
        throw std::invalid_argument("integrate: field size does not match grid");
    auto wf = [&](int i) {
        return w == Weight::OnePlusTau ? f[i] * (1.0 + g.tau[i]) : f[i];
    };
    const int n = g.n;
    if (n % 2 == 1) {
        double odd = 0.0, even = 0.0;
        for (int i = 1; i < n - 1; i += 2) odd += wf(i);
        for (int i = 2; i < n - 1; i += 2) even += wf(i);
        return g.h / 3.0 * (wf(0) + wf(n - 1) + 4.0 * odd + 2.0 * even);
    }
    double s = 0.5 * (wf(0) + wf(n - 1));
    for (int i = 1; i < n - 1; ++i) s += wf(i);
    return s * g.h;
}

std::vector<double> first_derivative(const Grid& g, std::span<const double> f) {
    const int n = g.n;
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("first_derivative: size mismatch");
    std::vector<double> d(n);
    const double h = g.h;
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

std::vector<double> second_derivative(const Grid& g, std::span<const double> f) {
    const int n = g.n;
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("second_derivative: size mismatch");
    if (n < 4)
        throw std::invalid_argument("second_derivative: need at least 4 nodes");
    std::vector<double> d(n);
    const double h2 = g.h * g.h;
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

}  // namespace calabi
