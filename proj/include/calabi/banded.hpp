#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace calabi {

/// Banded matrix with kl sub- and ku superdiagonals in LAPACK-style band
/// storage (kl extra superdiagonals reserved for pivoting fill). solve()
/// does an in-place LU factorization with partial pivoting.
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0) {}

    void clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }

    double& at(int i, int j) {
        if (j - i > ku_ || i - j > kl_)
            throw std::out_of_range("BandedMatrix::at outside band");
        return ab_[entry(i, j)];
    }

    /// Solves A x = rhs, destroying the stored matrix.
    std::vector<double> solve(std::vector<double> rhs) {
        if (static_cast<int>(rhs.size()) != n_)
            throw std::invalid_argument("BandedMatrix::solve size mismatch");
        std::vector<int> piv(n_);
        for (int j = 0; j < n_; ++j) {
            const int last = std::min(j + kl_, n_ - 1);
            int p = j;
            for (int i = j + 1; i <= last; ++i)
                if (std::abs(ab_[entry(i, j)]) > std::abs(ab_[entry(p, j)])) p = i;
            piv[j] = p;
            if (ab_[entry(p, j)] == 0.0)
                throw std::runtime_error("BandedMatrix::solve: singular matrix");
            const int ccap = std::min(j + kl_ + ku_, n_ - 1);
            if (p != j)
                for (int c = j; c <= ccap; ++c)
                    std::swap(ab_[entry(j, c)], ab_[entry(p, c)]);
            for (int i = j + 1; i <= last; ++i) {
                const double l = ab_[entry(i, j)] / ab_[entry(j, j)];
                ab_[entry(i, j)] = l;
                for (int c = j + 1; c <= ccap; ++c)
                    ab_[entry(i, c)] -= l * ab_[entry(j, c)];
            }
        }
        for (int j = 0; j < n_; ++j) {
            std::swap(rhs[j], rhs[piv[j]]);
            const int last = std::min(j + kl_, n_ - 1);
            for (int i = j + 1; i <= last; ++i) rhs[i] -= ab_[entry(i, j)] * rhs[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            const int ccap = std::min(j + kl_ + ku_, n_ - 1);
            double s = rhs[j];
            for (int c = j + 1; c <= ccap; ++c) s -= ab_[entry(j, c)] * rhs[c];
            rhs[j] = s / ab_[entry(j, j)];
        }
        return rhs;
    }

    int size() const { return n_; }

  private:
    int entry(int i, int j) const { return (kl_ + ku_ + i - j) + j * ld_; }

    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
};

}  // namespace calabi
