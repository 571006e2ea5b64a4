#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hbk/error.hpp"
#include "hbk/fft.hpp"
#include "hbk/log.hpp"

namespace hbk {

using Index = std::array<int, 3>;

/// Uniform discretization of the d-torus: points j/N, j in {0..N-1}^d.
/// Linear indices are row-major with the last axis fastest (FFTW layout).
class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(int d, int n) : d_(d), n_(n) {
        if (d < 1 || d > 3) throw Error(errc::bad_grid, "dimension must be 1, 2 or 3");
        if (n < 4 || n % 2 != 0) throw Error(errc::bad_grid, "N must be even and >= 4");
        size_ = 1;
        for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n);
    }

    int dim() const { return d_; }
    int n() const { return n_; }
    std::size_t size() const { return size_; }
    double weight() const { return 1.0 / static_cast<double>(size_); }

    Index digits(std::size_t lin) const {
        Index j{0, 0, 0};
        for (int a = d_ - 1; a >= 0; --a) {
            j[a] = static_cast<int>(lin % n_);
            lin /= n_;
        }
        return j;
    }

    std::size_t linear(const Index& j) const {
        std::size_t lin = 0;
        for (int a = 0; a < d_; ++a) lin = lin * n_ + static_cast<std::size_t>(wrap(j[a]));
        return lin;
    }

    int wrap(int j) const {
        int r = j % n_;
        return r < 0 ? r + n_ : r;
    }

    std::size_t add(std::size_t a, std::size_t b) const { return combine(a, b, +1); }
    std::size_t sub(std::size_t a, std::size_t b) const { return combine(a, b, -1); }
    std::size_t negate(std::size_t a) const { return combine(0, a, -1); }

    /// k4 = k1 + k2 - k3 (mod 1), the momentum-conserving partner.
    std::size_t k4(std::size_t k1, std::size_t k2, std::size_t k3) const { return sub(add(k1, k2), k3); }

    /// Coordinates of a point reported in [-1/2, 1/2)^d.
    std::array<double, 3> point(std::size_t lin) const {
        Index j = digits(lin);
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int a = 0; a < d_; ++a) {
            int s = j[a] >= n_ / 2 ? j[a] - n_ : j[a];
            k[a] = static_cast<double>(s) / n_;
        }
        return k;
    }

    /// Coordinates in [0, 1)^d.
    std::array<double, 3> point_unit(std::size_t lin) const {
        Index j = digits(lin);
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int a = 0; a < d_; ++a) k[a] = static_cast<double>(j[a]) / n_;
        return k;
    }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) { return a.d_ == b.d_ && a.n_ == b.n_; }

private:
    std::size_t combine(std::size_t a, std::size_t b, int sign) const {
        std::size_t lin = 0;
        std::size_t stride = 1;
        for (int ax = 0; ax < d_; ++ax) {
            int da = static_cast<int>(a % n_);
            int db = static_cast<int>(b % n_);
            a /= n_;
            b /= n_;
            int r = da + sign * db;
            if (r >= n_) r -= n_;
            if (r < 0) r += n_;
            lin += static_cast<std::size_t>(r) * stride;
            stride *= n_;
        }
        return lin;
    }

    int d_ = 1;
    int n_ = 4;
    std::size_t size_ = 4;
};

/// Precomputed per-axis digits for hot loops that need k4 = s - k3.
class GridArithmetic {
public:
    explicit GridArithmetic(const TorusGrid& g) : d_(g.dim()), n_(g.n()), digits_(g.size()) {
        for (std::size_t i = 0; i < g.size(); ++i) digits_[i] = g.digits(i);
    }
    std::size_t add(std::size_t a, std::size_t b) const { return combine(a, b, +1); }
    std::size_t sub(std::size_t a, std::size_t b) const { return combine(a, b, -1); }

private:
    std::size_t combine(std::size_t a, std::size_t b, int sign) const {
        const Index& x = digits_[a];
        const Index& y = digits_[b];
        std::size_t lin = 0;
        for (int ax = 0; ax < d_; ++ax) {
            int r = x[ax] + sign * y[ax];
            if (r >= n_) r -= n_;
            if (r < 0) r += n_;
            lin = lin * n_ + static_cast<std::size_t>(r);
        }
        return lin;
    }
    int d_;
    int n_;
    std::vector<Index> digits_;
};

/// omega(k) = c - sum_nu cos(2 pi k^nu) at a continuum point.
inline double dispersion_nn(const double* k, int d, double c) {
    double w = c;
    for (int a = 0; a < d; ++a) w -= std::cos(2.0 * std::numbers::pi * k[a]);
    return w;
}

inline double dispersion_nn(const std::array<double, 3>& k, int d, double c) { return dispersion_nn(k.data(), d, c); }

/// Dispersion relation sampled on a grid; reflection symmetric by construction.
class DispersionRelation {
public:
    enum class Kind { nearest_neighbor, tabulated };

    static DispersionRelation nearest_neighbor(const TorusGrid& g, double c = 0.0) {
        DispersionRelation w;
        w.grid_ = g;
        w.kind_ = Kind::nearest_neighbor;
        w.c_ = c;
        w.values_.resize(g.size());
        // cos(2 pi j/N) tabulated per integer residue keeps omega(-j) == omega(j) bitwise.
        std::vector<double> cs(g.n());
        for (int j = 0; j < g.n(); ++j) {
            int s = std::min(j, g.n() - j);
            cs[j] = std::cos(2.0 * std::numbers::pi * s / g.n());
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            Index j = g.digits(i);
            double v = c;
            for (int a = 0; a < g.dim(); ++a) v -= cs[j[a]];
            w.values_[i] = v;
        }
        w.lipschitz_ = 2.0 * std::numbers::pi * g.dim();
        return w;
    }

    /// Symmetrizes omega(j) <- (omega(j) + omega(-j))/2, warning above 1e-12 asymmetry.
    static DispersionRelation tabulated(const TorusGrid& g, std::vector<double> values) {
        if (values.size() != g.size()) throw Error(errc::grid_mismatch, "tabulated dispersion has wrong size");
        DispersionRelation w;
        w.grid_ = g;
        w.kind_ = Kind::tabulated;
        double asym = 0.0;
        std::vector<double> sym(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            double other = values[g.negate(i)];
            asym = std::max(asym, std::abs(values[i] - other));
            sym[i] = 0.5 * (values[i] + other);
        }
        if (asym > 1e-12) warn("tabulated dispersion asymmetric by " + std::to_string(asym) + "; symmetrized");
        w.values_ = std::move(sym);
        // Discrete Lipschitz estimate from nearest-neighbour differences.
        double lip = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            Index j = g.digits(i);
            double grad2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                Index jp = j;
                jp[a] += 1;
                double diff = (w.values_[g.linear(jp)] - w.values_[i]) * g.n();
                grad2 += diff * diff;
            }
            lip = std::max(lip, std::sqrt(grad2));
        }
        w.lipschitz_ = lip;
        return w;
    }

    /// CSV with header j1,...,jd,omega and exactly N^d rows.
    static DispersionRelation from_csv(const TorusGrid& g, const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(errc::io, "cannot open dispersion file '" + path + "'");
        std::string line;
        if (!std::getline(in, line)) throw Error(errc::io, "empty dispersion file '" + path + "'");
        std::vector<double> values(g.size(), 0.0);
        std::vector<char> seen(g.size(), 0);
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string cell;
            Index j{0, 0, 0};
            for (int a = 0; a < g.dim(); ++a) {
                if (!std::getline(ss, cell, ',')) throw Error(errc::io, "short row in '" + path + "'");
                j[a] = std::stoi(cell);
                if (j[a] < 0 || j[a] >= g.n()) throw Error(errc::io, "index out of range in '" + path + "'");
            }
            if (!std::getline(ss, cell, ',')) throw Error(errc::io, "missing omega in '" + path + "'");
            std::size_t lin = g.linear(j);
            if (seen[lin]) throw Error(errc::io, "duplicate grid point in '" + path + "'");
            seen[lin] = 1;
            values[lin] = std::stod(cell);
            ++rows;
        }
        if (rows != g.size())
            throw Error(errc::grid_mismatch, "dispersion file has " + std::to_string(rows) + " rows, expected " +
                                                 std::to_string(g.size()));
        return tabulated(g, std::move(values));
    }

    const TorusGrid& grid() const { return grid_; }
    Kind kind() const { return kind_; }
    double offset() const { return c_; }
    double operator()(std::size_t lin) const { return values_[lin]; }
    const std::vector<double>& values() const { return values_; }
    double lipschitz() const { return lipschitz_; }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }

private:
    TorusGrid grid_;
    Kind kind_ = Kind::nearest_neighbor;
    double c_ = 0.0;
    double lipschitz_ = 0.0;
    std::vector<double> values_;
};

struct SignVector {
    std::array<int, 4> s{1, 1, -1, -1};

    constexpr SignVector() = default;
    constexpr SignVector(int a, int b, int c, int d) : s{a, b, c, d} {
        for (int v : s)
            if (v != 1 && v != -1) throw Error(errc::config, "sign vector entries must be +-1");
    }
    int operator[](int i) const { return s[i]; }

    static constexpr SignVector collision() { return {1, 1, -1, -1}; }

    // Permutations used by the Fubini swap identities.
    SignVector swap2() const { return {s[1], s[0], s[2], s[3]}; }
    SignVector swap3() const { return {s[2], s[1], s[0], s[3]}; }
    SignVector swap4() const { return {s[3], s[1], s[0], s[2]}; }

    friend bool operator==(const SignVector&, const SignVector&) = default;
};

inline double omega_underline(std::size_t k1, std::size_t k2, std::size_t k3, std::size_t k4,
                              const DispersionRelation& w) {
    // Grouped so that the pair swaps are exact in floating point.
    return (w(k1) + w(k2)) - (w(k3) + w(k4));
}

/// sigma_1 w(k1) + sigma_2 w(k2) + sigma_3 w(k3) + sigma_4 w(k1 + k2 - k3).
inline double omega_tilde(std::size_t k1, std::size_t k2, std::size_t k3, const SignVector& s,
                          const DispersionRelation& w) {
    const std::size_t k4 = w.grid().k4(k1, k2, k3);
    return (s[0] * w(k1) + s[1] * w(k2)) + (s[2] * w(k3) + s[3] * w(k4));
}

/// Smallest regulator the direct quadrature resolves: kappa * L_omega / N.
inline double eps_floor(const DispersionRelation& w, double kappa = 2.0) {
    return kappa * w.lipschitz() / w.grid().n();
}

/// p_t(x) for every site x (indexed mod N), from an inverse FFT of e^{-i t omega}.
inline std::vector<std::complex<double>> free_propagator_field(double t, const DispersionRelation& w) {
    const TorusGrid& g = w.grid();
    std::vector<std::complex<double>> buf(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = std::polar(1.0, -t * w(i));
    fft_backward(buf, g.dim(), g.n());
    const double wt = g.weight();
    for (auto& v : buf) v *= wt;
    return buf;
}

/// p_t(x) = N^-d sum_j e^{2 pi i x.j/N} e^{-i t omega(j/N)}.
inline std::complex<double> free_propagator(double t, const Index& x, const DispersionRelation& w) {
    // Sites are taken mod N; only |x^nu| <= N/2 is free of aliasing.
    return free_propagator_field(t, w)[w.grid().linear(x)];
}

}  // namespace hbk
