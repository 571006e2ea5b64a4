#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "hbk/error.hpp"
#include "hbk/lattice.hpp"
#include "hbk/spin_matrix.hpp"

namespace hbk {

/// Grid-indexed map k -> SpinMatrix.
class WignerField {
public:
    WignerField() = default;
    explicit WignerField(const TorusGrid& g, const SpinMatrix& fill = SpinMatrix::zero())
        : grid_(g), data_(g.size(), fill) {}
    WignerField(const TorusGrid& g, std::vector<SpinMatrix> data) : grid_(g), data_(std::move(data)) {
        if (data_.size() != g.size()) throw Error(errc::grid_mismatch, "field data size does not match grid");
    }

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    SpinMatrix& operator[](std::size_t i) { return data_[i]; }
    const SpinMatrix& operator[](std::size_t i) const { return data_[i]; }
    std::vector<SpinMatrix>& data() { return data_; }
    const std::vector<SpinMatrix>& data() const { return data_; }

    WignerField& operator+=(const WignerField& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    WignerField& operator-=(const WignerField& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    WignerField& operator*=(double s) {
        for (auto& m : data_) m *= s;
        return *this;
    }
    friend WignerField operator+(WignerField a, const WignerField& b) { return a += b; }
    friend WignerField operator-(WignerField a, const WignerField& b) { return a -= b; }
    friend WignerField operator*(WignerField a, double s) { return a *= s; }
    friend WignerField operator*(double s, WignerField a) { return a *= s; }

    /// a + s * b, the workhorse of the explicit integrators.
    static WignerField axpy(const WignerField& a, double s, const WignerField& b) {
        a.check_same(b);
        WignerField out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += s * b.data_[i];
        return out;
    }

    void check_same(const WignerField& o) const {
        if (!(grid_ == o.grid_)) throw Error(errc::grid_mismatch, "fields live on different grids");
    }

private:
    TorusGrid grid_;
    std::vector<SpinMatrix> data_;
};

inline WignerField tilde(const WignerField& w) {
    WignerField out(w.grid());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = tilde(w[i]);
    return out;
}

inline WignerField truncate(const WignerField& w, double tol_herm = default_tol_herm) {
    WignerField out(w.grid());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = truncate(w[i], tol_herm);
    return out;
}

/// ||W||_2 = (N^-d sum_k tr(W* W))^{1/2}.
inline double l2_norm(const WignerField& w) {
    double s = 0.0;
    for (const auto& m : w.data()) s += hs_norm_sq(m);
    return std::sqrt(s * w.grid().weight());
}

inline double sup_norm(const WignerField& w) {
    double s = 0.0;
    for (const auto& m : w.data()) s = std::max(s, hs_norm(m));
    return s;
}

inline double l2_distance(const WignerField& a, const WignerField& b) { return l2_norm(a - b); }
inline double sup_distance(const WignerField& a, const WignerField& b) { return sup_norm(a - b); }

/// N^-d sum_k W(k).
inline SpinMatrix field_mean(const WignerField& w) {
    SpinMatrix s;
    for (const auto& m : w.data()) s += m;
    return s * w.grid().weight();
}

/// N^-d sum_k omega(k) tr W(k).
inline double field_energy(const WignerField& w, const DispersionRelation& om) {
    if (!(w.grid() == om.grid())) throw Error(errc::grid_mismatch, "dispersion and field grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += om(i) * w[i].trace().real();
    return s * w.grid().weight();
}

inline double herm_residual(const WignerField& w) {
    double r = 0.0;
    for (const auto& m : w.data()) r = std::max(r, hermiticity_residual(m));
    return r;
}

/// Replaces each point by (M + M*)/2 and returns the largest ||M - M*|| seen.
inline double symmetrize(WignerField& w) {
    double r = 0.0;
    for (auto& m : w.data()) {
        r = std::max(r, hermiticity_residual(m));
        m = hermitian_part(m);
    }
    return r;
}

inline double min_eigenvalue(const WignerField& w) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& m : w.data()) r = std::min(r, lambda_min(m));
    return r;
}

/// max_k max(-lambda_min, lambda_max - 1, 0).
inline double fermi_residual(const WignerField& w, double tol_herm = default_tol_herm) {
    double r = 0.0;
    for (const auto& m : w.data()) {
        require_hermitian(m, tol_herm, "fermi_residual");
        r = std::max(r, fermi_violation(m));
    }
    return r;
}

/// Diagonal field diag(up(k), down(k)).
inline WignerField diagonal_field(const TorusGrid& g, const std::vector<double>& up, const std::vector<double>& down) {
    if (up.size() != g.size() || down.size() != g.size())
        throw Error(errc::grid_mismatch, "diagonal component arrays do not match grid");
    WignerField w(g);
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = SpinMatrix::diag(up[i], down[i]);
    return w;
}

// ---- random data -----------------------------------------------------------

using Rng = std::mt19937_64;

/// m I + r n.sigma for a uniformly random unit vector n.
inline SpinMatrix hermitian_from_spectrum(double lam1, double lam2, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    double x, y, z, nrm;
    do {
        x = nd(rng);
        y = nd(rng);
        z = nd(rng);
        nrm = std::sqrt(x * x + y * y + z * z);
    } while (nrm < 1e-12);
    x /= nrm;
    y /= nrm;
    z /= nrm;
    const double m = 0.5 * (lam1 + lam2);
    const double r = 0.5 * (lam1 - lam2);
    return {m + r * z, cplx(r * x, -r * y), cplx(r * x, r * y), m - r * z};
}

inline SpinMatrix random_hermitian(Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    const double a = nd(rng), d = nd(rng);
    const cplx b(nd(rng), nd(rng));
    return {a, b, std::conj(b), d};
}

/// Hermitian with eigenvalues uniform in [lo, hi].
inline SpinMatrix random_spectrum_matrix(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return hermitian_from_spectrum(u(rng), u(rng), rng);
}

inline SpinMatrix random_fermi(Rng& rng) { return random_spectrum_matrix(rng, 0.0, 1.0); }

inline SpinMatrix random_psd(Rng& rng, double max_eig = 1.0) { return random_spectrum_matrix(rng, 0.0, max_eig); }

inline WignerField random_hermitian_field(const TorusGrid& g, Rng& rng, double scale = 1.0) {
    WignerField w(g);
    for (auto& m : w.data()) m = random_hermitian(rng, scale);
    return w;
}

inline WignerField random_spectrum_field(const TorusGrid& g, Rng& rng, double lo, double hi) {
    WignerField w(g);
    for (auto& m : w.data()) m = random_spectrum_matrix(rng, lo, hi);
    return w;
}

inline WignerField random_fermi_field(const TorusGrid& g, Rng& rng) { return random_spectrum_field(g, rng, 0.0, 1.0); }

}  // namespace hbk
