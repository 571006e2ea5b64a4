#pragma once

// Exact 2x2 complex matrix algebra for spin-1/2 occupation matrices.
//
// Every function of a Hermitian matrix goes through the closed-form spectral
// split M = m I + r n.sigma, so that f(M) = (f(m+r)+f(m-r))/2 I
// + (f(m+r)-f(m-r))/(2r) (M - m I). No iteration anywhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <ostream>

#include "hbk/error.hpp"

namespace hbk {

using cplx = std::complex<double>;

inline constexpr double default_tol_herm = 1e-10;
inline constexpr double default_tol_fermi = 1e-10;

struct SpinMatrix {
    // Row-major: m00, m01, m10, m11.
    std::array<cplx, 4> e{};

    constexpr SpinMatrix() = default;
    constexpr SpinMatrix(cplx a, cplx b, cplx c, cplx d) : e{a, b, c, d} {}

    static constexpr SpinMatrix zero() { return {}; }
    static constexpr SpinMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr SpinMatrix diag(double a, double d) { return {a, 0.0, 0.0, d}; }
    static constexpr SpinMatrix scalar(cplx s) { return {s, 0.0, 0.0, s}; }

    static SpinMatrix pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
    static SpinMatrix pauli_y() { return {0.0, cplx(0, -1), cplx(0, 1), 0.0}; }
    static SpinMatrix pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

    constexpr cplx& operator()(int i, int j) { return e[2 * i + j]; }
    constexpr const cplx& operator()(int i, int j) const { return e[2 * i + j]; }

    cplx trace() const { return e[0] + e[3]; }
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }

    SpinMatrix adjoint() const {
        return {std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])};
    }

    SpinMatrix& operator+=(const SpinMatrix& o) {
        for (int i = 0; i < 4; ++i) e[i] += o.e[i];
        return *this;
    }
    SpinMatrix& operator-=(const SpinMatrix& o) {
        for (int i = 0; i < 4; ++i) e[i] -= o.e[i];
        return *this;
    }
    SpinMatrix& operator*=(cplx s) {
        for (auto& x : e) x *= s;
        return *this;
    }
    SpinMatrix& operator*=(double s) {
        for (auto& x : e) x *= s;
        return *this;
    }

    friend SpinMatrix operator+(SpinMatrix a, const SpinMatrix& b) { return a += b; }
    friend SpinMatrix operator-(SpinMatrix a, const SpinMatrix& b) { return a -= b; }
    friend SpinMatrix operator-(SpinMatrix a) { return a *= -1.0; }
    friend SpinMatrix operator*(SpinMatrix a, cplx s) { return a *= s; }
    friend SpinMatrix operator*(cplx s, SpinMatrix a) { return a *= s; }
    friend SpinMatrix operator*(SpinMatrix a, double s) { return a *= s; }
    friend SpinMatrix operator*(double s, SpinMatrix a) { return a *= s; }

    friend SpinMatrix operator*(const SpinMatrix& a, const SpinMatrix& b) {
        return {a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
                a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]};
    }

    friend bool operator==(const SpinMatrix&, const SpinMatrix&) = default;

    friend std::ostream& operator<<(std::ostream& os, const SpinMatrix& m) {
        return os << "[[" << m.e[0] << ", " << m.e[1] << "], [" << m.e[2] << ", " << m.e[3]
                  << "]]";
    }
};

/// Hilbert-Schmidt norm, sqrt(sum |M_ij|^2).
inline double hs_norm(const SpinMatrix& m) {
    double s = 0.0;
    for (const auto& x : m.e) s += std::norm(x);
    return std::sqrt(s);
}

inline double hs_norm_sq(const SpinMatrix& m) {
    double s = 0.0;
    for (const auto& x : m.e) s += std::norm(x);
    return s;
}

/// ||M - M*||, zero exactly for Hermitian matrices.
inline double hermiticity_residual(const SpinMatrix& m) { return hs_norm(m - m.adjoint()); }

inline bool is_hermitian(const SpinMatrix& m, double tol = default_tol_herm) {
    return hermiticity_residual(m) <= tol;
}

inline SpinMatrix hermitian_part(const SpinMatrix& m) { return 0.5 * (m + m.adjoint()); }

/// J[M] = tr(M) I - M.
inline SpinMatrix j_transform(const SpinMatrix& m) {
    return {m.e[3], -m.e[1], -m.e[2], m.e[0]};
}

/// I - M.
inline SpinMatrix tilde(const SpinMatrix& m) { return {1.0 - m.e[0], -m.e[1], -m.e[2], 1.0 - m.e[3]}; }

inline SpinMatrix commutator(const SpinMatrix& a, const SpinMatrix& b) { return a * b - b * a; }

/// Spectral data of a Hermitian 2x2 matrix: eigenvalues mean +- radius.
struct HermitianSpectrum {
    double mean = 0.0;
    double radius = 0.0;  // half the eigenvalue gap, >= 0
    double lambda_min() const { return mean - radius; }
    double lambda_max() const { return mean + radius; }
};

/// Uses only the Hermitian part, so tiny anti-Hermitian noise is ignored.
inline HermitianSpectrum hermitian_spectrum(const SpinMatrix& m) {
    const double a = m.e[0].real();
    const double d = m.e[3].real();
    const cplx b = 0.5 * (m.e[1] + std::conj(m.e[2]));
    const double half = 0.5 * (a - d);
    return {0.5 * (a + d), std::hypot(half, std::abs(b))};
}

/// f(M) for Hermitian M, f given at the two eigenvalues.
template <class F>
SpinMatrix hermitian_function(const SpinMatrix& m, F&& f) {
    const SpinMatrix h = hermitian_part(m);
    const HermitianSpectrum sp = hermitian_spectrum(h);
    const auto fp = f(sp.lambda_max());
    const auto fm = f(sp.lambda_min());
    using R = decltype(fp);
    const R avg = 0.5 * (fp + fm);
    SpinMatrix out = SpinMatrix::scalar(cplx(avg));
    if (sp.radius > 0.0) {
        const R slope = (fp - fm) / (2.0 * sp.radius);
        SpinMatrix shifted = h - SpinMatrix::scalar(sp.mean);
        out += shifted * cplx(slope);
    }
    return out;
}

inline double lambda_min(const SpinMatrix& m) { return hermitian_spectrum(m).lambda_min(); }
inline double lambda_max(const SpinMatrix& m) { return hermitian_spectrum(m).lambda_max(); }

/// |M| = (M* M)^{1/2} for Hermitian M.
inline SpinMatrix abs_hermitian(const SpinMatrix& m) {
    return hermitian_function(m, [](double x) { return std::abs(x); });
}

inline void require_hermitian(const SpinMatrix& m, double tol, const char* what) {
    if (!is_hermitian(m, tol)) throw Error(errc::not_hermitian, what);
}

/// Phi[M] = (I + |M| - |I - M|)/2: eigenvalues clipped into [0, 1].
inline SpinMatrix truncate(const SpinMatrix& m, double tol_herm = default_tol_herm) {
    require_hermitian(m, tol_herm, "truncate");
    return 0.5 * (SpinMatrix::identity() + abs_hermitian(m) - abs_hermitian(tilde(m)));
}

/// Amount by which the Fermi constraint 0 <= M <= 1 is violated (0 if it holds).
inline double fermi_violation(const SpinMatrix& m) {
    const auto sp = hermitian_spectrum(m);
    return std::max({-sp.lambda_min(), sp.lambda_max() - 1.0, 0.0});
}

inline bool is_psd(const SpinMatrix& m, double tol = default_tol_fermi) {
    return is_hermitian(m, default_tol_herm) && lambda_min(m) >= -tol;
}

/// Smallest eigenvalue of A J[BC] + C J[BA]; nonnegative for PSD A, B, C.
inline double matrix_inequality_residual(const SpinMatrix& a, const SpinMatrix& b,
                                         const SpinMatrix& c, double tol = default_tol_fermi) {
    if (!is_psd(a, tol) || !is_psd(b, tol) || !is_psd(c, tol))
        throw Error(errc::not_psd, "matrix_inequality_residual");
    const SpinMatrix x = a * j_transform(b * c) + c * j_transform(b * a);
    return lambda_min(hermitian_part(x));
}

/// exp(i dt H) for Hermitian H.
inline SpinMatrix unitary_exp(const SpinMatrix& h, double dt, double tol_herm = default_tol_herm) {
    require_hermitian(h, tol_herm, "unitary_exp");
    return hermitian_function(h, [dt](double x) { return std::exp(cplx(0.0, dt * x)); });
}

/// exp(M) for an arbitrary complex 2x2 matrix via Cayley-Hamilton:
/// exp(M) = e^{tr/2} (cosh(q) I + sinh(q)/q (M - tr/2 I)), q^2 = -det(M - tr/2 I).
inline SpinMatrix expm(const SpinMatrix& m) {
    const cplx half_tr = 0.5 * m.trace();
    const SpinMatrix n = m - SpinMatrix::scalar(half_tr);
    const cplx q2 = -n.det();
    const cplx q = std::sqrt(q2);
    cplx ch, sh_over_q;
    if (std::abs(q) < 1e-4) {
        // Taylor tails; |q|^8/8! < 1e-36.
        ch = 1.0 + q2 / 2.0 + q2 * q2 / 24.0 + q2 * q2 * q2 / 720.0;
        sh_over_q = 1.0 + q2 / 6.0 + q2 * q2 / 120.0 + q2 * q2 * q2 / 5040.0;
    } else {
        ch = std::cosh(q);
        sh_over_q = std::sinh(q) / q;
    }
    return std::exp(half_tr) * (SpinMatrix::scalar(ch) + n * sh_over_q);
}

}  // namespace hbk
