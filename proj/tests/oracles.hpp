#pragma once

// Independent reference implementations used only by the tests. Written from
// the defining formulas with plain nested loops and no shared helpers from
// the collision module.

#include <cmath>
#include <complex>
#include <vector>

#include "hbk/field.hpp"
#include "hbk/lattice.hpp"

namespace oracle {

using hbk::cplx;
using hbk::SpinMatrix;
using hbk::WignerField;

inline SpinMatrix J(const SpinMatrix& m) { return m.trace() * SpinMatrix::identity() - m; }
inline SpinMatrix T(const SpinMatrix& m) { return SpinMatrix::identity() - m; }

/// Literal four-term dissipative integrand with kernel eps/(x^2+eps^2).
inline WignerField c_diss(const WignerField& w, const hbk::DispersionRelation& om, double eps) {
    const auto& g = w.grid();
    const std::size_t n = g.size();
    WignerField out(g);
    for (std::size_t k1 = 0; k1 < n; ++k1) {
        SpinMatrix acc;
        for (std::size_t k2 = 0; k2 < n; ++k2)
            for (std::size_t k3 = 0; k3 < n; ++k3) {
                const std::size_t k4 = g.k4(k1, k2, k3);
                const double x = om(k1) + om(k2) - om(k3) - om(k4);
                const double l = eps / (x * x + eps * eps);
                const SpinMatrix &w1 = w[k1], &w2 = w[k2], &w3 = w[k3], &w4 = w[k4];
                acc += l * (T(w1) * w3 * J(T(w2) * w4) + J(w4 * T(w2)) * w3 * T(w1) - w1 * T(w3) * J(w2 * T(w4)) -
                            J(T(w4) * w2) * T(w3) * w1);
            }
        out[k1] = acc * (g.weight() * g.weight());
    }
    return out;
}

/// Literal long-form H_eff with kernel x/(x^2+eps^2), or 1{|x|>=eps}/x when sharp.
inline WignerField h_eff(const WignerField& w, const hbk::DispersionRelation& om, double eps, bool sharp = false) {
    const auto& g = w.grid();
    const std::size_t n = g.size();
    WignerField out(g);
    for (std::size_t k1 = 0; k1 < n; ++k1) {
        SpinMatrix acc;
        for (std::size_t k2 = 0; k2 < n; ++k2)
            for (std::size_t k3 = 0; k3 < n; ++k3) {
                const std::size_t k4 = g.k4(k1, k2, k3);
                const double x = om(k1) + om(k2) - om(k3) - om(k4);
                const double kern = sharp ? (std::abs(x) >= eps ? 1.0 / x : 0.0) : x / (x * x + eps * eps);
                const SpinMatrix &w2 = w[k2], &w3 = w[k3], &w4 = w[k4];
                acc += kern * (w3 * J(T(w2) * w4) + J(w4 * T(w2)) * w3 + T(w3) * J(w2 * T(w4)) + J(T(w4) * w2) * T(w3));
            }
        out[k1] = acc * (-0.5 * g.weight() * g.weight());
    }
    return out;
}

/// Two-component Boltzmann-Nordheim operator for W = diag(a, b):
///   C_a(k1) = 2 N^-2d sum L (a~1 b~2 a3 b4 - a1 b2 a~3 b~4), and a <-> b.
inline void scalar_bn(const std::vector<double>& a, const std::vector<double>& b, const hbk::DispersionRelation& om,
                      double eps, std::vector<double>& ca, std::vector<double>& cb) {
    const auto& g = om.grid();
    const std::size_t n = g.size();
    ca.assign(n, 0.0);
    cb.assign(n, 0.0);
    const double wt = g.weight() * g.weight();
    for (std::size_t k1 = 0; k1 < n; ++k1)
        for (std::size_t k2 = 0; k2 < n; ++k2)
            for (std::size_t k3 = 0; k3 < n; ++k3) {
                const std::size_t k4 = g.k4(k1, k2, k3);
                const double x = om(k1) + om(k2) - om(k3) - om(k4);
                const double l = eps / (x * x + eps * eps);
                ca[k1] += 2.0 * wt * l *
                          ((1 - a[k1]) * (1 - b[k2]) * a[k3] * b[k4] - a[k1] * b[k2] * (1 - a[k3]) * (1 - b[k4]));
                cb[k1] += 2.0 * wt * l *
                          ((1 - b[k1]) * (1 - a[k2]) * b[k3] * a[k4] - b[k1] * a[k2] * (1 - b[k3]) * (1 - a[k4]));
            }
}

}  // namespace oracle
