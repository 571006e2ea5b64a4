#pragma once

// Fourier backend for the collision sums.
//
// The kernels are written as time integrals,
//   eps/(x^2+eps^2) = int ds 1/2 e^{-eps|s|} e^{isx},
//   x/(x^2+eps^2)   = int ds 1/2 (-i sgn s) e^{-eps|s|} e^{isx},
// and e^{is omega_} factorizes over the four momenta. For fixed s each
// momentum-conserving double sum is then a convolution,
//   sum_{k2,k3} b(k3) a(k2) c(k1+k2-k3) = N^-d IDFT[ b^(x) a^(-x) c^(x) ](k1),
// with the matrix order of the factors kept. Only the transforms of
// e^{-is omega} W and e^{-is omega} are needed; the k2 factors at -x and the
// mirrored node -s follow from Hermiticity of W.
//
// The s-integral uses Gauss-Legendre panels on [0,S] and [-S,0], split at the
// kink/jump at s = 0, with panel length bounded by panel_phase / max|omega_|.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "hbk/fft.hpp"
#include "hbk/field.hpp"
#include "hbk/kernels.hpp"

namespace hbk {

struct SpectralRule {
    std::vector<double> nodes;    // s > 0
    std::vector<double> weights;  // plain quadrature weights on [0, S]
    double s_max = 0.0;
};

inline SpectralRule spectral_rule(const DispersionRelation& om, const CollisionParams& p) {
    require_regulator(p.epsilon);
    const double eps = p.epsilon;
    const double s_max = p.spectral.s_max > 0.0 ? p.spectral.s_max : std::log(1.0 / p.spectral.tail) / eps;
    if (!(std::exp(-eps * s_max) <= 1e-10 * (1.0 + 1e-9)))
        throw Error(errc::spectral_underresolved,
                    "exp(-eps*S_max) = " + std::to_string(std::exp(-eps * s_max)) + " exceeds 1e-10");
    const double span = 2.0 * (om.max() - om.min());
    std::size_t panels = 1;
    if (span > 0.0) panels = static_cast<std::size_t>(std::ceil(s_max * span / p.spectral.panel_phase));
    panels = std::max<std::size_t>(panels, 1);
    const double h = s_max / static_cast<double>(panels);

    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& xa = GL::abscissa();
    const auto& wa = GL::weights();
    SpectralRule rule;
    rule.s_max = s_max;
    for (std::size_t m = 0; m < panels; ++m) {
        const double mid = (static_cast<double>(m) + 0.5) * h;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            if (xa[i] == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(0.5 * h * wa[i]);
                continue;
            }
            rule.nodes.push_back(mid - 0.5 * h * xa[i]);
            rule.weights.push_back(0.5 * h * wa[i]);
            rule.nodes.push_back(mid + 0.5 * h * xa[i]);
            rule.weights.push_back(0.5 * h * wa[i]);
        }
    }
    return rule;
}

/// Same contract as the direct quadrature; H uses the Lorentzian PV kernel.
inline CollisionParts collision_parts_spectral(const WignerField& w, const DispersionRelation& om,
                                               const CollisionParams& p, unsigned mask) {
    check_grid(w, om);
    const bool want_d = mask & part_diss;
    const bool want_h = mask & part_heff;
    const TorusGrid& g = w.grid();
    const std::size_t n = g.size();
    const int d = g.dim();
    const int nn = g.n();
    const double eps = p.epsilon;
    const SpectralRule rule = spectral_rule(om, p);

    std::vector<std::size_t> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = g.negate(i);

    const int nout = (want_d ? 8 : 0) + (want_h ? 4 : 0);
    std::vector<cplx> fwd(5 * n);
    std::vector<cplx> out(static_cast<std::size_t>(nout) * n);
    std::vector<cplx> acc(static_cast<std::size_t>(nout) * n, cplx(0.0));

    auto get = [&](const std::vector<cplx>& buf, std::size_t x) {
        return SpinMatrix(buf[x], buf[n + x], buf[2 * n + x], buf[3 * n + x]);
    };
    auto put = [&](std::vector<cplx>& buf, int base, std::size_t x, const SpinMatrix& m) {
        for (int c = 0; c < 4; ++c) buf[static_cast<std::size_t>(base + c) * n + x] = m.e[c];
    };

    for (std::size_t node = 0; node < rule.nodes.size(); ++node) {
        const double s = rule.nodes[node];
        for (std::size_t k = 0; k < n; ++k) {
            const cplx ph = std::polar(1.0, -s * om(k));
            for (int c = 0; c < 4; ++c) fwd[c * n + k] = ph * w[k].e[c];
            fwd[4 * n + k] = ph;
        }
        fft_forward(fwd, d, nn, 5);

        for (int sgn : {+1, -1}) {
            for (std::size_t x = 0; x < n; ++x) {
                SpinMatrix q_m;
                cplx q;
                if (sgn > 0) {
                    q_m = get(fwd, x);
                    q = fwd[4 * n + x];
                } else {
                    q_m = get(fwd, neg[x]).adjoint();
                    q = std::conj(fwd[4 * n + neg[x]]);
                }
                const SpinMatrix qd = q_m.adjoint();
                const SpinMatrix ct = SpinMatrix::scalar(q) - q_m;
                int base = 0;
                if (want_d) {
                    const SpinMatrix at = SpinMatrix::scalar(std::conj(q)) - qd;
                    const SpinMatrix atq = at * q_m;
                    const SpinMatrix x_m = atq.trace() * q_m - q_m * atq;
                    const SpinMatrix qct = qd * ct;
                    const SpinMatrix y_m = qct.trace() * ct - ct * qct;
                    put(out, 0, x, x_m);
                    put(out, 4, x, y_m);
                    base = 8;
                }
                if (want_h) {
                    const SpinMatrix jq = j_transform(q_m);
                    const SpinMatrix jqd = j_transform(qd);
                    const SpinMatrix h_m = std::conj(q) * (jq * q_m + q_m * jq) - q * (jqd * q_m + q_m * jqd) +
                                           q * j_transform(qd * ct + ct * qd);
                    put(out, base, x, h_m);
                }
            }
            fft_backward(out, d, nn, nout);

            const double damp = 0.5 * rule.weights[node] * std::exp(-eps * s);
            const cplx w_pv = cplx(0.0, -static_cast<double>(sgn)) * damp;
            for (std::size_t k = 0; k < n; ++k) {
                const cplx ph = std::polar(1.0, sgn * s * om(k));
                int base = 0;
                if (want_d) {
                    const cplx f = damp * ph;
                    for (std::size_t c = 0; c < 8; ++c) acc[c * n + k] += f * out[c * n + k];
                    base = 8;
                }
                if (want_h) {
                    const cplx f = w_pv * ph;
                    for (int c = 0; c < 4; ++c) {
                        const std::size_t idx = static_cast<std::size_t>(base + c) * n + k;
                        acc[idx] += f * out[idx];
                    }
                }
            }
        }
    }

    const double nd = static_cast<double>(n);
    const double scale = 1.0 / (nd * nd * nd);
    CollisionParts parts;
    int base = 0;
    if (want_d) {
        parts.sx = WignerField(g);
        parts.sy = WignerField(g);
        for (std::size_t k = 0; k < n; ++k) {
            parts.sx[k] = get(acc, k) * scale;
            SpinMatrix y(acc[4 * n + k], acc[5 * n + k], acc[6 * n + k], acc[7 * n + k]);
            parts.sy[k] = y * scale;
        }
        parts.has_diss = true;
        base = 8;
    }
    if (want_h) {
        parts.h = WignerField(g);
        const std::size_t b = static_cast<std::size_t>(base);
        for (std::size_t k = 0; k < n; ++k) {
            SpinMatrix hm(acc[b * n + k], acc[(b + 1) * n + k], acc[(b + 2) * n + k], acc[(b + 3) * n + k]);
            parts.h[k] = hm * (-0.5 * scale);
        }
        parts.has_h = true;
    }
    return parts;
}

}  // namespace hbk
