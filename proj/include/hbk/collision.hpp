#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hbk/field.hpp"
#include "hbk/kernels.hpp"
#include "hbk/lattice.hpp"
#include "hbk/parallel.hpp"
#include "hbk/spectral.hpp"
#include "hbk/spin_matrix.hpp"

namespace hbk {

namespace detail {

struct PartAcc {
    SpinMatrix sx, sy, h;
    friend PartAcc operator+(const PartAcc& a, const PartAcc& b) { return {a.sx + b.sx, a.sy + b.sy, a.h + b.h}; }
};

// Direct O(N^2d) sum per k1. k4 is fixed by exact index arithmetic; the inner
// k3 loop runs sequentially and rows over k2 are reduced pairwise.
template <bool Diss, bool Heff, bool Sharp>
CollisionParts direct_parts(const WignerField& w, const DispersionRelation& om, double eps) {
    const TorusGrid& g = w.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    const WignerField wt = tilde(w);
    const double eps2 = eps * eps;
    CollisionParts parts;
    if (Diss) {
        parts.sx = WignerField(g);
        parts.sy = WignerField(g);
        parts.has_diss = true;
    }
    if (Heff) {
        parts.h = WignerField(g);
        parts.has_h = true;
    }
    const double scale = g.weight() * g.weight();

    parallel_for(n, [&](std::size_t k1) {
        std::vector<PartAcc> rows(n);
        const double w1 = om(k1);
        for (std::size_t k2 = 0; k2 < n; ++k2) {
            const std::size_t s12 = ar.add(k1, k2);
            const double w12 = w1 + om(k2);
            const SpinMatrix& a2 = w[k2];
            const SpinMatrix& t2 = wt[k2];
            PartAcc row;
            for (std::size_t k3 = 0; k3 < n; ++k3) {
                const std::size_t k4 = ar.sub(s12, k3);
                const double x = w12 - (om(k3) + om(k4));
                const SpinMatrix& a3 = w[k3];
                const SpinMatrix& a4 = w[k4];
                const SpinMatrix& t4 = wt[k4];
                const SpinMatrix a2t4 = a2 * t4;
                if constexpr (Diss) {
                    const double l = eps / (x * x + eps2);
                    row.sx += l * (a3 * j_transform(t2 * a4));
                    row.sy += l * (wt[k3] * j_transform(a2t4));
                }
                if constexpr (Heff) {
                    double kern;
                    if constexpr (Sharp) {
                        kern = std::abs(x) >= eps ? 1.0 / x : 0.0;
                    } else {
                        kern = x / (x * x + eps2);
                    }
                    if (kern != 0.0) {
                        const SpinMatrix jd = j_transform(a4 - a2);
                        row.h += kern * (jd * a3 + a3 * jd + j_transform(a2t4 + t4 * a2));
                    }
                }
            }
            rows[k2] = row;
        }
        const PartAcc tot = pairwise_sum(rows);
        if constexpr (Diss) {
            parts.sx[k1] = tot.sx * scale;
            parts.sy[k1] = tot.sy * scale;
        }
        if constexpr (Heff) parts.h[k1] = tot.h * (-0.5 * scale);
    });
    return parts;
}

inline CollisionParts direct_parts_dispatch(const WignerField& w, const DispersionRelation& om,
                                            const CollisionParams& p, unsigned mask) {
    const bool d = mask & part_diss;
    const bool h = mask & part_heff;
    const bool sharp = p.pv_mode == PvMode::sharp;
    if (d && h) return sharp ? direct_parts<true, true, true>(w, om, p.epsilon) : direct_parts<true, true, false>(w, om, p.epsilon);
    if (d) return direct_parts<true, false, false>(w, om, p.epsilon);
    if (h) return sharp ? direct_parts<false, true, true>(w, om, p.epsilon) : direct_parts<false, true, false>(w, om, p.epsilon);
    return {};
}

}  // namespace detail

/// Evaluates the shared sums with the configured backend. The spectral backend
/// has no sharp-cutoff variant, so a sharp H_eff is always summed directly.
inline CollisionParts collision_parts(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                                     unsigned mask = part_all) {
    check_grid(w, om);
    check_params(p, om);
    if (p.backend == Backend::direct) return detail::direct_parts_dispatch(w, om, p, mask);
    unsigned spec_mask = mask;
    CollisionParts extra;
    if ((mask & part_heff) && p.pv_mode == PvMode::sharp) {
        spec_mask &= ~static_cast<unsigned>(part_heff);
        extra = detail::direct_parts_dispatch(w, om, p, part_heff);
    }
    CollisionParts parts = spec_mask ? collision_parts_spectral(w, om, p, spec_mask) : CollisionParts{};
    if (extra.has_h) {
        parts.h = std::move(extra.h);
        parts.has_h = true;
    }
    return parts;
}

namespace detail {
inline WignerField finish(WignerField f, OpStats* stats) {
    const double r = symmetrize(f);
    if (stats) stats->herm_residual = r;
    return f;
}
}  // namespace detail

/// W~1 S_X + h.c. - W1 S_Y - h.c.
inline WignerField diss_from_parts(const WignerField& w, const CollisionParts& parts, OpStats* stats = nullptr) {
    WignerField c(w.grid());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const SpinMatrix a = tilde(w[k]) * parts.sx[k];
        const SpinMatrix b = w[k] * parts.sy[k];
        c[k] = a + a.adjoint() - b - b.adjoint();
    }
    return detail::finish(std::move(c), stats);
}

/// G = S_X + S_X*.
inline WignerField gain_from_parts(const CollisionParts& parts) {
    WignerField gf(parts.sx.grid());
    for (std::size_t k = 0; k < gf.size(); ++k) gf[k] = parts.sx[k] + parts.sx[k].adjoint();
    return gf;
}

/// D = S_X* + S_Y*.
inline WignerField loss_from_parts(const CollisionParts& parts) {
    WignerField df(parts.sx.grid());
    for (std::size_t k = 0; k < df.size(); ++k) df[k] = parts.sx[k].adjoint() + parts.sy[k].adjoint();
    return df;
}

/// -i [H, W].
inline WignerField cons_from_h(const WignerField& h, const WignerField& w, OpStats* stats = nullptr) {
    WignerField c(w.grid());
    for (std::size_t k = 0; k < w.size(); ++k) c[k] = cplx(0.0, -1.0) * commutator(h[k], w[k]);
    return detail::finish(std::move(c), stats);
}

inline WignerField collision_diss(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                                  OpStats* stats = nullptr) {
    return diss_from_parts(w, collision_parts(w, om, p, part_diss), stats);
}

inline WignerField gain(const WignerField& w, const DispersionRelation& om, const CollisionParams& p) {
    return gain_from_parts(collision_parts(w, om, p, part_diss));
}

inline WignerField loss(const WignerField& w, const DispersionRelation& om, const CollisionParams& p) {
    return loss_from_parts(collision_parts(w, om, p, part_diss));
}

/// H_eff via the short integrand J[W4-W2]W3 + W3 J[W4-W2] + J[W2 W~4 + W~4 W2].
inline WignerField h_eff_eps(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                             OpStats* stats = nullptr) {
    return detail::finish(collision_parts(w, om, p, part_heff).h, stats);
}

/// H_eff via the long, manifestly symmetric integrand
///   W3 J[W~2 W4] + J[W4 W~2] W3 + W~3 J[W2 W~4] + J[W~4 W2] W~3.
/// Direct summation only; kept as an independent cross-check.
inline WignerField h_eff_eps_symmetric(const WignerField& w, const DispersionRelation& om, const CollisionParams& p) {
    check_grid(w, om);
    require_regulator(p.epsilon);
    const TorusGrid& g = w.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    const WignerField wt = tilde(w);
    const double eps = p.epsilon;
    const bool sharp = p.pv_mode == PvMode::sharp;
    WignerField h(g);
    parallel_for(n, [&](std::size_t k1) {
        std::vector<SpinMatrix> rows(n);
        for (std::size_t k2 = 0; k2 < n; ++k2) {
            const std::size_t s12 = ar.add(k1, k2);
            SpinMatrix row;
            for (std::size_t k3 = 0; k3 < n; ++k3) {
                const std::size_t k4 = ar.sub(s12, k3);
                const double x = om(k1) + om(k2) - om(k3) - om(k4);
                const double kern = sharp ? sharp_pv_kernel(x, eps) : pv_kernel(x, eps);
                const SpinMatrix t1 = w[k3] * j_transform(wt[k2] * w[k4]);
                const SpinMatrix t2 = wt[k3] * j_transform(w[k2] * wt[k4]);
                row += kern * (t1 + t1.adjoint() + t2 + t2.adjoint());
            }
            rows[k2] = row;
        }
        h[k1] = pairwise_sum(rows) * (-0.5 * g.weight() * g.weight());
    });
    return h;
}

inline WignerField c_cons_eps(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                              OpStats* stats = nullptr) {
    return cons_from_h(h_eff_eps(w, om, p), w, stats);
}

/// C_diss + C_cons in one pass over the quadruples.
inline WignerField collision_full(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                                  OpStats* stats = nullptr) {
    CollisionParts parts = collision_parts(w, om, p, part_all);
    symmetrize(parts.h);
    OpStats sd, sc;
    WignerField c = diss_from_parts(w, parts, &sd);
    c += cons_from_h(parts.h, w, &sc);
    if (stats) stats->herm_residual = std::max(sd.herm_residual, sc.herm_residual);
    return c;
}

inline WignerField collision_diss_spectral(const WignerField& w, const DispersionRelation& om, CollisionParams p,
                                           OpStats* stats = nullptr) {
    p.backend = Backend::spectral;
    return collision_diss(w, om, p, stats);
}

// ---- scalar kernels and measure maps ----------------------------------------

using ScalarField = std::vector<cplx>;

inline void check_scalar(const ScalarField& f, const DispersionRelation& om) {
    if (f.size() != om.grid().size()) throw Error(errc::grid_mismatch, "scalar field size does not match grid");
}

/// (1/pi) N^-2d sum_{k2,k3} L(Omega~((k1,k2,k3),sigma) - alpha).
inline double sigma_coll_map(std::size_t k1, double alpha, const SignVector& sg, const DispersionRelation& om,
                             double eps) {
    require_regulator(eps);
    const TorusGrid& g = om.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    std::vector<double> rows(n);
    const double base = sg[0] * om(k1) - alpha;
    for (std::size_t k2 = 0; k2 < n; ++k2) {
        const std::size_t s12 = ar.add(k1, k2);
        const double b2 = base + sg[1] * om(k2);
        double row = 0.0;
        for (std::size_t k3 = 0; k3 < n; ++k3) {
            const double x = b2 + sg[2] * om(k3) + sg[3] * om(ar.sub(s12, k3));
            row += eps / (x * x + eps * eps);
        }
        rows[k2] = row;
    }
    return pairwise_sum(rows) * g.weight() * g.weight() / std::numbers::pi;
}

inline double sigma_coll_map(std::size_t k1, double alpha, const SignVector& sg, const DispersionRelation& om,
                             const CollisionParams& p) {
    return sigma_coll_map(k1, alpha, sg, om, p.epsilon);
}

/// max_k |Omega~((k1,k2,k3), sigma)| over the grid.
inline double sup_omega_tilde(const SignVector& sg, const DispersionRelation& om) {
    // Each term is bounded separately; the bound is attained for the collision
    // signs on symmetric bands, and is an upper bound otherwise.
    const double a = std::max(std::abs(om.min()), std::abs(om.max()));
    const TorusGrid& g = om.grid();
    const std::size_t n = g.size();
    if (static_cast<double>(n) * n * n <= 2.0e7) {
        const GridArithmetic ar(g);
        double m = 0.0;
        for (std::size_t k1 = 0; k1 < n; ++k1)
            for (std::size_t k2 = 0; k2 < n; ++k2) {
                const std::size_t s12 = ar.add(k1, k2);
                for (std::size_t k3 = 0; k3 < n; ++k3) {
                    const double x =
                        sg[0] * om(k1) + sg[1] * om(k2) + sg[2] * om(k3) + sg[3] * om(ar.sub(s12, k3));
                    m = std::max(m, std::abs(x));
                }
            }
        return m;
    }
    return 4.0 * a;
}

/// (1/pi) N^-2d sum_{k2,k3} w1(k2) w2(k3) w3(k4) L(omega_).
inline cplx c0_trilinear(const ScalarField& f1, const ScalarField& f2, const ScalarField& f3, std::size_t k1,
                         const DispersionRelation& om, double eps) {
    require_regulator(eps);
    check_scalar(f1, om);
    check_scalar(f2, om);
    check_scalar(f3, om);
    const TorusGrid& g = om.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    std::vector<cplx> rows(n);
    for (std::size_t k2 = 0; k2 < n; ++k2) {
        const std::size_t s12 = ar.add(k1, k2);
        cplx row = 0.0;
        for (std::size_t k3 = 0; k3 < n; ++k3) {
            const std::size_t k4 = ar.sub(s12, k3);
            const double x = om(k1) + om(k2) - om(k3) - om(k4);
            row += f1[k2] * f2[k3] * f3[k4] * (eps / (x * x + eps * eps));
        }
        rows[k2] = row;
    }
    return pairwise_sum(rows) * (g.weight() * g.weight() / std::numbers::pi);
}

namespace detail {
template <class Kernel>
cplx bilinear(const ScalarField& f, const ScalarField& gf, const SignVector& sg, double eps, std::size_t k0,
              const DispersionRelation& om, Kernel&& kern) {
    require_regulator(eps);
    check_scalar(f, om);
    check_scalar(gf, om);
    const TorusGrid& g = om.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    std::vector<cplx> rows(n);
    const double base = sg[0] * om(k0);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t s = ar.add(k0, a);
        const double ba = base + sg[1] * om(a);
        cplx row = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const double x = ba + sg[2] * om(b) + sg[3] * om(ar.sub(s, b));
            row += f[a] * gf[b] * kern(x);
        }
        rows[a] = row;
    }
    return pairwise_sum(rows) * (g.weight() * g.weight());
}
}  // namespace detail

/// N^-2d sum f(k1') g(k2') eps / (Omega~^2 + eps^2), Omega~ = Omega~((k0,k1',k2'), sigma).
inline cplx lorentz_bilinear(const ScalarField& f, const ScalarField& gf, const SignVector& sg, double eps,
                             std::size_t k0, const DispersionRelation& om) {
    return detail::bilinear(f, gf, sg, eps, k0, om, [eps](double x) { return eps / (x * x + eps * eps); });
}

/// N^-2d sum f(k1') g(k2') Omega~ / (Omega~^2 + eps^2).
inline cplx pv_bilinear(const ScalarField& f, const ScalarField& gf, const SignVector& sg, double eps,
                        std::size_t k0, const DispersionRelation& om) {
    return detail::bilinear(f, gf, sg, eps, k0, om, [eps](double x) { return x / (x * x + eps * eps); });
}

/// Rebuilds H_eff (Lorentzian PV) entry by entry from pv_bilinear sums.
///
/// The short integrand expands into pieces that each depend on only two of
/// k2, k3, k4:
///   2 J[W2]                                  (k2)
///   -2 tr(W2 W4) I + W2 W4 + W4 W2           (k2, k4)
///   -2 tr(W2) W3 + W2 W3 + W3 W2             (k2, k3)
///   2 tr(W4) W3 - W4 W3 - W3 W4              (k3, k4)
/// (k2,k3) and (k2,k4) pairs are bilinear sums at base k1 with the collision
/// signs. For (k3,k4) put k2 = k3 + k4 - k1: the sum is at base -k1 with signs
/// (1,-1,-1,1), k1' = k3, k2' = -k4.
inline WignerField h_eff_via_bilinear(const WignerField& w, const DispersionRelation& om, double eps) {
    check_grid(w, om);
    const TorusGrid& g = w.grid();
    const std::size_t n = g.size();
    const SignVector coll = SignVector::collision();
    const SignVector mirror(1, -1, -1, 1);

    auto entry = [&](int i, int j, bool reflect) {
        ScalarField f(n);
        for (std::size_t k = 0; k < n; ++k) f[k] = w[reflect ? g.negate(k) : k](i, j);
        return f;
    };
    auto trace_field = [&](bool reflect) {
        ScalarField f(n);
        for (std::size_t k = 0; k < n; ++k) f[k] = w[reflect ? g.negate(k) : k].trace();
        return f;
    };
    const ScalarField one(n, cplx(1.0));
    ScalarField we[2][2], wr[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            we[i][j] = entry(i, j, false);
            wr[i][j] = entry(i, j, true);
        }
    const ScalarField tr = trace_field(false);
    const ScalarField trr = trace_field(true);

    WignerField h(g);
    for (std::size_t k1 = 0; k1 < n; ++k1) {
        const std::size_t mk1 = g.negate(k1);
        auto p23 = [&](const ScalarField& a, const ScalarField& b) { return pv_bilinear(a, b, coll, eps, k1, om); };
        auto p24 = p23;  // (k2, k4): same kernel after k3 -> k4
        auto p34 = [&](const ScalarField& a, const ScalarField& b_reflected) {
            return pv_bilinear(a, b_reflected, mirror, eps, mk1, om);
        };
        // tr(W2 W4) = sum_ab W2_ab W4_ba.
        cplx tr24 = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) tr24 += p24(we[a][b], we[b][a]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx v = 0.0;
                // 2 J[W2]_ij = 2 (tr W2 delta_ij - W2_ij)
                v += 2.0 * p23((i == j ? tr : ScalarField(n, 0.0)), one) - 2.0 * p23(we[i][j], one);
                // (k2, k4) block
                if (i == j) v -= 2.0 * tr24;
                for (int b = 0; b < 2; ++b) v += p24(we[i][b], we[b][j]) + p24(we[b][j], we[i][b]);
                // (k2, k3) block
                v -= 2.0 * p23(tr, we[i][j]);
                for (int b = 0; b < 2; ++b) v += p23(we[i][b], we[b][j]) + p23(we[b][j], we[i][b]);
                // (k3, k4) block; the k4 factor is read through the reflection.
                v += 2.0 * p34(we[i][j], trr);
                for (int b = 0; b < 2; ++b) v -= p34(we[b][j], wr[i][b]) + p34(we[i][b], wr[b][j]);
                h[k1](i, j) = -0.5 * v;
            }
    }
    return h;
}

/// Local torus average over |k'| <= delta (minimal-image Euclidean distance).
inline WignerField mollify(const WignerField& w, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw Error(errc::bad_radius, "mollifier radius must lie in (0, 1/2)");
    const TorusGrid& g = w.grid();
    if (delta < 1.0 / g.n()) {
        warn("mollifier radius below grid spacing; returning the field unchanged");
        return w;
    }
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto p = g.point(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += p[a] * p[a];
        if (r2 <= delta * delta * (1.0 + 1e-12)) offsets.push_back(i);
    }
    const double inv = 1.0 / static_cast<double>(offsets.size());
    WignerField out(g);
    parallel_for(g.size(), [&](std::size_t k) {
        SpinMatrix s;
        for (std::size_t o : offsets) s += w[g.add(k, o)];
        out[k] = s * inv;
    });
    return out;
}

}  // namespace hbk
