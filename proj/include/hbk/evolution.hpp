#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hbk/collision.hpp"
#include "hbk/field.hpp"
#include "hbk/log.hpp"

namespace hbk {

enum class Scheme { rk4, exp_duhamel };

struct IntegratorConfig {
    Scheme scheme = Scheme::rk4;
    double dt = 1e-2;
    double t_end = 1.0;
    bool truncation = false;
    int record_every = 1;
    bool keep_fields = false;
    double fermi_limit = 0.1;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<WignerField> fields;
    std::vector<double> energy;
    std::vector<SpinMatrix> spin;
    std::vector<double> fermi_residual;
    std::vector<double> herm_residual;
    std::string status = "ok";
};

inline void check_config(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(errc::config, "dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw Error(errc::config, "t_end must be nonnegative");
    if (cfg.record_every < 1) throw Error(errc::config, "record_every must be >= 1");
}

/// dt_max = 0.1 / (1 + pi sup_k sigma_coll(k, 0)).
inline double dt_max(const DispersionRelation& om, const CollisionParams& p) {
    double sup = 0.0;
    for (std::size_t k = 0; k < om.grid().size(); ++k)
        sup = std::max(sup, sigma_coll_map(k, 0.0, SignVector::collision(), om, p.epsilon));
    return 0.1 / (1.0 + std::numbers::pi * sup);
}

/// Right-hand side C[W], or with truncation
///   G[Phi W] - D[Phi W] W - W D[Phi W]* - i [H[Phi W], W].
inline WignerField collision_rhs(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                                 bool truncation) {
    if (!truncation) return collision_full(w, om, p);
    const WignerField phi = truncate(w, p.tol_herm);
    CollisionParts parts = collision_parts(phi, om, p, part_all);
    symmetrize(parts.h);
    const WignerField gf = gain_from_parts(parts);
    const WignerField df = loss_from_parts(parts);
    WignerField c(w.grid());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const SpinMatrix dw = df[k] * w[k];
        c[k] = gf[k] - dw - dw.adjoint() + cplx(0.0, -1.0) * commutator(parts.h[k], w[k]);
    }
    symmetrize(c);
    return c;
}

namespace detail {

inline WignerField rk4_raw(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                           const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    const WignerField k1 = collision_rhs(w, om, p, cfg.truncation);
    const WignerField k2 = collision_rhs(WignerField::axpy(w, 0.5 * dt, k1), om, p, cfg.truncation);
    const WignerField k3 = collision_rhs(WignerField::axpy(w, 0.5 * dt, k2), om, p, cfg.truncation);
    const WignerField k4 = collision_rhs(WignerField::axpy(w, dt, k3), om, p, cfg.truncation);
    WignerField out = w;
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    symmetrize(out);
    return out;
}

inline WignerField duhamel_raw(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                               const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    const WignerField arg = cfg.truncation ? truncate(w, p.tol_herm) : w;
    CollisionParts parts = collision_parts(arg, om, p, part_all);
    symmetrize(parts.h);
    const WignerField gf = gain_from_parts(parts);
    const WignerField df = loss_from_parts(parts);
    WignerField out(w.grid());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const SpinMatrix e = expm(-dt * (df[k] + cplx(0.0, 1.0) * parts.h[k]));
        out[k] = e * w[k] * e.adjoint() + dt * gf[k];
    }
    symmetrize(out);
    if (cfg.truncation) {
        // Phi safeguard: only points that left [0, 1] are touched.
        for (auto& m : out.data())
            if (fermi_violation(m) > 0.0) m = truncate(m, p.tol_herm);
    }
    return out;
}

inline void check_step(const WignerField& before, const WignerField& after, const IntegratorConfig& cfg) {
    const double pre = fermi_residual(before, std::numeric_limits<double>::infinity());
    const double post = fermi_residual(after, std::numeric_limits<double>::infinity());
    if (post > std::max(cfg.fermi_limit, pre))
        throw Error(errc::dt_too_large, "Fermi residual " + std::to_string(post) + " after step exceeds limit");
}

}  // namespace detail

/// Classical explicit RK4 step of dW/dt = C[W]; output symmetrized.
inline WignerField rk4_step(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                            const IntegratorConfig& cfg) {
    check_config(cfg);
    require_regulator(p.epsilon);
    if (herm_residual(w) > p.tol_herm) throw Error(errc::not_hermitian, "rk4_step input");
    WignerField out = detail::rk4_raw(w, om, p, cfg);
    detail::check_step(w, out, cfg);
    return out;
}

/// W <- E W E* + dt G[W], E = exp(-dt (D[W] + i H[W])). First order; keeps W >= 0.
inline WignerField exp_duhamel_step(const WignerField& w, const DispersionRelation& om, const CollisionParams& p,
                                    const IntegratorConfig& cfg) {
    check_config(cfg);
    require_regulator(p.epsilon);
    if (herm_residual(w) > p.tol_herm) throw Error(errc::not_hermitian, "exp_duhamel_step input");
    WignerField out = detail::duhamel_raw(w, om, p, cfg);
    detail::check_step(w, out, cfg);
    return out;
}

/// U_{t,0} = prod_j exp(-i dt h_mid(j)), latest factor on the left, from
/// samples h(0), h(dt), ..., h(m dt). For constant h this is exp(-i t h),
/// the solution of d/ds U_{t,s} = i U_{t,s} h with U_{t,t} = 1.
inline WignerField unitary_propagator(const std::vector<WignerField>& h_series, double dt,
                                      double tol_herm = default_tol_herm) {
    if (h_series.empty()) throw Error(errc::empty_input, "unitary_propagator needs at least one sample");
    const TorusGrid& g = h_series.front().grid();
    for (const auto& h : h_series) h_series.front().check_same(h);
    WignerField u(g, SpinMatrix::identity());
    for (std::size_t j = 0; j + 1 < h_series.size(); ++j) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const SpinMatrix mid = 0.5 * (h_series[j][k] + h_series[j + 1][k]);
            u[k] = unitary_exp(mid, -dt, tol_herm) * u[k];
        }
    }
    return u;
}

namespace detail {
inline void record(TrajectoryRecord& tr, double t, const WignerField& w, const DispersionRelation& om, bool keep) {
    tr.times.push_back(t);
    tr.energy.push_back(field_energy(w, om));
    tr.spin.push_back(field_mean(w));
    tr.fermi_residual.push_back(fermi_residual(w, std::numeric_limits<double>::infinity()));
    tr.herm_residual.push_back(herm_residual(w));
    if (keep) tr.fields.push_back(w);
}
}  // namespace detail

/// Integrates from 0 to t_end. Stops early with status "constraint-violated"
/// once the Fermi residual exceeds cfg.fermi_limit; the offending state is recorded.
inline TrajectoryRecord evolve(const WignerField& w0, const DispersionRelation& om, const CollisionParams& p,
                               const IntegratorConfig& cfg) {
    check_config(cfg);
    check_grid(w0, om);
    check_params(p, om);
    if (herm_residual(w0) > p.tol_herm) throw Error(errc::not_hermitian, "initial data");
    const double limit = dt_max(om, p);
    if (cfg.dt > limit)
        warn("dt " + std::to_string(cfg.dt) + " exceeds stability heuristic dt_max " + std::to_string(limit));

    TrajectoryRecord tr;
    WignerField w = w0;
    detail::record(tr, 0.0, w, om, cfg.keep_fields);
    const auto steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
    for (long s = 1; s <= steps; ++s) {
        w = cfg.scheme == Scheme::rk4 ? detail::rk4_raw(w, om, p, cfg) : detail::duhamel_raw(w, om, p, cfg);
        const double t = static_cast<double>(s) * cfg.dt;
        const double fr = fermi_residual(w, std::numeric_limits<double>::infinity());
        if (fr > cfg.fermi_limit) {
            detail::record(tr, t, w, om, cfg.keep_fields);
            tr.status = "constraint-violated";
            return tr;
        }
        if (s % cfg.record_every == 0 || s == steps) detail::record(tr, t, w, om, cfg.keep_fields);
    }
    return tr;
}

struct StabilityReport {
    std::vector<double> times;
    std::vector<double> ratios;
    double initial_distance = 0.0;
    double fitted_c = 0.0;
};

/// ||W_t - W'_t||_2 / ||W_0 - W'_0||_2 along both trajectories, and the
/// smallest C >= 0 with ratio(t) <= e^{C t} on the recorded times.
inline StabilityReport stability_vs_initial_data(const WignerField& a, const WignerField& b,
                                                 const DispersionRelation& om, const CollisionParams& p,
                                                 IntegratorConfig cfg) {
    cfg.keep_fields = true;
    const TrajectoryRecord ta = evolve(a, om, p, cfg);
    const TrajectoryRecord tb = evolve(b, om, p, cfg);
    StabilityReport rep;
    rep.initial_distance = l2_distance(a, b);
    const std::size_t m = std::min(ta.times.size(), tb.times.size());
    for (std::size_t i = 0; i < m; ++i) {
        const double dist = l2_distance(ta.fields[i], tb.fields[i]);
        const double r = rep.initial_distance > 0.0 ? dist / rep.initial_distance : 0.0;
        rep.times.push_back(ta.times[i]);
        rep.ratios.push_back(r);
        if (ta.times[i] > 0.0 && r > 0.0) rep.fitted_c = std::max(rep.fitted_c, std::log(r) / ta.times[i]);
    }
    return rep;
}

}  // namespace hbk
