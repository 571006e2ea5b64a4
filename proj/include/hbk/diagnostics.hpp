#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbk/collision.hpp"
#include "hbk/evolution.hpp"
#include "hbk/field.hpp"

namespace hbk {

struct SeriesPoint {
    double param = 0.0;
    double residual = 0.0;
};

struct DiagnosticsReport {
    std::string name;
    double tolerance = 0.0;
    bool verdict = false;
    std::vector<SeriesPoint> series;
    nlohmann::json metadata = nlohmann::json::object();

    /// Default rule: pass iff every residual is within tolerance.
    void judge() {
        verdict = !series.empty();
        for (const auto& p : series)
            if (!(std::abs(p.residual) <= tolerance)) verdict = false;
    }

    double max_residual() const {
        double m = 0.0;
        for (const auto& p : series) m = std::max(m, std::abs(p.residual));
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json s = nlohmann::json::array();
        for (const auto& p : series) s.push_back({{"param", p.param}, {"residual", p.residual}});
        return {{"name", name}, {"tolerance", tolerance}, {"verdict", verdict ? "pass" : "fail"},
                {"series", s}, {"metadata", metadata}};
    }
};

inline nlohmann::json grid_metadata(const TorusGrid& g) { return {{"d", g.dim()}, {"N", g.n()}}; }

/// Max over time of the relative energy drift and of the spin drift.
inline DiagnosticsReport conservation_report(const TrajectoryRecord& tr, double tol = 1e-8) {
    if (tr.times.empty()) throw Error(errc::empty_input, "conservation_report on an empty trajectory");
    DiagnosticsReport rep;
    rep.name = "conservation";
    rep.tolerance = tol;
    const double e0 = tr.energy.front();
    const SpinMatrix s0 = tr.spin.front();
    double emax = 0.0, smax = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double de = std::abs(tr.energy[i] - e0) / std::max(1.0, std::abs(e0));
        const double ds = hs_norm(tr.spin[i] - s0);
        emax = std::max(emax, de);
        smax = std::max(smax, ds);
        rep.series.push_back({tr.times[i], std::max(de, ds)});
    }
    rep.metadata["energy_drift"] = emax;
    rep.metadata["spin_drift"] = smax;
    rep.metadata["status"] = tr.status;
    rep.judge();
    return rep;
}

enum class StudyOp { h_eff, c_diss };

inline WignerField study_operator(StudyOp op, const WignerField& w, const DispersionRelation& om,
                                  const CollisionParams& p) {
    return op == StudyOp::h_eff ? h_eff_eps(w, om, p) : collision_diss(w, om, p);
}

namespace detail {
/// Cauchy rule: each increment at most (1 + slack) times the previous one.
inline bool cauchy_ok(const std::vector<SeriesPoint>& s, double slack) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].residual > (1.0 + slack) * s[i - 1].residual) return false;
    return !s.empty();
}
}  // namespace detail

/// Fixed grid: successive ||Op^{eps_i} - Op^{eps_{i+1}}||_2. Every eps must sit
/// above the grid floor, otherwise the schedule needs refinement ("bad-schedule").
inline DiagnosticsReport epsilon_study(const WignerField& w, const DispersionRelation& om,
                                       const std::vector<double>& eps_list, StudyOp op, CollisionParams p,
                                       double slack = 0.1) {
    check_grid(w, om);
    if (eps_list.size() < 2) throw Error(errc::bad_schedule, "need at least two regulators");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        require_regulator(eps_list[i]);
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw Error(errc::bad_schedule, "eps list must decrease");
        if (eps_list[i] < eps_floor(om, p.kappa))
            throw Error(errc::bad_schedule, "eps " + std::to_string(eps_list[i]) + " below grid floor without refinement");
    }
    DiagnosticsReport rep;
    rep.name = op == StudyOp::h_eff ? "epsilon_study_h_eff" : "epsilon_study_c_diss";
    rep.tolerance = slack;
    std::vector<WignerField> vals;
    for (double e : eps_list) {
        p.epsilon = e;
        vals.push_back(study_operator(op, w, om, p));
    }
    nlohmann::json norms = nlohmann::json::array();
    for (std::size_t i = 0; i < vals.size(); ++i) norms.push_back(l2_norm(vals[i]));
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        rep.series.push_back({eps_list[i], l2_distance(vals[i], vals[i + 1])});
    rep.metadata["grid"] = grid_metadata(w.grid());
    rep.metadata["epsilons"] = eps_list;
    rep.metadata["operator_norms"] = norms;
    rep.metadata["criterion"] = "successive differences non-increasing within slack";
    rep.verdict = detail::cauchy_ok(rep.series, slack);
    return rep;
}

using ContinuumField = std::function<SpinMatrix(const std::array<double, 3>&)>;
using DispersionFactory = std::function<DispersionRelation(const TorusGrid&)>;

/// Paired (N, eps) refinement. Successive operators are compared on the coarser
/// grid by injection (fine index = coarse index * N_fine/N_coarse). For H_eff
/// with the Lorentzian kernel the sharp-cutoff value at the finest level is
/// also compared; it must lie within 2x the last same-mode increment.
inline DiagnosticsReport epsilon_study_paired(const ContinuumField& field, int d,
                                              const std::vector<std::pair<int, double>>& schedule,
                                              const DispersionFactory& make_omega, StudyOp op, CollisionParams p,
                                              double slack = 0.1, bool cross_mode = true) {
    if (schedule.size() < 2) throw Error(errc::bad_schedule, "need at least two schedule entries");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        require_regulator(schedule[i].second);
        if (i > 0) {
            if (!(schedule[i].second < schedule[i - 1].second)) throw Error(errc::bad_schedule, "eps must decrease");
            if (schedule[i].first % schedule[i - 1].first != 0)
                throw Error(errc::bad_schedule, "each N must be a multiple of the previous one");
        }
    }
    std::vector<WignerField> vals;
    std::vector<TorusGrid> grids;
    DispersionRelation finest_om;
    WignerField finest_w;
    for (const auto& [n, e] : schedule) {
        TorusGrid g(d, n);
        DispersionRelation om = make_omega(g);
        if (e < eps_floor(om, p.kappa))
            throw Error(errc::bad_schedule, "eps " + std::to_string(e) + " below floor of N=" + std::to_string(n));
        WignerField w(g);
        for (std::size_t k = 0; k < g.size(); ++k) w[k] = field(g.point_unit(k));
        p.epsilon = e;
        vals.push_back(study_operator(op, w, om, p));
        grids.push_back(g);
        finest_om = om;
        finest_w = w;
    }
    auto inject = [](const WignerField& fine, const TorusGrid& coarse) {
        const int ratio = fine.grid().n() / coarse.n();
        WignerField out(coarse);
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            Index j = coarse.digits(k);
            for (int a = 0; a < coarse.dim(); ++a) j[a] *= ratio;
            out[k] = fine[fine.grid().linear(j)];
        }
        return out;
    };
    DiagnosticsReport rep;
    rep.name = op == StudyOp::h_eff ? "epsilon_study_h_eff" : "epsilon_study_c_diss";
    rep.tolerance = slack;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        rep.series.push_back({schedule[i].second, l2_distance(vals[i], inject(vals[i + 1], grids[i]))});
    nlohmann::json sched = nlohmann::json::array();
    for (const auto& [n, e] : schedule) sched.push_back({{"N", n}, {"epsilon", e}});
    rep.metadata["schedule"] = sched;
    rep.metadata["d"] = d;
    rep.metadata["criterion"] = "successive differences non-increasing within slack";
    bool ok = detail::cauchy_ok(rep.series, slack);
    if (cross_mode && op == StudyOp::h_eff && p.pv_mode == PvMode::lorentzian) {
        CollisionParams ps = p;
        ps.epsilon = schedule.back().second;
        ps.pv_mode = PvMode::sharp;
        const double cross = l2_distance(h_eff_eps(finest_w, finest_om, ps), vals.back());
        const double last = rep.series.back().residual;
        rep.metadata["cross_mode_difference"] = cross;
        rep.metadata["cross_mode_bound"] = 2.0 * last;
        rep.metadata["cross_mode_pass"] = cross < 2.0 * last;
        ok = ok && cross < 2.0 * last;
    }
    rep.verdict = ok;
    return rep;
}

/// ||C[W~] + C[W]||_inf, which vanishes identically.
inline DiagnosticsReport symmetry_residual(const WignerField& w, const DispersionRelation& om,
                                           const CollisionParams& p, double tol = 1e-12) {
    DiagnosticsReport rep;
    rep.name = "tilde_symmetry";
    rep.tolerance = tol;
    const WignerField wt = tilde(w);
    const double rc = sup_norm(collision_full(wt, om, p) + collision_full(w, om, p));
    const double rh = sup_distance(h_eff_eps(wt, om, p), h_eff_eps(w, om, p));
    rep.series.push_back({0.0, rc});
    rep.metadata["h_eff_residual"] = rh;
    rep.metadata["grid"] = grid_metadata(w.grid());
    rep.metadata["epsilon"] = p.epsilon;
    rep.judge();
    return rep;
}

using QuadFunction = std::function<cplx(std::size_t, std::size_t, std::size_t, std::size_t)>;

/// The four iterated sums of a grid function G(k1,k2,k3,k4) against the
/// Lorentzian measure with signs sigma, sigma^(2), sigma^(3), sigma^(4):
///   I1 = sum_k1 sum_{a,b} L1 G(k1, a, b, k1+a-b)
///   I2 = sum_k2 sum_{a,b} L2 G(a, k2, b, k2+a-b)
///   I3 = sum_k3 sum_{a,b} L3 G(b, -a, k3, -(k3+a-b))
///   I4 = sum_k4 sum_{a,b} L4 G(b, -a, -(k4+a-b), k4)
/// each with weight N^-3d / pi. They agree by reindexing.
inline DiagnosticsReport fubini_swap_residual(const QuadFunction& gfun, const SignVector& sg, double alpha,
                                              const DispersionRelation& om, double eps, double tol = 1e-12) {
    require_regulator(eps);
    const TorusGrid& g = om.grid();
    const std::size_t n = g.size();
    const GridArithmetic ar(g);
    const SignVector sigs[4] = {sg, sg.swap2(), sg.swap3(), sg.swap4()};
    std::vector<std::size_t> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = g.negate(i);
    cplx vals[4];
    for (int v = 0; v < 4; ++v) {
        const SignVector& s = sigs[v];
        std::vector<cplx> outer(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<cplx> rows(n);
            for (std::size_t a = 0; a < n; ++a) {
                const std::size_t ka = ar.add(k, a);
                cplx row = 0.0;
                for (std::size_t b = 0; b < n; ++b) {
                    const std::size_t c = ar.sub(ka, b);  // k + a - b
                    const double x = s[0] * om(k) + s[1] * om(a) + s[2] * om(b) + s[3] * om(c) - alpha;
                    const double l = eps / (x * x + eps * eps);
                    cplx gv;
                    switch (v) {
                        case 0: gv = gfun(k, a, b, c); break;
                        case 1: gv = gfun(a, k, b, c); break;
                        case 2: gv = gfun(b, neg[a], k, neg[c]); break;
                        default: gv = gfun(b, neg[a], neg[c], k); break;
                    }
                    row += l * gv;
                }
                rows[a] = row;
            }
            outer[k] = pairwise_sum(rows);
        }
        vals[v] = pairwise_sum(outer) * (g.weight() * g.weight() * g.weight() / std::numbers::pi);
    }
    DiagnosticsReport rep;
    rep.name = "fubini_swap";
    rep.tolerance = tol;
    double dev = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) dev = std::max(dev, std::abs(vals[i] - vals[j]));
    rep.series.push_back({alpha, dev});
    nlohmann::json vj = nlohmann::json::array();
    for (const auto& v : vals) vj.push_back({v.real(), v.imag()});
    rep.metadata["values"] = vj;
    rep.metadata["grid"] = grid_metadata(g);
    rep.metadata["epsilon"] = eps;
    rep.judge();
    return rep;
}

}  // namespace hbk
