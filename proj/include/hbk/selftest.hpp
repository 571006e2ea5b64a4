#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbk/collision.hpp"
#include "hbk/diagnostics.hpp"
#include "hbk/dispersion_validation.hpp"
#include "hbk/evolution.hpp"

namespace hbk {

struct SelfCheck {
    std::string name;
    double value = 0.0;   // measured residual (or ratio, see name)
    double limit = 0.0;
    bool pass = false;
    std::string error;    // set when the check threw
};

struct SelfTestResult {
    std::vector<SelfCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json j = {{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}};
            if (!c.error.empty()) j["error"] = c.error;
            a.push_back(j);
        }
        return {{"checks", a}, {"pass", all_pass()}};
    }
};

/// The invariant suite on a given grid, dispersion and regulator. Random data
/// is drawn from `seed`; each check is independent and failures are collected,
/// not thrown. Energy is checked through its true finite-eps property (the
/// defect shrinks with eps), spin through exact conservation.
inline SelfTestResult run_selftest(const DispersionRelation& om, CollisionParams p, std::uint64_t seed) {
    SelfTestResult res;
    const TorusGrid& g = om.grid();
    Rng rng(seed);
    auto check = [&](const std::string& name, double limit, const std::function<double()>& f,
                     bool at_least = false) {
        SelfCheck c{name, 0.0, limit, false, {}};
        try {
            c.value = f();
            c.pass = at_least ? c.value >= limit : c.value <= limit;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
        res.checks.push_back(c);
    };

    // spin algebra
    check("j_involution_and_trace", 1e-14, [&] {
        double r = 0.0;
        for (int i = 0; i < 1000; ++i) {
            SpinMatrix m = random_hermitian(rng) + cplx(0.0, 1.0) * random_hermitian(rng);
            r = std::max(r, hs_norm(j_transform(j_transform(m)) - m));
            r = std::max(r, std::abs(j_transform(m).trace() - m.trace()));
        }
        return r;
    });
    check("hs_submultiplicativity_excess", 1e-14, [&] {
        double r = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpinMatrix a = random_hermitian(rng) * random_hermitian(rng);
            const SpinMatrix b = random_hermitian(rng);
            r = std::max(r, hs_norm(a * b) - hs_norm(a) * hs_norm(b));
        }
        return r;
    });
    check("truncation_lipschitz_constant", 2.0, [&] {
        double c = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpinMatrix a = random_hermitian(rng), b = random_hermitian(rng);
            const double d = hs_norm(a - b);
            if (d > 1e-8) c = std::max(c, hs_norm(truncate(a) - truncate(b)) / d);
        }
        return c;
    });
    check("truncation_complement", 1e-13, [&] {
        double r = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpinMatrix m = random_hermitian(rng);
            r = std::max(r, hs_norm((SpinMatrix::identity() - truncate(m)) - truncate(SpinMatrix::identity() - m)));
        }
        return r;
    });
    check("matrix_inequality_min_eigenvalue", -1e-10, [&] {
        double r = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const SpinMatrix a = random_psd(rng), b = random_psd(rng), c = random_psd(rng);
            r = std::min(r, matrix_inequality_residual(a, b, c));
            const SpinMatrix y = j_transform(a * b) * c + j_transform(c * b) * a;
            r = std::min(r, lambda_min(hermitian_part(y)));
        }
        return r;
    }, true);
    check("unitary_exp_unitarity", 1e-12, [&] {
        double r = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpinMatrix u = unitary_exp(random_hermitian(rng, 3.0), 0.7);
            r = std::max(r, hs_norm(u.adjoint() * u - SpinMatrix::identity()));
        }
        return r;
    });
    check("commutator_traceless", 1e-14, [&] {
        double r = 0.0;
        for (int i = 0; i < 1000; ++i)
            r = std::max(r, std::abs(commutator(random_hermitian(rng), random_hermitian(rng)).trace()));
        return r;
    });

    // lattice
    check("momentum_conservation_mismatches", 0.0, [&] {
        const GridArithmetic ar(g);
        const std::size_t n = std::min<std::size_t>(g.size(), 64);
        double bad = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const std::size_t k4 = ar.add(a, ar.add(b, g.negate(c)));
                    const Index ja = g.digits(a), jb = g.digits(b), jc = g.digits(c), j4 = g.digits(k4);
                    for (int x = 0; x < g.dim(); ++x)
                        if (((ja[x] + jb[x] - jc[x] - j4[x]) % g.n() + g.n()) % g.n() != 0) bad += 1.0;
                }
        return bad;
    });
    check("omega_underline_swap_symmetry", 0.0, [&] {
        const std::size_t n = std::min<std::size_t>(g.size(), 32);
        double r = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const std::size_t d = g.k4(a, b, c);
                    const double w = omega_underline(a, b, c, d, om);
                    r = std::max(r, std::abs(w + omega_underline(c, d, a, b, om)));
                    r = std::max(r, std::abs(w - omega_underline(b, a, d, c, om)));
                }
        return r;
    });
    check("propagator_reflection", 1e-12, [&] {
        const auto pt = free_propagator_field(3.7, om);
        const auto pm = free_propagator_field(-3.7, om);
        double r = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            r = std::max(r, std::abs(pm[i] - std::conj(pt[g.negate(i)])));
            if (om.kind() == DispersionRelation::Kind::nearest_neighbor)
                r = std::max(r, std::abs(pm[i] - std::conj(pt[i])));
        }
        return r;
    });

    // collision
    const WignerField wf = random_fermi_field(g, rng);
    check("operator_herm_residual", 1e-11, [&] {
        OpStats s;
        collision_full(wf, om, p, &s);
        return s.herm_residual;
    });
    check("tilde_antisymmetry", 1e-12, [&] { return symmetry_residual(wf, om, p).max_residual(); });
    check("tilde_h_eff_symmetry", 1e-12, [&] {
        return symmetry_residual(wf, om, p).metadata["h_eff_residual"].get<double>();
    });
    check("spin_conservation", 1e-12, [&] {
        double r = 0.0;
        for (int i = 0; i < 5; ++i) r = std::max(r, hs_norm(field_mean(collision_full(random_hermitian_field(g, rng), om, p))));
        return r;
    });
    check("energy_defect_ratio_eps_over_4", 1.0, [&] {
        // |N^-d sum omega tr C| at eps/4 relative to eps; must shrink.
        CollisionParams q = p;
        const double e0 = std::abs(field_energy(collision_full(wf, om, q), om));
        q.epsilon = p.epsilon / 4;
        const double e1 = std::abs(field_energy(collision_full(wf, om, q), om));
        return e0 > 1e-300 ? e1 / e0 : 0.0;
    });
    check("gain_min_eigenvalue", -1e-10, [&] { return min_eigenvalue(gain(wf, om, p)); }, true);
    check("fubini_swap", 1e-12, [&] {
        std::vector<cplx> f[4];
        std::normal_distribution<double> nd;
        for (auto& v : f) {
            v.resize(g.size());
            for (auto& x : v) x = cplx(nd(rng), nd(rng));
        }
        const QuadFunction gf = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
            return f[0][a] * f[1][b] * f[2][c] * f[3][d];
        };
        const double scale = 1.0 + std::abs(fubini_swap_residual(gf, SignVector::collision(), 0.0, om, p.epsilon)
                                                .metadata["values"][0][0].get<double>());
        return fubini_swap_residual(gf, SignVector(1, -1, -1, 1), 0.3, om, p.epsilon).max_residual() / scale;
    });
    check("c0_trilinearity_and_conjugation", 1e-12, [&] {
        std::normal_distribution<double> nd;
        auto rnd = [&] {
            ScalarField v(g.size());
            for (auto& x : v) x = cplx(nd(rng), nd(rng));
            return v;
        };
        const ScalarField a = rnd(), b = rnd(), c = rnd(), a2 = rnd();
        ScalarField comb(g.size()), ca(g.size()), cb(g.size()), cc(g.size());
        const cplx lam(0.3, -1.2);
        for (std::size_t i = 0; i < g.size(); ++i) {
            comb[i] = a[i] + lam * a2[i];
            ca[i] = std::conj(a[i]);
            cb[i] = std::conj(b[i]);
            cc[i] = std::conj(c[i]);
        }
        double r = 0.0;
        for (std::size_t k = 0; k < std::min<std::size_t>(g.size(), 8); ++k) {
            const cplx lhs = c0_trilinear(comb, b, c, k, om, p.epsilon);
            const cplx rhs = c0_trilinear(a, b, c, k, om, p.epsilon) + lam * c0_trilinear(a2, b, c, k, om, p.epsilon);
            r = std::max(r, std::abs(lhs - rhs));
            r = std::max(r, std::abs(c0_trilinear(ca, cb, cc, k, om, p.epsilon) -
                                     std::conj(c0_trilinear(a, b, c, k, om, p.epsilon))));
        }
        return r;
    });

    // evolution
    IntegratorConfig ic;
    ic.dt = std::min(0.05, dt_max(om, p));
    ic.t_end = 10 * ic.dt;
    check("exp_duhamel_psd_min_eigenvalue", -1e-12, [&] {
        IntegratorConfig c = ic;
        c.scheme = Scheme::exp_duhamel;
        c.keep_fields = true;
        WignerField w0 = random_fermi_field(g, rng);
        for (std::size_t k = 0; k < g.size(); k += 2) w0[k] = hermitian_from_spectrum(0.0, 0.9, rng);
        const TrajectoryRecord tr = evolve(w0, om, p, c);
        double m = 0.0;
        for (const auto& f : tr.fields) m = std::min(m, min_eigenvalue(f));
        return m;
    }, true);
    check("truncation_inactive_on_interior", 1e-12, [&] {
        const WignerField w0 = random_spectrum_field(g, rng, 0.05, 0.95);
        IntegratorConfig a = ic, b = ic;
        a.keep_fields = b.keep_fields = true;
        a.t_end = b.t_end = 3 * ic.dt;
        b.truncation = true;
        return sup_distance(evolve(w0, om, p, a).fields.back(), evolve(w0, om, p, b).fields.back());
    });
    check("propagator_unitarity", 1e-12, [&] {
        std::vector<WignerField> hs;
        for (int i = 0; i < 4; ++i) hs.push_back(random_hermitian_field(g, rng));
        const WignerField prop = unitary_propagator(hs, 0.1);
        double r = 0.0;
        for (const auto& u : prop.data())
            r = std::max(r, hs_norm(u.adjoint() * u - SpinMatrix::identity()));
        return r;
    });

    // diagnostics
    check("conservation_report_stationary", 0.0, [&] {
        return conservation_report(evolve(WignerField(g, SpinMatrix::scalar(0.5)), om, p, ic)).max_residual();
    });

    // dispersion validation
    check("bessel_f_vs_library", 1e-10, [&] {
        double r = 0.0;
        for (double x = 0.0; x <= 50.0; x += 0.5)
            r = std::max(r, std::abs(bessel_f(x).real() - boost::math::cyl_bessel_j(0, x)));
        return r;
    });
    check("F_resolution_doubling_ratio", 0.5, [&] {
        const std::array<double, 4> s{1.2, -0.8, 0.5, 2.0};
        const double a = F_estimate(s, SignVector::collision(), 16).real();
        const double b = F_estimate(s, SignVector::collision(), 32).real();
        const double c = F_estimate(s, SignVector::collision(), 64).real();
        return std::abs(b - a) > 0.0 ? std::abs(c - b) / std::abs(b - a) : 0.0;
    });
    check("pt_l3_exponent_refinement_change", 0.05, [&] {
        const auto a = pt_l3_decay(DispersionRelation::nearest_neighbor(TorusGrid(1, 256)), 40.0, 36, 5.0);
        const auto b = pt_l3_decay(DispersionRelation::nearest_neighbor(TorusGrid(1, 512)), 40.0, 72, 5.0);
        return std::abs(a.fitted_exponent / b.fitted_exponent - 1.0);
    });
    return res;
}

}  // namespace hbk
