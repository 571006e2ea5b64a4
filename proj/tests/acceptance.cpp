// Acceptance checks AC1..AC13. Usage: acceptance [n ...]; no arguments runs
// all of them. Prints one PASS/FAIL line per criterion and exits nonzero if
// any selected criterion fails.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "hbk/hbk.hpp"
#include "oracles.hpp"

using namespace hbk;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [violated]");
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

CollisionParams params(double eps) {
    CollisionParams p;
    p.epsilon = eps;
    return p;
}

// ---------------------------------------------------------------------------

void ac01(Outcome& o) {
    Stopwatch sw;
    const TorusGrid g(1, 32);
    const auto om = DispersionRelation::nearest_neighbor(g);
    const auto p = params(0.2);
    Rng rng(101);
    const WignerField w0 = random_fermi_field(g, rng);
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    const auto r1 = conservation_report(evolve(w0, om, p, cfg));
    cfg.dt = 5e-3;
    const auto r2 = conservation_report(evolve(w0, om, p, cfg));
    const double e1 = r1.metadata["energy_drift"], s1 = r1.metadata["spin_drift"];
    const double e2 = r2.metadata["energy_drift"], s2 = r2.metadata["spin_drift"];
    o.require(e1 < 1e-8, "energy drift " + fmt(e1) + " < 1e-8");
    o.require(s1 < 1e-8, "spin drift " + fmt(s1) + " < 1e-8");
    // A drift already at the roundoff floor has nothing left to scale away.
    auto halves = [](double a, double b) { return b < 1e-13 || a / b >= 10.0; };
    o.require(halves(e1, e2), "energy drift ratio dt/(dt/2) " + fmt(e1 / e2) + " >= 10");
    o.require(halves(s1, s2), "spin drift ratio " + (s2 < 1e-13 ? std::string("at roundoff") : fmt(s1 / s2)) + " >= 10");
    o.require(sw.seconds() < 60, "runtime " + fmt(sw.seconds()) + " s < 60");
}

void ac02(Outcome& o) {
    Stopwatch sw;
    double worst_e = 0.0, worst_s = 0.0;
    for (auto [d, n] : {std::pair{1, 16}, std::pair{2, 8}}) {
        const TorusGrid g(d, n);
        const auto om = DispersionRelation::nearest_neighbor(g);
        const auto p = params(eps_floor(om));
        Rng rng(200 + d);
        for (int i = 0; i < 50; ++i) {
            const WignerField w = random_hermitian_field(g, rng);
            const WignerField c = collision_full(w, om, p);
            worst_e = std::max(worst_e, std::abs(field_energy(c, om)));
            worst_s = std::max(worst_s, hs_norm(field_mean(c)));
        }
    }
    o.require(worst_e < 1e-12, "|N^-d sum omega tr C| " + fmt(worst_e) + " < 1e-12");
    o.require(worst_s < 1e-12, "||N^-d sum C|| " + fmt(worst_s) + " < 1e-12");
    o.require(sw.seconds() < 60, "runtime " + fmt(sw.seconds()) + " s < 60");
}

void ac03(Outcome& o) {
    const TorusGrid g(1, 16);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.3);
    const auto p = params(1.0);
    double op = 0.0, traj = 0.0;
    for (double w : {0.0, 0.25, 0.5, 1.0}) {
        const WignerField c0(g, SpinMatrix::scalar(w));
        op = std::max(op, sup_norm(collision_full(c0, om, p)));
        IntegratorConfig cfg;
        cfg.dt = 0.05;
        cfg.t_end = 1.0;
        cfg.keep_fields = true;
        for (const auto& f : evolve(c0, om, p, cfg).fields) traj = std::max(traj, sup_distance(f, c0));
    }
    o.require(op < 1e-13, "||C[w I]||_inf " + fmt(op) + " < 1e-13");
    o.require(traj < 1e-10, "trajectory deviation " + fmt(traj) + " < 1e-10");
}

void ac04(Outcome& o) {
    const TorusGrid g(1, 16);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.2);
    const auto p = params(1.0);
    Rng rng(404);
    double rc = 0.0, rh = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto rep = symmetry_residual(random_fermi_field(g, rng), om, p);
        rc = std::max(rc, rep.max_residual());
        rh = std::max(rh, rep.metadata["h_eff_residual"].get<double>());
    }
    o.require(rc < 1e-12, "||C[W~] + C[W]||_inf " + fmt(rc) + " < 1e-12");
    o.require(rh < 1e-12, "||H[W~] - H[W]||_inf " + fmt(rh) + " < 1e-12");
}

void ac05(Outcome& o) {
    Stopwatch sw;
    Rng rng(505);
    double m1 = std::numeric_limits<double>::infinity(), m2 = m1;
    for (int i = 0; i < 100000; ++i) {
        const SpinMatrix a = random_psd(rng), b = random_psd(rng), c = random_psd(rng);
        m1 = std::min(m1, matrix_inequality_residual(a, b, c));
        m2 = std::min(m2, lambda_min(hermitian_part(j_transform(a * b) * c + j_transform(c * b) * a)));
    }
    const TorusGrid g(1, 8);
    const auto om = DispersionRelation::nearest_neighbor(g);
    const auto p = params(eps_floor(om));
    double mg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) mg = std::min(mg, min_eigenvalue(gain(random_fermi_field(g, rng), om, p)));
    o.require(m1 >= -1e-10, "min eig A J[BC] + C J[BA] = " + fmt(m1));
    o.require(m2 >= -1e-10, "min eig J[AB]C + J[CB]A = " + fmt(m2));
    o.require(mg >= -1e-10, "min eig of gain over 1000 Fermi fields = " + fmt(mg));
    o.require(sw.seconds() < 120, "runtime " + fmt(sw.seconds()) + " s < 120");
}

void ac06(Outcome& o) {
    const TorusGrid g(1, 16);
    const auto om = DispersionRelation::nearest_neighbor(g);
    const auto p = params(1.0);
    Rng rng(606);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::exp_duhamel;
    cfg.dt = 0.02;
    cfg.t_end = 1.0;
    cfg.keep_fields = true;
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        // PSD with eigenvalues in [0, 1]; every other point rank-deficient.
        WignerField w0 = random_fermi_field(g, rng);
        for (std::size_t k = 0; k < g.size(); k += 2) w0[k] = hermitian_from_spectrum(0.0, 0.3 + 0.7 * (i % 3) / 2.0, rng);
        for (const auto& f : evolve(w0, om, p, cfg).fields) m = std::min(m, min_eigenvalue(f));
    }
    o.require(m >= -1e-10, "min eigenvalue over 20 trajectories = " + fmt(m));
}

void ac07(Outcome& o) {
    const TorusGrid g(1, 8);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.1);
    const auto p = params(1.6);
    Rng rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(8), b(8);
    for (int i = 0; i < 8; ++i) a[i] = u(rng), b[i] = u(rng);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    WignerField w = diagonal_field(g, a, b);
    double worst = 0.0;
    for (int step = 0; step < 20; ++step) {
        // One RK4 step of the two-component oracle from the current state.
        const std::vector<double> x0(a), y0(b);
        std::vector<double> kx[4], ky[4];
        const double c[4] = {0.0, 0.5, 0.5, 1.0};
        for (int st = 0; st < 4; ++st) {
            std::vector<double> xs(x0), ys(y0);
            if (st > 0)
                for (int i = 0; i < 8; ++i) {
                    xs[i] += c[st] * cfg.dt * kx[st - 1][i];
                    ys[i] += c[st] * cfg.dt * ky[st - 1][i];
                }
            oracle::scalar_bn(xs, ys, om, p.epsilon, kx[st], ky[st]);
        }
        for (int i = 0; i < 8; ++i) {
            a[i] = x0[i] + cfg.dt / 6 * (kx[0][i] + 2 * kx[1][i] + 2 * kx[2][i] + kx[3][i]);
            b[i] = y0[i] + cfg.dt / 6 * (ky[0][i] + 2 * ky[1][i] + 2 * ky[2][i] + ky[3][i]);
        }
        w = rk4_step(w, om, p, cfg);
        worst = std::max(worst, sup_distance(w, diagonal_field(g, a, b)));
        // Continue both from the matrix state so the comparison stays per step.
        for (int i = 0; i < 8; ++i) a[i] = w[i].e[0].real(), b[i] = w[i].e[3].real();
    }
    o.require(worst < 1e-12, "per-step deviation from scalar oracle " + fmt(worst) + " < 1e-12");
}

void ac08(Outcome& o) {
    const TorusGrid g(1, 64);
    const auto om = DispersionRelation::nearest_neighbor(g);
    const double eps = 0.1, tail = 1e-4;
    const SignVector sg = SignVector::collision();
    const double m = sup_omega_tilde(sg, om) + 2 * eps / (std::numbers::pi * tail);
    const double da = eps / 4;
    const auto n = static_cast<long>(std::ceil(2 * m / da));
    double worst = 0.0;
    for (std::size_t k : {std::size_t{0}, std::size_t{7}, std::size_t{32}}) {
        double integral = 0.0, prev = sigma_coll_map(k, -m, sg, om, eps);
        for (long i = 1; i <= n; ++i) {
            const double cur = sigma_coll_map(k, -m + static_cast<double>(i) * da, sg, om, eps);
            integral += 0.5 * da * (prev + cur);
            prev = cur;
        }
        worst = std::max(worst, std::abs(integral - 1.0));
    }
    o.require(worst <= 1e-3, "|int sigma_coll d alpha - 1| " + fmt(worst) + " <= 1e-3");
}

void ac09(Outcome& o) {
    const TorusGrid g(1, 8);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.1);
    Rng rng(909);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        std::vector<cplx> f[4];
        for (auto& v : f) {
            v.resize(8);
            for (auto& x : v) x = cplx(nd(rng), nd(rng));
        }
        const QuadFunction gf = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
            return f[0][a] * f[1][b] * f[2][c] * f[3][d];
        };
        for (const SignVector& sg : {SignVector::collision(), SignVector(1, -1, 1, -1)})
            worst = std::max(worst, fubini_swap_residual(gf, sg, 0.1 * t, om, 0.4).max_residual());
    }
    o.require(worst < 1e-12, "max disagreement of the four iterated sums " + fmt(worst) + " < 1e-12");
}

void ac10(Outcome& o) {
    const ContinuumField field = [](const std::array<double, 3>& k) {
        return SpinMatrix::scalar(0.5 + 0.25 * std::cos(2 * std::numbers::pi * k[0]));
    };
    const DispersionFactory nn = [](const TorusGrid& g) { return DispersionRelation::nearest_neighbor(g); };
    const auto rep = epsilon_study_paired(field, 1, {{64, 0.4}, {128, 0.2}, {256, 0.1}}, nn, StudyOp::h_eff,
                                          CollisionParams{}, 0.1, true);
    const double i1 = rep.series[0].residual, i2 = rep.series[1].residual;
    o.require(i2 <= 1.1 * i1, "increments " + fmt(i1) + ", " + fmt(i2) + " non-increasing within 10%");
    const double cross = rep.metadata["cross_mode_difference"];
    o.require(rep.metadata["cross_mode_pass"].get<bool>(),
              "sharp vs Lorentzian " + fmt(cross) + " < 2 x last increment " + fmt(2 * i2));
}

void ac11(Outcome& o) {
    double rel = 0.0;
    for (auto [d, n, eps] : {std::tuple{1, 16, 1.0}, std::tuple{2, 8, 3.2}}) {
        const TorusGrid g(d, n);
        const auto om = DispersionRelation::nearest_neighbor(g, 0.3);
        Rng rng(1100 + d);
        auto p = params(eps);
        for (int i = 0; i < 3; ++i) {
            const WignerField w = random_fermi_field(g, rng);
            p.backend = Backend::direct;
            const WignerField a = collision_full(w, om, p);
            p.backend = Backend::spectral;
            const WignerField b = collision_full(w, om, p);
            rel = std::max(rel, sup_distance(a, b) / sup_norm(a));
        }
    }
    o.require(rel <= 1e-6, "spectral vs direct relative sup difference " + fmt(rel) + " <= 1e-6");

    const TorusGrid g(2, 16);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.3);
    Rng rng(1111);
    const WignerField w = random_fermi_field(g, rng);
    auto p = params(eps_floor(om));
    Stopwatch t_direct;
    const WignerField a = collision_full(w, om, p);
    const double td = t_direct.seconds();
    p.backend = Backend::spectral;
    Stopwatch t_spec;
    const WignerField b = collision_full(w, om, p);
    const double ts = t_spec.seconds();
    o.require(td / ts >= 3.0, "speed-up at d=2, N=16: " + fmt(td / ts) + "x >= 3x (direct " + fmt(td) +
                                  " s, spectral " + fmt(ts) + " s, rel diff " + fmt(sup_distance(a, b) / sup_norm(a)) +
                                  ")");
}

void ac12(Outcome& o) {
    Stopwatch sw;
    double c1 = 0.0;
    for (double r = 0.0; r <= 200.0; r += 0.05) c1 = std::max(c1, std::abs(bessel_f(r)) * std::sqrt(1 + r));
    o.require(c1 <= 1.3, "sup |J0(r)| (1+r)^1/2 on [0,200] = " + fmt(c1) + " <= 1.3");
    const auto fit = pt_l3_decay(DispersionRelation::nearest_neighbor(TorusGrid(3, 512)), 40.0, 36, 5.0);
    o.require(fit.fitted_exponent >= 9.0 / 7.0, "d=3 l3 decay exponent " + fmt(fit.fitted_exponent) + " >= 9/7");
    const auto g3 = g_integrability_estimate(SignVector::collision(), 3, 32);
    const auto g1 = g_integrability_estimate(SignVector::collision(), 1, 32);
    o.require(g3.verdict, std::string("integrability d=3 ") + (g3.verdict ? "pass" : "fail") + " (expected pass)");
    o.require(!g1.verdict, std::string("integrability d=1 ") + (g1.verdict ? "pass" : "fail") + " (expected fail)");
    o.require(sw.seconds() < 300, "runtime " + fmt(sw.seconds()) + " s < 300");
}

void ac13(Outcome& o) {
    Rng rng(1313);
    double dev = 0.0, comp = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SpinMatrix m = random_hermitian(rng, 1.5);
        Eigen::Matrix2cd e;
        e << m.e[0], m.e[1], m.e[2], m.e[3];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(e);
        Eigen::Vector2d lam = es.eigenvalues().unaryExpr([](double x) { return std::clamp(x, 0.0, 1.0); });
        const Eigen::Matrix2cd clip = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
        const SpinMatrix t = truncate(m);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) dev = std::max(dev, std::abs(t.e[2 * r + c] - clip(r, c)));
        comp = std::max(comp, hs_norm((SpinMatrix::identity() - t) - truncate(SpinMatrix::identity() - m)));
    }
    o.require(dev < 1e-12, "abs formula vs eigen-clipping " + fmt(dev) + " < 1e-12");
    o.require(comp < 1e-13, "1 - Phi[M] vs Phi[1 - M] " + fmt(comp) + " < 1e-13");
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<void(Outcome&)>> all = {
        {1, ac01}, {2, ac02}, {3, ac03}, {4, ac04},   {5, ac05},   {6, ac06},  {7, ac07},
        {8, ac08}, {9, ac09}, {10, ac10}, {11, ac11}, {12, ac12}, {13, ac13},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (const auto& [k, _] : all) which.push_back(k);

    set_warning_sink(nullptr);
    bool ok = true;
    for (int k : which) {
        const auto it = all.find(k);
        if (it == all.end()) {
            std::printf("AC%d unknown criterion\n", k);
            ok = false;
            continue;
        }
        Outcome o;
        try {
            it->second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " threw: " << e.what();
        }
        std::printf("AC%d %s: %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
        ok = ok && o.pass;
    }
    return ok ? 0 : 1;
}
