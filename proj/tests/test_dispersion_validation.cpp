#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <numbers>
#include <random>

#include "hbk/dispersion_validation.hpp"

using namespace hbk;

namespace {

// Power series of J0 in 50-digit arithmetic; the cancellation at r = 50 costs
// about 20 digits.
double j0_series(double r) {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big x = big(r) / 2;
    const big x2 = x * x;
    big term = 1, sum = 1;
    for (int m = 1; m < 400; ++m) {
        term *= -x2 / (big(m) * big(m));
        sum += term;
        if (abs(term) < big("1e-40")) break;
    }
    return static_cast<double>(sum);
}

// F(s) straight from the k-space definition: periodic trapezoid over (k, k')
// in T^3 x T^3 with the phase matrix P.
cplx f_direct(const std::array<double, 4>& s, const SignVector& sg, int m) {
    std::vector<double> c(m);
    const double tp = 2 * std::numbers::pi;
    cplx total = 0.0;
    for (int a1 = 0; a1 < m; ++a1)
        for (int a2 = 0; a2 < m; ++a2)
            for (int a3 = 0; a3 < m; ++a3)
                for (int b1 = 0; b1 < m; ++b1)
                    for (int b2 = 0; b2 < m; ++b2)
                        for (int b3 = 0; b3 < m; ++b3) {
                            const double k1 = tp * a1 / m, k2 = tp * a2 / m, k3 = tp * a3 / m;
                            const double q1 = tp * b1 / m, q2 = tp * b2 / m, q3 = tp * b3 / m;
                            const double p[4][4] = {{k1, k2, k3, k1 + k2 - k3},
                                                    {k1, q2, k3, k1 + q2 - k3},
                                                    {q1, k2, q3, q1 + k2 - q3},
                                                    {q1, q2, q3, q1 + q2 - q3}};
                            double g = 0.0;
                            for (int i = 0; i < 4; ++i)
                                for (int j = 0; j < 4; ++j) g += s[i] * sg[j] * std::cos(p[i][j]);
                            total += std::polar(1.0, -g);
                        }
    return total / std::pow(static_cast<double>(m), 6);
}

}  // namespace

TEST(BesselF, MatchesSeriesAndBoost) {
    EXPECT_NEAR(bessel_f(0.0).real(), 1.0, 1e-15);
    double worst = 0.0;
    for (double r = 0.0; r <= 50.0; r += 0.37) {
        const cplx f = bessel_f(r);
        EXPECT_EQ(f.imag(), 0.0);
        worst = std::max(worst, std::abs(f.real() - j0_series(r)));
        EXPECT_NEAR(bessel_f_derivative(r), -boost::math::cyl_bessel_j(1, r), 1e-10);
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(BesselF, DecayEnvelope) {
    double c1 = 0.0;
    for (double r = 0.0; r <= 200.0; r += 0.05) c1 = std::max(c1, std::abs(bessel_f(r)) * std::sqrt(1 + r));
    EXPECT_LE(c1, 1.3);
}

TEST(BesselTable, InterpolatesToHighAccuracy) {
    const BesselTable& t = BesselTable::instance();
    double worst = 0.0;
    for (double r = 0.0; r < 160.0; r += 0.0913) worst = std::max(worst, std::abs(t(r) - boost::math::cyl_bessel_j(0, r)));
    EXPECT_LT(worst, 1e-9);
    EXPECT_NEAR(t(170.0), boost::math::cyl_bessel_j(0, 170.0), 1e-10);
    EXPECT_EQ(t(-3.0), t(3.0));
}

TEST(DecayFit, RecoversPowerLaw) {
    std::vector<double> t, v;
    for (int i = 1; i <= 20; ++i) {
        t.push_back(i);
        v.push_back(3.0 * std::pow(i, -1.5));
    }
    const auto fit = fit_decay(t, v);
    EXPECT_NEAR(fit.fitted_exponent, 1.5, 1e-12);
    EXPECT_NEAR(fit.fitted_constant, 3.0, 1e-12);
    EXPECT_THROW(fit_decay({1.0}, {1.0}), Error);
}

TEST(PtL3Decay, ZeroTimeAndWindowGuard) {
    const auto om = DispersionRelation::nearest_neighbor(TorusGrid(1, 64));
    double s = 0.0;
    for (const auto& q : free_propagator_field(0.0, om)) s += std::pow(std::abs(q), 3);
    EXPECT_NEAR(s, 1.0, 1e-14);
    try {
        pt_l3_decay(om, 20.0, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::window_too_long);
    }
}

TEST(PtL3Decay, ExponentsMatchBesselSums) {
    const auto om1 = DispersionRelation::nearest_neighbor(TorusGrid(1, 512));
    const auto fit1 = pt_l3_decay(om1, 40.0, 36, 5.0);
    // Bessel-sum oracle: sum_x |J_x(t)|^3.
    std::vector<double> t, v;
    for (int i = 0; i < 36; ++i) {
        const double ti = 5.0 + 35.0 * i / 35;
        double acc = 0.0;
        for (int x = -256; x < 256; ++x) acc += std::pow(std::abs(boost::math::cyl_bessel_j(x, ti)), 3);
        t.push_back(ti);
        v.push_back(acc);
    }
    const auto ref = fit_decay(t, v);
    EXPECT_NEAR(fit1.fitted_exponent, ref.fitted_exponent, 1e-8);
    EXPECT_NEAR(fit1.fitted_exponent, 0.5, 0.1);
    const auto om3 = DispersionRelation::nearest_neighbor(TorusGrid(3, 512));
    const auto fit3 = pt_l3_decay(om3, 40.0, 36, 5.0);
    EXPECT_NEAR(fit3.fitted_exponent, 3 * fit1.fitted_exponent, 1e-9);
    EXPECT_GE(fit3.fitted_exponent, 9.0 / 7.0);
}

TEST(PtL3Decay, StableUnderRefinement) {
    const auto a = pt_l3_decay(DispersionRelation::nearest_neighbor(TorusGrid(1, 256)), 40.0, 36, 5.0);
    const auto b = pt_l3_decay(DispersionRelation::nearest_neighbor(TorusGrid(1, 512)), 40.0, 72, 5.0);
    EXPECT_NEAR(a.fitted_exponent / b.fitted_exponent, 1.0, 0.05);
}

TEST(AmplitudeR, Examples) {
    const SignVector ones(1, 1, 1, 1);
    for (int i = 1; i <= 3; ++i) EXPECT_EQ(amplitude_R({0, 0, 0, 0}, {0.3, -1.0, 2.0}, ones, i), 0.0);
    const std::array<double, 4> s{0.3, -0.7, 1.1, 0.4};
    EXPECT_NEAR(amplitude_R(s, {0, 0, 0}, ones, 1), 2 * std::abs(s[0] + s[1]), 1e-15);
    Rng rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int n = 0; n < 100; ++n)
        for (int i = 1; i <= 3; ++i)
            EXPECT_GE(amplitude_R({u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, ones, i), 0.0);
    EXPECT_THROW(amplitude_R(s, {0, 0, 0}, ones, 4), Error);
}

TEST(FEstimate, TrivialCasesAndBounds) {
    const SignVector sg = SignVector::collision();
    EXPECT_NEAR(F_estimate({0, 0, 0, 0}, sg, 16).real(), 1.0, 1e-12);
    Rng rng(2);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int n = 0; n < 10; ++n) EXPECT_LE(std::abs(F_estimate({u(rng), u(rng), u(rng), u(rng)}, sg, 32)), 1.0);
    try {
        F_estimate({1, 0, 0, 0}, sg, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::resolution_too_coarse);
    }
}

TEST(FEstimate, SingleAxisClosedForm) {
    // s = (s, 0, 0, 0): F = sum_n J_n(s)^4.
    for (double s : {0.5, 1.7, 3.2, 6.0}) {
        double ref = 0.0;
        for (int n = -60; n <= 60; ++n) ref += std::pow(boost::math::cyl_bessel_j(n, s), 4);
        EXPECT_NEAR(F_estimate({s, 0, 0, 0}, SignVector::collision(), 64).real(), ref, 1e-8);
    }
}

TEST(FEstimate, MatchesSixDimensionalDefinition) {
    Rng rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (const SignVector& sg : {SignVector::collision(), SignVector(1, -1, 1, -1)}) {
        const std::array<double, 4> s{u(rng), u(rng), u(rng), u(rng)};
        EXPECT_LT(std::abs(F_estimate(s, sg, 32) - f_direct(s, sg, 16)), 1e-3);
    }
}

TEST(FEstimate, ConvergesUnderResolutionDoubling) {
    const std::array<double, 4> s{1.2, -0.8, 0.5, 2.0};
    const SignVector sg = SignVector::collision();
    const double a = F_estimate(s, sg, 16).real(), b = F_estimate(s, sg, 32).real(),
                 c = F_estimate(s, sg, 64).real();
    EXPECT_LE(std::abs(c - b), 0.5 * std::abs(b - a) + 1e-14);
}

TEST(FEstimate, ExactSymmetries) {
    const SignVector sg = SignVector::collision();
    const std::array<double, 4> s{1.5, -0.5, 2.0, 0.5};
    const double f = std::abs(F_estimate(s, sg, 32));
    EXPECT_NEAR(std::abs(F_estimate({-1.5, 0.5, -2.0, -0.5}, sg, 32)), f, 1e-12);
    EXPECT_NEAR(std::abs(F_estimate({2.0, 0.5, 1.5, -0.5}, sg, 32)), f, 1e-12);
    EXPECT_NEAR(std::abs(F_estimate({-0.5, 1.5, 0.5, 2.0}, sg, 32)), f, 1e-12);
    EXPECT_NEAR(std::abs(F_estimate({0.5, 2.0, -0.5, 1.5}, sg, 32)), f, 1e-12);
}

TEST(GIntegrability, Validation) {
    try {
        g_integrability_estimate(SignVector::collision(), 3, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::resolution_too_coarse);
    }
    IntegrabilityOptions bad;
    bad.boxes = {2.0, 1.0};
    EXPECT_THROW(g_integrability_estimate(SignVector::collision(), 3, 16, bad), Error);
}

TEST(GIntegrability, SmallBoxesReportPartialSums) {
    IntegrabilityOptions opt;
    opt.boxes = {1.0, 2.0};
    const auto rep = g_integrability_estimate(SignVector::collision(), 3, 16, opt);
    ASSERT_EQ(rep.series.size(), 2u);
    EXPECT_EQ(rep.metadata["partial_integrals"].size(), 2u);
    EXPECT_GT(rep.metadata["partial_integrals"][1].get<double>(), rep.metadata["partial_integrals"][0].get<double>());
}
