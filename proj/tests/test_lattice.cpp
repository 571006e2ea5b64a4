#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cstdio>
#include <fstream>
#include <numbers>

#include "hbk/lattice.hpp"
#include "hbk/log.hpp"

using namespace hbk;
using cplx = std::complex<double>;

TEST(TorusGrid, Validation) {
    EXPECT_THROW(TorusGrid(0, 8), Error);
    EXPECT_THROW(TorusGrid(4, 8), Error);
    EXPECT_THROW(TorusGrid(1, 7), Error);
    EXPECT_THROW(TorusGrid(1, 2), Error);
    try {
        TorusGrid(2, 5);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::bad_grid);
    }
}

TEST(TorusGrid, WeightsAndPoints) {
    const TorusGrid g(2, 8);
    EXPECT_EQ(g.size(), 64u);
    EXPECT_EQ(g.weight() * 64.0, 1.0);
    const auto p = g.point(g.linear({4, 7, 0}));
    EXPECT_EQ(p[0], -0.5);
    EXPECT_EQ(p[1], -0.125);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.linear(g.digits(i)), i);
}

TEST(TorusGrid, ExactMomentumConservation) {
    for (int d = 1; d <= 3; ++d) {
        const TorusGrid g(d, 4);
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < g.size(); ++b)
                for (std::size_t c = 0; c < g.size(); ++c) {
                    const std::size_t k4 = g.k4(a, b, c);
                    const Index ja = g.digits(a), jb = g.digits(b), jc = g.digits(c), j4 = g.digits(k4);
                    for (int ax = 0; ax < d; ++ax) EXPECT_EQ((ja[ax] + jb[ax] - jc[ax] - j4[ax] + 8 * 4) % 4, 0);
                }
        const GridArithmetic ar(g);
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < g.size(); ++b) {
                EXPECT_EQ(ar.add(a, b), g.add(a, b));
                EXPECT_EQ(ar.sub(a, b), g.sub(a, b));
            }
    }
}

TEST(Dispersion, NearestNeighbourExamples) {
    const std::array<double, 3> zero{0, 0, 0}, half{0.5, 0.5, 0.5};
    EXPECT_EQ(dispersion_nn(zero, 3, 0.0), -3.0);
    EXPECT_NEAR(dispersion_nn(half, 3, 0.0), 3.0, 1e-15);
    for (int d = 1; d <= 3; ++d) {
        const TorusGrid g(d, 8);
        const auto om = DispersionRelation::nearest_neighbor(g, 0.3);
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_EQ(om(g.negate(i)), om(i));
            EXPECT_NEAR(om(i), dispersion_nn(g.point(i), d, 0.3), 1e-14);
        }
        EXPECT_NEAR(om.lipschitz(), 2 * std::numbers::pi * d, 1e-15);
    }
}

TEST(Dispersion, TabulatedIsSymmetrizedWithWarning) {
    const TorusGrid g(1, 8);
    std::vector<double> v(8);
    for (int j = 0; j < 8; ++j) v[j] = j;
    int warnings = 0;
    auto old = set_warning_sink([&](const std::string&) { ++warnings; });
    const auto om = DispersionRelation::tabulated(g, v);
    set_warning_sink(old);
    EXPECT_EQ(warnings, 1);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(om(i), om(g.negate(i)));
    EXPECT_EQ(om(1), 4.0);
    EXPECT_THROW(DispersionRelation::tabulated(g, std::vector<double>(7)), Error);
}

TEST(Dispersion, CsvRoundTripAndErrors) {
    const TorusGrid g(2, 4);
    const auto nn = DispersionRelation::nearest_neighbor(g, 0.0);
    const std::string path = testing::TempDir() + "hbk_disp.csv";
    {
        std::ofstream out(path);
        out << "j1,j2,omega\n";
        out.precision(17);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Index j = g.digits(i);
            out << j[0] << "," << j[1] << "," << nn(i) << "\n";
        }
    }
    const auto om = DispersionRelation::from_csv(g, path);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(om(i), nn(i));
    EXPECT_THROW(DispersionRelation::from_csv(TorusGrid(2, 6), path), Error);
    try {
        DispersionRelation::from_csv(g, path + ".missing");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::io);
    }
    std::remove(path.c_str());
}

TEST(Omega, UnderlineAndTilde) {
    const TorusGrid g(1, 4);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.0);
    EXPECT_EQ(omega_tilde(0, 0, 0, SignVector::collision(), om), 0.0);
    EXPECT_EQ(omega_tilde(0, 0, 0, SignVector(1, 1, 1, 1), om), -4.0);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            EXPECT_EQ(omega_underline(a, a, a, a, om), 0.0);
            EXPECT_EQ(omega_underline(a, b, b, a, om), 0.0);
            for (std::size_t c = 0; c < 4; ++c) {
                const std::size_t d = g.k4(a, b, c);
                EXPECT_EQ(omega_tilde(a, b, c, SignVector::collision(), om), omega_underline(a, b, c, d, om));
                EXPECT_EQ(omega_underline(a, b, c, d, om), -omega_underline(c, d, a, b, om));
                EXPECT_EQ(omega_underline(a, b, c, d, om), omega_underline(b, a, d, c, om));
            }
        }
    EXPECT_THROW(SignVector(1, 0, 1, 1), Error);
}

TEST(EpsFloor, NearestNeighbour) {
    const auto om = DispersionRelation::nearest_neighbor(TorusGrid(2, 16));
    EXPECT_NEAR(eps_floor(om), 2.0 * 4.0 * std::numbers::pi / 16.0, 1e-15);
}

TEST(FreePropagator, DeltaAtZeroTime) {
    const TorusGrid g(2, 8);
    const auto om = DispersionRelation::nearest_neighbor(g);
    const auto p = free_propagator_field(0.0, om);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(p[i] - (i == 0 ? 1.0 : 0.0)), 0.0, 1e-15);
}

TEST(FreePropagator, BesselOracle) {
    const TorusGrid g(1, 256);
    const auto om = DispersionRelation::nearest_neighbor(g);
    double worst = 0.0;
    for (double t = -20.0; t <= 20.0; t += 2.5) {
        const auto p = free_propagator_field(t, om);
        for (int x = -32; x <= 32; ++x) {
            const cplx ix = std::pow(cplx(0.0, 1.0), x);
            const cplx ref = ix * boost::math::cyl_bessel_j(x, t);
            worst = std::max(worst, std::abs(p[g.linear({x, 0, 0})] - ref));
            EXPECT_LE(std::abs(p[g.linear({x, 0, 0})]), 1.0 + 1e-14);
        }
    }
    EXPECT_LT(worst, 1e-8);
    EXPECT_LT(std::abs(free_propagator(3.0, {5, 0, 0}, om) - cplx(0.0, 1.0) * boost::math::cyl_bessel_j(5, 3.0)),
              1e-12);
}

TEST(FreePropagator, ReflectionSymmetry) {
    const TorusGrid g(2, 16);
    const auto om = DispersionRelation::nearest_neighbor(g, 0.2);
    const auto p = free_propagator_field(1.7, om);
    const auto m = free_propagator_field(-1.7, om);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_LT(std::abs(m[i] - std::conj(p[g.negate(i)])), 1e-14);
        EXPECT_LT(std::abs(p[i] - p[g.negate(i)]), 1e-14);
    }
}
