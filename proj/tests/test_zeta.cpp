#include <doctest.h>

#include <cmath>

#include "fracspec/zeta.hpp"

using namespace fracspec;

namespace {

// Chebyshev closed forms: Phi(-mu) = 2 cos sqrt(mu) - 2.
const double pi = M_PI;

double direct_sum(const EigenvalueList& l, double s) {
    double acc = 0;
    for (auto it = l.records.rbegin(); it != l.records.rend(); ++it) acc += it->multiplicity * std::pow(it->mu, -s);
    return acc;
}

}  // namespace

TEST_CASE("log Psi") {
    auto p = sg_map();
    CHECK(log_psi_zero(p, -3) == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
    auto phi = RealPoincare::solve(p);
    for (double w : {-2.0, -3.0, -5.0}) {
        double y = phi(1.0);
        double direct = std::log((p(y) - w) / ((y - w) * (y - w)));
        CHECK(std::abs(log_psi(phi, w, 1.0) - direct) < 1e-10);
        CHECK(log_psi(phi, w, 0.0) == doctest::Approx(log_psi_zero(p, w)).epsilon(1e-15));
        CHECK(std::abs(log_psi_delta(phi, w, 1.0) - (direct - log_psi_zero(p, w))) < 1e-10);
        // Small x: the delta form keeps relative accuracy.
        CHECK(std::abs(log_psi_delta(phi, w, 1e-12)) < 1e-10);
        CHECK(log_psi_delta(phi, w, 1e-12) != 0.0);
    }
    CHECK_THROWS_AS(log_psi(phi, -2, -1), DomainError);
    CHECK_THROWS_AS(log_psi(phi, 1, 1), DomainError);
}

TEST_CASE("zero order") {
    CHECK(zero_order(sg_map(), -2) == 1);
    // -4 is the critical value of x(x+4).
    CHECK(zero_order(chebyshev_map(), -4) == 2);
    CHECK(zero_order(chebyshev_map(), -2) == 1);
}

TEST_CASE("chebyshev closed forms") {
    auto ch = RealPoincare::solve(chebyshev_map());
    auto g = fit_growth_constants(ch);
    // sqrt(mu) = (2k+1) pi: zeta(-1/2) = pi (1 - 2) zeta_R(-1) = pi/12
    auto a = partial_zeta_continuation(ch, -4, cplx(-0.5), g);
    CHECK(std::abs(a.value.real() - pi / 12) < 1e-12);
    CHECK(a.error < 1e-10);
    // sqrt(mu) = (k + 1/2) pi: pi (1/2 - 1) zeta_R(-1) = pi/24
    CHECK(std::abs(partial_zeta_continuation(ch, -2, cplx(-0.5), g).value.real() - pi / 24) < 1e-12);
    // sqrt(mu) in 2 pi (k + 1/3), 2 pi (k + 2/3): Hurwitz values give pi/9
    CHECK(std::abs(partial_zeta_continuation(ch, -3, cplx(-0.5), g).value.real() - pi / 9) < 1e-12);
    // Complex argument, w = -2: (pi/2)^{-2s} (1 - 2^{-2s}) zeta_R(2s) at s = -1/4 + 0i, via the real slice.
    // zeta_R(-1/2) = -0.2078862249773545660
    double s = -0.25;
    double expect = std::pow(pi / 2, -2 * s) * (1 - std::pow(2, -2 * s)) * -0.2078862249773545660;
    CHECK(std::abs(partial_zeta_continuation(ch, -2, cplx(s), g).value.real() - expect) < 1e-12);
}

TEST_CASE("chebyshev series") {
    auto ch = RealPoincare::solve(chebyshev_map());
    auto l = enumerate_partial(ch, -4, 1e8);
    std::vector<double> mus;
    for (auto& r : l.records) mus.push_back(r.mu);
    // pi^{-2s} (1 - 2^{-2s}) zeta_R(2s): 1/8 at s = 1, 1/96 at s = 2
    auto one = partial_zeta_series(mus, ch.rho(), cplx(1));
    CHECK(std::abs(one.value.real() - 0.125) < 1e-10);
    CHECK(std::abs(one.value.real() - 0.125) <= one.error + 1e-12);
    CHECK(std::abs(partial_zeta_series(mus, ch.rho(), cplx(2)).value.real() - 1.0 / 96) < 1e-14);
    CHECK_THROWS_AS(partial_zeta_series(mus, ch.rho(), cplx(0.4)), DomainError);
    CHECK_THROWS_AS(partial_zeta_series({1, 2, 3}, ch.rho(), cplx(2)), DomainError);
}

TEST_CASE("trivial zeros") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    for (double w : sys.A)
        for (double s : {-1.0, -2.0, -3.0})
            CHECK(std::abs(partial_zeta_continuation(sys.phi, w, cplx(s), sys.growth).value) == 0.0);
    CHECK(partial_zeta_continuation(sys.phi, -2, cplx(0), sys.growth).value == cplx(0));
}

TEST_CASE("residue of the Mellin transform at 0") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    for (double w : sys.A) {
        double e = 1e-3;
        double r = 0.5 * ((e * mellin_log_phi_w(sys.phi, w, cplx(e), sys.growth)).real() +
                          (-e * mellin_log_phi_w(sys.phi, w, cplx(-e), sys.growth)).real());
        CHECK(std::abs(r - std::log(-w)) < 1e-5);
    }
}

TEST_CASE("continuation agrees with the series on (rho, 1)") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    for (double w : sys.A) {
        auto l = enumerate_partial(sys.phi, w, 1e7);
        std::vector<double> mus;
        for (auto& r : l.records) mus.push_back(r.mu);
        for (double s : {0.7, 0.9}) {
            auto ser = partial_zeta_series(mus, sys.rho(), cplx(s));
            auto con = partial_zeta_continuation(sys.phi, w, cplx(s), sys.growth);
            CHECK(std::abs(ser.value - con.value) <= 3 * ser.error + con.error + 1e-9);
            CHECK(ser.error < 1e-3 * std::abs(ser.value));
        }
    }
}

TEST_CASE("continuation domain") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    double pole = std::log(2.0) / std::log(5.0);
    CHECK_THROWS_AS(partial_zeta_continuation(sys.phi, -2, cplx(pole), sys.growth), PoleError);
    CHECK_THROWS_AS(partial_zeta_continuation(sys.phi, -2, cplx(1.0), sys.growth), DomainError);
    CHECK_THROWS_AS(partial_zeta_continuation(sys.phi, -2, cplx(1.5, 2), sys.growth), DomainError);
    CHECK_THROWS_AS(mellin_psi(sys.phi, -2, cplx(0), sys.growth), PoleError);
}

TEST_CASE("panel tolerance") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    ZetaOptions a, b;
    b.panel_tol = a.panel_tol / 2;
    for (cplx s : {cplx(-0.5), cplx(-1.3, 0.7), cplx(0.2, 3)}) {
        auto va = partial_zeta_continuation(sys.phi, -5, s, sys.growth, a);
        auto vb = partial_zeta_continuation(sys.phi, -5, s, sys.growth, b);
        CHECK(std::abs(va.value - vb.value) <= va.error + vb.error);
    }
}

TEST_CASE("assembly") {
    auto sys = sg_spectral_system(Boundary::dirichlet);
    // s = 2 uses the series branch; compare with a plain sum over the full spectrum.
    auto z2 = assemble_zeta(sys, cplx(2));
    CHECK(z2.branch == "series");
    auto l = enumerate_spectrum(sys, 1e6);
    CHECK(std::abs(z2.value.real() - direct_sum(l, 2)) < 1e-6);
    auto z1 = assemble_zeta(sys, cplx(1));
    CHECK(std::abs(z1.value.real() - direct_sum(l, 1)) < 0.05 * z1.value.real());
    CHECK(z1.value.real() > direct_sum(l, 1));

    auto h = assemble_zeta(sys, cplx(-0.5));
    CHECK(h.branch == "continuation");
    CHECK(std::isfinite(h.value.real()));
    CHECK(h.error < 1e-9);
    CHECK(h.components.size() == 3);

    auto poles = pole_catalogue(sys);
    bool found = false, dimension = false;
    for (auto& p : poles) {
        found = found || std::abs(p.s - cplx(std::log(3.0) / std::log(5.0))) < 1e-12;
        dimension = dimension || std::abs(p.s - cplx(std::log(2.0) / std::log(5.0))) < 1e-12;
    }
    CHECK(found);
    CHECK(dimension);
    auto near = assemble_zeta(sys, cplx(std::log(3.0) / std::log(5.0) + 1e-8));
    CHECK_FALSE(near.warnings.empty());
}

TEST_CASE("casimir energy") {
    auto D = sg_spectral_system(Boundary::dirichlet);
    auto N = sg_spectral_system(Boundary::neumann);
    auto cd = casimir_energy(D);
    CHECK(cd.energy == doctest::Approx(-0.175159759336).epsilon(1e-10));
    CHECK(2 * cd.energy == cd.zeta);
    CHECK(cd.error < 1e-10);
    // Same value through the assembly.
    CHECK(std::abs(assemble_zeta(D, cplx(-0.5)).value.real() - cd.zeta) < 1e-10);
    auto cn = casimir_energy(N);
    CHECK(cn.energy == doctest::Approx(-0.32448899242).epsilon(1e-10));
    CHECK(std::abs(assemble_zeta(N, cplx(-0.5)).value.real() - cn.zeta) < 1e-10);

    auto pd = casimir_energy(D, 1e-10, Recipe::published);
    CHECK(std::abs(pd.energy - 0.5474693544) < 5e-6);
    auto pn = casimir_energy(N, 1e-10, Recipe::published);
    CHECK(std::abs(pn.energy - 2.134394089264) < 5e-6);
    auto custom = D;
    custom.name = "custom";
    CHECK_THROWS_AS(casimir_energy(custom, 1e-10, Recipe::published), ConfigError);
}

TEST_CASE("thermal energy") {
    auto D = sg_spectral_system(Boundary::dirichlet);
    double c = casimir_energy(D).energy;
    double prev = INFINITY;
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        auto t = thermal_energy(D, beta, 1e4, c);
        CHECK(t.energy < prev);
        CHECK(t.energy > c);
        prev = t.energy;
    }
    auto cold = thermal_energy(D, 50.0, 1e4, c);
    CHECK(std::abs(cold.energy - c) < 1e-20 + 1e-10);
    CHECK(thermal_energy(D, 1.0, 1e4, c).tail_bound < 1e-8);
    CHECK_THROWS_AS(thermal_energy(D, 0.0, 1e4, c), DomainError);
    CHECK_THROWS_AS(thermal_energy(D, -1.0, 1e4, c), DomainError);
}

TEST_CASE("heat trace") {
    auto D = sg_spectral_system(Boundary::dirichlet);
    auto l = enumerate_spectrum(D, 1e5);
    double dS = D.spectral_dim();
    auto big = heat_trace(l, 1.0, dS);
    CHECK(big.K < std::exp(-l.records.front().mu) * 10);
    CHECK(big.K > 0);
    CHECK_THROWS_AS(heat_trace(l, 1e-5, dS), AccuracyError);
    CHECK_THROWS_AS(heat_trace(l, 0.0, dS), DomainError);
    // Zero modes add a constant.
    CHECK(heat_trace(l, 1.0, dS, 1).K == doctest::Approx(big.K + 1));

    auto curve = heat_trace_curve(D, 1e-3, 1e-2, 60, 1e5);
    for (double g : curve.scaled) {
        CHECK(g > 0.1);
        CHECK(g < 1.0);
    }
    CHECK(curve.max_tail < 1e-10);
    CHECK_THROWS_AS(heat_trace_curve(D, 1e-2, 1e-3, 10, 1e5), DomainError);
}

TEST_CASE("growth constants") {
    auto D = sg_spectral_system(Boundary::dirichlet);
    auto chk = verify_growth_constants(D.phi, D.growth, 50);
    CHECK(chk.ok);
    CHECK(chk.min_lower > 0);
    CHECK(chk.min_upper > 0);
    auto fit = fit_growth_constants(D.phi, 10);
    CHECK(verify_growth_constants(D.phi, fit, 50).ok);
    GrowthConstants bad{1.2, 1.3, 10};
    CHECK_FALSE(verify_growth_constants(D.phi, bad, 50).ok);
}
