#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fracspec/walk.hpp"

using namespace fracspec;

namespace {

// Exact law of T from q(z) = z^2/(4 - 3z): P(T = k) = (1/4)(3/4)^{k-2}, k >= 2.
double exact_atom(int k) { return k < 2 ? 0.0 : 0.25 * std::pow(0.75, k - 2); }

}  // namespace

TEST_CASE("coarse vertices") {
    CHECK(coarse_vertices(build_graph(0)).size() == 3);
    CHECK(coarse_vertices(build_graph(1)).size() == 3);
    CHECK(coarse_vertices(build_graph(2)).size() == 6);
    CHECK(coarse_vertices(build_graph(3)).size() == 15);
}

TEST_CASE("hitting times on G_0 are 1") {
    WalkConfig cfg;
    cfg.level = 0;
    cfg.samples = 1000;
    auto s = simulate_hitting_times(cfg);
    CHECK(s.mean == 1.0);
    CHECK(s.variance == 0.0);
    CHECK(s.histogram[1] == 1000);
}

TEST_CASE("hitting times on G_1 follow 2 + Geom(1/4)") {
    WalkConfig cfg;
    cfg.level = 1;
    cfg.start = build_graph(1).boundary.front();
    cfg.samples = 100000;
    auto s = simulate_hitting_times(cfg);
    CHECK(std::abs(s.mean - 5) <= 3 * s.stderr_mean);
    for (int k = 2; k <= 12; ++k) {
        auto a = s.atom(k);
        double se = std::sqrt(exact_atom(k) * (1 - exact_atom(k)) / double(s.samples));
        CHECK(std::abs(a.p - exact_atom(k)) <= 3 * se);
    }
    CHECK(s.atom(1).p == 0.0);
}

TEST_CASE("hitting times from an interior coarse vertex of G_2") {
    auto g = build_graph(2);
    auto coarse = coarse_vertices(g);
    int start = -1;
    for (int v : coarse)
        if (g.degree(v) == 4) start = v;
    REQUIRE(start >= 0);
    WalkConfig cfg;
    cfg.level = 2;
    cfg.start = start;
    cfg.samples = 40000;
    auto s = simulate_hitting_times(cfg);
    CHECK(std::abs(s.mean - 5) <= 3 * s.stderr_mean);
}

TEST_CASE("walk reproducibility across thread counts") {
    WalkConfig cfg;
    cfg.level = 2;
    cfg.samples = 5000;
    cfg.seed = 1234;
    cfg.threads = 1;
    auto a = simulate_hitting_times(cfg);
    cfg.threads = 4;
    auto b = simulate_hitting_times(cfg);
    CHECK(a.histogram == b.histogram);
    CHECK(a.mean == b.mean);
    cfg.seed = 1235;
    auto c = simulate_hitting_times(cfg);
    CHECK(c.histogram != a.histogram);
}

TEST_CASE("walk errors") {
    WalkConfig cfg;
    cfg.level = 1;
    cfg.samples = 0;
    CHECK_THROWS_AS(simulate_hitting_times(cfg), DomainError);
    cfg.samples = 100;
    cfg.start = 1;  // midpoint, not coarse
    auto g = build_graph(1);
    REQUIRE(!std::binary_search(g.boundary.begin(), g.boundary.end(), 1));
    CHECK_THROWS_AS(simulate_hitting_times(cfg), DomainError);
    cfg.start = g.boundary.front();
    cfg.step_budget = 2;
    try {
        simulate_hitting_times(cfg);
        FAIL("expected budget error");
    } catch (const BudgetError& e) {
        CHECK(e.completed < 100);
        CHECK(e.partial_mean == doctest::Approx(2.0));
    }
}

TEST_CASE("pgf basics") {
    auto q = sg_offspring_pgf();
    CHECK(q(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q.mean() == doctest::Approx(5.0).epsilon(1e-14));
    auto c = q.series(30);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
    for (int k = 2; k <= 30; ++k) CHECK(c[k] == doctest::Approx(exact_atom(k)).epsilon(1e-14));
}

TEST_CASE("branching process") {
    auto q = sg_offspring_pgf();
    auto b = branching_simulate(q, 10, 20000, 99, 2);
    CHECK(b.offspring_mean == doctest::Approx(5.0));
    CHECK(b.mean_Z[0] == 1.0);
    for (int g = 1; g <= 10; ++g) CHECK(std::abs(b.mean_W[g] - 1) <= 3 * b.stderr_W[g]);
    CHECK(std::abs(b.mean_Z[1] - 5) <= 3 * b.stderr_W[1] * 5);
    // P(Z_1 = 2) = 1/4
    int two = 0;
    for (auto& z : b.Z) two += z[1] == 2;
    double p2 = double(two) / 20000.0;
    CHECK(std::abs(p2 - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / 20000.0));
    auto b1 = branching_simulate(q, 6, 500, 7, 1);
    auto b3 = branching_simulate(q, 6, 500, 7, 3);
    CHECK(b1.Z == b3.Z);
    CHECK_THROWS_AS(branching_simulate(Pgf{{0.5, 0.5}, {1}}, 3, 10), DomainError);
}

TEST_CASE("return probabilities") {
    auto r = return_probabilities(4, 400);
    CHECK(r.p[0] == 1.0);
    CHECK(r.p[1] == 0.0);
    // Corner: two neighbours, each returns with probability 1/4 in two steps.
    CHECK(r.p[2] == doctest::Approx(0.25));
    CHECK(r.max_mass_defect < 1e-12);
    auto band = fluctuation_band(r, 64, 320);
    CHECK(band.lo > 0);
    CHECK(band.ratio() < 3);
    CHECK(band.ratio() > 1.0);
    CHECK_THROWS_AS(return_probabilities(7, 10), CapacityError);
    CHECK_THROWS_AS(fluctuation_band(r, 64, 1000), DomainError);
}

TEST_CASE("pgf conjugation") {
    auto rep = pgf_conjugation_check(sg_offspring_pgf());
    CHECK(rep.psi_at_1 == doctest::Approx(1.0));
    CHECK(rep.lambda == doctest::Approx(5.0));
    REQUIRE(rep.polynomial);
    REQUIRE(rep.P.size() == 3);
    CHECK(rep.P[0] == doctest::Approx(0.0));
    CHECK(rep.P[1] == doctest::Approx(-3.0));
    CHECK(rep.P[2] == doctest::Approx(4.0));
    REQUIRE(rep.conjugate.size() == 3);
    CHECK(rep.conjugate[0] == doctest::Approx(0.0));
    CHECK(rep.conjugate[1] == doctest::Approx(5.0));
    CHECK(rep.conjugate[2] == doctest::Approx(1.0));
    // z/(2 - z): 1/psi(1/z) = 2z - 1, polynomial of degree 1.
    auto lin = pgf_conjugation_check(Pgf{{0, 1}, {2, -1}});
    CHECK(lin.polynomial);
    // psi = z^2 inverts to z^2; psi = (z + z^2)/2 inverts to 2z^2/(1 + z).
    auto np = pgf_conjugation_check(Pgf{{0, 0, 1}, {1, 0, 0, 0}});
    CHECK(np.polynomial);
    auto rat = pgf_conjugation_check(Pgf{{0, 1, 1}, {2}});
    CHECK_FALSE(rat.polynomial);
}

TEST_CASE("csv writers") {
    WalkConfig cfg;
    cfg.level = 1;
    cfg.samples = 100;
    std::ostringstream os;
    write_histogram_csv(os, simulate_hitting_times(cfg));
    CHECK(os.str().rfind("t,count,probability\n", 0) == 0);
    std::ostringstream rs;
    write_returns_csv(rs, return_probabilities(2, 5));
    CHECK(rs.str().rfind("n,p,scaled\n", 0) == 0);
}
