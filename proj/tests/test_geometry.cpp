#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "doctest.h"
#include "fixtures.hpp"
#include "fraclab/spectral.hpp"

using namespace fraclab;
using namespace testfix;

TEST_CASE("ball node count tracks the continuum volume") {
    Grid g(2, 128, 4.0);
    NodeSet ball = make_ball_nodeset(g, BallSpec{{0.0, 0.0}, 1.0}, "ball");
    double expected = std::numbers::pi / g.cell_volume();
    CHECK(std::abs(double(ball.size()) - expected) / expected <= 0.10);
}

TEST_CASE("box membership uses the minimum image convention") {
    Grid g(1, 32, 4.0);
    // box straddling the seam at x = -4 == 4
    NodeSet wrap = make_box_nodeset(g, BoxSpec{{3.9, 0.0}, {0.5, 0.0}}, "wrap");
    bool has_left_end = false, has_right_end = false;
    for (std::size_t flat : wrap.nodes()) {
        double x = g.node_coords(flat)[0];
        if (x < -3.0) has_left_end = true;
        if (x > 3.0) has_right_end = true;
        CHECK(std::abs(g.periodic_delta(x, 3.9)) <= 0.5 + 1e-12);
    }
    CHECK(has_left_end);
    CHECK(has_right_end);
}

TEST_CASE("bump fields integrate to one and stay put") {
    Grid g(1, 128, 4.0);
    NodeSet omega = make_ball_nodeset(g, BallSpec{{0.0, 0.0}, 1.0}, "omega");
    GridFunction b = bump_field(g, BumpSpec{{0.3, 0.0}, 0.4}, &omega);

    double mass = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) mass += b[i];
    mass *= g.cell_volume();
    CHECK(std::abs(mass - 1.0) <= 1e-10);

    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] != 0.0) CHECK(omega.contains(i));

    CHECK_THROWS_AS(bump_field(g, BumpSpec{{0.9, 0.0}, 0.4}, &omega), std::invalid_argument);
    // radius below the node spacing around an off-node center: nothing survives
    CHECK_THROWS_AS(bump_field(g, BumpSpec{{0.5 * g.spacing(), 0.0}, 0.25 * g.spacing()}, &omega),
                    std::invalid_argument);
}

TEST_CASE("bump norms are stable under refinement") {
    BumpSpec spec{{0.2, 0.0}, 0.5};
    Grid coarse(1, 128, 4.0), fine(1, 256, 4.0);
    GridFunction bc = bump_field(coarse, spec);
    GridFunction bf = bump_field(fine, spec);
    // higher orders weight the tail of the spectrum, where the coarse grid
    // still misses mass, so the tolerance widens with r
    for (auto [r, tol] : {std::pair{1.0, 0.01}, {2.0, 0.05}, {3.0, 0.30}}) {
        double nc = sobolev_norm(bc, r), nf = sobolev_norm(bf, r);
        CHECK(std::abs(nc - nf) / nf <= tol);
    }
}

TEST_CASE("cutoff monomial is bitwise x^alpha on the plateau") {
    Grid g(1, 128, 4.0);
    NodeSet omega = make_ball_nodeset(g, BallSpec{{0.1, 0.0}, 1.2}, "omega");
    BoxSpec plateau{{0.1, 0.0}, {0.5, 0.0}};
    GridFunction v = monomial_cutoff(g, MultiIndex::of(1, 2), plateau, 0.4, omega);

    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double x = g.node_coords(i)[0];
        if (std::abs(g.periodic_delta(x, 0.1)) <= 0.5)
            CHECK(v[i] == x * x);
        else if (std::abs(g.periodic_delta(x, 0.1)) >= 0.9 + g.spacing())
            CHECK(v[i] == 0.0);
    }

    // collar must stay inside the owner
    NodeSet tight = make_ball_nodeset(g, BallSpec{{0.1, 0.0}, 0.7}, "tight");
    CHECK_THROWS_AS(monomial_cutoff(g, MultiIndex::of(1, 2), plateau, 0.4, tight),
                    std::invalid_argument);
}

TEST_CASE("restriction and extension invert on the set") {
    Grid g(1, 32, 4.0);
    DomainLayout d = layout1d(g);
    std::mt19937_64 rng(5);
    GridFunction u = random_smooth_field(g, rng, 1.0);

    auto vals = restrict_to(u, d.omega);
    REQUIRE(vals.size() == d.omega.size());
    GridFunction back = extend_by_zero(vals, d.omega);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (d.omega.contains(i))
            CHECK(back[i] == u[i]);
        else
            CHECK(back[i] == 0.0);
    }

    auto again = restrict_to(back, d.omega);
    for (std::size_t k = 0; k < vals.size(); ++k) CHECK(again[k] == vals[k]);
}

TEST_CASE("domain layout enforces separation") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    CHECK(d.omega.disjoint_from(d.w1));
    CHECK(d.omega.disjoint_from(d.w2));
    CHECK(d.w1.disjoint_from(d.w2));
    CHECK(d.min_separation >= 2.0 * g.spacing());

    NodeSet omega = make_ball_nodeset(g, BallSpec{{0.0, 0.0}, 1.0}, "omega");
    NodeSet touching = make_box_nodeset(g, BoxSpec{{1.2, 0.0}, {0.3, 0.0}}, "w1");
    NodeSet w2 = make_box_nodeset(g, BoxSpec{{-2.3, 0.0}, {0.9, 0.0}}, "w2");
    CHECK_THROWS_AS(DomainLayout::create(omega, touching, w2), std::invalid_argument);
}

TEST_CASE("support nodes report the nonzero stencil") {
    Grid g(1, 32, 4.0);
    GridFunction u(g);
    u[3] = 1e-3;
    u[10] = -2.0;
    auto sup = support_nodes(u, 1e-2);
    REQUIRE(sup.size() == 1);
    CHECK(sup[0] == 10);
    CHECK(support_nodes(u).size() == 2);
}
