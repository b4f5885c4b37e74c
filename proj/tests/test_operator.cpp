#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "fraclab/spectral.hpp"

using namespace fraclab;
using namespace testfix;

namespace {

// explicit-DFT derivative: multiply by prod (i xi)^alpha, zero the Nyquist
// column on differentiated axes, invert by direct summation
GridFunction oracle_derivative_1d(const GridFunction& u, int order) {
    const Grid& g = u.grid();
    const int n = g.points_per_axis();
    std::vector<std::complex<double>> hat(n, 0.0);
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double ph = -2.0 * std::numbers::pi * double(j) * double(k) / double(n);
            acc += u[j] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        hat[k] = acc / double(n);
    }
    GridFunction out(g);
    for (int j = 0; j < n; ++j) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < n; ++k) {
            if (order > 0 && k == n / 2) continue;
            std::complex<double> sym = std::pow(std::complex<double>(0.0, g.frequency(k)), order);
            double ph = 2.0 * std::numbers::pi * double(j) * double(k) / double(n);
            acc += sym * hat[k] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out[j] = acc.real();
    }
    return out;
}

double rel_l2_on(const NodeSet& set, const GridFunction& a, const GridFunction& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k : set.nodes()) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

} // namespace

TEST_CASE("pdo application matches the explicit-DFT oracle") {
    Grid g(1, 32, 4.0);
    PDOCoefficients coeffs = coeffs_m1(g, 0.4, 0.25);
    std::mt19937_64 rng(31);
    GridFunction u = random_smooth_field(g, rng, 2.0);

    GridFunction fast = apply_pdo(coeffs, u);
    GridFunction d0 = oracle_derivative_1d(u, 0);
    GridFunction d1 = oracle_derivative_1d(u, 1);
    const GridFunction* a0 = coeffs.find(MultiIndex::of(1, 0));
    const GridFunction* a1 = coeffs.find(MultiIndex::of(1, 1));
    REQUIRE(a0 != nullptr);
    REQUIRE(a1 != nullptr);

    double worst = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double want = (*a0)[i] * d0[i] + (*a1)[i] * d1[i];
        worst = std::max(worst, std::abs(fast[i] - want));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("pdo adjoint satisfies the pairing identity") {
    Grid g(1, 64, 4.0);
    PDOCoefficients coeffs = coeffs_m1(g);
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 8; ++trial) {
        GridFunction u = random_smooth_field(g, rng, 1.5);
        GridFunction v = random_smooth_field(g, rng, 1.5);
        double lhs = pairing(apply_pdo(coeffs, u), v);
        double rhs = pairing(u, apply_pdo_adjoint(coeffs, v));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("adjoint sign injection breaks the pairing identity") {
    Grid g(1, 64, 4.0);
    PDOCoefficients coeffs = coeffs_m1(g);
    coeffs.debug_flip_adjoint_sign(true);
    std::mt19937_64 rng(41);
    GridFunction u = random_smooth_field(g, rng, 1.5);
    GridFunction v = random_smooth_field(g, rng, 1.5);
    double lhs = pairing(apply_pdo(coeffs, u), v);
    double rhs = pairing(u, apply_pdo_adjoint(coeffs, v));
    CHECK(std::abs(lhs - rhs) > 1e-6);
}

TEST_CASE("bilinear forms: splitting, star symmetry, half-order energy") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem p = problem1d(g, d, 1);
    std::mt19937_64 rng(43);

    for (int trial = 0; trial < 5; ++trial) {
        GridFunction v = random_smooth_field(g, rng, 2.0);
        GridFunction w = random_smooth_field(g, rng, 2.0);

        // B(v, w) = <(-Delta)^s v, w> + <P v, w> after moving one half-order across
        double direct = pairing(frac_laplacian(v, p.s), w) + pairing(apply_pdo(p.coeffs, v), w);
        double b = bilinear_b(p, v, w);
        CHECK(std::abs(b - direct) <= 1e-10 * std::max(1.0, std::abs(b)));

        CHECK(bilinear_b_star(p, w, v) == b);   // shared reduction, bitwise
    }
}

TEST_CASE("full operator application includes the spectral shift") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    PDOCoefficients coeffs = coeffs_m0(g);
    ForwardProblem p(g, 0.7, std::move(coeffs), d.omega, 0.35);
    std::mt19937_64 rng(47);
    GridFunction u = random_smooth_field(g, rng, 2.0);

    GridFunction manual = frac_laplacian(u, 0.7) + apply_pdo(p.coeffs, u) + (-0.35) * u;
    GridFunction lu = apply_operator(p, u);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(lu[i] - manual[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("problem construction validates inputs") {
    Grid g(1, 32, 4.0);
    DomainLayout d = layout1d(g);

    CHECK_THROWS_AS(ForwardProblem(g, 1.0, PDOCoefficients(1), d.omega), std::invalid_argument);
    CHECK_THROWS_AS(ForwardProblem(g, -0.5, PDOCoefficients(1), d.omega), std::invalid_argument);

    // 2s > m fails for s = 0.45, m = 1
    PDOCoefficients high(1);
    high.set(MultiIndex::of(1, 1), profile_bump(g, 0.0, 0.5, 0.1));
    CHECK_THROWS_AS(ForwardProblem(g, 0.45, std::move(high), d.omega), std::invalid_argument);

    // coefficient support outside omega
    PDOCoefficients escaped(1);
    escaped.set(MultiIndex::of(1, 0), profile_bump(g, 2.3, 0.5, 0.1));
    CHECK_THROWS_AS(ForwardProblem(g, 0.7, std::move(escaped), d.omega), std::invalid_argument);

    CHECK(PDOCoefficients::regularity_exponent(0, 0.7) == 0.0);
    CHECK(PDOCoefficients::regularity_exponent(1, 0.7) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(PDOCoefficients::regularity_exponent(1, 0.5) == doctest::Approx(0.501).epsilon(1e-12));
}

TEST_CASE("manufactured exterior solve, dense and iterative") {
    Grid g(1, 128, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem p = problem1d(g, d, 1, 0.7);
    std::mt19937_64 rng(53);
    GridFunction truth = random_smooth_field(g, rng, 3.0);

    auto source = restrict_to(apply_operator(p, truth), d.omega);

    SolverOptions dense;
    SolveReport rd = solve_forward(p, truth, source, dense);
    CHECK(rel_l2_on(d.omega, rd.u, truth) <= 1e-8);
    CHECK(rd.residual <= dense.tol_dense);
    CHECK(rd.condition_estimate > 1.0);

    // outside omega the datum is adopted bitwise
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (!d.omega.contains(i)) CHECK(rd.u[i] == truth[i]);

    SolverOptions iter;
    iter.method = SolveMethod::iterative;
    iter.tol_iterative = 1e-11;
    SolveReport ri = solve_forward(p, truth, source, iter);
    CHECK(ri.iterations > 0);
    CHECK(rel_l2_on(d.omega, ri.u, rd.u) <= 1e-8);

    // determinism: identical call, identical bits
    SolveReport rd2 = solve_forward(p, truth, source, dense);
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(rd2.u[i] == rd.u[i]);
}

TEST_CASE("adjoint solve handles the adjoint manufactured problem") {
    Grid g(1, 128, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem p = problem1d(g, d, 1, 0.7);
    std::mt19937_64 rng(59);
    GridFunction truth = random_smooth_field(g, rng, 3.0);

    auto source = restrict_to(apply_operator(p, truth, true), d.omega);
    SolveReport r = solve_adjoint(p, truth, source);
    CHECK(rel_l2_on(d.omega, r.u, truth) <= 1e-8);
}

TEST_CASE("solver reuses one factorization across data") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem p = problem1d(g, d, 0);
    ExteriorSolver solver(p, false, SolverOptions{});

    GridFunction f1 = bump_field(g, BumpSpec{{2.3, 0.0}, 0.4}, &d.w1);
    GridFunction f2 = bump_field(g, BumpSpec{{-2.3, 0.0}, 0.4}, &d.w2);
    SolveReport r1 = solver.solve(f1);
    SolveReport r2 = solver.solve(f2);
    CHECK(r1.u.all_finite());
    CHECK(r2.u.all_finite());
    CHECK(r1.residual <= 1e-10);
    CHECK(r2.residual <= 1e-10);

    // separate one-shot solve agrees bitwise
    SolveReport direct = solve_forward(p, f1);
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(direct.u[i] == r1.u[i]);
}

TEST_CASE("galerkin consistency of the dense solution") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem p = problem1d(g, d, 1);
    GridFunction f = bump_field(g, BumpSpec{{2.3, 0.0}, 0.4}, &d.w1);
    SolveReport r = solve_forward(p, f);

    auto lu = restrict_to(apply_operator(p, r.u), d.omega);
    double worst = 0.0;
    for (double v : lu) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-8);

    // and the bilinear form against interior test fields vanishes likewise
    std::mt19937_64 rng(61);
    GridFunction noise = random_smooth_field(g, rng, 1.0);
    GridFunction phi = extend_by_zero(restrict_to(noise, d.omega), d.omega);
    CHECK(std::abs(bilinear_b(p, r.u, phi)) <= 1e-8 * std::max(1.0, sobolev_norm(phi, p.s)));
}

TEST_CASE("shift at a restricted eigenvalue is flagged and refused") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem free = free1d(g, d, 0.7);
    ExteriorSolver probe(free, false, SolverOptions{});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(probe.restricted_matrix());
    double lambda1 = eig.eigenvalues()(0);
    REQUIRE(lambda1 > 0.0);

    ForwardProblem shifted(g, 0.7, PDOCoefficients(1), d.omega, lambda1);
    InvertibilityReport rep = check_invertibility(shifted);
    CHECK(rep.near_singular);
    CHECK(rep.smallest_singular_value <= 1e-8);

    try {
        ExteriorSolver bad(shifted, false, SolverOptions{});
        FAIL("expected the near-singular factorization to throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("0 must not be an eigenvalue") != std::string::npos);
    }

    // a harmless shift stays well conditioned
    ForwardProblem ok(g, 0.7, PDOCoefficients(1), d.omega, -0.5);
    CHECK_FALSE(check_invertibility(ok).near_singular);
}

TEST_CASE("condition estimate is continuous in the perturbation") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    ForwardProblem free = free1d(g, d);
    PDOCoefficients tiny(1);
    tiny.set(MultiIndex::of(1, 0), profile_bump(g, 0.2, 0.5, 1e-8));
    ForwardProblem perturbed(g, 0.7, std::move(tiny), d.omega);

    ExteriorSolver s0(free, false, SolverOptions{});
    ExteriorSolver s1(perturbed, false, SolverOptions{});
    SolveReport r0 = s0.solve(bump_field(g, BumpSpec{{2.3, 0.0}, 0.4}, &d.w1));
    SolveReport r1 = s1.solve(bump_field(g, BumpSpec{{2.3, 0.0}, 0.4}, &d.w1));
    CHECK(std::abs(r1.condition_estimate - r0.condition_estimate) / r0.condition_estimate <= 0.01);
}

TEST_CASE("coercivity certificates") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);

    ForwardProblem free = free1d(g, d, 0.7);
    CoercivityCertificate cert = coercivity_estimate(free);
    CHECK(std::abs(cert.c0 - 1.0) <= 1e-9);
    CHECK(cert.mu == 0.0);
    CHECK(cert.c0_sobolev > 0.0);

    ForwardProblem p = problem1d(g, d, 1, 0.7);
    CoercivityCertificate cp = coercivity_estimate(p);
    CHECK(cp.c0 > 0.0);
    CHECK(cp.c0_sobolev > 0.0);

    // certificate inequality on random interior fields, against both norms
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> vals(d.omega.size());
        for (double& x : vals) x = unit(rng);
        GridFunction v = extend_by_zero(vals, d.omega);
        double b = bilinear_b(p, v, v);
        double half = sobolev_norm(frac_laplacian(v, p.s / 2.0), 0.0);
        double l2 = l2_norm(v);
        double hs = sobolev_norm(v, p.s);
        CHECK(b - (cp.c0 * half * half - cp.mu * l2 * l2) >= -1e-10 * std::max(1.0, std::abs(b)));
        CHECK(b - (cp.c0_sobolev * hs * hs - cp.mu_sobolev * l2 * l2) >=
              -1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("zeroth order drag raises the certificate shift monotonically") {
    Grid g(1, 64, 4.0);
    DomainLayout d = layout1d(g);
    double prev = -1.0;
    for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        PDOCoefficients c(1);
        if (eps > 0.0) c.set(MultiIndex::of(1, 0), profile_bump(g, 0.2, 0.5, -eps));
        ForwardProblem p(g, 0.7, std::move(c), d.omega);
        CoercivityCertificate cert = coercivity_estimate(p);
        CHECK(cert.mu >= prev - 1e-12);
        prev = cert.mu;
    }
}
