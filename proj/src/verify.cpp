#include "fraclab/verify.hpp"

#include <cmath>
#include <random>
#include <set>

#include "fraclab/analysis.hpp"

namespace fraclab {

namespace {

struct Session {
    const ExperimentConfig& cfg;
    Grid grid;
    DomainLayout layout;
    std::mt19937_64 rng;
    std::vector<VerifyCheck>& out;

    Session(const ExperimentConfig& c, std::vector<VerifyCheck>& checks)
        : cfg(c), grid(build_grid(c)), layout(build_layout(c, grid)), rng(c.seed), out(checks) {}

    void add(const std::string& suite, const std::string& name, double value, double tolerance) {
        out.push_back({suite, name, value, tolerance, value <= tolerance});
    }

    GridFunction random_interior_field() {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> v(layout.omega.size());
        for (double& x : v) x = gauss(rng);
        return extend_by_zero(v, layout.omega);
    }
};

void suite_symbols(Session& s) {
    std::mt19937_64& rng = s.rng;
    GridFunction u = random_smooth_field(s.grid, rng, 3.0);

    GridFunction twice = bessel_potential(bessel_potential(u, 0.8), -1.3);
    GridFunction direct = bessel_potential(u, -0.5);
    double dev = l2_norm(twice - direct) / std::max(1e-300, l2_norm(direct));
    s.add("symbols", "bessel_composition", dev, 1e-10);

    GridFunction half = frac_laplacian(frac_laplacian(u, 0.5 * s.cfg.s), 0.5 * s.cfg.s);
    GridFunction full = frac_laplacian(u, s.cfg.s);
    dev = l2_norm(half - full) / std::max(1e-300, l2_norm(full));
    s.add("symbols", "fractional_composition", dev, 1e-10);

    // plane wave is an eigenfunction: symbol value on the lattice
    const double pi = 3.14159265358979323846;
    GridFunction wave(s.grid);
    int mode = 3;
    double xi = pi * mode / s.grid.half_length();
    for (std::size_t i = 0; i < wave.size(); ++i)
        wave[i] = std::cos(xi * s.grid.node_coords(i)[0]);
    GridFunction lw = frac_laplacian(wave, s.cfg.s);
    double lam = std::pow(xi * xi, s.cfg.s);
    double worst = 0.0;
    for (std::size_t i = 0; i < wave.size(); ++i) worst = std::max(worst, std::abs(lw[i] - lam * wave[i]));
    s.add("symbols", "plane_wave_eigenvalue", worst / lam, 1e-10);

    GridFunction v = random_smooth_field(s.grid, rng, 3.0);
    double phys = pairing(u, v);
    auto us = forward_transform(u);
    auto vs = forward_transform(v);
    double spec = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k)
        spec += (us[k] * std::conj(vs[k])).real();
    spec *= std::pow(2.0 * s.grid.half_length(), s.grid.dim());
    s.add("symbols", "parseval_pairing", std::abs(phys - spec) / std::max(1.0, std::abs(phys)), 1e-12);
}

void suite_adjoint(Session& s) {
    ForwardProblem problem = build_problem(s.cfg, s.grid, s.layout.omega);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
        GridFunction u = random_smooth_field(s.grid, s.rng, 2.0);
        GridFunction v = random_smooth_field(s.grid, s.rng, 2.0);
        double lhs = pairing(apply_pdo(problem.coeffs, u), v);
        double rhs = pairing(u, apply_pdo_adjoint(problem.coeffs, v));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    s.add("adjoint", "pdo_adjoint_pairing", worst, 1e-10);

    double bit = 0.0;
    for (int i = 0; i < 4; ++i) {
        GridFunction v = random_smooth_field(s.grid, s.rng, 2.0);
        GridFunction w = random_smooth_field(s.grid, s.rng, 2.0);
        bit = std::max(bit, std::abs(bilinear_b(problem, v, w) - bilinear_b_star(problem, w, v)));
    }
    s.add("adjoint", "bilinear_star_bitwise", bit, 0.0);
}

void suite_coercivity(Session& s) {
    ForwardProblem reference = build_reference_problem(s.cfg, s.grid, s.layout.omega);
    CoercivityCertificate free_cert = coercivity_estimate(reference);
    s.add("coercivity", "free_operator_c0_near_one", std::abs(free_cert.c0 - 1.0), 1e-9);
    s.add("coercivity", "free_operator_mu_zero", free_cert.mu, 0.0);

    ForwardProblem problem = build_problem(s.cfg, s.grid, s.layout.omega);
    CoercivityCertificate cert = coercivity_estimate(problem);
    double worst = 0.0;
    for (int i = 0; i < s.cfg.verify_samples; ++i) {
        GridFunction v = s.random_interior_field();
        double b = bilinear_b(problem, v, v);
        double energy = l2_norm(frac_laplacian(v, 0.5 * problem.s));
        double l2 = l2_norm(v);
        double slack = b - (cert.c0 * energy * energy - cert.mu * l2 * l2);
        worst = std::min(worst, slack / std::max(1.0, energy * energy));
        double sob = sobolev_norm(v, problem.s);
        double slack_full = b - (cert.c0_sobolev * sob * sob - cert.mu_sobolev * l2 * l2);
        worst = std::min(worst, slack_full / std::max(1.0, sob * sob));
    }
    s.add("coercivity", "certificate_slack", -worst, 1e-10);
}

void suite_duality(Session& s) {
    ForwardProblem problem = build_problem(s.cfg, s.grid, s.layout.omega);
    ExteriorDictionary d1 = ExteriorDictionary::build(s.layout.w1, s.cfg.dictionary);
    ExteriorDictionary d2 = ExteriorDictionary::build(s.layout.w2, s.cfg.dictionary);
    s.add("duality", "dn_duality_deviation", check_duality(problem, d1, d2, s.cfg.solver), 1e-8);
}

void suite_alessandrini(Session& s) {
    ExteriorDictionary d1 = ExteriorDictionary::build(s.layout.w1, s.cfg.dictionary);
    ExteriorDictionary d2 = ExteriorDictionary::build(s.layout.w2, s.cfg.dictionary);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    int cases = std::max(1, std::min(s.cfg.alessandrini_cases, 10));
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        ExperimentConfig alt = s.cfg;
        for (auto& coeff : alt.coefficients) coeff.profile.amplitude *= amp(s.rng);
        ForwardProblem p1 = build_problem(s.cfg, s.grid, s.layout.omega);
        ForwardProblem p2 = build_problem(alt, s.grid, s.layout.omega);
        GridFunction f1 = d1.elements()[static_cast<std::size_t>(s.rng() % d1.size())];
        GridFunction f2 = d2.elements()[static_cast<std::size_t>(s.rng() % d2.size())];
        auto res = alessandrini_identity(p1, p2, f1, f2, s.cfg.solver);
        worst = std::max(worst, std::abs(res.lhs - res.rhs) / res.scale);
    }
    s.add("alessandrini", "identity_residual", worst, s.cfg.alessandrini_tolerance);

    ForwardProblem p = build_problem(s.cfg, s.grid, s.layout.omega);
    ForwardProblem q = build_problem(s.cfg, s.grid, s.layout.omega);
    auto res = alessandrini_identity(p, q, d1.elements()[0], d2.elements()[0], s.cfg.solver);
    s.add("alessandrini", "identical_problems_zero", std::max(std::abs(res.lhs), std::abs(res.rhs)), 1e-9);
}

void suite_multiplier(Session& s) {
    // multiplier checks run on a coarse subgrid to keep the SVDs quick
    Grid g(s.grid.dim(), std::min(s.grid.points_per_axis(), s.grid.dim() == 1 ? 64 : 24),
           s.grid.half_length());
    std::mt19937_64& rng = s.rng;
    GridFunction f = random_smooth_field(g, rng, 3.0);
    s.add("multiplier", "symmetry_deviation", multiplier_symmetry_deviation(f, 0.4, -0.3), 1e-9);

    double worst = 0.0;
    std::uniform_real_distribution<double> unif(0.0, 0.5);
    for (int i = 0; i < 5; ++i) {
        GridFunction f2 = random_smooth_field(g, rng, 3.0);
        double slack = multiplier_monotonicity_slack(f2, 0.3, -0.4, unif(rng), unif(rng));
        worst = std::max(worst, -slack);
    }
    s.add("multiplier", "monotonicity_slack", worst, 1e-10);

    GridFunction c(g);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = -2.5;
    s.add("multiplier", "constant_norm_anchor", std::abs(multiplier_norm(c, 0.0, 0.0) - 2.5), 1e-9);
}

void suite_poincare(Session& s) {
    double c = poincare_constant(s.layout.omega, s.cfg.s);
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
        GridFunction v = s.random_interior_field();
        double lhs = l2_norm(v);
        double rhs = c * l2_norm(frac_laplacian(v, 0.5 * s.cfg.s));
        worst = std::max(worst, (lhs - rhs) / std::max(1e-300, rhs));
    }
    s.add("poincare", "inequality_on_samples", worst, 1e-10);

    // domain monotonicity under shrinking
    RegionSpec smaller = s.cfg.omega;
    if (smaller.shape == "ball") smaller.radius *= 0.6;
    else for (auto& w : smaller.half_widths) w *= 0.6;
    NodeSet inner = build_region(s.grid, smaller, "omega_inner");
    double c_inner = poincare_constant(inner, s.cfg.s);
    s.add("poincare", "domain_monotonicity", c_inner - c, 0.0);
}

void suite_kato_ponce(Session& s) {
    GridFunction c(s.grid);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.7;
    GridFunction g = random_smooth_field(s.grid, s.rng, 2.5);
    s.add("kato_ponce", "constant_factor_ratio", kato_ponce_ratio(c, g, s.cfg.s), 1.0);

    double worst = 0.0;
    int n = std::max(10, s.cfg.verify_samples);
    for (int i = 0; i < n; ++i) {
        GridFunction f = random_smooth_field(s.grid, s.rng, 2.0);
        GridFunction h = random_smooth_field(s.grid, s.rng, 2.0);
        worst = std::max(worst, kato_ponce_ratio(f, h, s.cfg.s));
    }
    s.add("kato_ponce", "random_suite_max_ratio", worst, 10.0);
}

void suite_ucp(Session& s) {
    // whole-box joint restriction has unit smallest singular value
    Grid g(s.grid.dim(), std::min(s.grid.points_per_axis(), s.grid.dim() == 1 ? 128 : 24),
           s.grid.half_length());
    std::vector<std::uint8_t> all(g.node_count(), 1);
    NodeSet everything(g, std::move(all), "whole_box");
    double smin = ucp_smallest_singular_value(everything, s.cfg.s);
    s.add("ucp", "whole_box_unit_floor", std::abs(smin - 1.0), 1e-9);
}

} // namespace

bool VerifyReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerifyReport run_verify(const ExperimentConfig& cfg) {
    static const std::set<std::string> known{"symbols",      "adjoint",  "coercivity",
                                             "duality",      "alessandrini", "multiplier",
                                             "poincare",     "kato_ponce",   "ucp"};
    for (const auto& name : cfg.verify_suites)
        if (!known.count(name))
            throw ConfigError("config error at /verify/suites: unknown suite '" + name + "'");

    VerifyReport report;
    Session s(cfg, report.checks);
    for (const auto& name : cfg.verify_suites) {
        if (name == "symbols") suite_symbols(s);
        else if (name == "adjoint") suite_adjoint(s);
        else if (name == "coercivity") suite_coercivity(s);
        else if (name == "duality") suite_duality(s);
        else if (name == "alessandrini") suite_alessandrini(s);
        else if (name == "multiplier") suite_multiplier(s);
        else if (name == "poincare") suite_poincare(s);
        else if (name == "kato_ponce") suite_kato_ponce(s);
        else if (name == "ucp") suite_ucp(s);
    }
    return report;
}

} // namespace fraclab
