#include <string>

#include "doctest.h"
#include "fraclab/config.hpp"

using namespace fraclab;

namespace {

const char* minimal = R"({
  "grid": {"dim": 1, "points": 32, "half_length": 4.0},
  "s": 0.7,
  "domain": {
    "omega": {"shape": "ball", "center": [0.0], "radius": 1.0},
    "w1": {"shape": "box", "center": [2.3], "half_widths": [0.9]},
    "w2": {"shape": "box", "center": [-2.3], "half_widths": [0.9]}
  },
  "coefficients": [{"alpha": [0], "center": [0.2], "radius": 0.5, "amplitude": 0.3}]
})";

bool fails_at(const std::string& text, const std::string& where) {
    try {
        parse_config(text);
        return false;
    } catch (const ConfigError& e) {
        return std::string(e.what()).find("config error at " + where) != std::string::npos;
    }
}

} // namespace

TEST_CASE("minimal config fills defaults") {
    ExperimentConfig cfg = parse_config(minimal);
    CHECK(cfg.dim == 1);
    CHECK(cfg.points == 32);
    CHECK(cfg.s == 0.7);
    CHECK(cfg.lambda_shift == 0.0);
    CHECK(cfg.solver.method == SolveMethod::dense);
    CHECK(cfg.seed == 1234);
    CHECK(cfg.verify_suites.size() == 9);
    CHECK(cfg.rho_cells == 6);
    REQUIRE(cfg.coefficients.size() == 1);
    CHECK(cfg.coefficients[0].alpha == MultiIndex::of(1, 0));
    CHECK(cfg.coefficients[0].profile.amplitude == 0.3);
}

TEST_CASE("errors carry the offending path") {
    CHECK(fails_at("{", "/"));
    CHECK(fails_at("[1, 2]", "/"));

    std::string text = minimal;
    text.insert(text.rfind('}'), R"(, "bogus": 1)");
    CHECK(fails_at(text, "/bogus"));

    text = minimal;
    text.insert(text.rfind('}'), R"(, "solver": {"threads": 4})");
    CHECK(fails_at(text, "/solver/threads"));

    text = minimal;
    text.replace(text.find("0.7"), 3, "2.0");
    CHECK(fails_at(text, "/s"));

    text = minimal;
    text.replace(text.find("\"points\": 32"), 12, "\"points\": 31");
    CHECK(fails_at(text, "/grid/points"));

    text = minimal;
    text.insert(text.rfind('}'), R"(, "runge_study": {"sizes": [8, 8]})");
    CHECK(fails_at(text, "/runge_study/sizes"));

    text = minimal;
    text.insert(text.rfind('}'), R"(, "recover": {"plateau": {"shape": "ball", "radius": 0.5}})");
    CHECK(fails_at(text, "/recover/plateau/shape"));

    text = minimal;
    text.replace(text.find("\"radius\": 1.0"), 13, "\"radius\": [1]");
    CHECK(fails_at(text, "/domain/omega/radius"));
}

TEST_CASE("serialization round trips to a fixed point") {
    ExperimentConfig cfg = parse_config(minimal);
    std::string once = serialize_config(cfg);
    ExperimentConfig cfg2 = parse_config(once);
    std::string twice = serialize_config(cfg2);
    CHECK(once == twice);
    CHECK(cfg2.coefficients.size() == cfg.coefficients.size());
    CHECK(cfg2.s == cfg.s);
    CHECK(cfg2.seed == cfg.seed);
}

TEST_CASE("builders realize the configured experiment") {
    ExperimentConfig cfg = parse_config(minimal);
    Grid g = build_grid(cfg);
    CHECK(g.points_per_axis() == 32);

    DomainLayout layout = build_layout(cfg, g);
    CHECK(layout.omega.label() == "omega");
    CHECK(layout.min_separation >= 2.0 * g.spacing());

    GridFunction a0 = profile_field(g, cfg.coefficients[0].profile);
    CHECK(a0.max_abs() <= 0.3 + 1e-12);
    CHECK(a0.max_abs() > 0.0);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (a0[i] != 0.0) CHECK(layout.omega.contains(i));

    ForwardProblem p = build_problem(cfg, g, layout.omega);
    CHECK(p.s == 0.7);
    CHECK(p.coeffs.entries().size() == 1);
    CHECK(p.coeffs.adjoint_sign() == 1.0);

    ForwardProblem ref = build_reference_problem(cfg, g, layout.omega);
    CHECK(ref.coeffs.empty());

    RecoverConfig rc = build_recover_config(cfg, g);
    CHECK(rc.rho == 6.0 * g.spacing());
    CHECK(rc.report_margin == -1.0);
}

TEST_CASE("debug toggle reaches the coefficient container") {
    std::string text = minimal;
    text.insert(text.rfind('}'), R"(, "debug": {"inject_adjoint_sign_error": true})");
    ExperimentConfig cfg = parse_config(text);
    Grid g = build_grid(cfg);
    PDOCoefficients coeffs = build_coefficients(cfg, g);
    CHECK(coeffs.adjoint_sign() == -1.0);
}

TEST_CASE("file loading reports missing paths") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/config.json"), ConfigError);
}
