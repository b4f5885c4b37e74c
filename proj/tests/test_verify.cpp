#include <set>
#include <string>

#include "doctest.h"
#include "fraclab/verify.hpp"

using namespace fraclab;

namespace {

const char* base = R"({
  "grid": {"dim": 1, "points": 64, "half_length": 4.0},
  "s": 0.7,
  "domain": {
    "omega": {"shape": "ball", "center": [0.0], "radius": 1.0},
    "w1": {"shape": "box", "center": [2.3], "half_widths": [0.9]},
    "w2": {"shape": "box", "center": [-2.3], "half_widths": [0.9]}
  },
  "coefficients": [
    {"alpha": [0], "center": [0.2], "radius": 0.5, "amplitude": 0.3},
    {"alpha": [1], "center": [-0.2], "radius": 0.5, "amplitude": 0.2}
  ],
  "dictionary": {"max_elements": 4},
  "alessandrini": {"cases": 5},
  "verify": {"suites": ["symbols", "adjoint", "coercivity", "duality", "alessandrini",
                        "multiplier", "poincare", "kato_ponce", "ucp"],
             "samples": 40},
  "seed": 4321
})";

ExperimentConfig make_config(const std::string& extra = "") {
    std::string text = base;
    if (!extra.empty()) text.insert(text.rfind('}'), ", " + extra);
    return parse_config(text);
}

} // namespace

TEST_CASE("full verify run passes every suite") {
    VerifyReport report = run_verify(make_config());
    REQUIRE(!report.empty());
    CHECK(report.all_passed());

    // all nine suites contributed at least one check
    std::set<std::string> suites;
    for (const auto& c : report.checks) {
        suites.insert(c.suite);
        CHECK(c.pass == (c.value <= c.tolerance));
    }
    CHECK(suites.size() == 9);
}

TEST_CASE("verify reruns are bitwise identical") {
    ExperimentConfig cfg = make_config();
    VerifyReport a = run_verify(cfg);
    VerifyReport b = run_verify(cfg);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t k = 0; k < a.checks.size(); ++k) {
        CHECK(a.checks[k].suite == b.checks[k].suite);
        CHECK(a.checks[k].name == b.checks[k].name);
        CHECK(a.checks[k].value == b.checks[k].value);
    }
}

TEST_CASE("suite selection narrows the run") {
    ExperimentConfig cfg = make_config();
    cfg.verify_suites = {"symbols"};
    VerifyReport report = run_verify(cfg);
    REQUIRE(!report.empty());
    for (const auto& c : report.checks) CHECK(c.suite == "symbols");

    cfg.verify_suites = {};
    CHECK(run_verify(cfg).empty());

    cfg.verify_suites = {"symbols", "nonsense"};
    CHECK_THROWS_AS(run_verify(cfg), ConfigError);
}

TEST_CASE("adjoint sign injection makes verification fail") {
    ExperimentConfig cfg = make_config(R"("debug": {"inject_adjoint_sign_error": true})");
    cfg.verify_suites = {"adjoint", "duality"};
    VerifyReport report = run_verify(cfg);
    REQUIRE(!report.empty());
    CHECK_FALSE(report.all_passed());
}
