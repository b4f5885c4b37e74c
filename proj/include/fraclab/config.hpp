// Experiment configuration: one JSON document drives every CLI command.
// Parsing is strict (unknown keys are errors) and every complaint carries the
// JSON-pointer-style path of the offending key. parse -> serialize -> parse
// is idempotent.

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/dn_map.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/operator.hpp"
#include "fraclab/recover.hpp"

namespace fraclab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegionSpec {
    std::string shape = "ball";   // "ball" | "box"
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;                      // ball
    std::array<double, 2> half_widths{0.0, 0.0};   // box
};

// smooth profile a(x) = amplitude * exp(1 - 1/(1 - |x-c|^2/r^2)) inside the
// ball (peak value = amplitude), zero outside
struct ProfileSpec {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;
    double amplitude = 1.0;
};

struct CoefficientSpec {
    MultiIndex alpha;
    ProfileSpec profile;
};

struct ExperimentConfig {
    int dim = 1;
    int points = 128;
    double half_length = 4.0;
    double s = 0.7;
    double lambda_shift = 0.0;

    RegionSpec omega;
    RegionSpec w1;
    RegionSpec w2;
    std::vector<CoefficientSpec> coefficients;

    SolverOptions solver;
    DictionarySpec dictionary;

    // recovery (grid-cell units resolved against the actual grid)
    int recover_order_m = 0;
    int rho_cells = 6;
    int cutoff_width_cells = 8;
    int center_stride_cells = 2;
    double report_margin_cells = -1.0;   // < 0: 2 * rho
    bool peeling = true;
    int fixed_point_sweeps = 2;
    double runge_error_threshold = 0.5;
    RegionSpec plateau;                  // box
    double recover_pass_threshold = 0.15;
    double runge_lambda_reg = -1.0;

    // runge study
    ProfileSpec runge_target;
    std::vector<int> runge_sizes{8, 16, 24, 32};
    double runge_study_lambda_reg = 0.0;
    double runge_pass_error = 0.1;

    int alessandrini_cases = 50;
    double alessandrini_tolerance = 1e-7;

    ProfileSpec forward_datum;

    std::vector<std::string> verify_suites{"symbols", "adjoint",  "coercivity",
                                           "duality", "alessandrini", "multiplier",
                                           "poincare", "kato_ponce", "ucp"};
    int verify_samples = 100;

    unsigned long long seed = 1234;
    int threads = 1;
    bool inject_adjoint_sign_error = false;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

Grid build_grid(const ExperimentConfig& config);
NodeSet build_region(const Grid& grid, const RegionSpec& spec, const std::string& label);
DomainLayout build_layout(const ExperimentConfig& config, const Grid& grid);
GridFunction profile_field(const Grid& grid, const ProfileSpec& spec);
PDOCoefficients build_coefficients(const ExperimentConfig& config, const Grid& grid);
ForwardProblem build_problem(const ExperimentConfig& config, const Grid& grid, const NodeSet& omega);
ForwardProblem build_reference_problem(const ExperimentConfig& config, const Grid& grid,
                                       const NodeSet& omega);
RecoverConfig build_recover_config(const ExperimentConfig& config, const Grid& grid);

} // namespace fraclab
