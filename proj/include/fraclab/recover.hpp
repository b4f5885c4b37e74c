// Interior approximation and coefficient recovery.
//
// Runge step: over a dictionary {f_k} of exterior data, minimize
//   || sum_k c_k (u_{f_k} - f_k) - v ||_{H^s}^2 + lambda_reg || sum_k c_k f_k ||_{L2}^2
// for an interior target v. The basis responses u_{f_k} - f_k are supported in
// the interior region, so this is a dense least-squares problem; lambda_reg = 0
// is solved min-norm (complete orthogonal decomposition), which makes the
// nested-dictionary error monotone to rounding.
//
// Recovery walks orders N = 0..m. For |alpha| = N it pairs a cutoff monomial
// v1 = x^alpha (plateau) against unit-mass mollifiers psi_y; on the plateau
// D^alpha v1 = alpha! and higher/equal-order off-diagonal terms annihilate, so
// the Alessandrini pairing minus the peeled lower-order contribution equals
// alpha! (a_alpha * psi)(y). Values are taken at every node whose mollifier
// ball fits in the plateau, so peeling integrates recovered fields exactly;
// reported centers keep an extra margin from the plateau edge. The estimate
// converges to the mollified coefficient, O(rho^2) away from the true field.
//
// The pairing itself either comes from measured DN matrices (difference
// against the reference problem, Runge data on both sides, optional
// fixed-point sweeps re-running the datum-side Runge under the recovered
// dynamics) or, in oracle mode, from exact interior fields (testing seam that
// isolates mollification error from Runge error).

#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <vector>

#include "fraclab/dn_map.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/operator.hpp"

namespace fraclab {

struct RungeOptions {
    double lambda_reg = -1.0;        // < 0: 1e-8 * largest normal-equation eigenvalue
    double condition_limit = 1e12;   // enforced only for lambda_reg > 0
};

struct RungeResult {
    Eigen::VectorXd coefficients;
    double achieved_error_hs = 0.0;      // || approx - v ||_{H^s}
    double achieved_error_l2 = 0.0;      // || approx - v ||_{L2} over the interior set
    double relative_error_hs = 0.0;
    double relative_error_l2 = 0.0;
    double lambda_reg = 0.0;
    double normal_residual = 0.0;        // normal-equation backsubstitution check
    GridFunction approximation;          // sum c_k (u_{f_k} - f_k)
};

// precomputes the dictionary responses once per (problem, direction)
class RungeSolver {
public:
    RungeSolver(const ForwardProblem& problem, const ExteriorDictionary& dict, bool adjoint,
                const SolverOptions& solver_options = {}, const RungeOptions& runge_options = {});

    RungeResult approximate(const GridFunction& target) const;
    // same fit with the regularization weight forced to `lambda_reg` (>= 0)
    RungeResult approximate_at(const GridFunction& target, double lambda_reg) const;
    const ExteriorDictionary& dictionary() const { return dict_; }
    const NodeSet& interior() const;
    // weight the automatic mode resolves to (1e-8 times the largest response Gram eigenvalue)
    double default_lambda() const { return auto_lambda_; }

private:
    ForwardProblem problem_;
    ExteriorDictionary dict_;
    RungeOptions options_;
    double auto_lambda_ = 0.0;
    std::vector<GridFunction> responses_;        // u_{f_k} - f_k
    std::vector<GridFunction> responses_hs_;     // J^s responses
    std::vector<GridFunction> elements_l2_;      // dictionary elements (regularizer rows)
};

RungeResult runge_approximate(const ForwardProblem& problem, const ExteriorDictionary& dict,
                              const GridFunction& target, bool adjoint = false,
                              const SolverOptions& solver_options = {},
                              const RungeOptions& runge_options = {});

struct RecoverConfig {
    int order_m = 0;
    double rho = 0.0;                  // mollifier radius; <= 0 picks 6h
    BoxSpec plateau;                   // monomial plateau, must sit inside omega with collar
    double cutoff_width = 0.0;         // collar width; <= 0 picks 8h
    int center_stride_cells = 2;       // reported center lattice stride
    double report_margin = -1.0;       // reported-center distance to plateau edge; < 0 picks 2*rho
    bool peeling = true;
    int fixed_point_sweeps = 0;        // extra sweeps under recovered dynamics (measured mode)
    double runge_error_threshold = 0.5;
    RungeOptions runge;
};

struct RecoveredValue {
    std::array<double, 2> center{0.0, 0.0};
    double value = 0.0;
    double runge_error = 0.0;     // max of the two relative Runge errors feeding this value
    double peel_residual = 0.0;   // magnitude of the subtracted lower-order contribution
    bool flagged = false;         // runge_error above threshold
};

struct RecoveredCoefficients {
    int order_m = 0;
    double rho = 0.0;
    // reported centers only, per multi-index (order-then-lex)
    std::map<MultiIndex, std::vector<RecoveredValue>> values;
    // full recovered fields on the admissible node set (peeling input)
    std::map<MultiIndex, GridFunction> fields;
    std::vector<std::size_t> admissible_nodes;
};

// mollified ground truth (a * psi_rho)(y) for comparisons
double mollified_value(const GridFunction& coefficient, const std::array<double, 2>& center, double rho);

RecoveredCoefficients recover_oracle_mode(const ForwardProblem& truth, const RecoverConfig& config);

RecoveredCoefficients recover_coefficients(const DNMatrix& measured, const ForwardProblem& reference,
                                           const ExteriorDictionary& data_dict,
                                           const ExteriorDictionary& test_dict,
                                           const RecoverConfig& config,
                                           const SolverOptions& solver_options = {});

} // namespace fraclab
