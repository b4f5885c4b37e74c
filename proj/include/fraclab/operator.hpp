// The perturbed operator L = (-Delta)^s + P - lambda with
// P = sum_{|alpha| <= m} a_alpha D^alpha, coefficients supported in the
// interior region. Provides the coefficient container, forward/adjoint
// application, the bilinear forms
//
//   B (v, w) = <(-Delta)^{s/2} v, (-Delta)^{s/2} w> + sum <a_alpha, (D^alpha v) w>
//   B*(v, w) = <(-Delta)^{s/2} v, (-Delta)^{s/2} w> + sum <a_alpha, v (D^alpha w)>
//
// (so B*(v, w) = B(w, v) identically, enforced by evaluating one reduction),
// the exterior value problem
//
//   restrict_Omega( L u ) = F,   u = f outside Omega,
//
// solved densely (LU on the restricted matrix, assembled by applying L to
// indicator columns) or matrix-free (CG on the normal equations), plus
// invertibility and coercivity certificates for the restricted operator.

#pragma once

#include <Eigen/Core>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fraclab/geometry.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

class PDOCoefficients {
public:
    explicit PDOCoefficients(int dim) : dim_(dim) {}

    // half-integer gaps |alpha| - s get a small lift so the stored exponent
    // is never exactly a negative half-integer boundary case
    static double regularity_exponent(int order, double s, double lift = 1e-3);

    void set(const MultiIndex& alpha, GridFunction field);
    const GridFunction* find(const MultiIndex& alpha) const;
    const std::map<MultiIndex, GridFunction>& entries() const { return entries_; }

    int dim() const { return dim_; }
    int order() const;
    bool empty() const { return entries_.empty(); }

    // test fixture: flips the sign of the P-part in adjoint applications
    void debug_flip_adjoint_sign(bool on) { adjoint_sign_ = on ? -1.0 : 1.0; }
    double adjoint_sign() const { return adjoint_sign_; }

private:
    int dim_;
    std::map<MultiIndex, GridFunction> entries_;
    double adjoint_sign_ = 1.0;
};

GridFunction apply_pdo(const PDOCoefficients& coeffs, const GridFunction& u);
// sum (-1)^{|alpha|} D^alpha (a_alpha u)
GridFunction apply_pdo_adjoint(const PDOCoefficients& coeffs, const GridFunction& u);

struct ForwardProblem {
    Grid grid;
    double s;
    PDOCoefficients coeffs;
    NodeSet omega;
    double lambda_shift = 0.0;

    ForwardProblem(Grid grid, double s, PDOCoefficients coeffs, NodeSet omega,
                   double lambda_shift = 0.0);
};

// full-grid application of (-Delta)^s + P - lambda (or its adjoint)
GridFunction apply_operator(const ForwardProblem& problem, const GridFunction& u, bool adjoint = false);

double bilinear_b(const ForwardProblem& problem, const GridFunction& v, const GridFunction& w);
double bilinear_b_star(const ForwardProblem& problem, const GridFunction& v, const GridFunction& w);

enum class SolveMethod { dense, iterative };

struct SolverOptions {
    SolveMethod method = SolveMethod::dense;
    double tol_dense = 1e-10;
    double tol_iterative = 1e-8;
    int max_iteration_factor = 10;   // cap = factor * |Omega|
    double condition_limit = 1e12;
    int threads = 1;
};

struct SolveReport {
    GridFunction u;
    double residual = 0.0;
    SolveMethod method = SolveMethod::dense;
    int iterations = 0;
    double condition_estimate = -1.0;   // -1 when not estimated (iterative path)
};

// reusable factorization of the restricted operator; one instance per
// (problem, direction) serves any number of data
class ExteriorSolver {
public:
    ExteriorSolver(const ForwardProblem& problem, bool adjoint, SolverOptions options);
    ~ExteriorSolver();
    ExteriorSolver(ExteriorSolver&&) noexcept;
    ExteriorSolver& operator=(ExteriorSolver&&) noexcept;

    // F: source over Omega (ordered as omega.nodes()); empty means zero.
    // f: exterior datum, values inside Omega ignored.
    SolveReport solve(const GridFunction& f, const std::vector<double>& source = {}) const;

    const ForwardProblem& problem() const;
    bool adjoint() const;

    // restricted matrix (dense path only)
    const Eigen::MatrixXd& restricted_matrix() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SolveReport solve_forward(const ForwardProblem& problem, const GridFunction& f,
                          const std::vector<double>& source = {},
                          const SolverOptions& options = {});
SolveReport solve_adjoint(const ForwardProblem& problem, const GridFunction& f,
                          const std::vector<double>& source = {},
                          const SolverOptions& options = {});

struct InvertibilityReport {
    double smallest_singular_value;
    double condition;
    bool near_singular;
};

InvertibilityReport check_invertibility(const ForwardProblem& problem, bool adjoint = false);

// B(v,v) >= c0 * |||v|||^2 - mu * ||v||_{L2}^2 for every v supported in Omega,
// where ||| . ||| is the (-Delta)^{s/2} energy norm (an equivalent Sobolev
// norm on such v, with equivalence constant tied to the Poincare constant).
// The _sobolev pair certifies the same inequality against the full <xi>^{2s}
// Gram. Both are minimum generalized eigenvalues, scanned over a mu grid.
struct CoercivityCertificate {
    double c0;
    double mu;
    double c0_sobolev;
    double mu_sobolev;
};

CoercivityCertificate coercivity_estimate(const ForwardProblem& problem);

} // namespace fraclab
