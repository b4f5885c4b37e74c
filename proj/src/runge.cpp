#include "fraclab/recover.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fraclab {

RungeSolver::RungeSolver(const ForwardProblem& problem, const ExteriorDictionary& dict, bool adjoint,
                         const SolverOptions& solver_options, const RungeOptions& runge_options)
    : problem_(problem), dict_(dict), options_(runge_options) {
    ExteriorSolver solver(problem_, adjoint, solver_options);
    for (const auto& f : dict_.elements()) {
        GridFunction u = solver.solve(f).u;
        GridFunction w = u - f;
        responses_hs_.push_back(bessel_potential(w, problem_.s));
        responses_.push_back(std::move(w));
        elements_l2_.push_back(f);
    }
    const int k = dict_.size();
    Eigen::MatrixXd gram(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b <= a; ++b) {
            double v = pairing(responses_hs_[a], responses_hs_[b]);
            gram(a, b) = v;
            gram(b, a) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    auto_lambda_ = 1e-8 * es.eigenvalues()(k - 1);
}

const NodeSet& RungeSolver::interior() const { return problem_.omega; }

RungeResult RungeSolver::approximate(const GridFunction& target) const {
    return approximate_at(target, options_.lambda_reg);
}

RungeResult RungeSolver::approximate_at(const GridFunction& target, double lambda_reg) const {
    const Grid& g = problem_.grid;
    if (!(target.grid() == g))
        throw std::invalid_argument("RungeSolver: target lives on a different grid");
    const int k = dict_.size();
    const Eigen::Index nn = static_cast<Eigen::Index>(g.node_count());
    const double root_vol = std::sqrt(g.cell_volume());

    // stacked least squares: rows = J^s-response samples, then the
    // sqrt(lambda_reg)-weighted dictionary elements (L2 penalty)
    GridFunction target_hs = bessel_potential(target, problem_.s);

    if (lambda_reg < 0.0) lambda_reg = auto_lambda_;

    const Eigen::Index rows = nn + (lambda_reg > 0.0 ? nn : 0);
    Eigen::MatrixXd design(rows, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (int c = 0; c < k; ++c)
        for (Eigen::Index i = 0; i < nn; ++i) design(i, c) = root_vol * responses_hs_[c][i];
    for (Eigen::Index i = 0; i < nn; ++i) rhs(i) = root_vol * target_hs[i];
    if (lambda_reg > 0.0) {
        const double w = std::sqrt(lambda_reg) * root_vol;
        for (int c = 0; c < k; ++c)
            for (Eigen::Index i = 0; i < nn; ++i) design(nn + i, c) = w * elements_l2_[c][i];
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    Eigen::VectorXd coeffs = cod.solve(rhs);

    // normal-equation diagnostics
    Eigen::MatrixXd normal = design.transpose() * design;
    Eigen::VectorXd nrhs = design.transpose() * rhs;
    double nscale = std::max(nrhs.norm(), 1e-300);
    double normal_residual = (normal * coeffs - nrhs).norm() / nscale;
    if (lambda_reg > 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(k - 1);
        if (!(lo > 0.0) || hi / lo > options_.condition_limit) {
            std::ostringstream msg;
            msg << "runge_approximate: normal equations condition "
                << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())
                << " exceeds the limit; increase lambda_reg or shrink the dictionary";
            throw std::runtime_error(msg.str());
        }
    }

    GridFunction approx(g);
    for (int c = 0; c < k; ++c)
        for (std::size_t i = 0; i < approx.size(); ++i)
            approx[i] += coeffs(c) * responses_[c][i];

    RungeResult result{.coefficients = coeffs,
                       .lambda_reg = lambda_reg,
                       .normal_residual = normal_residual,
                       .approximation = std::move(approx)};

    GridFunction err = result.approximation - target;
    result.achieved_error_hs = sobolev_norm(err, problem_.s);
    double target_norm_hs = sobolev_norm(target, problem_.s);
    result.relative_error_hs =
        target_norm_hs > 0.0 ? result.achieved_error_hs / target_norm_hs : result.achieved_error_hs;

    double e2 = 0.0, t2 = 0.0;
    for (std::size_t i : problem_.omega.nodes()) {
        e2 += err[i] * err[i];
        t2 += target[i] * target[i];
    }
    result.achieved_error_l2 = std::sqrt(g.cell_volume() * e2);
    result.relative_error_l2 =
        t2 > 0.0 ? std::sqrt(e2 / t2) : result.achieved_error_l2;
    return result;
}

RungeResult runge_approximate(const ForwardProblem& problem, const ExteriorDictionary& dict,
                              const GridFunction& target, bool adjoint,
                              const SolverOptions& solver_options, const RungeOptions& runge_options) {
    return RungeSolver(problem, dict, adjoint, solver_options, runge_options).approximate(target);
}

} // namespace fraclab
