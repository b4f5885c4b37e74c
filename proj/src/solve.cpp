#include "fraclab/operator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fraclab {

namespace {

std::vector<double> apply_restricted(const ForwardProblem& problem, bool adjoint,
                                     const std::vector<double>& w) {
    GridFunction u = extend_by_zero(w, problem.omega);
    GridFunction lu = apply_operator(problem, u, adjoint);
    return restrict_to(lu, problem.omega);
}

} // namespace

struct ExteriorSolver::Impl {
    ForwardProblem problem;
    bool adjoint;
    SolverOptions options;
    Eigen::MatrixXd matrix;            // dense path
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double condition_estimate = -1.0;

    Impl(const ForwardProblem& p, bool adj, SolverOptions opt)
        : problem(p), adjoint(adj), options(opt) {
        if (options.method == SolveMethod::dense) assemble_and_factor();
    }

    void assemble_and_factor() {
        const auto& nodes = problem.omega.nodes();
        const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
        matrix.resize(n, n);
        const int threads = std::max(1, options.threads);
        auto fill_columns = [&](Eigen::Index begin, Eigen::Index end) {
            std::vector<double> e(nodes.size(), 0.0);
            for (Eigen::Index j = begin; j < end; ++j) {
                e[j] = 1.0;
                auto col = apply_restricted(problem, adjoint, e);
                e[j] = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) matrix(i, j) = col[i];
            }
        };
        if (threads == 1 || n < 2 * threads) {
            fill_columns(0, n);
        } else {
            std::vector<std::thread> pool;
            Eigen::Index chunk = (n + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                Eigen::Index b = t * chunk, e = std::min(n, b + chunk);
                if (b < e) pool.emplace_back(fill_columns, b, e);
            }
            for (auto& th : pool) th.join();
        }

        lu.compute(matrix);
        double rcond = lu.rcond();
        condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        if (condition_estimate > options.condition_limit) {
            std::ostringstream msg;
            msg << "restricted operator is near-singular (condition estimate " << condition_estimate
                << "); the spectral shift appears to hit a Dirichlet eigenvalue of the restricted "
                   "operator (0 must not be an eigenvalue); adjust lambda_shift";
            throw std::runtime_error(msg.str());
        }
    }

    SolveReport solve(const GridFunction& f, const std::vector<double>& source) const {
        if (!(f.grid() == problem.grid))
            throw std::invalid_argument("ExteriorSolver: datum lives on a different grid");
        if (!f.all_finite())
            throw std::invalid_argument("ExteriorSolver: datum has non-finite values");
        const auto& nodes = problem.omega.nodes();
        if (!source.empty() && source.size() != nodes.size())
            throw std::invalid_argument("ExteriorSolver: source size does not match omega");

        // split u = u0 + f_ext, u0 supported in Omega, f_ext = f outside
        GridFunction f_ext = f;
        for (std::size_t k : nodes) f_ext[k] = 0.0;
        auto lf = restrict_to(apply_operator(problem, f_ext, adjoint), problem.omega);
        std::vector<double> rhs(nodes.size());
        for (std::size_t k = 0; k < rhs.size(); ++k)
            rhs[k] = (source.empty() ? 0.0 : source[k]) - lf[k];

        std::vector<double> u0;
        SolveReport report{GridFunction(problem.grid), 0.0, options.method, 0, condition_estimate};
        if (options.method == SolveMethod::dense) {
            u0 = solve_dense(rhs, report);
        } else {
            u0 = solve_cgls(rhs, report);
        }

        report.u = extend_by_zero(u0, problem.omega) + f_ext;
        return report;
    }

    double rhs_norm(const std::vector<double>& rhs) const {
        double s = 0.0;
        for (double v : rhs) s += v * v;
        return std::sqrt(s);
    }

    std::vector<double> solve_dense(const std::vector<double>& rhs, SolveReport& report) const {
        const Eigen::Index n = matrix.rows();
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
        Eigen::VectorXd x = lu.solve(b);
        // one refinement pass tightens the residual for stiff shifts
        Eigen::VectorXd r = b - matrix * x;
        x += lu.solve(r);
        r = b - matrix * x;
        double scale = std::max(rhs_norm(rhs), 1e-300);
        report.residual = r.norm() / scale;
        report.iterations = 0;
        if (report.residual > options.tol_dense) {
            std::ostringstream msg;
            msg << "dense exterior solve residual " << report.residual << " exceeds tolerance "
                << options.tol_dense;
            throw std::runtime_error(msg.str());
        }
        return std::vector<double>(x.data(), x.data() + n);
    }

    // CGLS on the normal equations, transpose applied through the adjoint
    // operator (exact transpose of the restricted matrix in exact arithmetic)
    std::vector<double> solve_cgls(const std::vector<double>& rhs, SolveReport& report) const {
        const std::size_t n = problem.omega.size();
        auto A = [&](const std::vector<double>& v) { return apply_restricted(problem, adjoint, v); };
        auto At = [&](const std::vector<double>& v) { return apply_restricted(problem, !adjoint, v); };

        auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        };

        std::vector<double> x(n, 0.0), r = rhs;
        double bnorm = std::max(rhs_norm(rhs), 1e-300);
        std::vector<double> s = At(r), p = s;
        double snorm2 = dot(s, s);
        const int max_iter = options.max_iteration_factor * static_cast<int>(n);
        int it = 0;
        double rel = rhs_norm(r) / bnorm;
        while (rel > options.tol_iterative && it < max_iter) {
            std::vector<double> q = A(p);
            double qq = dot(q, q);
            if (qq == 0.0) break;
            double step = snorm2 / qq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            std::vector<double> s_next = At(r);
            double snorm2_next = dot(s_next, s_next);
            double beta = snorm2 > 0.0 ? snorm2_next / snorm2 : 0.0;
            for (std::size_t i = 0; i < n; ++i) p[i] = s_next[i] + beta * p[i];
            s = std::move(s_next);
            snorm2 = snorm2_next;
            ++it;
            rel = rhs_norm(r) / bnorm;
        }
        report.iterations = it;
        report.residual = rel;
        if (rel > options.tol_iterative) {
            std::ostringstream msg;
            msg << "iterative exterior solve stalled at relative residual " << rel << " after " << it
                << " iterations (cap " << max_iter << ")";
            throw std::runtime_error(msg.str());
        }
        return x;
    }
};

ExteriorSolver::ExteriorSolver(const ForwardProblem& problem, bool adjoint, SolverOptions options)
    : impl_(std::make_unique<Impl>(problem, adjoint, options)) {}

ExteriorSolver::~ExteriorSolver() = default;
ExteriorSolver::ExteriorSolver(ExteriorSolver&&) noexcept = default;
ExteriorSolver& ExteriorSolver::operator=(ExteriorSolver&&) noexcept = default;

SolveReport ExteriorSolver::solve(const GridFunction& f, const std::vector<double>& source) const {
    return impl_->solve(f, source);
}

const ForwardProblem& ExteriorSolver::problem() const { return impl_->problem; }
bool ExteriorSolver::adjoint() const { return impl_->adjoint; }

const Eigen::MatrixXd& ExteriorSolver::restricted_matrix() const {
    if (impl_->options.method != SolveMethod::dense)
        throw std::logic_error("ExteriorSolver: restricted matrix only assembled on the dense path");
    return impl_->matrix;
}

SolveReport solve_forward(const ForwardProblem& problem, const GridFunction& f,
                          const std::vector<double>& source, const SolverOptions& options) {
    return ExteriorSolver(problem, false, options).solve(f, source);
}

SolveReport solve_adjoint(const ForwardProblem& problem, const GridFunction& f,
                          const std::vector<double>& source, const SolverOptions& options) {
    return ExteriorSolver(problem, true, options).solve(f, source);
}

InvertibilityReport check_invertibility(const ForwardProblem& problem, bool adjoint) {
    SolverOptions opt;
    opt.condition_limit = std::numeric_limits<double>::infinity();   // report, do not throw
    ExteriorSolver solver(problem, adjoint, opt);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(solver.restricted_matrix());
    const auto& sv = svd.singularValues();
    double smin = sv(sv.size() - 1), smax = sv(0);
    double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    return InvertibilityReport{smin, cond, cond > 1e12};
}

} // namespace fraclab
