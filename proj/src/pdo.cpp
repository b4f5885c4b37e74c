#include "fraclab/operator.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

double PDOCoefficients::regularity_exponent(int order, double s, double lift) {
    if (order < s) return 0.0;
    double gap = order - s;
    double half = gap * 2.0;
    bool half_integer = std::abs(half - std::round(half)) < 1e-12;
    return half_integer ? gap + lift : gap;
}

void PDOCoefficients::set(const MultiIndex& alpha, GridFunction field) {
    if (alpha.dim != dim_)
        throw std::invalid_argument("PDOCoefficients: multi-index dimension mismatch");
    if (!field.all_finite())
        throw std::invalid_argument("PDOCoefficients: coefficient field has non-finite values");
    entries_.insert_or_assign(alpha, std::move(field));
}

const GridFunction* PDOCoefficients::find(const MultiIndex& alpha) const {
    auto it = entries_.find(alpha);
    return it == entries_.end() ? nullptr : &it->second;
}

int PDOCoefficients::order() const {
    int m = 0;
    for (const auto& [alpha, field] : entries_) m = std::max(m, alpha.order());
    return m;
}

GridFunction apply_pdo(const PDOCoefficients& coeffs, const GridFunction& u) {
    GridFunction out(u.grid());
    for (const auto& [alpha, field] : coeffs.entries()) {
        GridFunction d = derivative(u, alpha);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += field[i] * d[i];
    }
    return out;
}

GridFunction apply_pdo_adjoint(const PDOCoefficients& coeffs, const GridFunction& u) {
    GridFunction out(u.grid());
    const double sign_fix = coeffs.adjoint_sign();
    for (const auto& [alpha, field] : coeffs.entries()) {
        GridFunction prod(u.grid());
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = field[i] * u[i];
        GridFunction d = derivative(prod, alpha);
        double sign = (alpha.order() % 2 == 0 ? 1.0 : -1.0) * sign_fix;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * d[i];
    }
    return out;
}

ForwardProblem::ForwardProblem(Grid grid_in, double s_in, PDOCoefficients coeffs_in,
                               NodeSet omega_in, double lambda_shift_in)
    : grid(grid_in), s(s_in), coeffs(std::move(coeffs_in)), omega(std::move(omega_in)),
      lambda_shift(lambda_shift_in) {
    if (!(grid == omega.grid()))
        throw std::invalid_argument("ForwardProblem: omega lives on a different grid");
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("ForwardProblem: s must be positive and finite");
    if (std::abs(s - std::round(s)) < 1e-9)
        throw std::invalid_argument("ForwardProblem: s must be non-integer");
    if (coeffs.dim() != grid.dim())
        throw std::invalid_argument("ForwardProblem: coefficient dimension mismatch");
    if (!(2.0 * s > coeffs.order()))
        throw std::invalid_argument("ForwardProblem: operator order m must satisfy 2s > m");
    for (const auto& [alpha, field] : coeffs.entries()) {
        if (!(field.grid() == grid))
            throw std::invalid_argument("ForwardProblem: coefficient field on a different grid");
        for (std::size_t i = 0; i < field.size(); ++i)
            if (field[i] != 0.0 && !omega.contains(i))
                throw std::invalid_argument("ForwardProblem: coefficient support escapes omega");
    }
}

GridFunction apply_operator(const ForwardProblem& problem, const GridFunction& u, bool adjoint) {
    GridFunction out = frac_laplacian(u, problem.s);
    GridFunction p = adjoint ? apply_pdo_adjoint(problem.coeffs, u) : apply_pdo(problem.coeffs, u);
    out += p;
    if (problem.lambda_shift != 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= problem.lambda_shift * u[i];
    }
    return out;
}

double bilinear_b(const ForwardProblem& problem, const GridFunction& v, const GridFunction& w) {
    GridFunction hv = frac_laplacian(v, 0.5 * problem.s);
    GridFunction hw = frac_laplacian(w, 0.5 * problem.s);
    double acc = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i) acc += hv[i] * hw[i];
    for (const auto& [alpha, field] : problem.coeffs.entries()) {
        GridFunction dv = derivative(v, alpha);
        for (std::size_t i = 0; i < dv.size(); ++i) acc += field[i] * dv[i] * w[i];
    }
    return problem.grid.cell_volume() * acc;
}

double bilinear_b_star(const ForwardProblem& problem, const GridFunction& v, const GridFunction& w) {
    // definitionally B*(v, w) = B(w, v); sharing the reduction makes the
    // symmetry exact in floating point as well
    return bilinear_b(problem, w, v);
}

} // namespace fraclab
