#include "fraclab/dn_map.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace fraclab {

ExteriorDictionary ExteriorDictionary::build(const NodeSet& host, const DictionarySpec& spec) {
    if (spec.radius_cells < 1 || spec.stride_cells < 1)
        throw std::invalid_argument("ExteriorDictionary: radius and stride must be >= 1 cell");
    const Grid& g = host.grid();
    const double h = g.spacing();
    const double radius = spec.radius_cells * h;

    ExteriorDictionary dict(host, radius);
    const double r2 = radius * radius;
    for (std::size_t flat : host.nodes()) {
        auto idx = g.unflatten(flat);
        bool on_lattice = true;
        for (int d = 0; d < g.dim(); ++d)
            if (idx[d] % spec.stride_cells != 0) on_lattice = false;
        if (!on_lattice) continue;
        auto c = g.node_coords(flat);
        // keep only centers whose support ball stays inside the host set
        bool inside = true;
        for (std::size_t other = 0; other < g.node_count() && inside; ++other)
            if (!host.contains(other) && g.periodic_dist2(g.node_coords(other), c) < r2) inside = false;
        if (!inside) continue;
        dict.centers_.push_back(c);
        dict.elements_.push_back(bump_field(g, BumpSpec{c, radius}, &host));
        if (spec.max_elements > 0 && dict.size() >= spec.max_elements) break;
    }
    if (dict.elements_.empty())
        throw std::invalid_argument("ExteriorDictionary: no admissible bump centers in host set");

    // reject near-dependent families early
    Eigen::MatrixXd gram(dict.size(), dict.size());
    for (int i = 0; i < dict.size(); ++i)
        for (int j = 0; j <= i; ++j) {
            double v = pairing(dict.elements_[i], dict.elements_[j]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (!(lo > 0.0) || hi / lo > 1e10)
        throw std::invalid_argument("ExteriorDictionary: bump family is numerically dependent "
                                    "(Gram condition above 1e10); widen the stride");
    return dict;
}

GridFunction ExteriorDictionary::combine(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != size())
        throw std::invalid_argument("ExteriorDictionary: coefficient count mismatch");
    GridFunction f(host_.grid());
    for (int k = 0; k < size(); ++k) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += coeffs(k) * elements_[k][i];
    }
    return f;
}

namespace {

DNMatrix assemble(const ForwardProblem& problem, const ExteriorDictionary& data_dict,
                  const ExteriorDictionary& test_dict, const SolverOptions& options, bool adjoint) {
    ExteriorSolver solver(problem, adjoint, options);
    DNMatrix dn;
    dn.adjoint = adjoint;
    dn.entries.resize(data_dict.size(), test_dict.size());
    for (int i = 0; i < data_dict.size(); ++i) {
        GridFunction u = solver.solve(data_dict.elements()[i]).u;
        for (int j = 0; j < test_dict.size(); ++j) {
            const GridFunction& g = test_dict.elements()[j];
            dn.entries(i, j) = adjoint ? bilinear_b_star(problem, u, g) : bilinear_b(problem, u, g);
        }
    }
    return dn;
}

} // namespace

DNMatrix assemble_dn(const ForwardProblem& problem, const ExteriorDictionary& data_dict,
                     const ExteriorDictionary& test_dict, const SolverOptions& options) {
    return assemble(problem, data_dict, test_dict, options, false);
}

DNMatrix assemble_dn_adjoint(const ForwardProblem& problem, const ExteriorDictionary& data_dict,
                             const ExteriorDictionary& test_dict, const SolverOptions& options) {
    return assemble(problem, data_dict, test_dict, options, true);
}

double check_duality(const ForwardProblem& problem, const ExteriorDictionary& d1,
                     const ExteriorDictionary& d2, const SolverOptions& options) {
    DNMatrix dn = assemble_dn(problem, d1, d2, options);
    DNMatrix dn_star = assemble_dn_adjoint(problem, d2, d1, options);
    double scale = std::max(1.0, dn.entries.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (int i = 0; i < dn.entries.rows(); ++i)
        for (int j = 0; j < dn.entries.cols(); ++j)
            worst = std::max(worst, std::abs(dn.entries(i, j) - dn_star.entries(j, i)));
    return worst / scale;
}

AlessandriniResult alessandrini_identity(const ForwardProblem& p1, const ForwardProblem& p2,
                                         const GridFunction& f1, const GridFunction& f2,
                                         const SolverOptions& options) {
    if (!(p1.grid == p2.grid))
        throw std::invalid_argument("alessandrini_identity: problems on different grids");

    GridFunction u1 = solve_forward(p1, f1, {}, options).u;          // forward under P1
    GridFunction u1_ref = solve_forward(p2, f1, {}, options).u;      // forward under P2
    GridFunction u2_star = solve_adjoint(p2, f2, {}, options).u;     // adjoint under P2

    double lhs = bilinear_b(p1, u1, f2) - bilinear_b(p2, u1_ref, f2);

    double acc = 0.0;
    auto indices = multi_indices_up_to(p1.grid.dim(), std::max(p1.coeffs.order(), p2.coeffs.order()));
    for (const auto& alpha : indices) {
        const GridFunction* a1 = p1.coeffs.find(alpha);
        const GridFunction* a2 = p2.coeffs.find(alpha);
        if (!a1 && !a2) continue;
        GridFunction d = derivative(u1, alpha);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double diff = (a1 ? (*a1)[i] : 0.0) - (a2 ? (*a2)[i] : 0.0);
            acc += diff * d[i] * u2_star[i];
        }
    }
    double rhs = p1.grid.cell_volume() * acc;
    return AlessandriniResult{lhs, rhs, std::max(1.0, std::abs(lhs))};
}

} // namespace fraclab
