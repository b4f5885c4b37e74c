#include "fraclab/analysis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

constexpr std::size_t dense_node_limit = 4096;

void require_desk_scale(std::size_t n, const char* who) {
    if (n > dense_node_limit)
        throw std::invalid_argument(std::string(who) +
                                    ": grid too large for the dense path (limit 4096 nodes); "
                                    "a power-iteration variant would be needed beyond desk scale");
}

Eigen::MatrixXd multiplier_matrix(const GridFunction& f, double r, double t) {
    const Grid& g = f.grid();
    require_desk_scale(g.node_count(), "multiplier_norm");
    const Eigen::Index n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd out(n, n);
    GridFunction e(g);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        GridFunction col = bessel_potential(hadamard(f, bessel_potential(e, -r)), t);
        e[j] = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = col[i];
    }
    return out;
}

double largest_singular_value(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

} // namespace

double multiplier_norm(const GridFunction& f, double r, double t) {
    if (!f.all_finite())
        throw std::invalid_argument("multiplier_norm: field has non-finite values");
    return largest_singular_value(multiplier_matrix(f, r, t));
}

double multiplier_symmetry_deviation(const GridFunction& f, double r, double t) {
    double a = multiplier_norm(f, r, t);
    double b = multiplier_norm(f, -t, -r);
    return std::abs(a - b) / std::max(1.0, a);
}

double multiplier_monotonicity_slack(const GridFunction& f, double r, double t, double lam, double mu) {
    if (lam < 0.0 || mu < 0.0)
        throw std::invalid_argument("multiplier_monotonicity_slack: lambda and mu must be >= 0");
    return multiplier_norm(f, r - lam, t + mu) - multiplier_norm(f, r, t);
}

TrivialityScan triviality_scan(const std::function<GridFunction(const Grid&)>& field_factory,
                               const Grid& base, double r, double t, int refinements) {
    if (refinements < 1) throw std::invalid_argument("triviality_scan: need at least one refinement");
    TrivialityScan scan;
    scan.continuum_divergence_expected = r < t;
    int n = base.points_per_axis();
    for (int level = 0; level <= refinements; ++level) {
        Grid g(base.dim(), n, base.half_length());
        GridFunction f = field_factory(g);
        scan.resolutions.push_back(n);
        scan.norms.push_back(multiplier_norm(f, r, t));
        n *= 2;
    }
    scan.strictly_increasing = true;
    for (std::size_t i = 1; i < scan.norms.size(); ++i)
        if (!(scan.norms[i] > scan.norms[i - 1])) scan.strictly_increasing = false;
    return scan;
}

double poincare_constant(const NodeSet& support, double s) {
    require_desk_scale(support.size(), "poincare_constant");
    if (support.size() == support.grid().node_count())
        throw std::invalid_argument("poincare_constant: support must be a proper subset of the grid");
    const auto& nodes = support.nodes();
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd a(n, n);
    std::vector<double> e(nodes.size(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        GridFunction u = extend_by_zero(e, support);
        e[j] = 0.0;
        auto col = restrict_to(frac_laplacian(u, s), support);
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = col[i];
    }
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    double lam_min = es.eigenvalues()(0);
    if (!(lam_min > 0.0))
        throw std::runtime_error("poincare_constant: restricted operator not positive definite");
    return 1.0 / std::sqrt(lam_min);
}

double kato_ponce_ratio(const GridFunction& f, const GridFunction& g, double s) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("kato_ponce_ratio: grid mismatch");
    double lhs = l2_norm(bessel_potential(hadamard(f, g), s));
    double rhs = bessel_potential(f, s).max_abs() * l2_norm(g) + f.max_abs() * l2_norm(bessel_potential(g, s));
    if (rhs == 0.0) return 0.0;
    return lhs / rhs;
}

double ucp_smallest_singular_value(const NodeSet& window, double s) {
    const Grid& g = window.grid();
    require_desk_scale(g.node_count(), "ucp_smallest_singular_value");
    const Eigen::Index cols = static_cast<Eigen::Index>(g.node_count());
    const Eigen::Index rows = 2 * static_cast<Eigen::Index>(window.size());
    // rows of the joint restriction; (-Delta)^s rows come from symmetric columns
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    const auto& nodes = window.nodes();
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(nodes.size()); ++k)
        m(k, static_cast<Eigen::Index>(nodes[k])) = 1.0;
    GridFunction e(g);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(nodes.size()); ++k) {
        e[nodes[k]] = 1.0;
        GridFunction row = frac_laplacian(e, s);
        e[nodes[k]] = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(nodes.size()) + k, j) = row[j];
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

} // namespace fraclab
