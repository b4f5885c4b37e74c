#include "fraclab/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fraclab {

namespace {

// restricted matrix of a full-grid spectral operator on the omega nodes
Eigen::MatrixXd restricted_symbol_matrix(const NodeSet& omega, double exponent, bool bessel) {
    const auto& nodes = omega.nodes();
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd out(n, n);
    std::vector<double> e(nodes.size(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        GridFunction u = extend_by_zero(e, omega);
        e[j] = 0.0;
        GridFunction lu = bessel ? bessel_potential(u, exponent) : frac_laplacian(u, exponent);
        auto col = restrict_to(lu, omega);
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = col[i];
    }
    return out;
}

double min_generalized_eig(const Eigen::MatrixXd& form, const Eigen::MatrixXd& gram) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(form, gram);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("coercivity_estimate: generalized eigensolve failed");
    return es.eigenvalues()(0);
}

// smallest mu on the grid {0, base*2^k} certifying lambda_min > threshold
std::pair<double, double> scan_mu(const Eigen::MatrixXd& form, const Eigen::MatrixXd& mass,
                                  const Eigen::MatrixXd& gram) {
    const double threshold = 1e-12;
    double lam = min_generalized_eig(form, gram);
    if (lam > threshold) return {lam, 0.0};
    const double base = 1.0 / 16.0;
    for (int k = 0; k < 40; ++k) {
        double mu = base * std::pow(2.0, k);
        lam = min_generalized_eig(form + mu * mass, gram);
        if (lam > threshold) return {lam, mu};
        if (mu > 1e6) break;
    }
    std::ostringstream msg;
    msg << "coercivity_estimate: no certificate with mu <= 1e6; the perturbation dominates the "
           "fractional part on this grid";
    throw std::runtime_error(msg.str());
}

} // namespace

CoercivityCertificate coercivity_estimate(const ForwardProblem& problem) {
    const std::size_t n_omega = problem.omega.size();
    if (n_omega > 4096)
        throw std::invalid_argument("coercivity_estimate: omega too large for the dense eigensolve "
                                    "(limit 4096 interior nodes)");

    // restricted (-Delta)^s matrix doubles as the energy Gram; the P part is
    // assembled separately so a zero perturbation leaves form == gram bitwise
    const Eigen::Index n = static_cast<Eigen::Index>(n_omega);
    Eigen::MatrixXd fls = restricted_symbol_matrix(problem.omega, problem.s, false);
    Eigen::MatrixXd a = fls;
    if (!problem.coeffs.empty()) {
        std::vector<double> e(n_omega, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            e[j] = 1.0;
            GridFunction u = extend_by_zero(e, problem.omega);
            e[j] = 0.0;
            auto col = restrict_to(apply_pdo(problem.coeffs, u), problem.omega);
            for (Eigen::Index i = 0; i < n; ++i) a(i, j) += col[i];
        }
    }
    const double vol = problem.grid.cell_volume();
    Eigen::MatrixXd form = 0.5 * vol * (a + a.transpose());
    Eigen::MatrixXd mass = vol * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd gram_energy = 0.5 * vol * (fls + fls.transpose());
    Eigen::MatrixXd gram_sobolev = vol * restricted_symbol_matrix(problem.omega, 2.0 * problem.s, true);
    gram_sobolev = 0.5 * (gram_sobolev + gram_sobolev.transpose());

    auto [c0, mu] = scan_mu(form, mass, gram_energy);
    auto [c0_full, mu_full] = scan_mu(form, mass, gram_sobolev);
    return CoercivityCertificate{c0, mu, c0_full, mu_full};
}

} // namespace fraclab
