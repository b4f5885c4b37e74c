// Exterior Dirichlet-to-Neumann data. For an exterior datum f and test datum
// g the DN pairing is <Lambda[f], [g]> = B(u_f, g) with u_f the forward
// solution with source 0; the adjoint map uses B*(u*_f, g). Data are tabulated
// over finite dictionaries of exterior bumps, the natural desk-scale stand-in
// for the abstract trace-space quotient.

#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "fraclab/geometry.hpp"
#include "fraclab/operator.hpp"

namespace fraclab {

struct DictionarySpec {
    int radius_cells = 3;    // bump radius in units of h
    int stride_cells = 2;    // center lattice stride in units of h
    int max_elements = 0;    // 0 = keep all admissible centers
};

class ExteriorDictionary {
public:
    static ExteriorDictionary build(const NodeSet& host, const DictionarySpec& spec);

    const NodeSet& host() const { return host_; }
    const std::vector<GridFunction>& elements() const { return elements_; }
    const std::vector<std::array<double, 2>>& centers() const { return centers_; }
    double radius() const { return radius_; }
    int size() const { return static_cast<int>(elements_.size()); }

    // linear combination sum_k c_k f_k
    GridFunction combine(const Eigen::VectorXd& coeffs) const;

private:
    ExteriorDictionary(NodeSet host, double radius) : host_(std::move(host)), radius_(radius) {}
    NodeSet host_;
    double radius_;
    std::vector<GridFunction> elements_;
    std::vector<std::array<double, 2>> centers_;
};

struct DNMatrix {
    Eigen::MatrixXd entries;   // row i = datum index, column j = test index
    bool adjoint = false;
};

DNMatrix assemble_dn(const ForwardProblem& problem, const ExteriorDictionary& data_dict,
                     const ExteriorDictionary& test_dict, const SolverOptions& options = {});
DNMatrix assemble_dn_adjoint(const ForwardProblem& problem, const ExteriorDictionary& data_dict,
                             const ExteriorDictionary& test_dict, const SolverOptions& options = {});

// max |DN[i][j] - DN*[j][i]| / max(1, max|DN|) over the dictionary pair
double check_duality(const ForwardProblem& problem, const ExteriorDictionary& d1,
                     const ExteriorDictionary& d2, const SolverOptions& options = {});

struct AlessandriniResult {
    double lhs;   // <(Lambda_1 - Lambda_2) f1, f2>, measured through both DN maps
    double rhs;   // sum_alpha <a_{1,alpha} - a_{2,alpha}, (D^alpha u1) u2*>
    double scale; // max(1, |lhs|)
};

AlessandriniResult alessandrini_identity(const ForwardProblem& p1, const ForwardProblem& p2,
                                         const GridFunction& f1, const GridFunction& f2,
                                         const SolverOptions& options = {});

} // namespace fraclab
