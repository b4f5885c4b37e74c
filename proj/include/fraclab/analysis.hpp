// Quantitative norm diagnostics. The Sobolev multiplier norm of a field f,
// ||f||_{r,t} = sup { <f, u v> : ||u||_{H^r} = ||v||_{H^{-t}} = 1 }, is
// realized as the largest singular value of the dense operator
// J^t M_f J^{-r} on the grid. Companions: the fractional Poincare constant
// on a node set, a Kato-Ponce product ratio, and the smallest singular value
// of the joint restriction [u|_V ; ((-Delta)^s u)|_V] (the quantity whose
// continuum positivity encodes unique continuation, and whose decay under
// refinement shows why the inverse problem is severely ill-posed).

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "fraclab/geometry.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

double multiplier_norm(const GridFunction& f, double r, double t);

// | ||f||_{r,t} - ||f||_{-t,-r} | / max(1, ||f||_{r,t})
double multiplier_symmetry_deviation(const GridFunction& f, double r, double t);

// ||f||_{r,t} <= ||f||_{r-lam,t+mu}, slack returned as (rhs - lhs)
double multiplier_monotonicity_slack(const GridFunction& f, double r, double t, double lam, double mu);

struct TrivialityScan {
    std::vector<int> resolutions;
    std::vector<double> norms;
    bool strictly_increasing;
    bool continuum_divergence_expected;   // set when r < t
};

// same field family instantiated on dyadic refinements of the base grid
TrivialityScan triviality_scan(const std::function<GridFunction(const Grid&)>& field_factory,
                               const Grid& base, double r, double t, int refinements);

// smallest c with ||v||_{L2} <= c ||(-Delta)^{s/2} v|| for v supported in K
double poincare_constant(const NodeSet& support, double s);

// ||J^s(fg)|| / (||J^s f||_inf ||g|| + ||f||_inf ||J^s g||), 0 for f = g = 0
double kato_ponce_ratio(const GridFunction& f, const GridFunction& g, double s);

double ucp_smallest_singular_value(const NodeSet& window, double s);

} // namespace fraclab
