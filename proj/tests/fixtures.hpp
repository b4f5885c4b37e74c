// Shared 1-D test geometry: interior ball at the origin, two exterior boxes
// left and right, all on the torus [-4, 4). Everything fits with >= 2h gaps
// for N >= 32.

#pragma once

#include <cmath>

#include "fraclab/geometry.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/operator.hpp"

namespace testfix {

using namespace fraclab;

inline Grid grid1d(int n, double half_length = 4.0) { return Grid(1, n, half_length); }

inline DomainLayout layout1d(const Grid& g, double omega_radius = 1.0) {
    NodeSet omega = make_ball_nodeset(g, BallSpec{{0.0, 0.0}, omega_radius}, "omega");
    NodeSet w1 = make_box_nodeset(g, BoxSpec{{2.3, 0.0}, {0.9, 0.0}}, "w1");
    NodeSet w2 = make_box_nodeset(g, BoxSpec{{-2.3, 0.0}, {0.9, 0.0}}, "w2");
    return DomainLayout::create(omega, w1, w2);
}

// peak-normalized smooth bump, the shape used for coefficient fields
inline GridFunction profile_bump(const Grid& g, double center, double radius, double amplitude) {
    GridFunction f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double d = g.periodic_delta(g.node_coords(i)[0], center);
        double t2 = d * d / (radius * radius);
        if (t2 < 1.0) f[i] = amplitude * std::exp(1.0 - 1.0 / (1.0 - t2));
    }
    return f;
}

inline PDOCoefficients coeffs_m0(const Grid& g, double amplitude = 0.3) {
    PDOCoefficients c(1);
    c.set(MultiIndex::of(1, 0), profile_bump(g, 0.2, 0.5, amplitude));
    return c;
}

inline PDOCoefficients coeffs_m1(const Grid& g, double a0 = 0.3, double a1 = 0.2) {
    PDOCoefficients c(1);
    c.set(MultiIndex::of(1, 0), profile_bump(g, 0.2, 0.5, a0));
    c.set(MultiIndex::of(1, 1), profile_bump(g, -0.2, 0.5, a1));
    return c;
}

inline ForwardProblem problem1d(const Grid& g, const DomainLayout& d, int order, double s = 0.7) {
    PDOCoefficients c = order == 0 ? coeffs_m0(g) : coeffs_m1(g);
    return ForwardProblem(g, s, std::move(c), d.omega);
}

inline ForwardProblem free1d(const Grid& g, const DomainLayout& d, double s = 0.7) {
    return ForwardProblem(g, s, PDOCoefficients(1), d.omega);
}

} // namespace testfix
