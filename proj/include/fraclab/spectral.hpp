// Spectral calculus on the periodic grid.
//
// With u_hat(k) = N^{-n} sum_j u(x_j) exp(-2*pi*i j.k/N) and xi_k = pi*k/L
// (k signed), the operators here act diagonally on u_hat:
//
//   (-Delta)^s   :  |xi|^{2s}            (s = 0 is the identity)
//   J^r          :  (1 + |xi|^2)^{r/2}   (Bessel potential)
//   D^alpha      :  prod_d (i xi_d)^{alpha_d},  Nyquist column zeroed on
//                   differentiated axes so the result stays real
//
// Norms: ||u||_{L2}^2 = h^n sum_j u_j^2, ||u||_{H^r} = ||J^r u||_{L2}.
// The pairing is bilinear (no conjugation): <u, v> = h^n sum_j u_j v_j.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

// DFT with 1/N^n on the forward direction; inverse drops imaginary parts.
std::vector<std::complex<double>> forward_transform(const GridFunction& u);
GridFunction inverse_transform(const Grid& grid, const std::vector<std::complex<double>>& spectrum);

GridFunction frac_laplacian(const GridFunction& u, double s);
GridFunction bessel_potential(const GridFunction& u, double r);
GridFunction derivative(const GridFunction& u, const MultiIndex& alpha);

double l2_norm(const GridFunction& u);
double sobolev_norm(const GridFunction& u, double r);
double pairing(const GridFunction& u, const GridFunction& v);

// smooth random field: J^{-decay} applied to white noise from the caller's
// generator, normalized to unit L2 norm
GridFunction random_smooth_field(const Grid& grid, std::mt19937_64& rng, double decay);

} // namespace fraclab
