#include "fraclab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fraclab {

namespace {

// one cached plan pair per (dim, N); executed via the new-array interface on
// caller buffers, so plans are shared across threads. FFTW_ESTIMATE keeps the
// chosen algorithm independent of runtime timings (bitwise reproducibility),
// FFTW_UNALIGNED lets us execute on plain vector storage.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const Grid& grid) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(grid.dim(), grid.points_per_axis());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = grid.points_per_axis();
    int dims[2] = {n, n};
    std::vector<std::complex<double>> a(grid.node_count()), b(grid.node_count());
    PlanPair p;
    p.fwd = fftw_plan_dft(grid.dim(), dims,
                          reinterpret_cast<fftw_complex*>(a.data()),
                          reinterpret_cast<fftw_complex*>(b.data()),
                          FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft(grid.dim(), dims,
                          reinterpret_cast<fftw_complex*>(a.data()),
                          reinterpret_cast<fftw_complex*>(b.data()),
                          FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(key, p).first->second;
}

void require_finite(const GridFunction& u, const char* who) {
    if (!u.all_finite())
        throw std::invalid_argument(std::string(who) + ": input has non-finite values");
}

// apply a diagonal spectral multiplier; sym(k_flat) sees the storage index
template <class Symbol>
GridFunction apply_symbol(const GridFunction& u, Symbol&& sym, const char* who) {
    require_finite(u, who);
    auto spectrum = forward_transform(u);
    const Grid& g = u.grid();
    const int n = g.points_per_axis();
    if (g.dim() == 1) {
        for (int k = 0; k < n; ++k) spectrum[k] *= sym(std::array<int, 2>{k, 0});
    } else {
        std::size_t flat = 0;
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1, ++flat) spectrum[flat] *= sym(std::array<int, 2>{k0, k1});
    }
    return inverse_transform(g, spectrum);
}

} // namespace

std::vector<std::complex<double>> forward_transform(const GridFunction& u) {
    require_finite(u, "forward_transform");
    const Grid& g = u.grid();
    std::vector<std::complex<double>> in(g.node_count()), out(g.node_count());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = u[i];
    fftw_execute_dft(plans_for(g).fwd,
                     reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(g.node_count());
    for (auto& c : out) c *= scale;
    return out;
}

GridFunction inverse_transform(const Grid& grid, const std::vector<std::complex<double>>& spectrum) {
    if (spectrum.size() != grid.node_count())
        throw std::invalid_argument("inverse_transform: spectrum size does not match grid");
    std::vector<std::complex<double>> in(spectrum), out(grid.node_count());
    fftw_execute_dft(plans_for(grid).bwd,
                     reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    GridFunction result(grid);
    for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real();
    return result;
}

GridFunction frac_laplacian(const GridFunction& u, double s) {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("frac_laplacian: order s must be finite and >= 0");
    const Grid& g = u.grid();
    if (s == 0.0) {
        require_finite(u, "frac_laplacian");
        return u;
    }
    return apply_symbol(u, [&](const std::array<int, 2>& k) {
        double q = 0.0;
        for (int d = 0; d < g.dim(); ++d) {
            double xi = g.frequency(k[d]);
            q += xi * xi;
        }
        return q == 0.0 ? 0.0 : std::pow(q, s);
    }, "frac_laplacian");
}

GridFunction bessel_potential(const GridFunction& u, double r) {
    if (!std::isfinite(r))
        throw std::invalid_argument("bessel_potential: order must be finite");
    const Grid& g = u.grid();
    return apply_symbol(u, [&](const std::array<int, 2>& k) {
        double q = 1.0;
        for (int d = 0; d < g.dim(); ++d) {
            double xi = g.frequency(k[d]);
            q += xi * xi;
        }
        return std::pow(q, 0.5 * r);
    }, "bessel_potential");
}

GridFunction derivative(const GridFunction& u, const MultiIndex& alpha) {
    const Grid& g = u.grid();
    if (alpha.dim != g.dim())
        throw std::invalid_argument("derivative: multi-index dimension does not match grid");
    if (alpha.entries[0] < 0 || alpha.entries[1] < 0)
        throw std::invalid_argument("derivative: multi-index entries must be nonnegative");
    if (alpha.order() == 0) {
        require_finite(u, "derivative");
        return u;
    }
    const int nyquist = g.points_per_axis() / 2;
    return apply_symbol(u, [&](const std::array<int, 2>& k) -> std::complex<double> {
        std::complex<double> sym(1.0, 0.0);
        for (int d = 0; d < g.dim(); ++d) {
            int a = alpha.entries[d];
            if (a == 0) continue;
            if (k[d] == nyquist) return {0.0, 0.0};
            std::complex<double> ixi(0.0, g.frequency(k[d]));
            for (int p = 0; p < a; ++p) sym *= ixi;
        }
        return sym;
    }, "derivative");
}

double l2_norm(const GridFunction& u) {
    double s = 0.0;
    for (double v : u.values()) s += v * v;
    return std::sqrt(u.grid().cell_volume() * s);
}

double sobolev_norm(const GridFunction& u, double r) {
    if (r == 0.0) return l2_norm(u);
    require_finite(u, "sobolev_norm");
    const Grid& g = u.grid();
    auto spectrum = forward_transform(u);
    const int n = g.points_per_axis();
    const double box_volume = std::pow(2.0 * g.half_length(), g.dim());
    double acc = 0.0;
    std::size_t flat = 0;
    for (int k0 = 0; k0 < n; ++k0) {
        if (g.dim() == 1) {
            double xi = g.frequency(k0);
            acc += std::pow(1.0 + xi * xi, r) * std::norm(spectrum[k0]);
        } else {
            double xi0 = g.frequency(k0);
            for (int k1 = 0; k1 < n; ++k1, ++flat) {
                double xi1 = g.frequency(k1);
                acc += std::pow(1.0 + xi0 * xi0 + xi1 * xi1, r) * std::norm(spectrum[flat]);
            }
        }
    }
    return std::sqrt(box_volume * acc);
}

double pairing(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid() == v.grid())) throw std::invalid_argument("pairing: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return u.grid().cell_volume() * s;
}

GridFunction random_smooth_field(const Grid& grid, std::mt19937_64& rng, double decay) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction noise(grid);
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = gauss(rng);
    GridFunction field = bessel_potential(noise, -decay);
    double nrm = l2_norm(field);
    if (nrm > 0.0) field *= 1.0 / nrm;
    return field;
}

} // namespace fraclab
