#include "fraclab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

Grid::Grid(int dim, int points_per_axis, double half_length)
    : dim_(dim), n_points_(points_per_axis), half_length_(half_length) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (points_per_axis < 16 || points_per_axis % 2 != 0)
        throw std::invalid_argument("Grid: points per axis must be even and >= 16");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("Grid: box half-length must be positive and finite");
    spacing_ = 2.0 * half_length_ / n_points_;
    cell_volume_ = dim_ == 1 ? spacing_ : spacing_ * spacing_;
    node_count_ = 1;
    for (int d = 0; d < dim_; ++d) node_count_ *= static_cast<std::size_t>(n_points_);
}

double Grid::frequency(int k) const {
    constexpr double pi = 3.14159265358979323846;
    return pi * signed_index(k) / half_length_;
}

std::array<int, 2> Grid::unflatten(std::size_t flat) const {
    if (dim_ == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat / n_points_), static_cast<int>(flat % n_points_)};
}

std::size_t Grid::flatten(const std::array<int, 2>& idx) const {
    if (dim_ == 1) return static_cast<std::size_t>(idx[0]);
    return static_cast<std::size_t>(idx[0]) * n_points_ + idx[1];
}

std::array<double, 2> Grid::node_coords(std::size_t flat) const {
    auto idx = unflatten(flat);
    return {axis_coord(idx[0]), dim_ == 2 ? axis_coord(idx[1]) : 0.0};
}

double Grid::periodic_delta(double a, double b) const {
    const double box = 2.0 * half_length_;
    double d = std::remainder(a - b, box);
    return d;
}

double Grid::periodic_dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) const {
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) {
        double dd = periodic_delta(a[d], b[d]);
        s += dd * dd;
    }
    return s;
}

GridFunction::GridFunction(const Grid& grid)
    : grid_(grid), values_(grid.node_count(), 0.0) {}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

bool GridFunction::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("GridFunction: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("GridFunction: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("hadamard: grid mismatch");
    GridFunction out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

MultiIndex MultiIndex::of(int dim, int a0, int a1) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("MultiIndex: dim must be 1 or 2");
    if (a0 < 0 || a1 < 0) throw std::invalid_argument("MultiIndex: entries must be nonnegative");
    if (dim == 1 && a1 != 0) throw std::invalid_argument("MultiIndex: second entry requires dim 2");
    return MultiIndex{{a0, a1}, dim};
}

double MultiIndex::factorial() const {
    auto fact = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    return fact(entries[0]) * (dim > 1 ? fact(entries[1]) : 1.0);
}

bool MultiIndex::operator<(const MultiIndex& o) const {
    if (order() != o.order()) return order() < o.order();
    return entries < o.entries;
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int m) {
    std::vector<MultiIndex> out;
    if (dim == 1) {
        for (int a = 0; a <= m; ++a) out.push_back(MultiIndex::of(1, a));
    } else {
        for (int n = 0; n <= m; ++n)
            for (int a0 = 0; a0 <= n; ++a0) out.push_back(MultiIndex::of(2, a0, n - a0));
    }
    return out;
}

} // namespace fraclab
