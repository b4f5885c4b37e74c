// Uniform periodic grids on the box [-L, L)^n, n in {1, 2}, and the fields
// living on them. Nodes are x_j = -L + j*h per axis with h = 2L/N; storage is
// row-major (axis 0 slowest). The frequency lattice attached to the grid is
// xi_k = pi*k/L for signed k in {-N/2, ..., N/2 - 1}.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fraclab {

class Grid {
public:
    Grid(int dim, int points_per_axis, double half_length);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_points_; }
    double half_length() const { return half_length_; }
    double spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }
    std::size_t node_count() const { return node_count_; }

    // coordinate of node j on one axis
    double axis_coord(int j) const { return -half_length_ + spacing_ * j; }

    // signed frequency index for storage index k in [0, N)
    int signed_index(int k) const { return k < n_points_ / 2 ? k : k - n_points_; }
    // xi component for storage index k
    double frequency(int k) const;

    std::array<int, 2> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::array<int, 2>& idx) const;
    std::array<double, 2> node_coords(std::size_t flat) const;

    // shortest periodic displacement from b to a along one axis
    double periodic_delta(double a, double b) const;
    // squared minimum-image distance between two points
    double periodic_dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && n_points_ == o.n_points_ && half_length_ == o.half_length_;
    }

private:
    int dim_;
    int n_points_;
    double half_length_;
    double spacing_;
    double cell_volume_;
    std::size_t node_count_;
};

class GridFunction {
public:
    explicit GridFunction(const Grid& grid);
    GridFunction(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    bool all_finite() const;
    double max_abs() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

private:
    Grid grid_;
    std::vector<double> values_;
};

// pointwise product, same grid required
GridFunction hadamard(const GridFunction& a, const GridFunction& b);

struct MultiIndex {
    std::array<int, 2> entries{0, 0};
    int dim = 1;

    static MultiIndex zero(int dim) { return MultiIndex{{0, 0}, dim}; }
    static MultiIndex of(int dim, int a0, int a1 = 0);

    int order() const { return entries[0] + (dim > 1 ? entries[1] : 0); }
    double factorial() const;

    bool operator==(const MultiIndex& o) const { return dim == o.dim && entries == o.entries; }
    // order-then-lexicographic; fixes deterministic iteration of coefficient maps
    bool operator<(const MultiIndex& o) const;
};

// all multi-indices of dimension dim with order <= m, sorted order-then-lex
std::vector<MultiIndex> multi_indices_up_to(int dim, int m);

} // namespace fraclab
