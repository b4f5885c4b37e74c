// Geometry bookkeeping: labeled node sets (the interior region and the two
// exterior observation windows), compactly supported test fields, and the
// restriction / zero-extension maps between the full grid and a node set.
//
// The smooth profiles are built from b(t) = exp(-1/t) (t > 0):
//   step  S(t) = b(t) / (b(t) + b(1-t))   -- exactly 0 for t <= 0, 1 for t >= 1
//   bump  exp(-1/(1 - |x-c|^2/rho^2))     -- normalized to unit discrete mass

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

struct BallSpec {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;
};

struct BoxSpec {
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> half_widths{0.0, 0.0};
};

class NodeSet {
public:
    NodeSet(const Grid& grid, std::vector<std::uint8_t> mask, std::string label);

    const Grid& grid() const { return grid_; }
    const std::string& label() const { return label_; }
    const std::vector<std::size_t>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool contains(std::size_t flat) const { return mask_[flat] != 0; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    bool is_subset_of(const NodeSet& other) const;
    bool disjoint_from(const NodeSet& other) const;
    // minimum-image distance between node coordinates of the two sets
    double distance_to(const NodeSet& other) const;

private:
    Grid grid_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::size_t> nodes_;
    std::string label_;
};

NodeSet make_ball_nodeset(const Grid& grid, const BallSpec& ball, const std::string& label);
NodeSet make_box_nodeset(const Grid& grid, const BoxSpec& box, const std::string& label);

// interior region + two observation windows, pairwise separated by >= 2h
struct DomainLayout {
    NodeSet omega;
    NodeSet w1;
    NodeSet w2;
    double min_separation;

    static DomainLayout create(const NodeSet& omega, const NodeSet& w1, const NodeSet& w2);
};

struct BumpSpec {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;
};

// unit-mass C^inf bump; support must stay inside `owner` if given
GridFunction bump_field(const Grid& grid, const BumpSpec& spec, const NodeSet* owner = nullptr);

// x^alpha on the plateau box, eased to zero over a collar of width
// cutoff_width; support (plateau + collar) must stay inside omega
GridFunction monomial_cutoff(const Grid& grid, const MultiIndex& alpha, const BoxSpec& plateau,
                             double cutoff_width, const NodeSet& omega);

std::vector<double> restrict_to(const GridFunction& u, const NodeSet& set);
GridFunction extend_by_zero(const std::vector<double>& values, const NodeSet& set);

// mask of nodes where |u| exceeds tol
std::vector<std::size_t> support_nodes(const GridFunction& u, double tol = 0.0);

} // namespace fraclab
