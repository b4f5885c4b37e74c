#include "fraclab/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab {

namespace {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

} // namespace

NodeSet::NodeSet(const Grid& grid, std::vector<std::uint8_t> mask, std::string label)
    : grid_(grid), mask_(std::move(mask)), label_(std::move(label)) {
    if (mask_.size() != grid_.node_count())
        throw std::invalid_argument("NodeSet: mask size does not match grid");
    for (std::size_t i = 0; i < mask_.size(); ++i)
        if (mask_[i]) nodes_.push_back(i);
    if (nodes_.empty())
        throw std::invalid_argument("NodeSet '" + label_ + "': empty set rejected");
}

bool NodeSet::is_subset_of(const NodeSet& other) const {
    if (!(grid_ == other.grid_)) return false;
    for (std::size_t i : nodes_)
        if (!other.mask_[i]) return false;
    return true;
}

bool NodeSet::disjoint_from(const NodeSet& other) const {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("NodeSet: grid mismatch");
    for (std::size_t i : nodes_)
        if (other.mask_[i]) return false;
    return true;
}

double NodeSet::distance_to(const NodeSet& other) const {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("NodeSet: grid mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : nodes_) {
        auto xi = grid_.node_coords(i);
        for (std::size_t j : other.nodes()) {
            double d2 = grid_.periodic_dist2(xi, grid_.node_coords(j));
            if (d2 < best) best = d2;
        }
    }
    return std::sqrt(best);
}

NodeSet make_ball_nodeset(const Grid& grid, const BallSpec& ball, const std::string& label) {
    if (!(ball.radius > 0.0))
        throw std::invalid_argument("make_ball_nodeset '" + label + "': radius must be positive");
    std::vector<std::uint8_t> mask(grid.node_count(), 0);
    const double r2 = ball.radius * ball.radius;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (grid.periodic_dist2(grid.node_coords(i), ball.center) <= r2) mask[i] = 1;
    return NodeSet(grid, std::move(mask), label);
}

NodeSet make_box_nodeset(const Grid& grid, const BoxSpec& box, const std::string& label) {
    for (int d = 0; d < grid.dim(); ++d)
        if (!(box.half_widths[d] > 0.0))
            throw std::invalid_argument("make_box_nodeset '" + label + "': half-widths must be positive");
    std::vector<std::uint8_t> mask(grid.node_count(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        auto x = grid.node_coords(i);
        bool inside = true;
        for (int d = 0; d < grid.dim(); ++d)
            if (std::abs(grid.periodic_delta(x[d], box.center[d])) > box.half_widths[d]) inside = false;
        if (inside) mask[i] = 1;
    }
    return NodeSet(grid, std::move(mask), label);
}

DomainLayout DomainLayout::create(const NodeSet& omega, const NodeSet& w1, const NodeSet& w2) {
    const Grid& g = omega.grid();
    if (!(w1.grid() == g) || !(w2.grid() == g))
        throw std::invalid_argument("DomainLayout: all sets must share one grid");
    const double min_gap = 2.0 * g.spacing();
    double sep = std::numeric_limits<double>::infinity();
    const NodeSet* sets[3] = {&omega, &w1, &w2};
    const char* names[3] = {"omega", "w1", "w2"};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            double d = sets[a]->distance_to(*sets[b]);
            if (d < min_gap)
                throw std::invalid_argument(std::string("DomainLayout: sets '") + names[a] + "' and '" +
                                            names[b] + "' are closer than 2h");
            sep = std::min(sep, d);
        }
    return DomainLayout{omega, w1, w2, sep};
}

GridFunction bump_field(const Grid& grid, const BumpSpec& spec, const NodeSet* owner) {
    if (!(spec.radius > 0.0))
        throw std::invalid_argument("bump_field: radius must be positive");
    GridFunction f(grid);
    const double r2 = spec.radius * spec.radius;
    double mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double d2 = grid.periodic_dist2(grid.node_coords(i), spec.center);
        double t2 = d2 / r2;
        if (t2 < 1.0) {
            double v = std::exp(-1.0 / (1.0 - t2));
            if (owner && !owner->contains(i))
                throw std::invalid_argument("bump_field: support escapes node set '" + owner->label() + "'");
            f[i] = v;
            mass += v;
        }
    }
    mass *= grid.cell_volume();
    if (mass <= 0.0)
        throw std::invalid_argument("bump_field: radius too small, bump vanishes on the grid");
    f *= 1.0 / mass;
    return f;
}

GridFunction monomial_cutoff(const Grid& grid, const MultiIndex& alpha, const BoxSpec& plateau,
                             double cutoff_width, const NodeSet& omega) {
    if (alpha.dim != grid.dim())
        throw std::invalid_argument("monomial_cutoff: multi-index dimension does not match grid");
    if (!(cutoff_width > 0.0))
        throw std::invalid_argument("monomial_cutoff: cutoff width must be positive");

    GridFunction f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = grid.node_coords(i);
        double window = 1.0;
        for (int d = 0; d < grid.dim(); ++d) {
            double lo = plateau.center[d] - plateau.half_widths[d];
            double hi = plateau.center[d] + plateau.half_widths[d];
            window *= smooth_step((x[d] - (lo - cutoff_width)) / cutoff_width) *
                      smooth_step(((hi + cutoff_width) - x[d]) / cutoff_width);
            if (window == 0.0) break;
        }
        if (window == 0.0) continue;
        if (!omega.contains(i))
            throw std::invalid_argument("monomial_cutoff: collar exits node set '" + omega.label() + "'");
        double mono = 1.0;
        for (int d = 0; d < grid.dim(); ++d)
            for (int p = 0; p < alpha.entries[d]; ++p) mono *= x[d];
        f[i] = mono * window;
    }
    return f;
}

std::vector<double> restrict_to(const GridFunction& u, const NodeSet& set) {
    if (!(u.grid() == set.grid())) throw std::invalid_argument("restrict_to: grid mismatch");
    std::vector<double> out(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) out[k] = u[set.nodes()[k]];
    return out;
}

GridFunction extend_by_zero(const std::vector<double>& values, const NodeSet& set) {
    if (values.size() != set.size())
        throw std::invalid_argument("extend_by_zero: value count does not match set");
    GridFunction u(set.grid());
    for (std::size_t k = 0; k < set.size(); ++k) u[set.nodes()[k]] = values[k];
    return u;
}

std::vector<std::size_t> support_nodes(const GridFunction& u, double tol) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > tol) out.push_back(i);
    return out;
}

} // namespace fraclab
