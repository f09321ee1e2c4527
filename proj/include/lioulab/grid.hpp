// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lioulab {

/// Axis-aligned box with a uniform tensor grid; nodes are lo + i*h per axis,
/// i = 0..cells. Interior/boundary classification is total and disjoint.
struct BoxDomain {
    int n = 0;
    std::vector<double> lo, hi;
    std::vector<int> cells;
    std::vector<double> h;

    BoxDomain() = default;
    BoxDomain(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> cells_);

    /// The cube (-halfwidth, halfwidth)^n with spacing hh (2*halfwidth/hh
    /// must be an integer within rounding).
    static BoxDomain cube(int n, double halfwidth, double hh);

    std::int64_t node_count() const;
    std::int64_t interior_count() const;

    std::int64_t node_id(std::span<const int> idx) const;
    void node_index(std::int64_t id, std::span<int> idx) const;
    bool is_interior(std::span<const int> idx) const;
    void coordinates(std::span<const int> idx, std::span<double> x) const;

    /// Row numbering of interior nodes (lexicographic over the interior
    /// lattice). Requires an interior index.
    std::int64_t interior_row(std::span<const int> idx) const;
    void interior_index(std::int64_t row, std::span<int> idx) const;

    /// Refined copy with every cell split in two.
    BoxDomain refined() const;
};

/// One scalar value per grid node.
struct GridField {
    BoxDomain domain;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(BoxDomain dom)
        : domain(std::move(dom)),
          values(static_cast<std::size_t>(domain.node_count()), 0.0) {}

    double& at(std::int64_t id) { return values[static_cast<std::size_t>(id)]; }
    double at(std::int64_t id) const { return values[static_cast<std::size_t>(id)]; }

    bool all_finite() const;

    /// Fills every node with fn(x).
    void fill(const std::function<double(std::span<const double>)>& fn);
    /// Fills boundary nodes only.
    void fill_boundary(const std::function<double(std::span<const double>)>& fn);
};

/// Multilinear interpolation stencil of a point with every coordinate
/// clamped onto the closed box, so only real grid nodes are referenced and
/// all weights are nonnegative and sum to 1. Returns the entry count
/// (at most 2^n); ids/weights must hold that many.
int clamped_interpolation(const BoxDomain& dom, std::span<const double> p,
                          std::span<std::int64_t> ids, std::span<double> weights);

}  // namespace lioulab
