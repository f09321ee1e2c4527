// SPDX-License-Identifier: Apache-2.0
#include "lioulab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace lioulab {

BoxDomain::BoxDomain(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> cells_)
    : n(static_cast<int>(lo_.size())), lo(std::move(lo_)), hi(std::move(hi_)),
      cells(std::move(cells_)) {
    if (n == 0 || hi.size() != lo.size() || cells.size() != lo.size())
        throw std::invalid_argument("box domain needs matching lo/hi/cells");
    h.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (!(lo[js] < hi[js])) throw std::invalid_argument("box needs lo < hi componentwise");
        if (cells[js] < 2) throw std::invalid_argument("box needs at least 2 cells per axis");
        h[js] = (hi[js] - lo[js]) / cells[js];
    }
}

BoxDomain BoxDomain::cube(int n, double halfwidth, double hh) {
    if (n <= 0 || halfwidth <= 0.0 || hh <= 0.0) throw std::invalid_argument("bad cube spec");
    const double m = 2.0 * halfwidth / hh;
    const int cells = static_cast<int>(std::lround(m));
    if (std::abs(m - cells) > 1e-9)
        throw std::invalid_argument("cube extent must be an integer multiple of h");
    return BoxDomain(std::vector<double>(static_cast<std::size_t>(n), -halfwidth),
                     std::vector<double>(static_cast<std::size_t>(n), halfwidth),
                     std::vector<int>(static_cast<std::size_t>(n), cells));
}

std::int64_t BoxDomain::node_count() const {
    std::int64_t c = 1;
    for (int j = 0; j < n; ++j) c *= cells[static_cast<std::size_t>(j)] + 1;
    return c;
}

std::int64_t BoxDomain::interior_count() const {
    std::int64_t c = 1;
    for (int j = 0; j < n; ++j) c *= cells[static_cast<std::size_t>(j)] - 1;
    return c;
}

std::int64_t BoxDomain::node_id(std::span<const int> idx) const {
    std::int64_t id = 0;
    for (int j = 0; j < n; ++j)
        id = id * (cells[static_cast<std::size_t>(j)] + 1) + idx[static_cast<std::size_t>(j)];
    return id;
}

void BoxDomain::node_index(std::int64_t id, std::span<int> idx) const {
    for (int j = n - 1; j >= 0; --j) {
        const std::int64_t base = cells[static_cast<std::size_t>(j)] + 1;
        idx[static_cast<std::size_t>(j)] = static_cast<int>(id % base);
        id /= base;
    }
}

bool BoxDomain::is_interior(std::span<const int> idx) const {
    for (int j = 0; j < n; ++j) {
        const int i = idx[static_cast<std::size_t>(j)];
        if (i <= 0 || i >= cells[static_cast<std::size_t>(j)]) return false;
    }
    return true;
}

void BoxDomain::coordinates(std::span<const int> idx, std::span<double> x) const {
    for (int j = 0; j < n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        x[js] = lo[js] + h[js] * idx[js];
    }
}

std::int64_t BoxDomain::interior_row(std::span<const int> idx) const {
    std::int64_t id = 0;
    for (int j = 0; j < n; ++j)
        id = id * (cells[static_cast<std::size_t>(j)] - 1) +
             (idx[static_cast<std::size_t>(j)] - 1);
    return id;
}

void BoxDomain::interior_index(std::int64_t row, std::span<int> idx) const {
    for (int j = n - 1; j >= 0; --j) {
        const std::int64_t base = cells[static_cast<std::size_t>(j)] - 1;
        idx[static_cast<std::size_t>(j)] = static_cast<int>(row % base) + 1;
        row /= base;
    }
}

BoxDomain BoxDomain::refined() const {
    std::vector<int> c2 = cells;
    for (int& c : c2) c *= 2;
    return BoxDomain(lo, hi, std::move(c2));
}

bool GridField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

void GridField::fill(const std::function<double(std::span<const double>)>& fn) {
    std::vector<int> idx(static_cast<std::size_t>(domain.n));
    std::vector<double> x(static_cast<std::size_t>(domain.n));
    for (std::int64_t id = 0; id < domain.node_count(); ++id) {
        domain.node_index(id, idx);
        domain.coordinates(idx, x);
        values[static_cast<std::size_t>(id)] = fn(x);
    }
}

void GridField::fill_boundary(const std::function<double(std::span<const double>)>& fn) {
    std::vector<int> idx(static_cast<std::size_t>(domain.n));
    std::vector<double> x(static_cast<std::size_t>(domain.n));
    for (std::int64_t id = 0; id < domain.node_count(); ++id) {
        domain.node_index(id, idx);
        if (domain.is_interior(idx)) continue;
        domain.coordinates(idx, x);
        values[static_cast<std::size_t>(id)] = fn(x);
    }
}

int clamped_interpolation(const BoxDomain& dom, std::span<const double> p,
                          std::span<std::int64_t> ids, std::span<double> weights) {
    constexpr double kSnap = 1e-12;
    // Per-axis base index and fractional offset, clamped into the box.
    int base[8];
    double theta[8];
    int frac_axes[8];
    int num_frac = 0;
    if (dom.n > 8) throw std::invalid_argument("interpolation supports up to 8 axes");
    for (int j = 0; j < dom.n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        double s = (p[js] - dom.lo[js]) / dom.h[js];
        if (s < 0.0) s = 0.0;
        const double smax = static_cast<double>(dom.cells[js]);
        if (s > smax) s = smax;
        int b = static_cast<int>(s);
        if (b >= dom.cells[js]) b = dom.cells[js] - 1;
        double t = s - b;
        if (t < kSnap) t = 0.0;
        if (t > 1.0 - kSnap) {
            t = 0.0;
            ++b;
        }
        base[j] = b;
        theta[j] = t;
        if (t != 0.0) frac_axes[num_frac++] = j;
    }
    const int count = 1 << num_frac;
    int idx[8];
    for (int mask = 0; mask < count; ++mask) {
        double w = 1.0;
        for (int j = 0; j < dom.n; ++j) idx[j] = base[j];
        for (int a = 0; a < num_frac; ++a) {
            const int j = frac_axes[a];
            if (mask & (1 << a)) {
                idx[j] += 1;
                w *= theta[j];
            } else {
                w *= 1.0 - theta[j];
            }
        }
        ids[static_cast<std::size_t>(mask)] = dom.node_id(std::span<const int>(idx, static_cast<std::size_t>(dom.n)));
        weights[static_cast<std::size_t>(mask)] = w;
    }
    return count;
}

}  // namespace lioulab
