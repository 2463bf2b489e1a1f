#include "topobias/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topobias {

UniformGrid::UniformGrid(std::span<const Point> points, double side, double cell_size)
    : points_(points), cell_(cell_size) {
    if (!(side > 0.0) || !(cell_size > 0.0))
        throw std::invalid_argument("UniformGrid: side and cell size must be positive");
    dims_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(side / cell_)));

    std::vector<std::uint32_t> counts(dims_ * dims_ + 1, 0);
    for (const Point& p : points_) ++counts[cell_of(p) + 1];
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    bucket_start_ = counts;

    ids_.resize(points_.size());
    std::vector<std::uint32_t> cursor(bucket_start_.begin(), bucket_start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i)
        ids_[cursor[cell_of(points_[i])]++] = static_cast<std::uint32_t>(i);
}

std::size_t UniformGrid::cell_of(const Point& p) const {
    auto clamp_axis = [this](double v) {
        if (v <= 0.0) return std::size_t{0};
        std::size_t c = static_cast<std::size_t>(v / cell_);
        return std::min(c, dims_ - 1);
    };
    return clamp_axis(p.y) * dims_ + clamp_axis(p.x);
}

void UniformGrid::gather_within(std::size_t a, double r, std::vector<std::uint32_t>& out) const {
    const Point& p = points_[a];
    const double r2 = r * r;
    const std::size_t cx = std::min(dims_ - 1, static_cast<std::size_t>(std::max(0.0, p.x) / cell_));
    const std::size_t cy = std::min(dims_ - 1, static_cast<std::size_t>(std::max(0.0, p.y) / cell_));
    const std::size_t x0 = (cx > 0) ? cx - 1 : 0;
    const std::size_t y0 = (cy > 0) ? cy - 1 : 0;
    const std::size_t x1 = std::min(dims_ - 1, cx + 1);
    const std::size_t y1 = std::min(dims_ - 1, cy + 1);
    for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
            const std::size_t c = y * dims_ + x;
            for (std::uint32_t k = bucket_start_[c]; k < bucket_start_[c + 1]; ++k) {
                const std::uint32_t j = ids_[k];
                if (j == a) continue;
                const double dx = points_[j].x - p.x;
                const double dy = points_[j].y - p.y;
                if (dx * dx + dy * dy < r2) out.push_back(j);
            }
        }
    }
}

}  // namespace topobias
