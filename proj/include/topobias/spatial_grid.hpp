#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "topobias/topology.hpp"

namespace topobias {

// Uniform bucket grid over [0, side]^2. With cell size >= query radius every
// node within the radius of a query point lies in the 3x3 cell block around
// it, so range queries touch at most nine buckets.
class UniformGrid {
public:
    UniformGrid(std::span<const Point> points, double side, double cell_size);

    // Appends ids j != a with distance(points[a], points[j]) < r to `out`.
    // Order is bucket-major, ascending id within a bucket; callers that need
    // sorted ids must sort. r must not exceed the cell size.
    void gather_within(std::size_t a, double r, std::vector<std::uint32_t>& out) const;

private:
    std::size_t cell_of(const Point& p) const;

    std::span<const Point> points_;
    double cell_ = 0.0;
    std::size_t dims_ = 0;
    std::vector<std::uint32_t> bucket_start_;  // CSR offsets, dims_^2 + 1 entries
    std::vector<std::uint32_t> ids_;           // node ids grouped by bucket
};

}  // namespace topobias
