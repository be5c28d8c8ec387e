#pragma once

#include "cardioquant/volume.hpp"

#include <cstdint>
#include <vector>

namespace cq {

using PointSet = std::vector<Vec3>;

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
};

// Physical centers of foreground voxels with at least one background
// 6-neighbour. Neighbours outside the grid count as background.
PointSet boundary_points(const Volume& mask);

// Dice over non-zero voxels. Throws when both masks are empty.
double dice(const Volume& seg, const Volume& gd);

// Dice restricted to voxels equal to `label`.
double dice(const Volume& seg, const Volume& gd, int label);

// Generalized Dice pooled over `labels`.
double gdice(const Volume& seg, const Volume& gd, const std::vector<int>& labels);

// Voxelwise counts treating non-zero as positive.
ConfusionCounts confusion(const Volume& seg, const Volume& gd);

double accuracy(const ConfusionCounts& c);

// Exact symmetric Hausdorff distance (mm).
double hausdorff(const PointSet& x, const PointSet& y);

// Average surface distance: mean of the two directed mean nearest distances.
double asd(const PointSet& x, const PointSet& y);

// Nearest-neighbour distance from every point of `from` to the set `to`.
std::vector<double> nearest_distances(const PointSet& from, const PointSet& to);

}  // namespace cq
