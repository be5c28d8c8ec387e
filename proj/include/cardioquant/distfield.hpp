#pragma once

#include "cardioquant/volume.hpp"

#include <vector>

namespace cq {

// Signed distance map: 0 on the boundary set S, -d^beta strictly inside,
// +d^beta outside, d the Euclidean distance (mm) to the nearest S voxel center.
struct DistanceField {
    Volume grid;
    double beta = 1.0;
};

// S: foreground voxels with a background 6-neighbour (outside the grid counts
// as background), the same contour used by boundary_points().
std::vector<bool> boundary_set(const Volume& mask);

// Exact squared Euclidean distance (mm^2) from every voxel to the nearest
// voxel flagged in `features`, by separable lower envelopes of parabolas.
// Voxels get +inf when no feature exists.
std::vector<double> squared_edt(const Volume& grid, const std::vector<bool>& features);

DistanceField signed_dtm(const Volume& mask, double beta = 1.0);

// Pointwise exp(-|phi|).
Volume prob_from_dtm(const DistanceField& phi);

}  // namespace cq
