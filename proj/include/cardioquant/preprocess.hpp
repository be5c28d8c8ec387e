#pragma once

#include "cardioquant/volume.hpp"

namespace cq {

// Standardize to zero mean and unit population standard deviation.
// Throws for label volumes and for constant input.
Volume zscore_normalize(const Volume& vol);

// Extract a `size` box whose first voxel is `center - size/2` (integer
// division). Voxels outside the source grid read 0. Spacing is preserved.
Volume crop_roi(const Volume& vol, Index3 center, Index3 size);

enum class Connectivity { six = 6, twenty_six = 26 };

// Keep only the largest connected component of `label`; other components of
// that label are set to 0, all other labels are untouched. Equal sizes keep
// the component reached first in linear (x-fastest) scan order.
Volume largest_component(const Volume& mask, int label, Connectivity conn = Connectivity::six);

// Background regions not 6-connected to the grid border become foreground (1).
Volume fill_holes(const Volume& mask);

// Number of connected components of voxels equal to `label`.
std::size_t count_components(const Volume& mask, int label, Connectivity conn = Connectivity::six);

}  // namespace cq
