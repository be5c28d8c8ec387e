#pragma once

#include "cardioquant/mesh.hpp"
#include "cardioquant/volume.hpp"

#include <vector>

namespace cq {

// Trilinear interpolation at a physical position (mm). Grid corners that
// fall outside the volume contribute 0.
double trilinear(const Volume& vol, const Vec3& pos);

// Intensity profile along a vertex normal at several sample spacings.
struct Profile {
    int node_index = 0;
    std::vector<double> scales;                // mm, strictly increasing
    std::vector<std::vector<double>> samples;  // [scale][k + half_width]

    int half_width() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size() / 2); }
};

// samples[s][k + half_width] = vol(vertex + k * scales[s] * normal), k in [-half_width, half_width].
Profile sample_msp(const Volume& vol, const SurfaceMesh& mesh, int node, const std::vector<double>& scales,
                   int half_width);

// Per-vertex label read from `mask` along the vertex normal: among the
// labelled voxels crossed by the segment vertex +/- radius * normal, the one
// whose center is nearest to the vertex wins; ties go to the voxel further
// along +normal. Vertices with no labelled voxel in range get 0.
std::vector<int> project_labels_to_surface(const Volume& mask, const SurfaceMesh& mesh, double radius_mm = 3.0);

}  // namespace cq
