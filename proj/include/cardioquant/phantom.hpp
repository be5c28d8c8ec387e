#pragma once

#include "cardioquant/mesh.hpp"
#include "cardioquant/scargraph.hpp"
#include "cardioquant/volume.hpp"

#include <cstdint>

namespace cq {

// Noise-free sphere phantom: a spherical LA cavity whose wall shell is
// bright inside a cone around `axis` (the scar cap) and dark elsewhere.
struct CapPhantomConfig {
    Dims dims{40, 40, 40};
    Spacing spacing{1.0, 1.0, 1.0};
    double radius_mm = 12.0;
    double wall_mm = 3.0;
    double cap_half_angle_deg = 50.0;
    double normal_intensity = 10.0;
    double scar_intensity = 100.0;
    Vec3 axis{0.0, 0.0, 1.0};
    std::uint64_t seed = 0;  // non-zero: draw a random cap axis instead of `axis`
};

struct CapPhantom {
    Volume image;
    Volume la_mask;
    Vec3 center{};
    Vec3 axis{};
    double cap_half_angle_rad = 0.0;
};

CapPhantom make_cap_phantom(const CapPhantomConfig& config);

// 1 for vertices whose direction from the center lies inside the cap cone.
Labeling cap_ground_truth(const CapPhantom& phantom, const SurfaceMesh& mesh);

// Vertex-label Dice (label 1).
double labeling_dice(const Labeling& a, const Labeling& b);

}  // namespace cq
