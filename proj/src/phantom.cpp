#include "cardioquant/phantom.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cq {

namespace {

double angle_between(const Vec3& a, const Vec3& b)
{
    const double c = dot(a, b) / (norm(a) * norm(b));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

CapPhantom make_cap_phantom(const CapPhantomConfig& config)
{
    require(config.radius_mm > 0.0 && config.wall_mm > 0.0, ErrorKind::invalid_argument,
            "phantom: radius and wall thickness must be positive");
    CapPhantom ph;
    ph.image = Volume::scalar(config.dims, config.spacing, config.normal_intensity);
    ph.la_mask = Volume::label(config.dims, config.spacing);
    ph.center = {0.5 * (config.dims[0] - 1) * config.spacing[0], 0.5 * (config.dims[1] - 1) * config.spacing[1],
                 0.5 * (config.dims[2] - 1) * config.spacing[2]};
    ph.axis = config.axis;
    if (config.seed != 0) {
        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> g(0.0, 1.0);
        do ph.axis = {g(rng), g(rng), g(rng)};
        while (norm(ph.axis) < 1e-6);
    }
    require(norm(ph.axis) > 0.0, ErrorKind::invalid_argument, "phantom: zero cap axis");
    ph.axis = (1.0 / norm(ph.axis)) * ph.axis;
    ph.cap_half_angle_rad = config.cap_half_angle_deg * std::numbers::pi / 180.0;

    for (std::size_t i = 0; i < ph.image.size(); ++i) {
        const Vec3 d = ph.image.position(i) - ph.center;
        const double r = norm(d);
        if (r <= config.radius_mm) {
            ph.la_mask[i] = 1.0;
        } else if (r <= config.radius_mm + config.wall_mm && angle_between(d, ph.axis) <= ph.cap_half_angle_rad) {
            ph.image[i] = config.scar_intensity;
        }
    }
    return ph;
}

Labeling cap_ground_truth(const CapPhantom& phantom, const SurfaceMesh& mesh)
{
    Labeling l(mesh.vertices.size(), 0);
    for (std::size_t i = 0; i < l.size(); ++i)
        l[i] = angle_between(mesh.vertices[i] - phantom.center, phantom.axis) <= phantom.cap_half_angle_rad ? 1 : 0;
    return l;
}

double labeling_dice(const Labeling& a, const Labeling& b)
{
    require(a.size() == b.size(), ErrorKind::shape, "labeling_dice: length mismatch");
    std::size_t sa = 0, sb = 0, inter = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i] != 0;
        sb += b[i] != 0;
        inter += a[i] != 0 && b[i] != 0;
    }
    require(sa + sb > 0, ErrorKind::empty, "labeling_dice: both labelings empty");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(sa + sb);
}

}  // namespace cq
