#include "cardioquant/sampling.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cq {

double trilinear(const Volume& vol, const Vec3& pos)
{
    const auto& sp = vol.spacing();
    const double gx = pos[0] / sp[0], gy = pos[1] / sp[1], gz = pos[2] / sp[2];
    const double fx = std::floor(gx), fy = std::floor(gy), fz = std::floor(gz);
    const double tx = gx - fx, ty = gy - fy, tz = gz - fz;
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy), z0 = static_cast<int>(fz);

    const auto read = [&](int x, int y, int z) { return vol.inside(x, y, z) ? vol.at(x, y, z) : 0.0; };
    const double c00 = read(x0, y0, z0) * (1 - tx) + read(x0 + 1, y0, z0) * tx;
    const double c10 = read(x0, y0 + 1, z0) * (1 - tx) + read(x0 + 1, y0 + 1, z0) * tx;
    const double c01 = read(x0, y0, z0 + 1) * (1 - tx) + read(x0 + 1, y0, z0 + 1) * tx;
    const double c11 = read(x0, y0 + 1, z0 + 1) * (1 - tx) + read(x0 + 1, y0 + 1, z0 + 1) * tx;
    const double c0 = c00 * (1 - ty) + c10 * ty;
    const double c1 = c01 * (1 - ty) + c11 * ty;
    return c0 * (1 - tz) + c1 * tz;
}

Profile sample_msp(const Volume& vol, const SurfaceMesh& mesh, int node, const std::vector<double>& scales,
                   int half_width)
{
    require(node >= 0 && node < static_cast<int>(mesh.vertices.size()), ErrorKind::invalid_argument,
            "sample_msp: node index out of range");
    require(mesh.normals.size() == mesh.vertices.size(), ErrorKind::invalid_argument,
            "sample_msp: mesh has no vertex normals");
    require(!scales.empty() && half_width >= 0, ErrorKind::invalid_argument, "sample_msp: empty configuration");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        require(scales[i] > 0.0, ErrorKind::invalid_argument, "sample_msp: scales must be positive");
        if (i > 0)
            require(scales[i] > scales[i - 1], ErrorKind::invalid_argument,
                    "sample_msp: scales must be strictly increasing");
    }

    Profile p;
    p.node_index = node;
    p.scales = scales;
    const Vec3& v = mesh.vertices[node];
    const Vec3& n = mesh.normals[node];
    for (double s : scales) {
        std::vector<double> row;
        row.reserve(2 * half_width + 1);
        for (int k = -half_width; k <= half_width; ++k) row.push_back(trilinear(vol, v + (k * s) * n));
        p.samples.push_back(std::move(row));
    }
    return p;
}

std::vector<int> project_labels_to_surface(const Volume& mask, const SurfaceMesh& mesh, double radius_mm)
{
    require(radius_mm >= 0.0, ErrorKind::invalid_argument, "projection radius must be non-negative");
    require(mesh.normals.size() == mesh.vertices.size(), ErrorKind::invalid_argument,
            "project_labels_to_surface: mesh has no vertex normals");
    const auto& sp = mask.spacing();
    const double step = 0.25 * std::min({sp[0], sp[1], sp[2]});
    const int steps = static_cast<int>(std::ceil(radius_mm / step));

    std::vector<int> labels(mesh.vertices.size(), 0);
    for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
        const Vec3& v = mesh.vertices[vi];
        const Vec3& n = mesh.normals[vi];
        std::set<std::size_t> seen;
        double best_dist = std::numeric_limits<double>::infinity();
        double best_along = -std::numeric_limits<double>::infinity();
        int best_label = 0;
        for (int k = -steps; k <= steps; ++k) {
            const double t = std::clamp(k * step, -radius_mm, radius_mm);
            const Vec3 p = v + t * n;
            const int x = static_cast<int>(std::lround(p[0] / sp[0]));
            const int y = static_cast<int>(std::lround(p[1] / sp[1]));
            const int z = static_cast<int>(std::lround(p[2] / sp[2]));
            if (!mask.inside(x, y, z)) continue;
            const std::size_t li = mask.linear(x, y, z);
            if (!seen.insert(li).second) continue;
            const double value = mask[li];
            if (value == 0.0) continue;
            const Vec3 c = mask.position(x, y, z);
            const double d = norm(c - v);
            const double along = dot(c - v, n);
            if (d < best_dist || (d == best_dist && along > best_along)) {
                best_dist = d;
                best_along = along;
                best_label = static_cast<int>(value);
            }
        }
        labels[vi] = best_label;
    }
    return labels;
}

}  // namespace cq
