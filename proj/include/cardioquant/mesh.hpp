#pragma once

#include "cardioquant/volume.hpp"

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

namespace cq {

using Triangle = std::array<int, 3>;

struct SurfaceMesh {
    std::vector<Vec3> vertices;    // mm
    std::vector<Triangle> triangles;
    std::vector<Vec3> normals;     // one unit vector per vertex, may be empty before vertex_normals()

    std::size_t vertex_count() const noexcept { return vertices.size(); }

    // Index range and (when present) unit-length normals.
    void validate() const;
};

using Edge = std::pair<int, int>;  // first < second

// Isosurface of a binary mask at 0.5. The grid is padded by one background
// voxel on every side, so foreground touching the border still closes.
// Triangles wind counter-clockwise seen from the background side.
SurfaceMesh extract_isosurface(const Volume& mask);

// Area-weighted average of incident face normals, normalized.
SurfaceMesh vertex_normals(SurfaceMesh mesh);

// Sorted list of unique undirected edges.
std::vector<Edge> unique_edges(const SurfaceMesh& mesh);

// Every undirected edge used by exactly two triangles, in opposite directions.
bool is_closed_and_oriented(const SurfaceMesh& mesh);

long euler_characteristic(const SurfaceMesh& mesh);

// Signed enclosed volume (divergence theorem); positive for outward winding.
double enclosed_volume(const SurfaceMesh& mesh);

// Wavefront OBJ subset: v, vn and f lines.
void write_obj(const std::filesystem::path& path, const SurfaceMesh& mesh);
SurfaceMesh read_obj(const std::filesystem::path& path);

// Small vector helpers shared across modules.
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a);

}  // namespace cq
