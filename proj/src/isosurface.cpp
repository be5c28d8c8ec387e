#include "cardioquant/error.hpp"
#include "cardioquant/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace cq {

namespace {

// Corner c of the unit cube sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1).
constexpr std::array<std::array<int, 2>, 12> kEdgeCorners{{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // along x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // along y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // along z
}};

// Corners of each face in cyclic order.
constexpr std::array<std::array<int, 4>, 6> kFaceCorners{{
    {0, 2, 6, 4}, {1, 3, 7, 5},  // x = 0, x = 1
    {0, 1, 5, 4}, {2, 3, 7, 6},  // y = 0, y = 1
    {0, 1, 3, 2}, {4, 5, 7, 6},  // z = 0, z = 1
}};

Vec3 corner_pos(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

int edge_between(int a, int b)
{
    for (int e = 0; e < 12; ++e) {
        const auto& ec = kEdgeCorners[e];
        if ((ec[0] == a && ec[1] == b) || (ec[0] == b && ec[1] == a)) return e;
    }
    return -1;
}

Vec3 edge_mid(int e)
{
    return 0.5 * (corner_pos(kEdgeCorners[e][0]) + corner_pos(kEdgeCorners[e][1]));
}

using Loop = std::vector<int>;  // cube edge ids, outward winding
using CaseTable = std::array<std::vector<Loop>, 256>;

// Builds the 256-case table by tracing the iso-segments on the six faces.
// On a face with two diagonal foreground corners each foreground corner is
// cut off on its own, the same choice for both cubes sharing the face, so
// neighbouring polygons always meet edge to edge.
CaseTable build_case_table()
{
    CaseTable table;
    for (int config = 1; config < 255; ++config) {
        const auto fg = [config](int c) { return ((config >> c) & 1) != 0; };

        std::array<std::vector<int>, 12> adj;
        for (const auto& face : kFaceCorners) {
            std::array<int, 4> fedge{};
            for (int k = 0; k < 4; ++k) fedge[k] = edge_between(face[k], face[(k + 1) % 4]);
            std::vector<int> crossing;
            for (int k = 0; k < 4; ++k)
                if (fg(face[k]) != fg(face[(k + 1) % 4])) crossing.push_back(k);
            auto link = [&](int a, int b) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            };
            if (crossing.size() == 2) {
                link(fedge[crossing[0]], fedge[crossing[1]]);
            } else if (crossing.size() == 4) {
                // corner k touches face edges k-1 and k
                for (int k = 0; k < 4; ++k)
                    if (fg(face[k])) link(fedge[(k + 3) % 4], fedge[k]);
            }
        }

        std::array<bool, 12> used{};
        for (int start = 0; start < 12; ++start) {
            if (adj[start].empty() || used[start]) continue;
            Loop loop;
            int prev = -1, cur = start;
            while (!used[cur]) {
                used[cur] = true;
                loop.push_back(cur);
                const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
                prev = cur;
                cur = next;
            }

            // Newell normal vs. the summed foreground->background direction.
            Vec3 newell{0, 0, 0};
            Vec3 outward{0, 0, 0};
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const Vec3 a = edge_mid(loop[i]);
                const Vec3 b = edge_mid(loop[(i + 1) % loop.size()]);
                newell = newell + cross(a, b);
                const int c0 = kEdgeCorners[loop[i]][0], c1 = kEdgeCorners[loop[i]][1];
                outward = outward + (fg(c0) ? corner_pos(c1) - corner_pos(c0) : corner_pos(c0) - corner_pos(c1));
            }
            if (dot(newell, outward) < 0.0) std::reverse(loop.begin(), loop.end());
            table[config].push_back(std::move(loop));
        }
    }
    return table;
}

const CaseTable& case_table()
{
    static const CaseTable table = build_case_table();
    return table;
}

}  // namespace

SurfaceMesh extract_isosurface(const Volume& mask)
{
    require(count_nonzero(mask) > 0, ErrorKind::empty, "extract_isosurface: empty mask");

    const auto& dims = mask.dims();
    const auto& sp = mask.spacing();
    // Padded corner p maps to source voxel p - 1.
    const auto fg = [&](int x, int y, int z) {
        --x, --y, --z;
        return mask.inside(x, y, z) && mask.at(x, y, z) != 0.0;
    };
    const std::array<int64_t, 3> pd{dims[0] + 2, dims[1] + 2, dims[2] + 2};
    const auto world = [&](const Vec3& padded) {
        return Vec3{(padded[0] - 1.0) * sp[0], (padded[1] - 1.0) * sp[1], (padded[2] - 1.0) * sp[2]};
    };

    SurfaceMesh mesh;
    std::unordered_map<int64_t, int> edge_vertex;
    const auto& table = case_table();

    for (int z = 0; z + 1 < pd[2]; ++z)
        for (int y = 0; y + 1 < pd[1]; ++y)
            for (int x = 0; x + 1 < pd[0]; ++x) {
                int config = 0;
                for (int c = 0; c < 8; ++c)
                    if (fg(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1))) config |= 1 << c;
                if (config == 0 || config == 255) continue;

                auto vertex_for = [&](int e) {
                    const int c0 = kEdgeCorners[e][0];
                    const int axis = e / 4;
                    const int64_t lx = x + (c0 & 1), ly = y + ((c0 >> 1) & 1), lz = z + ((c0 >> 2) & 1);
                    const int64_t key = ((lz * pd[1] + ly) * pd[0] + lx) * 3 + axis;
                    const auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<int>(mesh.vertices.size()));
                    if (inserted) mesh.vertices.push_back(world(Vec3{double(x), double(y), double(z)} + edge_mid(e)));
                    return it->second;
                };

                for (const auto& loop : table[config]) {
                    std::vector<int> ids;
                    ids.reserve(loop.size());
                    for (int e : loop) ids.push_back(vertex_for(e));
                    if (ids.size() == 3) {
                        mesh.triangles.push_back({ids[0], ids[1], ids[2]});
                        continue;
                    }
                    // Fan around the loop centroid; keeps every interior edge private to this loop.
                    Vec3 centroid{0, 0, 0};
                    for (int id : ids) centroid = centroid + mesh.vertices[id];
                    centroid = (1.0 / static_cast<double>(ids.size())) * centroid;
                    const int cid = static_cast<int>(mesh.vertices.size());
                    mesh.vertices.push_back(centroid);
                    for (std::size_t i = 0; i < ids.size(); ++i)
                        mesh.triangles.push_back({cid, ids[i], ids[(i + 1) % ids.size()]});
                }
            }
    return mesh;
}

}  // namespace cq
