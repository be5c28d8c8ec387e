#include "cardioquant/mesh.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace cq {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

void SurfaceMesh::validate() const
{
    const int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles)
        for (int i : t) require(i >= 0 && i < n, ErrorKind::format, "triangle index out of range");
    if (!normals.empty()) {
        require(normals.size() == vertices.size(), ErrorKind::shape, "one normal per vertex required");
        for (const auto& nv : normals)
            require(std::abs(norm(nv) - 1.0) <= 1e-6, ErrorKind::format, "normal is not unit length");
    }
}

SurfaceMesh vertex_normals(SurfaceMesh mesh)
{
    mesh.validate();
    std::vector<Vec3> acc(mesh.vertices.size(), Vec3{0.0, 0.0, 0.0});
    for (const auto& t : mesh.triangles) {
        const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
        const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
        const Vec3 area_normal = cross(e1, e2);  // |.| = 2 * area
        for (int i : t) acc[i] = acc[i] + area_normal;
    }
    mesh.normals.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double len = norm(acc[i]);
        require(len > 0.0, ErrorKind::invalid_argument, "vertex " + std::to_string(i) + " has no incident area");
        mesh.normals[i] = (1.0 / len) * acc[i];
    }
    return mesh;
}

std::vector<Edge> unique_edges(const SurfaceMesh& mesh)
{
    std::vector<Edge> edges;
    edges.reserve(mesh.triangles.size() * 3);
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

bool is_closed_and_oriented(const SurfaceMesh& mesh)
{
    // directed edge -> use count
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
    for (const auto& [e, count] : directed) {
        if (count != 1) return false;
        const auto it = directed.find({e.second, e.first});
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

long euler_characteristic(const SurfaceMesh& mesh)
{
    return static_cast<long>(mesh.vertices.size()) - static_cast<long>(unique_edges(mesh).size()) +
           static_cast<long>(mesh.triangles.size());
}

double enclosed_volume(const SurfaceMesh& mesh)
{
    double v = 0.0;
    for (const auto& t : mesh.triangles)
        v += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
    return v / 6.0;
}

void write_obj(const std::filesystem::path& path, const SurfaceMesh& mesh)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::format, "cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& n : mesh.normals) out << "vn " << n[0] << ' ' << n[1] << ' ' << n[2] << '\n';
    const bool with_normals = !mesh.normals.empty();
    for (const auto& t : mesh.triangles) {
        out << 'f';
        for (int i : t) {
            out << ' ' << i + 1;
            if (with_normals) out << "//" << i + 1;
        }
        out << '\n';
    }
}

SurfaceMesh read_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::format, "cannot open " + path.string());
    SurfaceMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v" || tag == "vn") {
            Vec3 p{};
            require(static_cast<bool>(ls >> p[0] >> p[1] >> p[2]), ErrorKind::format, "bad OBJ line: " + line);
            (tag == "v" ? mesh.vertices : mesh.normals).push_back(p);
        } else if (tag == "f") {
            Triangle t{};
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                require(static_cast<bool>(ls >> tok), ErrorKind::format, "OBJ face needs three vertices: " + line);
                t[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            mesh.triangles.push_back(t);
        }
    }
    mesh.validate();
    return mesh;
}

}  // namespace cq
