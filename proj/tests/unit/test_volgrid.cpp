#include "support.hpp"

#include "cardioquant/error.hpp"
#include "cardioquant/mesh.hpp"
#include "cardioquant/preprocess.hpp"
#include "cardioquant/sampling.hpp"
#include "cardioquant/volume_io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <queue>

using namespace cq;
using cqtest::kind_of;
using cqtest::TempDir;

namespace {

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream(path) << text;
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// BFS component count written independently of preprocess.cpp.
std::size_t flood_components(const Volume& v, int label)
{
    const auto& d = v.dims();
    std::vector<char> seen(v.size(), 0);
    std::size_t count = 0;
    for (std::size_t s = 0; s < v.size(); ++s) {
        if (seen[s] || v[s] != label) continue;
        ++count;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const auto c = v.coords(q.front());
            q.pop();
            const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
            for (const auto& o : off) {
                const int x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
                if (x < 0 || y < 0 || z < 0 || x >= d[0] || y >= d[1] || z >= d[2]) continue;
                const auto j = v.linear(x, y, z);
                if (!seen[j] && v[j] == label) {
                    seen[j] = 1;
                    q.push(j);
                }
            }
        }
    }
    return count;
}

SurfaceMesh single_vertex_mesh(Vec3 p, Vec3 n)
{
    SurfaceMesh m;
    m.vertices = {p, p + Vec3{1, 0, 0}, p + Vec3{0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    m.normals = {n, n, n};
    return m;
}

}  // namespace

TEST_SUITE("volume io") {
    TEST_CASE("round trip is bit exact for random volumes") {
        TempDir dir("io");
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 20; ++trial) {
            const Dims dims{cqtest::uniform_int(rng, 1, 7), cqtest::uniform_int(rng, 1, 7), cqtest::uniform_int(rng, 1, 7)};
            const Spacing sp{cqtest::uniform(rng, 0.1, 3), cqtest::uniform(rng, 0.1, 3), cqtest::uniform(rng, 0.1, 3)};
            Volume v = trial % 3 == 0 ? Volume::label(dims, sp) : Volume::scalar(dims, sp);
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v.kind() == VolumeKind::label)
                    v[i] = cqtest::uniform_int(rng, 0, 255);
                else if (trial % 3 == 1)
                    v[i] = static_cast<float>(cqtest::uniform(rng, -100, 100));  // f32 payload
                else
                    v[i] = cqtest::uniform(rng, -100, 100);  // needs f64
            }
            const auto header = write_volume(dir.file("v" + std::to_string(trial)), v);
            const Volume back = read_volume(header);
            CHECK(back == v);
        }
    }

    TEST_CASE("hand written 1x1x1 label file") {
        TempDir dir("io_hand");
        write_text(dir.file("one.json"),
                   R"({"dims":[1,1,1],"spacing":[1,1,1],"kind":"label","dtype":"u8","data":"one.raw"})");
        write_bytes(dir.file("one.raw"), {3});
        const Volume v = read_volume(dir.file("one.json"));
        CHECK(v.kind() == VolumeKind::label);
        REQUIRE(v.size() == 1);
        CHECK(v[0] == 3.0);
    }

    TEST_CASE("hand written f32 scalar payload is little endian") {
        TempDir dir("io_f32");
        write_text(dir.file("s.json"),
                   R"({"dims":[2,1,1],"spacing":[0.5,1,2],"kind":"scalar","dtype":"f32","data":"s.raw"})");
        // 1.5f = 0x3fc00000, -2.0f = 0xc0000000
        write_bytes(dir.file("s.raw"), {0x00, 0x00, 0xc0, 0x3f, 0x00, 0x00, 0x00, 0xc0});
        const Volume v = read_volume(dir.file("s.json"));
        CHECK(v[0] == 1.5);
        CHECK(v[1] == -2.0);
        CHECK(v.spacing() == Spacing{0.5, 1.0, 2.0});
    }

    TEST_CASE("malformed files are format errors") {
        TempDir dir("io_bad");
        write_text(dir.file("short.json"),
                   R"({"dims":[2,2,2],"spacing":[1,1,1],"kind":"label","dtype":"u8","data":"short.raw"})");
        write_bytes(dir.file("short.raw"), {1, 1, 1, 1, 1, 1, 1});
        CHECK(kind_of([&] { read_volume(dir.file("short.json")); }) == ErrorKind::format);

        write_text(dir.file("kind.json"),
                   R"({"dims":[1,1,1],"spacing":[1,1,1],"kind":"mesh","dtype":"u8","data":"kind.raw"})");
        write_bytes(dir.file("kind.raw"), {1});
        CHECK(kind_of([&] { read_volume(dir.file("kind.json")); }) == ErrorKind::format);

        write_text(dir.file("sp.json"),
                   R"({"dims":[1,1,1],"spacing":[1,0,1],"kind":"label","dtype":"u8","data":"sp.raw"})");
        write_bytes(dir.file("sp.raw"), {1});
        CHECK(kind_of([&] { read_volume(dir.file("sp.json")); }) == ErrorKind::format);

        CHECK(kind_of([&] { read_volume(dir.file("missing.json")); }) == ErrorKind::format);
    }
}

TEST_SUITE("preprocess") {
    TEST_CASE("zscore of 1 2 3") {
        const Volume v(Dims{3, 1, 1}, Spacing{1, 1, 1}, VolumeKind::scalar, std::vector<double>{1, 2, 3});
        const Volume z = zscore_normalize(v);
        const double s = std::sqrt(2.0 / 3.0);
        CHECK(z[0] == doctest::Approx(-1.0 / s).epsilon(1e-12));
        CHECK(z[1] == doctest::Approx(0.0));
        CHECK(z[2] == doctest::Approx(1.0 / s).epsilon(1e-12));
        CHECK(z[2] == doctest::Approx(1.224745).epsilon(1e-6));
    }

    TEST_CASE("zscore moments and idempotence on random data") {
        std::mt19937_64 rng(2);
        for (int t = 0; t < 10; ++t) {
            Volume v = Volume::scalar({5, 4, 3});
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = cqtest::uniform(rng, -50, 200);
            const Volume z = zscore_normalize(v);
            double mean = 0, var = 0;
            for (double x : z.data()) mean += x;
            mean /= z.size();
            for (double x : z.data()) var += (x - mean) * (x - mean);
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(std::sqrt(var / z.size()) - 1.0) < 1e-9);
            const Volume zz = zscore_normalize(z);
            for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(zz[i] - z[i]) < 1e-9);
        }
    }

    TEST_CASE("zscore rejects constant and label volumes") {
        CHECK(kind_of([] { zscore_normalize(Volume::scalar({3, 1, 1}, {1, 1, 1}, 5.0)); }) ==
              ErrorKind::invalid_argument);
        CHECK_THROWS_AS(zscore_normalize(Volume::label({3, 1, 1})), Error);
    }

    TEST_CASE("crop covering the whole volume is the identity") {
        std::mt19937_64 rng(3);
        Volume v = Volume::scalar({4, 5, 6}, {0.5, 1, 2});
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = cqtest::uniform(rng, 0, 1);
        const Volume c = crop_roi(v, {2, 2, 3}, {4, 5, 6});
        CHECK(c == v);
    }

    TEST_CASE("corner crop zero pads out of range voxels") {
        Volume v = Volume::scalar({4, 4, 4});
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
        const Volume c = crop_roi(v, {0, 0, 0}, {2, 2, 2});
        // first voxel sits at center - size/2 = (-1,-1,-1)
        for (int z = 0; z < 2; ++z)
            for (int y = 0; y < 2; ++y)
                for (int x = 0; x < 2; ++x) {
                    const int sx = x - 1, sy = y - 1, sz = z - 1;
                    const double expect = v.inside(sx, sy, sz) ? v.at(sx, sy, sz) : 0.0;
                    CHECK(c.at(x, y, z) == expect);
                }
        CHECK(c.at(1, 1, 1) == 1.0);
        CHECK(c.spacing() == v.spacing());
    }

    TEST_CASE("crop with non-positive size") {
        CHECK(kind_of([] { crop_roi(Volume::scalar({4, 4, 4}), {1, 1, 1}, {0, 1, 1}); }) == ErrorKind::invalid_argument);
    }

    TEST_CASE("largest component drops the smaller blob") {
        Volume v = Volume::label({12, 3, 3});
        cqtest::paint_box(v, {0, 0, 0}, {4, 0, 0});   // 5 voxels
        cqtest::paint_box(v, {8, 1, 1}, {10, 1, 1});  // 3 voxels
        v.at(11, 2, 2) = 2;                            // other label untouched
        const Volume out = largest_component(v, 1);
        CHECK(count_nonzero(select_label(out, 1)) == 5);
        CHECK(out.at(9, 1, 1) == 0.0);
        CHECK(out.at(11, 2, 2) == 2.0);
        CHECK(largest_component(out, 1) == out);
        CHECK(largest_component(v, 7) == v);  // absent label
    }

    TEST_CASE("largest component ties keep the earliest scanned blob") {
        Volume v = Volume::label({7, 1, 1});
        v.at(1, 0, 0) = v.at(2, 0, 0) = 1;
        v.at(4, 0, 0) = v.at(5, 0, 0) = 1;
        const Volume out = largest_component(v, 1);
        CHECK(out.at(1, 0, 0) == 1.0);
        CHECK(out.at(4, 0, 0) == 0.0);
    }

    TEST_CASE("largest component leaves exactly one component (flood fill oracle)") {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 30; ++t) {
            const Volume v = cqtest::random_binary(rng, {8, 7, 6}, 0.35);
            const Volume out = largest_component(v, 1);
            const std::size_t before = flood_components(v, 1);
            CHECK(flood_components(out, 1) == (before == 0 ? 0u : 1u));
            CHECK(count_components(v, 1) == before);
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(out[i] <= v[i]);
        }
    }

    TEST_CASE("26-connectivity joins diagonal voxels") {
        Volume v = Volume::label({3, 3, 3});
        v.at(0, 0, 0) = v.at(1, 1, 1) = v.at(2, 2, 2) = 1;
        CHECK(count_components(v, 1, Connectivity::six) == 3);
        CHECK(count_components(v, 1, Connectivity::twenty_six) == 1);
        CHECK(count_nonzero(largest_component(v, 1, Connectivity::twenty_six)) == 3);
    }

    TEST_CASE("fill holes") {
        Volume shell = Volume::label({5, 5, 5});
        cqtest::paint_box(shell, {1, 1, 1}, {3, 3, 3});
        shell.at(2, 2, 2) = 0;
        Volume solid = Volume::label({5, 5, 5});
        cqtest::paint_box(solid, {1, 1, 1}, {3, 3, 3});
        CHECK(fill_holes(shell) == solid);
        CHECK(fill_holes(solid) == solid);
        CHECK(fill_holes(Volume::label({4, 4, 4})) == Volume::label({4, 4, 4}));
    }

    TEST_CASE("fill holes is idempotent and only adds foreground") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 30; ++t) {
            const Volume v = cqtest::random_binary(rng, {7, 6, 5}, 0.6);
            const Volume f = fill_holes(v);
            CHECK(fill_holes(f) == f);
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(f[i] >= v[i]);
            // every remaining background voxel reaches the border
            Volume bg = Volume::label(v.dims());
            for (std::size_t i = 0; i < v.size(); ++i) bg[i] = f[i] == 0.0 ? 1.0 : 0.0;
            Volume padded = Volume::label({9, 8, 7}, {1, 1, 1}, 1.0);
            for (std::size_t i = 0; i < bg.size(); ++i) {
                const auto c = bg.coords(i);
                padded.at(c[0] + 1, c[1] + 1, c[2] + 1) = bg[i];
            }
            CHECK(flood_components(padded, 1) == 1);
        }
    }
}

TEST_SUITE("isosurface") {
    TEST_CASE("empty mask is an error") {
        CHECK(kind_of([] { extract_isosurface(Volume::label({3, 3, 3})); }) == ErrorKind::empty);
    }

    TEST_CASE("single voxel gives a closed genus-0 mesh") {
        Volume v = Volume::label({3, 3, 3});
        v.at(1, 1, 1) = 1;
        const auto m = extract_isosurface(v);
        CHECK(is_closed_and_oriented(m));
        const long V = static_cast<long>(m.vertices.size());
        const long E = static_cast<long>(unique_edges(m).size());
        const long F = static_cast<long>(m.triangles.size());
        CHECK(V - E + F == 2);
        CHECK(euler_characteristic(m) == 2);
        CHECK(enclosed_volume(m) > 0.0);
    }

    TEST_CASE("border-touching foreground still closes") {
        Volume v = Volume::label({2, 2, 2}, {1, 1, 1}, 1.0);
        const auto m = extract_isosurface(v);
        CHECK(is_closed_and_oriented(m));
        CHECK(euler_characteristic(m) == 2);
    }

    TEST_CASE("digital ball volume") {
        const Volume b = cqtest::ball(15, 5.0);
        const auto m = extract_isosurface(b);
        CHECK(is_closed_and_oriented(m));
        CHECK(euler_characteristic(m) == 2);
        const double analytic = 4.0 / 3.0 * std::numbers::pi * 125.0;
        CHECK(std::abs(enclosed_volume(m) - analytic) / analytic < 0.15);
    }

    TEST_CASE("anisotropic spacing scales vertices") {
        Volume v = Volume::label({3, 3, 3}, {2.0, 1.0, 0.5});
        v.at(1, 1, 1) = 1;
        const auto m = extract_isosurface(v);
        for (const auto& p : m.vertices) {
            CHECK(p[0] >= 1.0 - 1e-12);
            CHECK(p[0] <= 3.0 + 1e-12);
            CHECK(p[2] >= 0.25 - 1e-12);
            CHECK(p[2] <= 0.75 + 1e-12);
        }
    }

    TEST_CASE("random masks give watertight consistently wound meshes") {
        std::mt19937_64 rng(6);
        for (int t = 0; t < 40; ++t) {
            const Volume v = cqtest::random_binary(rng, {6, 5, 6}, 0.45);
            if (count_nonzero(v) == 0) continue;
            const auto m = extract_isosurface(v);
            CHECK(is_closed_and_oriented(m));
            CHECK(enclosed_volume(m) > 0.0);
        }
    }

    TEST_CASE("normals are unit and close to radial on a digital ball") {
        // Per-vertex deviation peaks near 35 degrees at the voxel staircase
        // (single-voxel terraces), so the bound is on the mean.
        const Volume b = cqtest::ball(15, 5.0);
        const auto m = vertex_normals(extract_isosurface(b));
        const Vec3 c{7, 7, 7};
        REQUIRE(m.normals.size() == m.vertices.size());
        double worst = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < m.vertices.size(); ++i) {
            CHECK(std::abs(norm(m.normals[i]) - 1.0) < 1e-9);
            const Vec3 r = m.vertices[i] - c;
            const double deg = std::acos(std::min(1.0, dot(r, m.normals[i]) / norm(r))) * 180.0 / std::numbers::pi;
            worst = std::max(worst, deg);
            sum += deg;
        }
        MESSAGE("max deviation " << worst << " deg, mean " << sum / m.vertices.size());
        CHECK(sum / m.vertices.size() < 25.0);
        CHECK(worst < 40.0);
    }

    TEST_CASE("face-interior vertices of a box have axis-aligned normals") {
        Volume v = Volume::label({7, 7, 7});
        cqtest::paint_box(v, {1, 1, 1}, {5, 5, 5});
        const auto m = vertex_normals(extract_isosurface(v));
        int checked = 0;
        for (std::size_t i = 0; i < m.vertices.size(); ++i) {
            const auto& p = m.vertices[i];
            for (int axis = 0; axis < 3; ++axis) {
                const int a = (axis + 1) % 3, b = (axis + 2) % 3;
                const bool on_face = std::abs(p[axis] - 0.5) < 1e-12 || std::abs(p[axis] - 5.5) < 1e-12;
                const bool interior = p[a] > 1.5 && p[a] < 4.5 && p[b] > 1.5 && p[b] < 4.5;
                if (!on_face || !interior) continue;
                ++checked;
                const double sign = p[axis] > 3.0 ? 1.0 : -1.0;
                CHECK(m.normals[i][axis] == doctest::Approx(sign));
                CHECK(std::abs(m.normals[i][a]) < 1e-12);
                CHECK(std::abs(m.normals[i][b]) < 1e-12);
            }
        }
        CHECK(checked > 0);
    }

    TEST_CASE("isolated vertex has no normal") {
        SurfaceMesh m = single_vertex_mesh({0, 0, 0}, {0, 0, 1});
        m.vertices.push_back({5, 5, 5});
        m.normals.clear();
        CHECK_THROWS_AS(vertex_normals(m), Error);
    }

    TEST_CASE("obj round trip") {
        TempDir dir("obj");
        Volume v = Volume::label({4, 4, 4});
        cqtest::paint_box(v, {1, 1, 1}, {2, 2, 1});
        const auto m = vertex_normals(extract_isosurface(v));
        write_obj(dir.file("m.obj"), m);
        const auto back = read_obj(dir.file("m.obj"));
        CHECK(back.triangles == m.triangles);
        REQUIRE(back.vertices.size() == m.vertices.size());
        for (std::size_t i = 0; i < m.vertices.size(); ++i)
            for (int k = 0; k < 3; ++k) {
                CHECK(back.vertices[i][k] == m.vertices[i][k]);
                CHECK(back.normals[i][k] == m.normals[i][k]);
            }
    }
}

TEST_SUITE("sampling") {
    TEST_CASE("constant volume samples are constant") {
        const Volume v = Volume::scalar({6, 6, 6}, {1, 1, 1}, 7.5);
        const auto m = single_vertex_mesh({2.5, 2.5, 2.5}, {0, 0, 1});
        const auto p = sample_msp(v, m, 0, {0.5, 1.0}, 2);
        for (const auto& row : p.samples)
            for (double s : row) CHECK(s == doctest::Approx(7.5));
    }

    TEST_CASE("linear ramp along the normal") {
        Volume v = Volume::scalar({5, 5, 8});
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = v.coords(i)[2];
        const double z0 = 3.3;
        const auto m = single_vertex_mesh({2.0, 2.0, z0}, {0, 0, 1});
        const auto p = sample_msp(v, m, 0, {1.0}, 1);
        REQUIRE(p.samples.size() == 1);
        CHECK(p.samples[0][0] == doctest::Approx(z0 - 1));
        CHECK(p.samples[0][1] == doctest::Approx(z0));
        CHECK(p.samples[0][2] == doctest::Approx(z0 + 1));
    }

    TEST_CASE("center sample is shared across scales") {
        std::mt19937_64 rng(7);
        Volume v = Volume::scalar({6, 6, 6});
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = cqtest::uniform(rng, 0, 10);
        const auto m = single_vertex_mesh({2.2, 3.1, 2.7}, {0.6, 0.0, 0.8});
        const auto p = sample_msp(v, m, 0, {1.0, 2.0}, 2);
        CHECK(p.samples[0][2] == p.samples[1][2]);
        CHECK(p.half_width() == 2);
    }

    TEST_CASE("trilinear is exact on affine fields") {
        std::mt19937_64 rng(8);
        const Spacing sp{0.7, 1.3, 0.9};
        Volume v = Volume::scalar({6, 6, 6}, sp);
        const double c0 = 2.0, cx = 0.5, cy = -1.25, cz = 3.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto p = v.position(i);
            v[i] = c0 + cx * p[0] + cy * p[1] + cz * p[2];
        }
        for (int t = 0; t < 200; ++t) {
            const Vec3 p{cqtest::uniform(rng, 0, 5 * sp[0]), cqtest::uniform(rng, 0, 5 * sp[1]),
                         cqtest::uniform(rng, 0, 5 * sp[2])};
            CHECK(trilinear(v, p) == doctest::Approx(c0 + cx * p[0] + cy * p[1] + cz * p[2]).epsilon(1e-12));
        }
    }

    TEST_CASE("out of volume samples read zero") {
        const Volume v = Volume::scalar({3, 3, 3}, {1, 1, 1}, 4.0);
        CHECK(trilinear(v, {-5, -5, -5}) == 0.0);
        CHECK(trilinear(v, {2.5, 1, 1}) == doctest::Approx(2.0));  // half the corners are outside
    }

    TEST_CASE("bad node and bad scales") {
        const Volume v = Volume::scalar({3, 3, 3});
        const auto m = single_vertex_mesh({1, 1, 1}, {0, 0, 1});
        CHECK_THROWS_AS(sample_msp(v, m, 3, {1.0}, 1), Error);
        CHECK_THROWS_AS(sample_msp(v, m, -1, {1.0}, 1), Error);
        CHECK_THROWS_AS(sample_msp(v, m, 0, {2.0, 1.0}, 1), Error);
    }

    TEST_CASE("label projection") {
        Volume mask = Volume::label({6, 6, 6});
        mask.at(2, 2, 2) = 1;
        // vertex at the voxel center
        CHECK(project_labels_to_surface(mask, single_vertex_mesh({2, 2, 2}, {0, 0, 1}))[0] == 1);
        // voxel 1 mm along the normal, r = 3
        CHECK(project_labels_to_surface(mask, single_vertex_mesh({2, 2, 1}, {0, 0, 1}), 3.0)[0] == 1);
        // out of reach
        CHECK(project_labels_to_surface(mask, single_vertex_mesh({2, 2, 1}, {0, 0, 1}), 0.4)[0] == 0);
        // empty mask
        const auto none = project_labels_to_surface(Volume::label({6, 6, 6}), single_vertex_mesh({2, 2, 2}, {0, 0, 1}));
        for (int l : none) CHECK(l == 0);
    }

    TEST_CASE("label projection ties go outward") {
        Volume mask = Volume::label({6, 6, 6});
        mask.at(2, 2, 1) = 1;
        mask.at(2, 2, 3) = 2;
        CHECK(project_labels_to_surface(mask, single_vertex_mesh({2, 2, 2}, {0, 0, 1}), 3.0)[0] == 2);
        CHECK(project_labels_to_surface(mask, single_vertex_mesh({2, 2, 2}, {0, 0, -1}), 3.0)[0] == 1);
    }
}
