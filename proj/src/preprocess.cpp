#include "cardioquant/preprocess.hpp"

#include "cardioquant/error.hpp"

#include <cmath>
#include <vector>

namespace cq {

namespace {

std::vector<Index3> neighbor_offsets(Connectivity conn)
{
    std::vector<Index3> out;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0) continue;
                if (conn == Connectivity::six && manhattan != 1) continue;
                out.push_back({dx, dy, dz});
            }
    return out;
}

// Labels each voxel accepted by `member` with a component id (-1 elsewhere).
// Components are numbered in order of their smallest linear index.
template <class Pred>
std::vector<int> label_components(const Volume& v, Pred member, Connectivity conn, std::vector<std::size_t>& sizes)
{
    const auto offsets = neighbor_offsets(conn);
    std::vector<int> comp(v.size(), -1);
    std::vector<std::size_t> stack;
    sizes.clear();
    for (std::size_t seed = 0; seed < v.size(); ++seed) {
        if (comp[seed] >= 0 || !member(seed)) continue;
        const int id = static_cast<int>(sizes.size());
        std::size_t count = 0;
        comp[seed] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++count;
            const auto c = v.coords(cur);
            for (const auto& o : offsets) {
                const int x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
                if (!v.inside(x, y, z)) continue;
                const std::size_t n = v.linear(x, y, z);
                if (comp[n] >= 0 || !member(n)) continue;
                comp[n] = id;
                stack.push_back(n);
            }
        }
        sizes.push_back(count);
    }
    return comp;
}

}  // namespace

Volume zscore_normalize(const Volume& vol)
{
    require(vol.kind() == VolumeKind::scalar, ErrorKind::invalid_argument, "zscore_normalize needs a scalar volume");
    const auto d = vol.data();
    const double n = static_cast<double>(d.size());
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);
    require(sd > 0.0 && std::isfinite(sd), ErrorKind::invalid_argument, "zscore_normalize: zero variance");

    Volume out = vol;
    for (auto& v : out.data()) v = (v - mean) / sd;
    return out;
}

Volume crop_roi(const Volume& vol, Index3 center, Index3 size)
{
    for (int s : size) require(s > 0, ErrorKind::invalid_argument, "crop_roi: size must be positive");
    Volume out(Dims{size[0], size[1], size[2]}, vol.spacing(), vol.kind(), 0.0);
    const Index3 start{center[0] - size[0] / 2, center[1] - size[1] / 2, center[2] - size[2] / 2};
    for (int z = 0; z < size[2]; ++z)
        for (int y = 0; y < size[1]; ++y)
            for (int x = 0; x < size[0]; ++x) {
                const int sx = start[0] + x, sy = start[1] + y, sz = start[2] + z;
                if (vol.inside(sx, sy, sz)) out.at(x, y, z) = vol.at(sx, sy, sz);
            }
    return out;
}

Volume largest_component(const Volume& mask, int label, Connectivity conn)
{
    const auto d = mask.data();
    std::vector<std::size_t> sizes;
    const auto comp = label_components(mask, [&](std::size_t i) { return d[i] == label; }, conn, sizes);
    if (sizes.size() <= 1) return mask;

    int keep = 0;
    for (int c = 1; c < static_cast<int>(sizes.size()); ++c)
        if (sizes[c] > sizes[keep]) keep = c;

    Volume out = mask;
    auto od = out.data();
    for (std::size_t i = 0; i < od.size(); ++i)
        if (comp[i] >= 0 && comp[i] != keep) od[i] = 0.0;
    return out;
}

Volume fill_holes(const Volume& mask)
{
    const auto d = mask.data();
    std::vector<std::size_t> sizes;
    const auto comp = label_components(mask, [&](std::size_t i) { return d[i] == 0.0; }, Connectivity::six, sizes);

    std::vector<bool> touches_border(sizes.size(), false);
    const auto& dims = mask.dims();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (comp[i] < 0) continue;
        const auto c = mask.coords(i);
        if (c[0] == 0 || c[1] == 0 || c[2] == 0 || c[0] == dims[0] - 1 || c[1] == dims[1] - 1 || c[2] == dims[2] - 1)
            touches_border[comp[i]] = true;
    }

    Volume out = mask;
    auto od = out.data();
    for (std::size_t i = 0; i < od.size(); ++i)
        if (comp[i] >= 0 && !touches_border[comp[i]]) od[i] = 1.0;
    return out;
}

std::size_t count_components(const Volume& mask, int label, Connectivity conn)
{
    const auto d = mask.data();
    std::vector<std::size_t> sizes;
    label_components(mask, [&](std::size_t i) { return d[i] == label; }, conn, sizes);
    return sizes.size();
}

}  // namespace cq
