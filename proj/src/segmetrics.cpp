#include "cardioquant/segmetrics.hpp"

#include "cardioquant/error.hpp"
#include "cardioquant/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cq {

namespace {

inline double squared_distance(const Vec3& a, const Vec3& b)
{
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

// Balanced 3-d tree stored implicitly in a permutation of the input indices.
class KdTree {
public:
    explicit KdTree(const PointSet& pts) : pts_(pts), order_(pts.size())
    {
        std::iota(order_.begin(), order_.end(), 0);
        build(0, order_.size(), 0);
    }

    double nearest_squared(const Vec3& q) const
    {
        double best = std::numeric_limits<double>::infinity();
        search(q, 0, order_.size(), 0, best);
        return best;
    }

private:
    void build(std::size_t lo, std::size_t hi, int axis)
    {
        if (hi - lo <= kLeaf) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
        build(lo, mid, (axis + 1) % 3);
        build(mid + 1, hi, (axis + 1) % 3);
    }

    void search(const Vec3& q, std::size_t lo, std::size_t hi, int axis, double& best) const
    {
        if (hi - lo <= kLeaf) {
            for (std::size_t i = lo; i < hi; ++i) best = std::min(best, squared_distance(q, pts_[order_[i]]));
            return;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        const Vec3& split = pts_[order_[mid]];
        best = std::min(best, squared_distance(q, split));
        const double diff = q[axis] - split[axis];
        const int next = (axis + 1) % 3;
        if (diff < 0) {
            search(q, lo, mid, next, best);
            if (diff * diff < best) search(q, mid + 1, hi, next, best);
        } else {
            search(q, mid + 1, hi, next, best);
            if (diff * diff < best) search(q, lo, mid, next, best);
        }
    }

    static constexpr std::size_t kLeaf = 8;
    const PointSet& pts_;
    std::vector<std::size_t> order_;
};

double dice_counts(std::uint64_t inter, std::uint64_t a, std::uint64_t b)
{
    require(a + b > 0, ErrorKind::empty, "dice: both masks are empty");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

}  // namespace

PointSet boundary_points(const Volume& mask)
{
    PointSet out;
    const auto& d = mask.dims();
    const auto is_bg = [&](int x, int y, int z) { return !mask.inside(x, y, z) || mask.at(x, y, z) == 0.0; };
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                if (mask.at(x, y, z) == 0.0) continue;
                if (is_bg(x - 1, y, z) || is_bg(x + 1, y, z) || is_bg(x, y - 1, z) || is_bg(x, y + 1, z) ||
                    is_bg(x, y, z - 1) || is_bg(x, y, z + 1))
                    out.push_back(mask.position(x, y, z));
            }
    require(!out.empty(), ErrorKind::empty, "boundary_points: empty mask");
    return out;
}

double dice(const Volume& seg, const Volume& gd)
{
    require_same_grid(seg, gd, "dice");
    std::uint64_t a = 0, b = 0, inter = 0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const bool s = seg[i] != 0.0, g = gd[i] != 0.0;
        a += s;
        b += g;
        inter += s && g;
    }
    return dice_counts(inter, a, b);
}

double dice(const Volume& seg, const Volume& gd, int label)
{
    require_same_grid(seg, gd, "dice");
    std::uint64_t a = 0, b = 0, inter = 0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const bool s = seg[i] == label, g = gd[i] == label;
        a += s;
        b += g;
        inter += s && g;
    }
    return dice_counts(inter, a, b);
}

double gdice(const Volume& seg, const Volume& gd, const std::vector<int>& labels)
{
    require_same_grid(seg, gd, "gdice");
    require(!labels.empty(), ErrorKind::invalid_argument, "gdice: no labels given");
    std::uint64_t inter = 0, total = 0;
    for (int k : labels) {
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const bool s = seg[i] == k, g = gd[i] == k;
            total += static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(g);
            inter += s && g;
        }
    }
    require(total > 0, ErrorKind::empty, "gdice: every class is empty");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

ConfusionCounts confusion(const Volume& seg, const Volume& gd)
{
    require_same_grid(seg, gd, "confusion");
    ConfusionCounts c;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const bool s = seg[i] != 0.0, g = gd[i] != 0.0;
        if (s && g) ++c.tp;
        else if (!s && !g) ++c.tn;
        else if (s) ++c.fp;
        else ++c.fn;
    }
    return c;
}

double accuracy(const ConfusionCounts& c)
{
    const std::uint64_t total = c.tp + c.tn + c.fp + c.fn;
    require(total > 0, ErrorKind::empty, "accuracy: all counts are zero");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

std::vector<double> nearest_distances(const PointSet& from, const PointSet& to)
{
    require(!from.empty() && !to.empty(), ErrorKind::empty, "surface distance: empty point set");
    const KdTree tree(to);
    std::vector<double> out(from.size());
    parallel_for(from.size(), [&](std::size_t i) { out[i] = std::sqrt(tree.nearest_squared(from[i])); });
    return out;
}

double hausdorff(const PointSet& x, const PointSet& y)
{
    const auto dxy = nearest_distances(x, y);
    const auto dyx = nearest_distances(y, x);
    return std::max(*std::max_element(dxy.begin(), dxy.end()), *std::max_element(dyx.begin(), dyx.end()));
}

double asd(const PointSet& x, const PointSet& y)
{
    const auto dxy = nearest_distances(x, y);
    const auto dyx = nearest_distances(y, x);
    const double mx = pairwise_sum(dxy) / static_cast<double>(dxy.size());
    const double my = pairwise_sum(dyx) / static_cast<double>(dyx.size());
    return 0.5 * (mx + my);
}

}  // namespace cq
