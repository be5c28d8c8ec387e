#include "cardioquant/distfield.hpp"

#include "cardioquant/error.hpp"

#include <cmath>
#include <limits>

namespace cq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of sampled function f on a line with
// sample spacing h (Felzenszwalb & Huttenlocher). out[q] = min_p (h(q-p))^2 + f[p].
void edt_line(const std::vector<double>& f, double h, std::vector<double>& out, std::vector<int>& v,
              std::vector<double>& z)
{
    const int n = static_cast<int>(f.size());
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        const double xq = q * h;
        while (k >= 0) {
            const double xv = v[k] * h;
            const double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
            if (s <= z[k]) {
                --k;
                continue;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kInf;
            break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        }
    }
    if (k < 0) {
        out.assign(n, kInf);
        return;
    }
    out.resize(n);
    int j = 0;
    for (int q = 0; q < n; ++q) {
        const double xq = q * h;
        while (z[j + 1] < xq) ++j;
        const double d = xq - v[j] * h;
        out[q] = d * d + f[v[j]];
    }
}

}  // namespace

std::vector<bool> boundary_set(const Volume& mask)
{
    const auto& d = mask.dims();
    std::vector<bool> s(mask.size(), false);
    const auto is_bg = [&](int x, int y, int z) { return !mask.inside(x, y, z) || mask.at(x, y, z) == 0.0; };
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                if (mask.at(x, y, z) == 0.0) continue;
                s[mask.linear(x, y, z)] = is_bg(x - 1, y, z) || is_bg(x + 1, y, z) || is_bg(x, y - 1, z) ||
                                          is_bg(x, y + 1, z) || is_bg(x, y, z - 1) || is_bg(x, y, z + 1);
            }
    return s;
}

std::vector<double> squared_edt(const Volume& grid, const std::vector<bool>& features)
{
    require(features.size() == grid.size(), ErrorKind::shape, "squared_edt: feature mask size mismatch");
    const auto& d = grid.dims();
    const auto& sp = grid.spacing();
    std::vector<double> dist(grid.size());
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = features[i] ? 0.0 : kInf;

    std::vector<double> line, out, z;
    std::vector<int> v;
    for (int axis = 0; axis < 3; ++axis) {
        const int n = d[axis];
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        line.resize(n);
        for (int j = 0; j < d[a2]; ++j)
            for (int i = 0; i < d[a1]; ++i) {
                Index3 c{};
                c[a1] = i;
                c[a2] = j;
                for (int q = 0; q < n; ++q) {
                    c[axis] = q;
                    line[q] = dist[grid.linear(c[0], c[1], c[2])];
                }
                edt_line(line, sp[axis], out, v, z);
                for (int q = 0; q < n; ++q) {
                    c[axis] = q;
                    dist[grid.linear(c[0], c[1], c[2])] = out[q];
                }
            }
    }
    return dist;
}

DistanceField signed_dtm(const Volume& mask, double beta)
{
    require(beta > 0.0 && std::isfinite(beta), ErrorKind::invalid_argument, "signed_dtm: beta must be positive");
    const std::size_t fg = count_nonzero(mask);
    require(fg > 0, ErrorKind::empty, "signed_dtm: mask has no foreground");
    require(fg < mask.size(), ErrorKind::empty, "signed_dtm: mask has no background");

    const auto s = boundary_set(mask);
    const auto d2 = squared_edt(mask, s);

    DistanceField out{Volume::scalar(mask.dims(), mask.spacing()), beta};
    auto phi = out.grid.data();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (s[i]) {
            phi[i] = 0.0;
            continue;
        }
        const double d = std::sqrt(d2[i]);
        const double mag = beta == 1.0 ? d : std::pow(d, beta);
        phi[i] = mask[i] != 0.0 ? -mag : mag;
    }
    return out;
}

Volume prob_from_dtm(const DistanceField& phi)
{
    Volume out = Volume::scalar(phi.grid.dims(), phi.grid.spacing());
    const auto src = phi.grid.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::exp(-std::abs(src[i]));
    return out;
}

}  // namespace cq
