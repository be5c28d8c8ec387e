#include "cardioquant/oracles.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace cq::oracle {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol, int depth)
{
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

bool fg_at(const Volume& v, int x, int y, int z) { return v.inside(x, y, z) && v.at(x, y, z) != 0.0; }

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol, int panels)
{
    double total = 0.0;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h, b = (p + 1 == panels) ? hi : lo + (p + 1) * h;
        const double m = 0.5 * (a + b);
        const double fa = f(a), fb = f(b), fm = f(m);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(f, a, fa, b, fb, m, fm, whole, tol / panels, 40);
    }
    return total;
}

double energy(const SurfaceGraph& g, const Labeling& l)
{
    double regional = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) regional += l[i] ? g.tlinks[i].fg : g.tlinks[i].bg;
    double boundary = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (l[g.edges[e].first] != l[g.edges[e].second]) boundary += g.nlinks[e];
    return regional + g.lambda * boundary;
}

std::pair<Labeling, double> min_energy_by_enumeration(const SurfaceGraph& g)
{
    require(g.node_count <= 24, ErrorKind::invalid_argument, "enumeration oracle limited to 24 nodes");
    Labeling l(static_cast<std::size_t>(g.node_count)), best_l;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.node_count); ++mask) {
        for (int i = 0; i < g.node_count; ++i) l[i] = (mask >> i) & 1u;
        const double e = oracle::energy(g, l);
        if (e < best) {
            best = e;
            best_l = l;
        }
    }
    return {best_l, best};
}

double cfd_by_quadrature(const FeatureBatch& zs, const FeatureBatch& zt, double a)
{
    require(zs.cols() == zt.cols() && (zs.cols() == 1 || zs.cols() == 2), ErrorKind::invalid_argument,
            "cfd quadrature supports 1 or 2 dimensions");
    const auto ecf = [](const FeatureBatch& z, double t1, double t2) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t i = 0; i < z.rows(); ++i) {
            const double arg = t1 * z(i, 0) + (z.cols() == 2 ? t2 * z(i, 1) : 0.0);
            s += std::complex<double>(std::cos(arg), std::sin(arg));
        }
        return s / static_cast<double>(z.rows());
    };
    if (zs.cols() == 1) {
        return integrate([&](double t) { return std::norm(ecf(zs, t, 0.0) - ecf(zt, t, 0.0)); }, -a, a, 1e-12, 64);
    }
    return integrate(
        [&](double t1) {
            return integrate([&](double t2) { return std::norm(ecf(zs, t1, t2) - ecf(zt, t1, t2)); }, -a, a, 1e-11, 16);
        },
        -a, a, 1e-10, 16);
}

double gaussian_overlap_by_quadrature(double us, double ls, double ut, double lt)
{
    const auto pdf = [](double z, double u, double l) {
        return std::exp(-0.5 * (z - u) * (z - u) / l) / std::sqrt(2.0 * std::numbers::pi * l);
    };
    const double reach = 12.0 * std::sqrt(std::max(ls, lt));
    const double lo = std::min(us, ut) - reach, hi = std::max(us, ut) + reach;
    return integrate([&](double z) { return pdf(z, us, ls) * pdf(z, ut, lt); }, lo, hi, 1e-14, 256);
}

double mixture_l2_by_quadrature(const GaussianBatch& qs, const GaussianBatch& qt)
{
    require(qs.means.cols() == 1 && qt.means.cols() == 1, ErrorKind::invalid_argument, "mixture quadrature is 1-D");
    const auto mixture = [](const GaussianBatch& q, double z) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.means.rows(); ++i) {
            const double u = q.means(i, 0), l = q.vars(i, 0);
            s += std::exp(-0.5 * (z - u) * (z - u) / l) / std::sqrt(2.0 * std::numbers::pi * l);
        }
        return s / static_cast<double>(q.means.rows());
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, max_var = 0.0;
    for (const auto* q : {&qs, &qt})
        for (std::size_t i = 0; i < q->means.rows(); ++i) {
            lo = std::min(lo, q->means(i, 0));
            hi = std::max(hi, q->means(i, 0));
            max_var = std::max(max_var, q->vars(i, 0));
        }
    const double reach = 12.0 * std::sqrt(max_var);
    return integrate(
        [&](double z) {
            const double d = mixture(qs, z) - mixture(qt, z);
            return d * d;
        },
        lo - reach, hi + reach, 1e-13, 512);
}

Volume signed_dtm_brute(const Volume& mask, double beta)
{
    const auto& d = mask.dims();
    std::vector<Vec3> boundary;
    std::vector<bool> on_boundary(mask.size(), false);
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                if (!fg_at(mask, x, y, z)) continue;
                const bool b = !fg_at(mask, x - 1, y, z) || !fg_at(mask, x + 1, y, z) || !fg_at(mask, x, y - 1, z) ||
                               !fg_at(mask, x, y + 1, z) || !fg_at(mask, x, y, z - 1) || !fg_at(mask, x, y, z + 1);
                if (b) {
                    boundary.push_back(mask.position(x, y, z));
                    on_boundary[mask.linear(x, y, z)] = true;
                }
            }
    Volume out = Volume::scalar(mask.dims(), mask.spacing());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (on_boundary[i]) continue;
        const Vec3 p = mask.position(i);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : boundary) {
            const double dx = p[0] - b[0], dy = p[1] - b[1], dz = p[2] - b[2];
            best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        const double mag = std::pow(best, beta);
        out[i] = mask[i] != 0.0 ? -mag : mag;
    }
    return out;
}

double hausdorff_brute(const PointSet& x, const PointSet& y)
{
    const auto directed = [](const PointSet& a, const PointSet& b) {
        double worst = 0.0;
        for (const auto& p : a) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : b) {
                const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
                best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(x, y), directed(y, x));
}

double asd_brute(const PointSet& x, const PointSet& y)
{
    const auto directed = [](const PointSet& a, const PointSet& b) {
        double sum = 0.0;
        for (const auto& p : a) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : b) {
                const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
                best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
            }
            sum += best;
        }
        return sum / static_cast<double>(a.size());
    };
    return 0.5 * (directed(x, y) + directed(y, x));
}

double dice_brute(const Volume& a, const Volume& b, int label)
{
    return gdice_brute(a, b, {label});
}

double gdice_brute(const Volume& a, const Volume& b, const std::vector<int>& labels)
{
    double inter = 0.0, total = 0.0;
    for (int k : labels)
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool in_a = a[i] == k, in_b = b[i] == k;
            inter += (in_a && in_b) ? 1.0 : 0.0;
            total += (in_a ? 1.0 : 0.0) + (in_b ? 1.0 : 0.0);
        }
    return 2.0 * inter / total;
}

double otsu_by_scan(std::span<const double> values, int bins)
{
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double best = -1.0, best_t = lo;
    for (int k = 1; k < bins; ++k) {
        const double t = lo + k * (hi - lo) / bins;
        double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
        for (double v : values) {
            if (v < t) {
                n0 += 1;
                s0 += v;
            } else {
                n1 += 1;
                s1 += v;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const double m0 = s0 / n0, m1 = s1 / n1;
        const double between = (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
        if (between > best * (1.0 + 1e-12)) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace cq::oracle
