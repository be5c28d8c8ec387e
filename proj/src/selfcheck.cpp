#include "cardioquant/selfcheck.hpp"

#include "cardioquant/discrepancy.hpp"
#include "cardioquant/distfield.hpp"
#include "cardioquant/gradcheck.hpp"
#include "cardioquant/losses.hpp"
#include "cardioquant/oracles.hpp"
#include "cardioquant/scargraph.hpp"
#include "cardioquant/segmetrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace cq {

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
    Clock::time_point start = Clock::now();
    double ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); }
};

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

SurfaceGraph random_graph(std::mt19937_64& rng)
{
    SurfaceGraph g;
    g.node_count = uniform_int(rng, 1, 12);
    for (int i = 0; i < g.node_count; ++i)
        for (int j = i + 1; j < g.node_count; ++j)
            if (uniform(rng, 0.0, 1.0) < 0.35) g.edges.emplace_back(i, j);
    for (int i = 0; i < g.node_count; ++i) g.tlinks.push_back({uniform(rng, 0.0, 5.0), uniform(rng, 0.0, 5.0)});
    for (std::size_t e = 0; e < g.edges.size(); ++e) g.nlinks.push_back(uniform(rng, 0.0, 3.0));
    const double choices[] = {0.0, kDefaultLambda, uniform(rng, 0.0, 5.0)};
    g.lambda = choices[uniform_int(rng, 0, 2)];
    return g;
}

FeatureBatch random_batch(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double spread)
{
    std::vector<double> d(rows * cols);
    for (auto& v : d) v = uniform(rng, -spread, spread);
    return {rows, cols, std::move(d)};
}

Volume random_mask(std::mt19937_64& rng, int max_side)
{
    const Dims dims{uniform_int(rng, 1, max_side), uniform_int(rng, 1, max_side), uniform_int(rng, 1, max_side)};
    const Spacing sp{uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0)};
    Volume m = Volume::label(dims, sp);
    // a few random boxes
    const int boxes = uniform_int(rng, 1, 4);
    for (int b = 0; b < boxes; ++b) {
        int lo[3], hi[3];
        for (int k = 0; k < 3; ++k) {
            lo[k] = uniform_int(rng, 0, dims[k] - 1);
            hi[k] = uniform_int(rng, lo[k], dims[k] - 1);
        }
        for (int z = lo[2]; z <= hi[2]; ++z)
            for (int y = lo[1]; y <= hi[1]; ++y)
                for (int x = lo[0]; x <= hi[0]; ++x) m.at(x, y, z) = 1.0;
    }
    // salt and pepper
    for (std::size_t i = 0; i < m.size(); ++i)
        if (uniform(rng, 0.0, 1.0) < 0.05) m[i] = 1.0 - m[i];
    return m;
}

PointSet random_points(std::mt19937_64& rng, int n)
{
    PointSet p(static_cast<std::size_t>(n));
    for (auto& q : p) q = {uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -10, 10)};
    return p;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, lo, hi);
    return v;
}

void finish(FamilyResult& r, const Timer& t)
{
    r.passed = r.passed && r.worst <= r.tolerance;
    r.elapsed_ms = t.ms();
}

}  // namespace

FamilyResult check_mincut(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"mincut_enumeration", true, 0, 0.0, 0.0, 0.0, ""};
    std::mt19937_64 rng(opt.seed ^ 0x6d696e637574ULL);
    int mismatches = 0;
    for (int c = 0; c < 200; ++c) {
        const auto g = random_graph(rng);
        const auto cut = min_cut_solve(g);
        const auto [best_l, best] = oracle::min_energy_by_enumeration(g);
        const double recomputed = oracle::energy(g, cut.labels);
        if (cut.energy != best || recomputed != cut.energy) {
            ++mismatches;
            r.detail = "graph " + std::to_string(c) + ": solver " + std::to_string(cut.energy) + " vs enumeration " +
                       std::to_string(best);
        }
        ++r.cases;
    }
    r.worst = mismatches;
    finish(r, t);
    return r;
}

FamilyResult check_cfd_quadrature(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"cfd_quadrature", true, 0, 0.0, 1e-6, 0.0, ""};
    const CfKernel kernel = opt.fault == Fault::cf_kernel_x2
                                ? CfKernel([](std::span<const double> u, std::span<const double> v, double a) {
                                      return 2.0 * cf_kernel(u, v, a);
                                  })
                                : CfKernel(cf_kernel);
    std::mt19937_64 rng(opt.seed ^ 0x636664ULL);
    for (int c = 0; c < 50; ++c) {
        const auto zs = random_batch(rng, static_cast<std::size_t>(uniform_int(rng, 1, 20)), 1, 3.0);
        const auto zt = random_batch(rng, static_cast<std::size_t>(uniform_int(rng, 1, 20)), 1, 3.0);
        const double a = uniform(rng, 0.25, 2.0);
        const double err = std::abs(cfd_point(zs, zt, a, kernel) - oracle::cfd_by_quadrature(zs, zt, a));
        if (err > r.worst) {
            r.worst = err;
            r.detail = "batch " + std::to_string(c);
        }
        ++r.cases;
    }
    const auto s = FeatureBatch::from_rows({{0.0}});
    const auto u = FeatureBatch::from_rows({{std::numbers::pi / 2}});
    const double worked = std::abs(cfd_point(s, u, 1.0, kernel) - (4.0 - 8.0 / std::numbers::pi));
    ++r.cases;
    if (worked > 1e-9) {
        r.passed = false;
        r.detail = "worked example off by " + std::to_string(worked);
    }
    finish(r, t);
    return r;
}

FamilyResult check_varda_quadrature(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"varda_quadrature", true, 0, 0.0, 1e-6, 0.0, ""};
    std::mt19937_64 rng(opt.seed ^ 0x7661726461ULL);
    const auto note = [&](double err, const std::string& what) {
        if (err > r.worst) {
            r.worst = err;
            r.detail = what;
        }
        ++r.cases;
    };
    for (int c = 0; c < 40; ++c) {
        const double us = uniform(rng, -2, 2), ut = uniform(rng, -2, 2);
        const double ls = uniform(rng, 0.1, 2.0), lt = uniform(rng, 0.1, 2.0);
        const double k = varda_kernel(std::span(&us, 1), std::span(&ls, 1), std::span(&ut, 1), std::span(&lt, 1));
        note(std::abs(k - oracle::gaussian_overlap_by_quadrature(us, ls, ut, lt)), "kernel " + std::to_string(c));
    }
    for (int c = 0; c < 40; ++c) {
        const auto ms = static_cast<std::size_t>(uniform_int(rng, 1, 5));
        const auto mt = static_cast<std::size_t>(uniform_int(rng, 1, 5));
        const GaussianBatch qs{{ms, 1, random_vec(rng, ms, -2, 2)}, {ms, 1, random_vec(rng, ms, 0.1, 2.0)}};
        const GaussianBatch qt{{mt, 1, random_vec(rng, mt, -2, 2)}, {mt, 1, random_vec(rng, mt, 0.1, 2.0)}};
        note(std::abs(varda_distance(qs, qt) - oracle::mixture_l2_by_quadrature(qs, qt)), "distance " + std::to_string(c));
    }
    const GaussianBatch a{FeatureBatch::from_rows({{0.0}}), FeatureBatch::from_rows({{0.5}})};
    const GaussianBatch b{FeatureBatch::from_rows({{1.0}}), FeatureBatch::from_rows({{0.5}})};
    note(std::abs(varda_distance(a, b) - 0.313943), "worked example");
    finish(r, t);
    return r;
}

FamilyResult check_dtm_bruteforce(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"dtm_bruteforce", true, 0, 0.0, 1e-6, 0.0, ""};
    std::mt19937_64 rng(opt.seed ^ 0x64746dULL);
    int made = 0;
    while (made < 30) {
        const Volume mask = random_mask(rng, 16);
        const auto nz = count_nonzero(mask);
        if (nz == 0 || nz == mask.size()) continue;  // undefined for all-fg / all-bg
        ++made;
        const auto phi = signed_dtm(mask, 1.0);
        const auto ref = oracle::signed_dtm_brute(mask, 1.0);
        for (std::size_t i = 0; i < mask.size(); ++i) {
            const double err = std::abs(phi.grid[i] - ref[i]);
            if (err > r.worst) {
                r.worst = err;
                r.detail = "mask " + std::to_string(made) + " voxel " + std::to_string(i);
            }
        }
        // |phi|: 1-Lipschitz in the physical metric
        if (mask.size() <= 1500) {
            for (std::size_t i = 0; i < mask.size(); ++i) {
                const Vec3 p = mask.position(i);
                for (std::size_t j = i + 1; j < mask.size(); ++j) {
                    const Vec3 q = mask.position(j);
                    const double dist = std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                                                  (p[2] - q[2]) * (p[2] - q[2]));
                    const double jump = std::abs(std::abs(phi.grid[i]) - std::abs(phi.grid[j]));
                    if (jump > dist + 1e-9) {
                        r.passed = false;
                        r.detail = "Lipschitz violated in mask " + std::to_string(made);
                    }
                }
            }
        }
        ++r.cases;
    }
    finish(r, t);
    return r;
}

FamilyResult check_gradients(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"gradients", true, 0, 0.0, 1e-5, 0.0, ""};
    std::mt19937_64 rng(opt.seed ^ 0x67726164ULL);
    const auto note = [&](double err, const char* what) {
        if (err > r.worst) {
            r.worst = err;
            r.detail = what;
        }
        ++r.cases;
    };
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t n = 12;
        {
            const auto pred = random_vec(rng, n, 0.1, 0.9), phi = random_vec(rng, n, -3, 3);
            note(grad_check([&](std::span<const double> p) { return se_loss_la(p, phi, 0.5); }, pred,
                            se_loss_la_grad(pred, phi, 0.5)),
                 "se_loss_la");
        }
        {
            const auto pred = random_vec(rng, 2 * n, 0.1, 0.9), tgt = random_vec(rng, 2 * n, 0.0, 1.0);
            note(grad_check([&](std::span<const double> p) { return se_loss_scar(p, tgt); }, pred,
                            se_loss_scar_grad(pred, tgt)),
                 "se_loss_scar");
            const auto mask = random_vec(rng, n, 0.0, 1.0);
            note(grad_check([&](std::span<const double> p) { return sa_loss(p, tgt, mask); }, pred,
                            sa_loss_grad(pred, tgt, mask)),
                 "sa_loss");
        }
        {
            const auto pred = random_vec(rng, n, 0.2, 0.8), tgt = random_vec(rng, n, 0.0, 1.0);
            note(grad_check([&](std::span<const double> p) { return bce_loss(p, tgt); }, pred, bce_loss_grad(pred, tgt)),
                 "bce_loss");
            note(grad_check([&](std::span<const double> p) { return soft_dice_loss(p, tgt); }, pred,
                            soft_dice_loss_grad(pred, tgt)),
                 "soft_dice_loss");
        }
        {
            const int classes = 3;
            std::vector<int> target(n);
            for (auto& k : target) k = uniform_int(rng, 0, classes - 1);
            const auto probs = random_vec(rng, n * classes, 0.2, 0.8);
            note(grad_check([&](std::span<const double> p) { return cross_entropy_loss(p, target, classes); }, probs,
                            cross_entropy_loss_grad(probs, target, classes)),
                 "cross_entropy_loss");
        }
        {
            auto a = random_vec(rng, n, -1, 1);
            const auto b = random_vec(rng, n, -1, 1);
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(a[i] - b[i]) < 0.01) a[i] = b[i] + 0.05;  // stay off the kink
            note(grad_check([&](std::span<const double> p) { return l1_mean_loss(p, b); }, a, l1_mean_loss_grad(a, b)),
                 "l1_mean_loss");
        }
        {
            const std::size_t ms = 6, mt = 5, cols = 3;
            const auto zs = random_batch(rng, ms, cols, 2.0);
            const auto zt = random_batch(rng, mt, cols, 2.0);
            const auto wrap = [&](auto fn) {
                return [&, fn](std::span<const double> p) {
                    return fn(FeatureBatch(ms, cols, std::vector<double>(p.begin(), p.end())), zt);
                };
            };
            note(grad_check(wrap([](const FeatureBatch& s, const FeatureBatch& u) { return cfd_point(s, u, 1.0); }),
                            zs.data(), cfd_point_grad(zs, zt, 1.0)),
                 "cfd_point");
            note(grad_check(wrap([](const FeatureBatch& s, const FeatureBatch& u) { return mean_loss(s, u); }),
                            zs.data(), mean_loss_grad(zs, zt)),
                 "mean_loss");
            note(grad_check(wrap([](const FeatureBatch& s, const FeatureBatch& u) { return mmd_gaussian(s, u, 1.5); }),
                            zs.data(), mmd_gaussian_grad(zs, zt, 1.5)),
                 "mmd_gaussian");
        }
        {
            const std::size_t m = 4, cols = 3;
            auto point = random_vec(rng, m * cols, -1.5, 1.5);
            const auto vars = random_vec(rng, m * cols, 0.3, 2.0);
            point.insert(point.end(), vars.begin(), vars.end());
            const auto unpack = [&](std::span<const double> p) {
                return GaussianBatch{{m, cols, {p.begin(), p.begin() + m * cols}}, {m, cols, {p.begin() + m * cols, p.end()}}};
            };
            note(grad_check([&](std::span<const double> p) { return kl_diag_to_std(unpack(p)); }, point,
                            kl_diag_to_std_grad(unpack(point))),
                 "kl_diag_to_std");
        }
    }
    finish(r, t);
    return r;
}

FamilyResult check_metrics(const SelfCheckOptions& opt)
{
    Timer t;
    FamilyResult r{"metric_oracles", true, 0, 0.0, 1e-9, 0.0, ""};
    std::mt19937_64 rng(opt.seed ^ 0x6d6574ULL);
    const auto note = [&](double err, const std::string& what) {
        if (err > r.worst) {
            r.worst = err;
            r.detail = what;
        }
    };
    for (int c = 0; c < 100; ++c) {
        // label volumes over {0, 1, 2}
        const Dims dims{uniform_int(rng, 2, 10), uniform_int(rng, 2, 10), uniform_int(rng, 2, 10)};
        Volume a = Volume::label(dims), b = Volume::label(dims);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = uniform_int(rng, 0, 2);
            b[i] = uniform_int(rng, 0, 2);
        }
        const double d = dice(a, b, 1);
        if (d != oracle::dice_brute(a, b, 1)) {
            r.passed = false;
            r.detail = "dice mismatch in case " + std::to_string(c);
        }
        if (gdice(a, b, {1, 2}) != oracle::gdice_brute(a, b, {1, 2})) {
            r.passed = false;
            r.detail = "gdice mismatch in case " + std::to_string(c);
        }
        const auto x = random_points(rng, uniform_int(rng, 1, 60));
        const auto y = random_points(rng, uniform_int(rng, 1, 60));
        const double hd = hausdorff(x, y), sd = asd(x, y);
        note(std::abs(hd - oracle::hausdorff_brute(x, y)), "hausdorff case " + std::to_string(c));
        note(std::abs(sd - oracle::asd_brute(x, y)), "asd case " + std::to_string(c));
        if (sd > hd + 1e-12) {
            r.passed = false;
            r.detail = "asd > hausdorff in case " + std::to_string(c);
        }
        ++r.cases;
    }
    finish(r, t);
    return r;
}

std::vector<FamilyResult> run_selfcheck(const SelfCheckOptions& opt)
{
    return {check_mincut(opt),         check_cfd_quadrature(opt), check_varda_quadrature(opt),
            check_dtm_bruteforce(opt), check_gradients(opt),      check_metrics(opt)};
}

}  // namespace cq
