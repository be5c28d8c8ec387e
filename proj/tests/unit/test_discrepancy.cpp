#include "support.hpp"

#include "cardioquant/discrepancy.hpp"
#include "cardioquant/gradcheck.hpp"
#include "cardioquant/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace cq;
using cqtest::kind_of;

namespace {

constexpr double kPi = std::numbers::pi;

FeatureBatch random_batch(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -2, double hi = 2)
{
    std::vector<double> d(rows * cols);
    for (auto& x : d) x = cqtest::uniform(rng, lo, hi);
    return {rows, cols, std::move(d)};
}

GaussianBatch random_gaussians(std::mt19937_64& rng, std::size_t rows, std::size_t cols)
{
    return {random_batch(rng, rows, cols), random_batch(rng, rows, cols, 0.2, 1.5)};
}

FeatureBatch scalars(std::vector<double> v)
{
    const auto n = v.size();
    return {n, 1, std::move(v)};
}

double normal_pdf(double z, double u, double l) { return std::exp(-0.5 * (z - u) * (z - u) / l) / std::sqrt(2 * kPi * l); }

}  // namespace

TEST_SUITE("oracles") {
    TEST_CASE("quadrature of known integrals") {
        CHECK(oracle::integrate([](double x) { return x * x; }, 0, 3) == doctest::Approx(9.0).epsilon(1e-12));
        CHECK(oracle::integrate([](double x) { return std::sin(x); }, 0, kPi) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(oracle::integrate([](double x) { return normal_pdf(x, 0.3, 0.7); }, -15, 15) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_SUITE("characteristic function distance") {
    TEST_CASE("kernel examples") {
        const std::vector<double> u{0.3, -1.0, 2.0};
        CHECK(cf_kernel(u, u, 0.7) == doctest::Approx(std::pow(1.4, 3)));
        const double x[] = {0.0}, y[] = {kPi / 2};
        CHECK(cf_kernel(x, y, 1.0) == doctest::Approx(4 / kPi));
        CHECK(cf_kernel(y, x, 1.0) == cf_kernel(x, y, 1.0));
        const double near[] = {1e-12};
        CHECK(cf_kernel(x, near, 1.0) == 2.0);
        const double two[] = {0.0, 1.0};
        CHECK_THROWS_AS(cf_kernel(x, two, 1.0), Error);
    }

    TEST_CASE("worked point example") {
        const auto zs = scalars({0.0}), zt = scalars({kPi / 2});
        CHECK(std::abs(cfd_point(zs, zt, 1.0) - (4 - 8 / kPi)) <= 1e-12);
        CHECK(cfd_point(zs, zt, 1.0) == doctest::Approx(1.453521).epsilon(1e-6));
        CHECK(cfd_point(zs, zs, 1.0) == 0.0);
    }

    TEST_CASE("random batches match quadrature") {
        std::mt19937_64 rng(41);
        for (int t = 0; t < 30; ++t) {
            const double a = cqtest::uniform(rng, 0.25, 2.0);
            const auto zs = random_batch(rng, cqtest::uniform_int(rng, 1, 15), 1);
            const auto zt = random_batch(rng, cqtest::uniform_int(rng, 1, 15), 1);
            CHECK(std::abs(cfd_point(zs, zt, a) - oracle::cfd_by_quadrature(zs, zt, a)) <= 1e-6);
        }
        for (int t = 0; t < 5; ++t) {
            const double a = cqtest::uniform(rng, 0.5, 1.5);
            const auto zs = random_batch(rng, cqtest::uniform_int(rng, 1, 4), 2);
            const auto zt = random_batch(rng, cqtest::uniform_int(rng, 1, 4), 2);
            CHECK(std::abs(cfd_point(zs, zt, a) - oracle::cfd_by_quadrature(zs, zt, a)) <= 1e-6);
        }
    }

    TEST_CASE("symmetry, permutation and sign") {
        std::mt19937_64 rng(42);
        for (int t = 0; t < 30; ++t) {
            const auto zs = random_batch(rng, 7, 3), zt = random_batch(rng, 5, 3);
            const double d = cfd_point(zs, zt, 1.0);
            CHECK(d >= -1e-12);
            CHECK(d == doctest::Approx(cfd_point(zt, zs, 1.0)).epsilon(1e-12));
            std::vector<std::vector<double>> rows;
            for (std::size_t i = zs.rows(); i-- > 0;) rows.emplace_back(zs.row(i).begin(), zs.row(i).end());
            const auto rev = FeatureBatch::from_rows(rows);
            CHECK(cfd_point(rev, zt, 1.0) == doctest::Approx(d).epsilon(1e-12));
            CHECK(std::abs(cfd_point(zs, zs, 1.0)) <= 1e-12);
            CHECK(sliced_cfd(zs, zt, 1.0) >= 0.0);
            CHECK(sliced_cfd(rev, zt, 1.0) == doctest::Approx(sliced_cfd(zs, zt, 1.0)).epsilon(1e-12));
        }
    }

    TEST_CASE("custom kernel hook") {
        const auto zs = scalars({0.0}), zt = scalars({kPi / 2});
        const CfKernel doubled = [](std::span<const double> u, std::span<const double> v, double a) {
            return 2.0 * cf_kernel(u, v, a);
        };
        CHECK(cfd_point(zs, zt, 1.0, doubled) == doctest::Approx(2.0 * cfd_point(zs, zt, 1.0)));
    }

    TEST_CASE("errors") {
        CHECK(kind_of([] { cfd_point(scalars({0.0}), FeatureBatch(1, 2, {0.0, 0.0}), 1.0); }) == ErrorKind::shape);
        CHECK(kind_of([] { cfd_point(scalars({0.0}), scalars({1.0}), 0.0); }) == ErrorKind::invalid_argument);
        CHECK(kind_of([] { cfd_point(FeatureBatch(0, 1, {}), scalars({1.0}), 1.0); }) == ErrorKind::empty);
    }

    TEST_CASE("sliced distance") {
        std::mt19937_64 rng(43);
        const auto zs = random_batch(rng, 6, 1), zt = random_batch(rng, 4, 1);
        CHECK(sliced_cfd(zs, zt, 0.8) == cfd_point(zs, zt, 0.8));

        // second coordinate identical in both domains
        std::vector<std::vector<double>> rs, rt;
        for (std::size_t i = 0; i < 4; ++i) {
            rs.push_back({zs(i, 0), 0.5});
            rt.push_back({zt(i, 0), 0.5});
        }
        const auto zs4 = FeatureBatch::from_rows(rs);
        const auto zt4 = FeatureBatch::from_rows(rt);
        CHECK(sliced_cfd(zs4, zt4, 0.8) == doctest::Approx(0.5 * cfd_point(zs4.column(0), zt, 0.8)));
    }

    TEST_CASE("mean loss and combined loss") {
        const auto zs = FeatureBatch::from_rows({{1, 0}, {1, 0}});
        const auto zt = FeatureBatch::from_rows({{-1, 2}, {1, -2}});
        CHECK(mean_loss(zs, zt) == doctest::Approx(1.0));
        CHECK(mean_loss(zs, zs) == 0.0);

        std::mt19937_64 rng(44);
        for (int t = 0; t < 20; ++t) {
            const auto a = random_batch(rng, 5, 3), b = random_batch(rng, 4, 3);
            std::vector<double> c(3);
            for (auto& x : c) x = cqtest::uniform(rng, -1, 1);
            std::vector<double> shifted(b.data().begin(), b.data().end());
            for (std::size_t i = 0; i < b.rows(); ++i)
                for (std::size_t j = 0; j < 3; ++j) shifted[i * 3 + j] += c[j];
            double expect = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                double ma = 0, mb = 0;
                for (std::size_t i = 0; i < a.rows(); ++i) ma += a(i, j) / a.rows();
                for (std::size_t i = 0; i < b.rows(); ++i) mb += b(i, j) / b.rows();
                expect += (ma - mb - c[j]) * (ma - mb - c[j]);
            }
            CHECK(mean_loss(a, FeatureBatch(4, 3, shifted)) == doctest::Approx(expect).epsilon(1e-12));
        }

        const auto s = scalars({0.0}), u = scalars({kPi / 2});
        DiscrepancyWeights w;
        CHECK(cfd_loss(s, u, w) == doctest::Approx(3.920922).epsilon(1e-6));
        CHECK(cfd_loss(s, u, w) == doctest::Approx(4 - 8 / kPi + kPi * kPi / 4).epsilon(1e-12));
        w.beta1 = 0.0;
        w.beta2 = 2.0;
        CHECK(cfd_loss(s, u, w) == doctest::Approx(2.0 * mean_loss(s, u)));
        CHECK(cfd_loss(s, s, w) == 0.0);
        w.beta2 = -1.0;
        CHECK_THROWS_AS(cfd_loss(s, u, w), Error);
    }

    TEST_CASE("gradients") {
        std::mt19937_64 rng(45);
        for (int t = 0; t < 5; ++t) {
            const auto zs = random_batch(rng, 4, 2), zt = random_batch(rng, 3, 2);
            const std::vector<double> x(zs.data().begin(), zs.data().end());
            const auto wrap = [&](auto f) {
                return [&, f](std::span<const double> p) { return f(FeatureBatch(4, 2, {p.begin(), p.end()}), zt); };
            };
            CHECK(grad_check(wrap([](const FeatureBatch& a, const FeatureBatch& b) { return cfd_point(a, b, 1.0); }), x,
                             cfd_point_grad(zs, zt, 1.0)) < 1e-5);
            CHECK(grad_check(wrap([](const FeatureBatch& a, const FeatureBatch& b) { return mean_loss(a, b); }), x,
                             mean_loss_grad(zs, zt)) < 1e-5);
            CHECK(grad_check(wrap([](const FeatureBatch& a, const FeatureBatch& b) { return mmd_gaussian(a, b, 1.3); }),
                             x, mmd_gaussian_grad(zs, zt, 1.3)) < 1e-5);
        }
    }
}

TEST_SUITE("moment distances") {
    TEST_CASE("mmd") {
        CHECK(mmd_gaussian(scalars({0.0}), scalars({1.0}), 1.0) == doctest::Approx(2 - 2 * std::exp(-0.5)));
        CHECK(mmd_gaussian(scalars({0.0}), scalars({1.0}), 1.0) == doctest::Approx(0.786939).epsilon(1e-6));
        std::mt19937_64 rng(46);
        for (int t = 0; t < 20; ++t) {
            const auto a = random_batch(rng, 6, 2), b = random_batch(rng, 5, 2);
            CHECK(mmd_gaussian(a, a, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            const double d = mmd_gaussian(a, b, 1.0);
            CHECK(d >= -1e-12);
            const double diam = 4.0 * std::sqrt(2.0);
            CHECK(mmd_gaussian(a, b, 10 * diam) < mmd_gaussian(a, b, diam));
        }
        CHECK_THROWS_AS(mmd_gaussian(scalars({0.0}), scalars({1.0}), 0.0), Error);
        CHECK(median_heuristic_sigma(scalars({0.0, 0.0}), scalars({0.0})) == 1.0);
        CHECK(median_heuristic_sigma(scalars({0.0}), scalars({3.0})) == 3.0);
    }

    TEST_CASE("coral") {
        // variances 1 and 2 (divisor M - 1)
        const auto a = scalars({-1.0, 0.0, 1.0});
        const auto b = scalars({-std::sqrt(2.0), 0.0, std::sqrt(2.0)});
        CHECK(coral_distance(a, b) == doctest::Approx(0.25));
        CHECK(coral_distance(a, a) == 0.0);
        const auto shifted = scalars({4.0, 5.0, 6.0});
        CHECK(coral_distance(a, shifted) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(kind_of([&] { coral_distance(scalars({1.0}), a); }) == ErrorKind::invalid_argument);
    }

    TEST_CASE("KL to the standard normal") {
        const auto kl = [](double u, double l) { return kl_diag_to_std({scalars({u}), scalars({l})}); };
        CHECK(kl(0, 1) == 0.0);
        CHECK(kl(1, 1) == doctest::Approx(0.5));
        CHECK(kl(0, 2) == doctest::Approx(0.5 * (1 - std::log(2.0))));
        CHECK(kl(0, 2) == doctest::Approx(0.153426).epsilon(1e-6));
        CHECK(kind_of([] { kl_diag_to_std({scalars({0.0}), scalars({0.0})}); }) == ErrorKind::invalid_argument);

        std::mt19937_64 rng(47);
        for (int t = 0; t < 50; ++t) {
            const double u1 = cqtest::uniform(rng, -3, 3), l1 = cqtest::uniform(rng, 0.1, 4);
            const double u2 = cqtest::uniform(rng, -3, 3), l2 = cqtest::uniform(rng, 0.1, 4);
            CHECK(kl(0.5 * (u1 + u2), 0.5 * (l1 + l2)) < 0.5 * (kl(u1, l1) + kl(u2, l2)));
            if (u1 != 0.0 || l1 != 1.0) CHECK(kl(u1, l1) > 0.0);
        }
        for (int t = 0; t < 5; ++t) {
            const auto q = random_gaussians(rng, 3, 2);
            std::vector<double> x(q.means.data().begin(), q.means.data().end());
            x.insert(x.end(), q.vars.data().begin(), q.vars.data().end());
            const auto f = [](std::span<const double> p) {
                return kl_diag_to_std({FeatureBatch(3, 2, {p.begin(), p.begin() + 6}),
                                       FeatureBatch(3, 2, {p.begin() + 6, p.end()})});
            };
            CHECK(grad_check(f, x, kl_diag_to_std_grad(q)) < 1e-5);
        }
    }
}

TEST_SUITE("posterior overlap distance") {
    TEST_CASE("kernel examples") {
        const double z[] = {0.0}, one[] = {1.0}, h[] = {0.5};
        CHECK(varda_kernel(z, h, z, h) == doctest::Approx(1 / std::sqrt(2 * kPi)));
        CHECK(varda_kernel(z, h, z, h) == doctest::Approx(0.398942).epsilon(1e-6));
        CHECK(varda_kernel(z, h, one, h) == doctest::Approx(std::exp(-0.5) / std::sqrt(2 * kPi)));
        CHECK(varda_kernel(z, h, one, h) == doctest::Approx(0.241971).epsilon(1e-6));
        const double zero[] = {0.0};
        CHECK_THROWS_AS(varda_kernel(z, zero, z, h), Error);
    }

    TEST_CASE("kernel matches quadrature and factorizes") {
        std::mt19937_64 rng(48);
        for (int t = 0; t < 20; ++t) {
            const double us = cqtest::uniform(rng, -2, 2), ut = cqtest::uniform(rng, -2, 2);
            const double ls = cqtest::uniform(rng, 0.2, 2), lt = cqtest::uniform(rng, 0.2, 2);
            const double a[] = {us}, b[] = {ls}, c[] = {ut}, d[] = {lt};
            CHECK(std::abs(varda_kernel(a, b, c, d) - oracle::gaussian_overlap_by_quadrature(us, ls, ut, lt)) <= 1e-8);
            CHECK(varda_kernel(a, b, c, d) == doctest::Approx(varda_kernel(c, d, a, b)).epsilon(1e-14));
        }
        for (int t = 0; t < 3; ++t) {
            const double u1[] = {cqtest::uniform(rng, -1, 1), cqtest::uniform(rng, -1, 1)};
            const double l1[] = {cqtest::uniform(rng, 0.3, 1.5), cqtest::uniform(rng, 0.3, 1.5)};
            const double u2[] = {cqtest::uniform(rng, -1, 1), cqtest::uniform(rng, -1, 1)};
            const double l2[] = {cqtest::uniform(rng, 0.3, 1.5), cqtest::uniform(rng, 0.3, 1.5)};
            const double k2 = varda_kernel(u1, l1, u2, l2);
            double prod = 1.0;
            for (int k = 0; k < 2; ++k)
                prod *= oracle::gaussian_overlap_by_quadrature(u1[k], l1[k], u2[k], l2[k]);
            CHECK(std::abs(k2 - prod) <= 1e-8);
            // direct 2-D integral
            const double direct = oracle::integrate(
                [&](double x) {
                    return oracle::integrate(
                        [&](double y) {
                            return normal_pdf(x, u1[0], l1[0]) * normal_pdf(y, u1[1], l1[1]) *
                                   normal_pdf(x, u2[0], l2[0]) * normal_pdf(y, u2[1], l2[1]);
                        },
                        -10, 10, 1e-13);
                },
                -10, 10, 1e-12, 32);
            CHECK(std::abs(k2 - direct) <= 1e-8);
        }
    }

    TEST_CASE("distance examples and quadrature") {
        const GaussianBatch s{scalars({0.0}), scalars({0.5})}, t{scalars({1.0}), scalars({0.5})};
        CHECK(varda_distance(s, t) == doctest::Approx(0.313943).epsilon(1e-6));
        CHECK(varda_distance(s, s) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        std::mt19937_64 rng(49);
        for (int k = 0; k < 20; ++k) {
            const auto qs = random_gaussians(rng, cqtest::uniform_int(rng, 1, 5), 1);
            const auto qt = random_gaussians(rng, cqtest::uniform_int(rng, 1, 5), 1);
            const double d = varda_distance(qs, qt);
            CHECK(d >= -1e-12);
            CHECK(d == doctest::Approx(varda_distance(qt, qs)).epsilon(1e-12));
            CHECK(std::abs(d - oracle::mixture_l2_by_quadrature(qs, qt)) <= 1e-6);
        }
    }

    TEST_CASE("marginal distance") {
        std::mt19937_64 rng(50);
        const auto q1 = random_gaussians(rng, 3, 1), q2 = random_gaussians(rng, 4, 1);
        CHECK(varda_marginal_distance(q1, q2) == doctest::Approx(varda_distance(q1, q2)).epsilon(1e-14));
        const auto qs = random_gaussians(rng, 3, 2), qt = random_gaussians(rng, 4, 2);
        const double expect = oracle::mixture_l2_by_quadrature(qs.column(0), qt.column(0)) +
                              oracle::mixture_l2_by_quadrature(qs.column(1), qt.column(1));
        CHECK(std::abs(varda_marginal_distance(qs, qt) - expect) <= 2e-6);
        CHECK(varda_marginal_distance(qs, qs) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(kind_of([&] { varda_distance(q1, qs); }) == ErrorKind::shape);
    }
}

TEST_SUITE("total loss composition") {
    TEST_CASE("examples") {
        DiscrepancyWeights w;
        const std::map<std::string, double> zeros{{"seg", 0}, {"prior", 0}, {"recon", 0}, {"explicit", 0}};
        CHECK(compose_total(zeros, w, TotalScheme::cfdnet) == 0.0);
        w.cfdnet_alpha = {1, 0, 0, 0};
        CHECK(compose_total({{"seg", 0.7}, {"prior", 3}, {"recon", 4}, {"explicit", 5}}, w, TotalScheme::cfdnet) ==
              doctest::Approx(0.7));
        CHECK(compose_total({{"lb_source", 2}, {"lb_target", 3}, {"discrepancy", 0.5}}, w, TotalScheme::varda) ==
              doctest::Approx(-4.5));
        CHECK(kind_of([&] { compose_total({{"seg", 1}}, w, TotalScheme::cfdnet); }) == ErrorKind::invalid_argument);
        CHECK(kind_of([&] {
                  compose_total({{"lb_source", NAN}, {"lb_target", 3}, {"discrepancy", 0.5}}, w, TotalScheme::varda);
              }) == ErrorKind::numeric);
    }

    TEST_CASE("superposition") {
        std::mt19937_64 rng(51);
        DiscrepancyWeights w;
        w.cfdnet_alpha = {0.3, 1.7, 0.2, 2.5};
        const char* names[] = {"seg", "prior", "recon", "explicit"};
        for (int t = 0; t < 20; ++t) {
            std::map<std::string, double> x, y, sum;
            for (const char* n : names) {
                x[n] = cqtest::uniform(rng, -5, 5);
                y[n] = cqtest::uniform(rng, -5, 5);
                sum[n] = x[n] + y[n];
            }
            CHECK(compose_total(sum, w, TotalScheme::cfdnet) ==
                  doctest::Approx(compose_total(x, w, TotalScheme::cfdnet) + compose_total(y, w, TotalScheme::cfdnet)));
        }
    }
}

TEST_SUITE("batch files") {
    TEST_CASE("readers") {
        cqtest::TempDir dir("batches");
        std::ofstream(dir.file("z.csv")) << "1,2\n3,4\n\n5,6\n";
        const auto z = read_feature_batch(dir.file("z.csv"));
        CHECK(z.rows() == 3);
        CHECK(z.cols() == 2);
        CHECK(z(2, 1) == 6.0);

        std::ofstream(dir.file("ragged.csv")) << "1,2\n3\n";
        CHECK(kind_of([&] { read_feature_batch(dir.file("ragged.csv")); }) == ErrorKind::format);
        std::ofstream(dir.file("text.csv")) << "1,x\n";
        CHECK(kind_of([&] { read_feature_batch(dir.file("text.csv")); }) == ErrorKind::format);
        std::ofstream(dir.file("empty.csv")) << "";
        CHECK(kind_of([&] { read_feature_batch(dir.file("empty.csv")); }) == ErrorKind::empty);

        std::ofstream(dir.file("v.csv")) << "1,1\n1,1\n0.5,2\n";
        const auto q = read_gaussian_batch(dir.file("z.csv"), dir.file("v.csv"));
        CHECK(q.vars(2, 0) == 0.5);
        std::ofstream(dir.file("neg.csv")) << "1,1\n1,-1\n0.5,2\n";
        CHECK(kind_of([&] { read_gaussian_batch(dir.file("z.csv"), dir.file("neg.csv")); }) ==
              ErrorKind::invalid_argument);
        std::ofstream(dir.file("short.csv")) << "1,1\n";
        CHECK(kind_of([&] { read_gaussian_batch(dir.file("z.csv"), dir.file("short.csv")); }) == ErrorKind::shape);
    }
}
