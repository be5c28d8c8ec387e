#include "cardioquant/discrepancy.hpp"

#include "cardioquant/csv.hpp"
#include "cardioquant/error.hpp"
#include "cardioquant/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cq {

namespace {

void check_pair(const FeatureBatch& zs, const FeatureBatch& zt, const char* what)
{
    require(zs.rows() > 0 && zt.rows() > 0, ErrorKind::empty, std::string(what) + ": empty batch");
    require(zs.cols() == zt.cols(), ErrorKind::shape,
            std::string(what) + ": feature dimensions differ (" + std::to_string(zs.cols()) + " vs " +
                std::to_string(zt.cols()) + ")");
}

// (1 / (|A| |B|)) sum_p sum_q k(A_p, B_q), rows reduced in a fixed order.
template <class Kernel>
double mean_pair_kernel(const FeatureBatch& a, const FeatureBatch& b, const Kernel& k)
{
    std::vector<double> row_sums(a.rows());
    parallel_for(a.rows(), [&](std::size_t p) {
        double s = 0.0;
        for (std::size_t q = 0; q < b.rows(); ++q) s += k(a.row(p), b.row(q));
        row_sums[p] = s;
    });
    return pairwise_sum(row_sums) / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

// 2 sin(a d) / d and its derivative in d.
double sinc_term(double d, double a)
{
    if (std::abs(d) < 1e-10) return 2.0 * a;
    return 2.0 * std::sin(d * a) / d;
}

double sinc_term_derivative(double d, double a)
{
    const double x = a * d;
    if (std::abs(x) < 1e-3) return 2.0 * a * (-a * x / 3.0 + a * x * x * x / 30.0);
    return 2.0 * (x * std::cos(x) - std::sin(x)) / (d * d);
}

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double sigma)
{
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) d2 += (u[k] - v[k]) * (u[k] - v[k]);
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

std::vector<double> column_means(const FeatureBatch& z)
{
    std::vector<double> m(z.cols(), 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j) m[j] += z(i, j);
    for (double& v : m) v /= static_cast<double>(z.rows());
    return m;
}

std::vector<double> covariance(const FeatureBatch& z)
{
    const std::size_t n = z.cols();
    const auto mu = column_means(z);
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = 0; s < n; ++s) c[r * n + s] += (z(i, r) - mu[r]) * (z(i, s) - mu[s]);
    for (double& v : c) v /= static_cast<double>(z.rows() - 1);
    return c;
}

void check_gaussian_pair(const GaussianBatch& qs, const GaussianBatch& qt)
{
    qs.validate();
    qt.validate();
    require(qs.means.cols() == qt.means.cols(), ErrorKind::shape, "varda: feature dimensions differ");
}

template <class Kernel>
double gaussian_mean_pair(const GaussianBatch& a, const GaussianBatch& b, const Kernel& k)
{
    std::vector<double> row_sums(a.means.rows());
    parallel_for(a.means.rows(), [&](std::size_t p) {
        double s = 0.0;
        for (std::size_t q = 0; q < b.means.rows(); ++q) s += k(a.means.row(p), a.vars.row(p), b.means.row(q), b.vars.row(q));
        row_sums[p] = s;
    });
    return pairwise_sum(row_sums) / (static_cast<double>(a.means.rows()) * static_cast<double>(b.means.rows()));
}

}  // namespace

// ---- batches ----------------------------------------------------------------

FeatureBatch::FeatureBatch(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    require(data_.size() == rows_ * cols_, ErrorKind::shape, "FeatureBatch: data size mismatch");
    for (double v : data_) require(std::isfinite(v), ErrorKind::numeric, "FeatureBatch: non-finite sample");
}

FeatureBatch FeatureBatch::from_rows(const std::vector<std::vector<double>>& rows)
{
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        require(r.size() == cols, ErrorKind::format, "FeatureBatch: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return FeatureBatch(rows.size(), cols, std::move(data));
}

FeatureBatch FeatureBatch::column(std::size_t j) const
{
    require(j < cols_, ErrorKind::invalid_argument, "FeatureBatch: column out of range");
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return FeatureBatch(rows_, 1, std::move(c));
}

void GaussianBatch::validate() const
{
    require(means.rows() > 0, ErrorKind::empty, "GaussianBatch: empty batch");
    require(means.rows() == vars.rows() && means.cols() == vars.cols(), ErrorKind::shape,
            "GaussianBatch: means and variances differ in shape");
    for (double v : vars.data()) require(v > 0.0, ErrorKind::invalid_argument, "GaussianBatch: non-positive variance");
}

GaussianBatch GaussianBatch::column(std::size_t j) const { return {means.column(j), vars.column(j)}; }

// ---- characteristic-function distance -------------------------------------------

double cf_kernel(std::span<const double> u, std::span<const double> v, double a)
{
    require(u.size() == v.size(), ErrorKind::shape, "cf_kernel: dimension mismatch");
    require(a > 0.0, ErrorKind::invalid_argument, "cf_kernel: a must be positive");
    double k = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) k *= sinc_term(u[i] - v[i], a);
    return k;
}

double cfd_point(const FeatureBatch& zs, const FeatureBatch& zt, double a, const CfKernel& kernel)
{
    check_pair(zs, zt, "cfd_point");
    require(a > 0.0, ErrorKind::invalid_argument, "cfd_point: a must be positive");
    const auto k = [&](std::span<const double> u, std::span<const double> v) { return kernel(u, v, a); };
    return mean_pair_kernel(zs, zs, k) + mean_pair_kernel(zt, zt, k) - 2.0 * mean_pair_kernel(zs, zt, k);
}

double cfd_point(const FeatureBatch& zs, const FeatureBatch& zt, double a)
{
    return cfd_point(zs, zt, a, cf_kernel);
}

std::vector<double> cfd_point_grad(const FeatureBatch& zs, const FeatureBatch& zt, double a)
{
    check_pair(zs, zt, "cfd_point");
    const std::size_t n = zs.cols();
    const double ms = static_cast<double>(zs.rows()), mt = static_cast<double>(zt.rows());

    // d/du of prod_k g(u_k - v_k)
    const auto kernel_grad = [&](std::span<const double> u, std::span<const double> v, std::vector<double>& out) {
        std::vector<double> g(n), dg(n);
        for (std::size_t k = 0; k < n; ++k) {
            g[k] = sinc_term(u[k] - v[k], a);
            dg[k] = sinc_term_derivative(u[k] - v[k], a);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double prod = dg[j];
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) prod *= g[k];
            out[j] = prod;
        }
    };

    std::vector<double> grad(zs.rows() * n, 0.0);
    parallel_for(zs.rows(), [&](std::size_t p) {
        std::vector<double> tmp(n);
        double* gp = grad.data() + p * n;
        for (std::size_t q = 0; q < zs.rows(); ++q) {
            kernel_grad(zs.row(p), zs.row(q), tmp);
            for (std::size_t j = 0; j < n; ++j) gp[j] += 2.0 * tmp[j] / (ms * ms);
        }
        for (std::size_t q = 0; q < zt.rows(); ++q) {
            kernel_grad(zs.row(p), zt.row(q), tmp);
            for (std::size_t j = 0; j < n; ++j) gp[j] -= 2.0 * tmp[j] / (ms * mt);
        }
    });
    return grad;
}

double sliced_cfd(const FeatureBatch& zs, const FeatureBatch& zt, double a)
{
    check_pair(zs, zt, "sliced_cfd");
    double s = 0.0;
    for (std::size_t j = 0; j < zs.cols(); ++j) s += cfd_point(zs.column(j), zt.column(j), a);
    return s / static_cast<double>(zs.cols());
}

double mean_loss(const FeatureBatch& zs, const FeatureBatch& zt)
{
    check_pair(zs, zt, "mean_loss");
    const auto ms = column_means(zs), mt = column_means(zt);
    double s = 0.0;
    for (std::size_t j = 0; j < ms.size(); ++j) s += (ms[j] - mt[j]) * (ms[j] - mt[j]);
    return s;
}

std::vector<double> mean_loss_grad(const FeatureBatch& zs, const FeatureBatch& zt)
{
    check_pair(zs, zt, "mean_loss");
    const auto ms = column_means(zs), mt = column_means(zt);
    std::vector<double> g(zs.rows() * zs.cols());
    for (std::size_t i = 0; i < zs.rows(); ++i)
        for (std::size_t j = 0; j < zs.cols(); ++j)
            g[i * zs.cols() + j] = 2.0 * (ms[j] - mt[j]) / static_cast<double>(zs.rows());
    return g;
}

double cfd_loss(const FeatureBatch& zs, const FeatureBatch& zt, const DiscrepancyWeights& w)
{
    require(w.beta1 >= 0.0 && w.beta2 >= 0.0, ErrorKind::invalid_argument, "cfd_loss: weights must be non-negative");
    return w.beta1 * sliced_cfd(zs, zt, w.a) + w.beta2 * mean_loss(zs, zt);
}

// ---- MMD / CORAL ------------------------------------------------------------------

double mmd_gaussian(const FeatureBatch& zs, const FeatureBatch& zt, double sigma)
{
    check_pair(zs, zt, "mmd_gaussian");
    require(sigma > 0.0, ErrorKind::invalid_argument, "mmd_gaussian: sigma must be positive");
    const auto k = [&](std::span<const double> u, std::span<const double> v) { return gaussian_kernel(u, v, sigma); };
    return mean_pair_kernel(zs, zs, k) + mean_pair_kernel(zt, zt, k) - 2.0 * mean_pair_kernel(zs, zt, k);
}

std::vector<double> mmd_gaussian_grad(const FeatureBatch& zs, const FeatureBatch& zt, double sigma)
{
    check_pair(zs, zt, "mmd_gaussian");
    const std::size_t n = zs.cols();
    const double ms = static_cast<double>(zs.rows()), mt = static_cast<double>(zt.rows());
    const double s2 = sigma * sigma;
    std::vector<double> grad(zs.rows() * n, 0.0);
    parallel_for(zs.rows(), [&](std::size_t p) {
        double* gp = grad.data() + p * n;
        const auto u = zs.row(p);
        for (std::size_t q = 0; q < zs.rows(); ++q) {
            const auto v = zs.row(q);
            const double k = gaussian_kernel(u, v, sigma);
            for (std::size_t j = 0; j < n; ++j) gp[j] += 2.0 / (ms * ms) * (-k * (u[j] - v[j]) / s2);
        }
        for (std::size_t q = 0; q < zt.rows(); ++q) {
            const auto v = zt.row(q);
            const double k = gaussian_kernel(u, v, sigma);
            for (std::size_t j = 0; j < n; ++j) gp[j] -= 2.0 / (ms * mt) * (-k * (u[j] - v[j]) / s2);
        }
    });
    return grad;
}

double median_heuristic_sigma(const FeatureBatch& zs, const FeatureBatch& zt)
{
    check_pair(zs, zt, "median_heuristic_sigma");
    std::vector<std::span<const double>> pooled;
    for (std::size_t i = 0; i < zs.rows(); ++i) pooled.push_back(zs.row(i));
    for (std::size_t i = 0; i < zt.rows(); ++i) pooled.push_back(zt.row(i));
    std::vector<double> d;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        for (std::size_t j = i + 1; j < pooled.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < zs.cols(); ++k) s += (pooled[i][k] - pooled[j][k]) * (pooled[i][k] - pooled[j][k]);
            d.push_back(std::sqrt(s));
        }
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    const double med = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
    return med > 0.0 ? med : 1.0;
}

double coral_distance(const FeatureBatch& zs, const FeatureBatch& zt)
{
    check_pair(zs, zt, "coral_distance");
    require(zs.rows() >= 2 && zt.rows() >= 2, ErrorKind::invalid_argument, "coral_distance: need at least two samples per batch");
    const auto cs = covariance(zs), ct = covariance(zt);
    double f = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) f += (cs[i] - ct[i]) * (cs[i] - ct[i]);
    const double n = static_cast<double>(zs.cols());
    return f / (4.0 * n * n);
}

// ---- Gaussian posteriors -----------------------------------------------------------

double kl_diag_to_std(const GaussianBatch& q)
{
    q.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < q.means.rows(); ++i) {
        double row = 0.0;
        for (std::size_t l = 0; l < q.means.cols(); ++l) {
            const double u = q.means(i, l), lam = q.vars(i, l);
            row += u * u + lam - 1.0 - std::log(lam);
        }
        s += 0.5 * row;
    }
    return s / static_cast<double>(q.means.rows());
}

std::vector<double> kl_diag_to_std_grad(const GaussianBatch& q)
{
    q.validate();
    const double m = static_cast<double>(q.means.rows());
    const std::size_t count = q.means.rows() * q.means.cols();
    std::vector<double> g(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = q.means.data()[i] / m;
        g[count + i] = 0.5 * (1.0 - 1.0 / q.vars.data()[i]) / m;
    }
    return g;
}

double varda_kernel(std::span<const double> us, std::span<const double> ls, std::span<const double> ut,
                    std::span<const double> lt)
{
    require(us.size() == ls.size() && us.size() == ut.size() && us.size() == lt.size(), ErrorKind::shape,
            "varda_kernel: dimension mismatch");
    double quad = 0.0;
    double prod = 1.0;
    for (std::size_t l = 0; l < us.size(); ++l) {
        require(ls[l] > 0.0 && lt[l] > 0.0, ErrorKind::invalid_argument, "varda_kernel: non-positive variance");
        const double s = ls[l] + lt[l];
        quad += (us[l] - ut[l]) * (us[l] - ut[l]) / s;
        prod *= s;
    }
    const double n = static_cast<double>(us.size());
    return std::exp(-0.5 * quad) / (std::pow(2.0 * std::numbers::pi, n / 2.0) * std::sqrt(prod));
}

double varda_distance(const GaussianBatch& qs, const GaussianBatch& qt)
{
    check_gaussian_pair(qs, qt);
    return gaussian_mean_pair(qs, qs, varda_kernel) + gaussian_mean_pair(qt, qt, varda_kernel) -
           2.0 * gaussian_mean_pair(qs, qt, varda_kernel);
}

double varda_marginal_distance(const GaussianBatch& qs, const GaussianBatch& qt)
{
    check_gaussian_pair(qs, qt);
    double s = 0.0;
    for (std::size_t j = 0; j < qs.means.cols(); ++j) s += varda_distance(qs.column(j), qt.column(j));
    return s;
}

double compose_total(const std::map<std::string, double>& components, const DiscrepancyWeights& w, TotalScheme scheme)
{
    const auto get = [&](const char* name) {
        const auto it = components.find(name);
        require(it != components.end(), ErrorKind::invalid_argument, std::string("compose_total: missing component '") + name + "'");
        require(std::isfinite(it->second), ErrorKind::numeric, std::string("compose_total: non-finite component '") + name + "'");
        return it->second;
    };
    if (scheme == TotalScheme::cfdnet) {
        const auto& al = w.cfdnet_alpha;
        return al[0] * get("seg") + al[1] * get("prior") + al[2] * get("recon") + al[3] * get("explicit");
    }
    const auto& al = w.varda_alpha;
    return -al[0] * get("lb_source") - al[1] * get("lb_target") + al[2] * get("discrepancy");
}

FeatureBatch read_feature_batch(const std::filesystem::path& path)
{
    const auto table = read_csv(path);
    require(!table.rows.empty(), ErrorKind::empty, path.string() + ": no samples");
    return FeatureBatch::from_rows(table.rows);
}

GaussianBatch read_gaussian_batch(const std::filesystem::path& means, const std::filesystem::path& vars)
{
    GaussianBatch q{read_feature_batch(means), read_feature_batch(vars)};
    q.validate();
    return q;
}

}  // namespace cq
