#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cq {

// M x n sample matrix, row-major.
class FeatureBatch {
public:
    FeatureBatch() = default;
    FeatureBatch(std::size_t rows, std::size_t cols, std::vector<double> data);
    static FeatureBatch from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    // Single coordinate as an M x 1 batch.
    FeatureBatch column(std::size_t j) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Per-sample diagonal Gaussians N(means_i, diag(vars_i)).
struct GaussianBatch {
    FeatureBatch means;
    FeatureBatch vars;

    void validate() const;
    GaussianBatch column(std::size_t j) const;
};

struct DiscrepancyWeights {
    double beta1 = 1.0;  // sliced CF distance
    double beta2 = 1.0;  // mean matching
    std::array<double, 4> cfdnet_alpha{1.0, 1.0, 1.0, 1.0};
    std::array<double, 3> varda_alpha{1.0, 1.0, 1.0};
    double a = 1.0;  // half-width of the frequency box [-a, a]^n
};

using CfKernel = std::function<double(std::span<const double>, std::span<const double>, double)>;

// prod_k 2 sin((u_k - v_k) a) / (u_k - v_k); coordinates with |u_k - v_k| < 1e-10 use the limit 2a.
double cf_kernel(std::span<const double> u, std::span<const double> v, double a);

// Integral over [-a, a]^n of |phi_S(t) - phi_T(t)|^2 for the empirical
// characteristic functions of the two batches. Self terms use 1/M_d^2 and
// the cross term 1/(M_S M_T).
double cfd_point(const FeatureBatch& zs, const FeatureBatch& zt, double a = 1.0);
double cfd_point(const FeatureBatch& zs, const FeatureBatch& zt, double a, const CfKernel& kernel);
// d cfd_point / d zs, row-major like zs.
std::vector<double> cfd_point_grad(const FeatureBatch& zs, const FeatureBatch& zt, double a = 1.0);

// Mean of the one-dimensional distances of each coordinate.
double sliced_cfd(const FeatureBatch& zs, const FeatureBatch& zt, double a = 1.0);

// |mean(zs) - mean(zt)|^2.
double mean_loss(const FeatureBatch& zs, const FeatureBatch& zt);
std::vector<double> mean_loss_grad(const FeatureBatch& zs, const FeatureBatch& zt);

// beta1 * sliced_cfd + beta2 * mean_loss.
double cfd_loss(const FeatureBatch& zs, const FeatureBatch& zt, const DiscrepancyWeights& w);

// Biased (V-statistic) squared MMD with a Gaussian kernel of bandwidth sigma.
double mmd_gaussian(const FeatureBatch& zs, const FeatureBatch& zt, double sigma);
std::vector<double> mmd_gaussian_grad(const FeatureBatch& zs, const FeatureBatch& zt, double sigma);
// Median pairwise distance over the pooled samples (1 when it is 0).
double median_heuristic_sigma(const FeatureBatch& zs, const FeatureBatch& zt);

// |C_S - C_T|_F^2 / (4 n^2) with unbiased sample covariances.
double coral_distance(const FeatureBatch& zs, const FeatureBatch& zt);

// Mean over samples of KL(N(u, diag(lambda)) || N(0, I)).
double kl_diag_to_std(const GaussianBatch& q);
// Gradient w.r.t. (means, vars), concatenated.
std::vector<double> kl_diag_to_std_grad(const GaussianBatch& q);

// Integral of N(z; uS, diag lS) * N(z; uT, diag lT) dz.
double varda_kernel(std::span<const double> us, std::span<const double> ls, std::span<const double> ut,
                    std::span<const double> lt);

// Squared L2 distance between the two Gaussian-mixture approximations.
double varda_distance(const GaussianBatch& qs, const GaussianBatch& qt);
// Sum over coordinates of the one-dimensional distances.
double varda_marginal_distance(const GaussianBatch& qs, const GaussianBatch& qt);

enum class TotalScheme { cfdnet, varda };

// cfdnet: alpha1 seg + alpha2 prior + alpha3 recon + alpha4 explicit
// varda:  -alpha1 lb_source - alpha2 lb_target + alpha3 discrepancy
double compose_total(const std::map<std::string, double>& components, const DiscrepancyWeights& w, TotalScheme scheme);

// One sample per CSV row, no header.
FeatureBatch read_feature_batch(const std::filesystem::path& path);
GaussianBatch read_gaussian_batch(const std::filesystem::path& means, const std::filesystem::path& vars);

}  // namespace cq
