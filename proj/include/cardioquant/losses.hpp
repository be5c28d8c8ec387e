#pragma once

#include "cardioquant/distfield.hpp"
#include "cardioquant/volume.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cq {

inline constexpr double kProbEps = 1e-7;  // log clamp
inline constexpr double kDiceEps = 1e-6;  // soft Dice smoothing

struct LossWeights {
    double lambda_la = 1.0;
    double lambda_scar = 1.0;
    double lambda_m1 = 1.0;
    double lambda_m2 = 1.0;
    double t_la = 0.5;   // LA threshold, in (0, 1)
    double alpha = 1.0;  // Dice weight in the CE + Dice segmentation loss

    void validate() const;
};

// Two-channel probability maps (normal wall, scar).
struct ProbPair {
    Volume p_normal;
    Volume p_scar;
};

// Target maps exp(-|phi|) from the signed distance maps of both classes.
ProbPair prob_pair_from_masks(const Volume& normal_mask, const Volume& scar_mask, double beta = 1.0);

// ---- flat kernels --------------------------------------------------------
// Plain arrays; the Volume overloads below add shape checks. *_grad returns
// the derivative with respect to the prediction argument.

double se_loss_la(std::span<const double> pred, std::span<const double> phi, double t_la);
std::vector<double> se_loss_la_grad(std::span<const double> pred, std::span<const double> phi, double t_la);

double bce_loss(std::span<const double> pred, std::span<const double> target);
std::vector<double> bce_loss_grad(std::span<const double> pred, std::span<const double> target);

double soft_dice_loss(std::span<const double> pred, std::span<const double> target);
std::vector<double> soft_dice_loss_grad(std::span<const double> pred, std::span<const double> target);

// probs is class-major: probs[k * n + i] is the probability of class k at voxel i.
double cross_entropy_loss(std::span<const double> probs, std::span<const int> target, int classes);
std::vector<double> cross_entropy_loss_grad(std::span<const double> probs, std::span<const int> target, int classes);

// Pair arrays are channel-major: [normal(0..n), scar(0..n)].
double se_loss_scar(std::span<const double> pred_pair, std::span<const double> target_pair);
std::vector<double> se_loss_scar_grad(std::span<const double> pred_pair, std::span<const double> target_pair);

double sa_loss(std::span<const double> pred_pair, std::span<const double> target_pair, std::span<const double> mask);
std::vector<double> sa_loss_grad(std::span<const double> pred_pair, std::span<const double> target_pair,
                                 std::span<const double> mask);

// Mean |a - b|, or mean |a| when b is absent (zero-loss).
double l1_mean_loss(std::span<const double> a, std::optional<std::span<const double>> b = std::nullopt);
std::vector<double> l1_mean_loss_grad(std::span<const double> a, std::optional<std::span<const double>> b = std::nullopt);

double ddfseg_seg_loss(std::span<const double> probs, std::span<const int> target, int classes, double alpha);

// ---- volume API ----------------------------------------------------------

double se_loss_la(const Volume& pred, const DistanceField& phi, double t_la = 0.5);
double bce_loss(const Volume& pred, const Volume& target);
double soft_dice_loss(const Volume& pred, const Volume& target);
// One probability volume per class; rows must sum to 1 within 1e-5.
double cross_entropy_loss(const std::vector<Volume>& probs, const Volume& target);
double se_loss_scar(const ProbPair& pred, const ProbPair& target);
double sa_loss(const ProbPair& pred, const ProbPair& target, const Volume& mask);
double ddfseg_seg_loss(const std::vector<Volume>& probs, const Volume& target, double alpha);

struct AtrialJsqComponents {
    double bce_la = 0.0;
    double se_la = 0.0;
    double se_scar = 0.0;
    double sa_m1 = 0.0;
    double sa_m2 = 0.0;
};

// L_LA + lambda_scar * SE_scar + lambda_M1 * SA_M1 + lambda_M2 * SA_M2,
// with L_LA = BCE + lambda_LA * SE_LA.
double atrialjsqnet_total(const AtrialJsqComponents& c, const LossWeights& w);

}  // namespace cq
