#include "cardioquant/losses.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cq {

namespace {

void same_length(std::size_t a, std::size_t b, const char* what)
{
    require(a == b, ErrorKind::shape,
            std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

std::vector<int> label_array(const Volume& target)
{
    std::vector<int> out(target.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(target[i]);
    return out;
}

std::vector<double> stack_classes(const std::vector<Volume>& probs, const Volume& target)
{
    require(!probs.empty(), ErrorKind::invalid_argument, "no class probability volumes");
    const std::size_t n = target.size();
    std::vector<double> flat;
    flat.reserve(probs.size() * n);
    for (const auto& p : probs) {
        require_same_grid(p, target, "class probabilities");
        flat.insert(flat.end(), p.data().begin(), p.data().end());
    }
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) row += flat[k * n + i];
        require(std::abs(row - 1.0) <= 1e-5, ErrorKind::invalid_argument,
                "class probabilities at voxel " + std::to_string(i) + " sum to " + std::to_string(row));
    }
    return flat;
}

std::vector<double> stack_pair(const ProbPair& p)
{
    require_same_grid(p.p_normal, p.p_scar, "probability pair");
    std::vector<double> flat(p.p_normal.data().begin(), p.p_normal.data().end());
    flat.insert(flat.end(), p.p_scar.data().begin(), p.p_scar.data().end());
    return flat;
}

}  // namespace

void LossWeights::validate() const
{
    for (double v : {lambda_la, lambda_scar, lambda_m1, lambda_m2, t_la, alpha})
        require(std::isfinite(v), ErrorKind::numeric, "loss weight is not finite");
    require(t_la > 0.0 && t_la < 1.0, ErrorKind::invalid_argument, "T_LA must lie in (0, 1)");
}

ProbPair prob_pair_from_masks(const Volume& normal_mask, const Volume& scar_mask, double beta)
{
    require_same_grid(normal_mask, scar_mask, "prob_pair_from_masks");
    return {prob_from_dtm(signed_dtm(normal_mask, beta)), prob_from_dtm(signed_dtm(scar_mask, beta))};
}

// ---- SE (LA) --------------------------------------------------------------

double se_loss_la(std::span<const double> pred, std::span<const double> phi, double t_la)
{
    same_length(pred.size(), phi.size(), "se_loss_la");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - t_la) * phi[i];
    return s;
}

std::vector<double> se_loss_la_grad(std::span<const double> pred, std::span<const double> phi, double)
{
    same_length(pred.size(), phi.size(), "se_loss_la");
    return {phi.begin(), phi.end()};
}

// ---- BCE ------------------------------------------------------------------

double bce_loss(std::span<const double> pred, std::span<const double> target)
{
    same_length(pred.size(), target.size(), "bce_loss");
    require(!pred.empty(), ErrorKind::empty, "bce_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = clamp_prob(pred[i]);
        const double y = target[i];
        s -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return s / static_cast<double>(pred.size());
}

std::vector<double> bce_loss_grad(std::span<const double> pred, std::span<const double> target)
{
    same_length(pred.size(), target.size(), "bce_loss");
    const double n = static_cast<double>(pred.size());
    std::vector<double> g(pred.size(), 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] <= kProbEps || pred[i] >= 1.0 - kProbEps) continue;  // clamped: flat
        const double p = pred[i], y = target[i];
        g[i] = (-y / p + (1.0 - y) / (1.0 - p)) / n;
    }
    return g;
}

// ---- soft Dice --------------------------------------------------------------

double soft_dice_loss(std::span<const double> pred, std::span<const double> target)
{
    same_length(pred.size(), target.size(), "soft_dice_loss");
    double inter = 0.0, sp = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        inter += pred[i] * target[i];
        sp += pred[i];
        sy += target[i];
    }
    return 1.0 - (2.0 * inter + kDiceEps) / (sp + sy + kDiceEps);
}

std::vector<double> soft_dice_loss_grad(std::span<const double> pred, std::span<const double> target)
{
    same_length(pred.size(), target.size(), "soft_dice_loss");
    double inter = 0.0, sp = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        inter += pred[i] * target[i];
        sp += pred[i];
        sy += target[i];
    }
    const double num = 2.0 * inter + kDiceEps;
    const double den = sp + sy + kDiceEps;
    std::vector<double> g(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = -(2.0 * target[i] * den - num) / (den * den);
    return g;
}

// ---- cross entropy ------------------------------------------------------------

double cross_entropy_loss(std::span<const double> probs, std::span<const int> target, int classes)
{
    require(classes >= 1, ErrorKind::invalid_argument, "cross_entropy_loss: need at least one class");
    const std::size_t n = target.size();
    same_length(probs.size(), n * static_cast<std::size_t>(classes), "cross_entropy_loss");
    require(n > 0, ErrorKind::empty, "cross_entropy_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int k = target[i];
        require(k >= 0 && k < classes, ErrorKind::invalid_argument, "cross_entropy_loss: label outside class range");
        s -= std::log(std::max(probs[static_cast<std::size_t>(k) * n + i], kProbEps));
    }
    return s / static_cast<double>(n);
}

std::vector<double> cross_entropy_loss_grad(std::span<const double> probs, std::span<const int> target, int classes)
{
    const std::size_t n = target.size();
    same_length(probs.size(), n * static_cast<std::size_t>(classes), "cross_entropy_loss");
    std::vector<double> g(probs.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(target[i]) * n + i;
        if (probs[j] > kProbEps) g[j] = -1.0 / (static_cast<double>(n) * probs[j]);
    }
    return g;
}

// ---- SE (scar) / SA -------------------------------------------------------------

double se_loss_scar(std::span<const double> pred_pair, std::span<const double> target_pair)
{
    same_length(pred_pair.size(), target_pair.size(), "se_loss_scar");
    double s = 0.0;
    for (std::size_t i = 0; i < pred_pair.size(); ++i) {
        const double d = pred_pair[i] - target_pair[i];
        s += d * d;
    }
    return s;
}

std::vector<double> se_loss_scar_grad(std::span<const double> pred_pair, std::span<const double> target_pair)
{
    same_length(pred_pair.size(), target_pair.size(), "se_loss_scar");
    std::vector<double> g(pred_pair.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (pred_pair[i] - target_pair[i]);
    return g;
}

double sa_loss(std::span<const double> pred_pair, std::span<const double> target_pair, std::span<const double> mask)
{
    same_length(pred_pair.size(), target_pair.size(), "sa_loss");
    same_length(pred_pair.size(), 2 * mask.size(), "sa_loss");
    const std::size_t n = mask.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = pred_pair[i] - pred_pair[n + i];
        const double dt = target_pair[i] - target_pair[n + i];
        const double r = mask[i] * (dp - dt);
        s += r * r;
    }
    return s;
}

std::vector<double> sa_loss_grad(std::span<const double> pred_pair, std::span<const double> target_pair,
                                 std::span<const double> mask)
{
    same_length(pred_pair.size(), target_pair.size(), "sa_loss");
    same_length(pred_pair.size(), 2 * mask.size(), "sa_loss");
    const std::size_t n = mask.size();
    std::vector<double> g(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = pred_pair[i] - pred_pair[n + i];
        const double dt = target_pair[i] - target_pair[n + i];
        const double d = 2.0 * mask[i] * mask[i] * (dp - dt);
        g[i] = d;
        g[n + i] = -d;
    }
    return g;
}

// ---- L1 -------------------------------------------------------------------------

double l1_mean_loss(std::span<const double> a, std::optional<std::span<const double>> b)
{
    if (b) same_length(a.size(), b->size(), "l1_mean_loss");
    require(!a.empty(), ErrorKind::empty, "l1_mean_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - (b ? (*b)[i] : 0.0));
    return s / static_cast<double>(a.size());
}

std::vector<double> l1_mean_loss_grad(std::span<const double> a, std::optional<std::span<const double>> b)
{
    if (b) same_length(a.size(), b->size(), "l1_mean_loss");
    const double n = static_cast<double>(a.size());
    std::vector<double> g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - (b ? (*b)[i] : 0.0);
        g[i] = (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) / n;
    }
    return g;
}

// ---- CE + Dice ------------------------------------------------------------------

double ddfseg_seg_loss(std::span<const double> probs, std::span<const int> target, int classes, double alpha)
{
    const double ce = cross_entropy_loss(probs, target, classes);
    const std::size_t n = target.size();
    std::vector<double> onehot(n);
    double dice_sum = 0.0;
    for (int k = 0; k < classes; ++k) {
        for (std::size_t i = 0; i < n; ++i) onehot[i] = target[i] == k ? 1.0 : 0.0;
        dice_sum += soft_dice_loss(probs.subspan(static_cast<std::size_t>(k) * n, n), onehot);
    }
    return ce + alpha * dice_sum / classes;
}

// ---- volume API -------------------------------------------------------------------

double se_loss_la(const Volume& pred, const DistanceField& phi, double t_la)
{
    require_same_grid(pred, phi.grid, "se_loss_la");
    return se_loss_la(pred.data(), phi.grid.data(), t_la);
}

double bce_loss(const Volume& pred, const Volume& target)
{
    require_same_grid(pred, target, "bce_loss");
    return bce_loss(pred.data(), target.data());
}

double soft_dice_loss(const Volume& pred, const Volume& target)
{
    require_same_grid(pred, target, "soft_dice_loss");
    return soft_dice_loss(pred.data(), target.data());
}

double cross_entropy_loss(const std::vector<Volume>& probs, const Volume& target)
{
    const auto flat = stack_classes(probs, target);
    const auto labels = label_array(target);
    return cross_entropy_loss(flat, labels, static_cast<int>(probs.size()));
}

double se_loss_scar(const ProbPair& pred, const ProbPair& target)
{
    require_same_grid(pred.p_normal, target.p_normal, "se_loss_scar");
    return se_loss_scar(stack_pair(pred), stack_pair(target));
}

double sa_loss(const ProbPair& pred, const ProbPair& target, const Volume& mask)
{
    require_same_grid(pred.p_normal, target.p_normal, "sa_loss");
    require_same_grid(pred.p_normal, mask, "sa_loss");
    return sa_loss(stack_pair(pred), stack_pair(target), mask.data());
}

double ddfseg_seg_loss(const std::vector<Volume>& probs, const Volume& target, double alpha)
{
    const auto flat = stack_classes(probs, target);
    const auto labels = label_array(target);
    return ddfseg_seg_loss(flat, labels, static_cast<int>(probs.size()), alpha);
}

double atrialjsqnet_total(const AtrialJsqComponents& c, const LossWeights& w)
{
    w.validate();
    for (double v : {c.bce_la, c.se_la, c.se_scar, c.sa_m1, c.sa_m2})
        require(std::isfinite(v), ErrorKind::numeric, "atrialjsqnet_total: non-finite component");
    const double l_la = c.bce_la + w.lambda_la * c.se_la;
    return l_la + w.lambda_scar * c.se_scar + w.lambda_m1 * c.sa_m1 + w.lambda_m2 * c.sa_m2;
}

}  // namespace cq
