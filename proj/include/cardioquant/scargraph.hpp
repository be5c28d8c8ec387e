#pragma once

#include "cardioquant/mesh.hpp"
#include "cardioquant/sampling.hpp"
#include "cardioquant/volume.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cq {

inline constexpr double kDefaultLambda = 0.4;
inline constexpr double kProbClamp = 1e-6;

// Cost of putting a node on each side: `fg` is paid when the node is labelled
// scar (1), `bg` when it is labelled normal wall (0). Negative means unset.
struct TLink {
    double fg = -1.0;
    double bg = -1.0;
};

struct SurfaceGraph {
    int node_count = 0;
    std::vector<Edge> edges;     // unordered pairs, first < second
    std::vector<TLink> tlinks;   // one per node
    std::vector<double> nlinks;  // one per edge, negative means unset
    double lambda = kDefaultLambda;

    void validate_weights() const;
};

using Labeling = std::vector<std::uint8_t>;  // 1 = scar, 0 = normal wall

// One node per vertex, one n-link per unique mesh edge, weights unset.
SurfaceGraph build_graph(const SurfaceMesh& mesh, double lambda = kDefaultLambda);

// Number of connected components of the node/edge graph.
int graph_components(const SurfaceGraph& g);

// mean + 2 * population standard deviation of the reference intensities.
double two_sd_threshold(std::span<const double> normal_wall_intensities);

// Histogram over [min, max] with `bins` bins; returns the bin edge that
// maximizes the between-class variance (lowest edge on ties).
double otsu_threshold(std::span<const double> intensities, int bins = 64);

// Negative log-likelihood t-links from per-node scar probabilities, clamped
// to [1e-6, 1 - 1e-6].
void tlinks_from_probs(SurfaceGraph& g, std::span<const double> p_scar);

// n-link(i, j) = exp(-|f_i - f_j|^2 / (2 sigma^2)) / |x_i - x_j|.
void nlinks_from_similarity(SurfaceGraph& g, const std::vector<std::vector<double>>& node_features, double sigma,
                            const SurfaceMesh& mesh);

// Sum of chosen t-link costs + lambda * sum of n-links across label changes.
double energy(const SurfaceGraph& g, const Labeling& l);

struct CutResult {
    Labeling labels;
    double energy = 0.0;      // energy(g, labels)
    double flow = 0.0;        // max-flow value + constant offsets; equals the cut capacity
};

// Exact global minimizer of energy() via s-t min cut.
CutResult min_cut_solve(const SurfaceGraph& g);

// Sum over mesh edges with differing labels of `weight` (1 for edge count,
// Euclidean length when `mesh` is given).
double boundary_length(const SurfaceGraph& g, const Labeling& l, const SurfaceMesh* mesh = nullptr);
double boundary_weight(const SurfaceGraph& g, const Labeling& l);

// ---- quantification pipeline ----------------------------------------------

enum class ProviderKind { two_sd, otsu, external };

struct MspConfig {
    std::vector<double> scales{0.5, 1.0};  // mm
    int half_width = 3;
};

struct QuantifyConfig {
    ProviderKind provider = ProviderKind::two_sd;
    double lambda = kDefaultLambda;
    MspConfig msp;
    int otsu_bins = 64;
    // Probability assigned to nodes the threshold providers call scar
    // (1 - confidence for the others).
    double confidence = 0.9;
    std::vector<double> external_probs;  // ProviderKind::external, one per vertex
};

struct QuantifyResult {
    SurfaceMesh mesh;
    Labeling labels;
    std::vector<double> node_intensity;  // center_intensity of each profile
    std::vector<double> p_scar;          // provider output
    double threshold = 0.0;              // threshold providers only
    double energy = 0.0;
    double scar_fraction = 0.0;
    SurfaceGraph graph;
};

// Node intensity: the center sample (k = 0) of the middle scale.
double center_intensity(const Profile& profile);

// Labelled-scar vertices over all vertices.
double scar_fraction(const Labeling& l);

QuantifyResult quantify_scar(const Volume& image, const Volume& la_mask, const QuantifyConfig& config);

// CSV helpers for the provider / labeling interchange files.
std::vector<double> read_probability_csv(const std::filesystem::path& path, std::size_t node_count);
void write_labeling_csv(const std::filesystem::path& path, const Labeling& labels);
Labeling read_labeling_csv(const std::filesystem::path& path);

}  // namespace cq
