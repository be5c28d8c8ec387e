#include "cardioquant/scargraph.hpp"

#include "cardioquant/csv.hpp"
#include "cardioquant/error.hpp"
#include "cardioquant/maxflow.hpp"
#include "cardioquant/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace cq {

void SurfaceGraph::validate_weights() const
{
    require(static_cast<int>(tlinks.size()) == node_count && nlinks.size() == edges.size(), ErrorKind::shape,
            "graph weight arrays do not match the graph");
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::invalid_argument, "lambda must be non-negative");
    for (const auto& t : tlinks)
        require(t.fg >= 0.0 && t.bg >= 0.0 && std::isfinite(t.fg) && std::isfinite(t.bg), ErrorKind::invalid_argument,
                "t-link weights unset or invalid");
    for (double w : nlinks)
        require(w >= 0.0 && std::isfinite(w), ErrorKind::invalid_argument, "n-link weights unset or invalid");
}

SurfaceGraph build_graph(const SurfaceMesh& mesh, double lambda)
{
    require(!mesh.vertices.empty() && !mesh.triangles.empty(), ErrorKind::empty, "build_graph: empty mesh");
    mesh.validate();
    SurfaceGraph g;
    g.node_count = static_cast<int>(mesh.vertices.size());
    g.edges = unique_edges(mesh);
    g.tlinks.assign(mesh.vertices.size(), TLink{});
    g.nlinks.assign(g.edges.size(), -1.0);
    g.lambda = lambda;
    return g;
}

int graph_components(const SurfaceGraph& g)
{
    std::vector<int> parent(static_cast<std::size_t>(g.node_count));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int components = g.node_count;
    for (const auto& [a, b] : g.edges) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components;
}

double two_sd_threshold(std::span<const double> samples)
{
    require(samples.size() >= 2, ErrorKind::invalid_argument, "two_sd_threshold: need at least two samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    return mean + 2.0 * std::sqrt(var / n);
}

double otsu_threshold(std::span<const double> intensities, int bins)
{
    require(bins >= 2, ErrorKind::invalid_argument, "otsu_threshold: need at least two bins");
    require(!intensities.empty(), ErrorKind::empty, "otsu_threshold: no samples");
    const auto [lo_it, hi_it] = std::minmax_element(intensities.begin(), intensities.end());
    const double lo = *lo_it, hi = *hi_it;
    require(hi > lo, ErrorKind::invalid_argument, "otsu_threshold: all values identical");

    const double width = (hi - lo) / bins;
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0), sum(static_cast<std::size_t>(bins), 0.0);
    for (double v : intensities) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
        count[b] += 1.0;
        sum[b] += v;
    }
    const double total_n = static_cast<double>(intensities.size());
    const double total_sum = std::accumulate(sum.begin(), sum.end(), 0.0);

    double best = -1.0;
    int best_edge = 1;
    double n0 = 0.0, s0 = 0.0;
    for (int k = 1; k < bins; ++k) {
        n0 += count[k - 1];
        s0 += sum[k - 1];
        const double n1 = total_n - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double m0 = s0 / n0, m1 = (total_sum - s0) / n1;
        const double between = n0 * n1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_edge = k;
        }
    }
    return lo + best_edge * width;
}

void tlinks_from_probs(SurfaceGraph& g, std::span<const double> p_scar)
{
    require(p_scar.size() == static_cast<std::size_t>(g.node_count), ErrorKind::shape,
            "tlinks_from_probs: one probability per node required");
    for (std::size_t i = 0; i < p_scar.size(); ++i) {
        require(std::isfinite(p_scar[i]), ErrorKind::numeric, "tlinks_from_probs: non-finite probability");
        const double p = std::clamp(p_scar[i], kProbClamp, 1.0 - kProbClamp);
        g.tlinks[i] = {-std::log(p), -std::log(1.0 - p)};
    }
}

void nlinks_from_similarity(SurfaceGraph& g, const std::vector<std::vector<double>>& node_features, double sigma,
                            const SurfaceMesh& mesh)
{
    require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::invalid_argument, "nlinks_from_similarity: sigma must be positive");
    require(node_features.size() == static_cast<std::size_t>(g.node_count) &&
                mesh.vertices.size() == static_cast<std::size_t>(g.node_count),
            ErrorKind::shape, "nlinks_from_similarity: one feature vector and vertex per node required");
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [i, j] = g.edges[e];
        const auto& fi = node_features[i];
        const auto& fj = node_features[j];
        require(fi.size() == fj.size(), ErrorKind::shape, "nlinks_from_similarity: feature length mismatch");
        double d2 = 0.0;
        for (std::size_t k = 0; k < fi.size(); ++k) d2 += (fi[k] - fj[k]) * (fi[k] - fj[k]);
        const double dist = norm(mesh.vertices[i] - mesh.vertices[j]);
        require(dist > 0.0, ErrorKind::invalid_argument, "nlinks_from_similarity: coincident vertices");
        g.nlinks[e] = std::exp(-d2 / (2.0 * sigma * sigma)) / dist;
    }
}

double energy(const SurfaceGraph& g, const Labeling& l)
{
    g.validate_weights();
    require(l.size() == static_cast<std::size_t>(g.node_count), ErrorKind::shape, "energy: labeling length mismatch");
    double regional = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) regional += l[i] ? g.tlinks[i].fg : g.tlinks[i].bg;
    double boundary = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (l[g.edges[e].first] != l[g.edges[e].second]) boundary += g.nlinks[e];
    return regional + g.lambda * boundary;
}

CutResult min_cut_solve(const SurfaceGraph& g)
{
    g.validate_weights();
    MaxFlow mf(g.node_count);
    double offset = 0.0;
    for (int i = 0; i < g.node_count; ++i) {
        const auto& t = g.tlinks[i];
        const double m = std::min(t.fg, t.bg);
        offset += m;
        // Source side = scar: a scar node cuts i->sink (fg cost), a normal node cuts source->i (bg cost).
        mf.add_terminal_weights(i, t.bg - m, t.fg - m);
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const double w = g.lambda * g.nlinks[e];
        if (w > 0.0) mf.add_edge(g.edges[e].first, g.edges[e].second, w, w);
    }
    const double flow = mf.solve();

    CutResult r;
    r.labels.resize(static_cast<std::size_t>(g.node_count));
    for (int i = 0; i < g.node_count; ++i) r.labels[i] = mf.in_source_side(i) ? 1 : 0;
    r.energy = energy(g, r.labels);
    r.flow = flow + offset;
    return r;
}

double boundary_weight(const SurfaceGraph& g, const Labeling& l)
{
    double s = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (l[g.edges[e].first] != l[g.edges[e].second]) s += g.nlinks[e];
    return s;
}

double boundary_length(const SurfaceGraph& g, const Labeling& l, const SurfaceMesh* mesh)
{
    require(l.size() == static_cast<std::size_t>(g.node_count), ErrorKind::shape, "boundary_length: labeling length mismatch");
    double s = 0.0;
    for (const auto& [a, b] : g.edges)
        if (l[a] != l[b]) s += mesh ? norm(mesh->vertices[a] - mesh->vertices[b]) : 1.0;
    return s;
}

double center_intensity(const Profile& profile)
{
    return profile.samples[profile.samples.size() / 2][static_cast<std::size_t>(profile.half_width())];
}

QuantifyResult quantify_scar(const Volume& image, const Volume& la_mask, const QuantifyConfig& config)
{
    require_same_grid(image, la_mask, "quantify_scar");
    require(config.confidence > 0.5 && config.confidence < 1.0, ErrorKind::invalid_argument,
            "quantify_scar: confidence must lie in (0.5, 1)");

    Volume binary = Volume::label(la_mask.dims(), la_mask.spacing());
    for (std::size_t i = 0; i < la_mask.size(); ++i) binary[i] = la_mask[i] != 0.0 ? 1.0 : 0.0;

    QuantifyResult out;
    out.mesh = vertex_normals(extract_isosurface(binary));
    const std::size_t n = out.mesh.vertices.size();

    out.node_intensity.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.node_intensity[i] =
            center_intensity(sample_msp(image, out.mesh, static_cast<int>(i), config.msp.scales, config.msp.half_width));

    const auto [lo_it, hi_it] = std::minmax_element(out.node_intensity.begin(), out.node_intensity.end());
    const bool no_contrast = *hi_it - *lo_it <= 1e-9 * std::max(1.0, std::abs(*hi_it));

    out.p_scar.assign(n, 1.0 - config.confidence);
    switch (config.provider) {
    case ProviderKind::external:
        require(config.external_probs.size() == n, ErrorKind::shape,
                "external provider: " + std::to_string(config.external_probs.size()) + " probabilities for " +
                    std::to_string(n) + " mesh vertices");
        out.p_scar = config.external_probs;
        break;
    case ProviderKind::two_sd:
    case ProviderKind::otsu: {
        if (no_contrast) {
            out.threshold = *hi_it;
            break;
        }
        if (config.provider == ProviderKind::two_sd) {
            // Reference population: the lower half of node intensities.
            std::vector<double> sorted = out.node_intensity;
            std::sort(sorted.begin(), sorted.end());
            sorted.resize(std::max<std::size_t>(2, (sorted.size() + 1) / 2));
            out.threshold = two_sd_threshold(sorted);
        } else {
            out.threshold = otsu_threshold(out.node_intensity, config.otsu_bins);
        }
        const double tol = 1e-9 * std::max(1.0, std::abs(out.threshold));
        for (std::size_t i = 0; i < n; ++i)
            if (out.node_intensity[i] > out.threshold + tol) out.p_scar[i] = config.confidence;
        break;
    }
    }

    out.graph = build_graph(out.mesh, config.lambda);
    tlinks_from_probs(out.graph, out.p_scar);

    std::vector<std::vector<double>> features(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        features[i] = {out.node_intensity[i]};
        mean += out.node_intensity[i];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : out.node_intensity) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / static_cast<double>(n));
    nlinks_from_similarity(out.graph, features, sigma > 0.0 ? sigma : 1.0, out.mesh);

    const auto cut = min_cut_solve(out.graph);
    out.labels = cut.labels;
    out.energy = cut.energy;
    out.scar_fraction = scar_fraction(out.labels);
    return out;
}

double scar_fraction(const Labeling& l)
{
    require(!l.empty(), ErrorKind::empty, "scar_fraction: empty labeling");
    const auto scar = std::count(l.begin(), l.end(), std::uint8_t{1});
    return static_cast<double>(scar) / static_cast<double>(l.size());
}

std::vector<double> read_probability_csv(const std::filesystem::path& path, std::size_t node_count)
{
    const auto table = read_csv(path, true);
    require(table.header.size() == 2 && table.header[0] == "node_index" && table.header[1] == "p_scar",
            ErrorKind::format, "probability CSV header must be 'node_index,p_scar'");
    std::vector<double> p(node_count, -1.0);
    for (const auto& row : table.rows) {
        const double idx = row[0];
        require(idx >= 0 && std::floor(idx) == idx && idx < static_cast<double>(node_count), ErrorKind::shape,
                "probability CSV node index out of range");
        require(row[1] >= 0.0 && row[1] <= 1.0, ErrorKind::format, "probability outside [0, 1]");
        p[static_cast<std::size_t>(idx)] = row[1];
    }
    for (double v : p) require(v >= 0.0, ErrorKind::shape, "probability CSV does not cover every node");
    return p;
}

void write_labeling_csv(const std::filesystem::path& path, const Labeling& labels)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::format, "cannot write " + path.string());
    out << "node_index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << int(labels[i]) << '\n';
}

Labeling read_labeling_csv(const std::filesystem::path& path)
{
    const auto table = read_csv(path, true);
    require(table.header.size() == 2 && table.header[0] == "node_index" && table.header[1] == "label",
            ErrorKind::format, "labeling CSV header must be 'node_index,label'");
    Labeling l(table.rows.size(), 0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require(table.rows[r][0] == static_cast<double>(r), ErrorKind::format, "labeling CSV rows out of order");
        l[r] = table.rows[r][1] != 0.0 ? 1 : 0;
    }
    return l;
}

}  // namespace cq
