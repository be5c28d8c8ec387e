#include "commands.hpp"

#include "cardioquant/discrepancy.hpp"
#include "cardioquant/error.hpp"
#include "cardioquant/mesh.hpp"
#include "cardioquant/parallel.hpp"
#include "cardioquant/phantom.hpp"
#include "cardioquant/scargraph.hpp"
#include "cardioquant/segmetrics.hpp"
#include "cardioquant/selfcheck.hpp"
#include "cardioquant/volume_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

namespace cq::cli {

namespace {

using json = nlohmann::ordered_json;

// 9 significant digits keeps golden comparisons stable.
json num(double v)
{
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::stod(buf);
}

std::string fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::format, "cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Report {
    std::string command;
    json inputs = json::array();
    json parameters = json::object();
    json results = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void input(const std::string& path, const std::string& digest)
    {
        inputs.push_back({{"path", path}, {"fnv1a64", digest}});
    }
    void input_file(const std::string& path) { input(path, file_digest(path)); }
    // cqvol: header and payload bytes hashed together
    void input_volume(const std::string& header)
    {
        const auto text = slurp(header);
        std::string payload;
        try {
            const auto h = json::parse(text);
            payload = slurp(std::filesystem::path(header).parent_path() / h.at("data").get<std::string>());
        } catch (const json::exception&) {
        }
        input(header, fnv1a(text + payload));
    }

    json to_json() const
    {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        json j;
        j["command"] = command;
        j["inputs"] = inputs;
        j["parameters"] = parameters;
        j["results"] = results;
        j["wall_time_ms"] = num(ms);
        return j;
    }
};

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::shape: return kShape;
    case ErrorKind::empty: return kEmpty;
    default: return kFormat;
    }
}

bool is_binary(const Volume& v)
{
    return std::all_of(v.data().begin(), v.data().end(), [](double x) { return x == 0.0 || x == 1.0; });
}

Volume nonzero(const Volume& v)
{
    Volume m = Volume::label(v.dims(), v.spacing());
    for (std::size_t i = 0; i < v.size(); ++i) m[i] = v[i] != 0.0 ? 1.0 : 0.0;
    return m;
}

// ---- metrics ------------------------------------------------------------------

struct MetricsArgs {
    std::string seg, gd;
    std::vector<int> labels;
};

json metrics_results(const Volume& seg, const Volume& gd, std::vector<int> labels)
{
    require_same_grid(seg, gd, "metrics");
    if (labels.empty()) {
        std::set<int> present;
        for (const auto* v : {&seg, &gd})
            for (double x : v->data())
                if (x != 0.0) present.insert(static_cast<int>(x));
        labels.assign(present.begin(), present.end());
    }
    require(!labels.empty(), ErrorKind::empty, "metrics: both volumes are empty");

    json r;
    json per = json::object();
    for (int k : labels) per[std::to_string(k)] = num(dice(seg, gd, k));
    r["dice"] = per;
    r["gdice"] = num(gdice(seg, gd, labels));
    const auto ps = boundary_points(nonzero(seg));
    const auto pg = boundary_points(nonzero(gd));
    require(!ps.empty() && !pg.empty(), ErrorKind::empty, "metrics: surface distances need non-empty masks");
    r["hausdorff_mm"] = num(hausdorff(ps, pg));
    r["asd_mm"] = num(asd(ps, pg));
    if (is_binary(seg) && is_binary(gd)) r["accuracy"] = num(accuracy(confusion(seg, gd)));
    return r;
}

// ---- discrepancy ----------------------------------------------------------------

const std::vector<std::string> kDiscrepancyMetrics{"cfd",  "sliced-cfd", "mean",          "mmd",
                                                   "coral", "varda",     "varda-marginal"};

struct DiscrepancyArgs {
    std::string zs, zt, zs_vars, zt_vars;
    std::string metric = "cfd";
    bool all = false;
    double a = 1.0;
    std::optional<double> sigma;
};

}  // namespace

std::string file_digest(const std::string& path) { return fnv1a(slurp(path)); }

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"cardioquant: LA segmentation metrics, scar quantification and domain discrepancies", "cardioquant"};
    app.require_subcommand(1);
    app.fallthrough();  // --json and --threads may follow the subcommand
    bool as_json = false;
    unsigned threads = 0;
    app.add_flag("--json", as_json, "Print the full JSON run report");
    app.add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "Dice, GDice, Hausdorff, ASD and accuracy of seg against gd");
    metrics->add_option("seg", ma.seg, "Segmentation (cqvol header)")->required();
    metrics->add_option("gd", ma.gd, "Reference (cqvol header)")->required();
    metrics->add_option("--labels", ma.labels, "Labels to score (default: all non-zero)")->delimiter(',');

    std::string image, mask, provider = "two_sd", probs, qout;
    double lambda = kDefaultLambda;
    auto* quantify = app.add_subcommand("quantify", "Scar quantification on the LA surface");
    quantify->add_option("image", image, "LGE image (cqvol header)")->required();
    quantify->add_option("mask", mask, "LA mask (cqvol header)")->required();
    quantify->add_option("--provider", provider, "two_sd | otsu | external")
        ->check(CLI::IsMember({"two_sd", "otsu", "external"}));
    quantify->add_option("--probs", probs, "Per-vertex scar probabilities (external provider)");
    quantify->add_option("--lambda", lambda, "Boundary weight");
    quantify->add_option("--out", qout, "Output stem: <stem>.obj and <stem>_labels.csv")->required();

    DiscrepancyArgs da;
    auto* disc = app.add_subcommand("discrepancy", "Distance between two feature batches");
    disc->add_option("zs", da.zs, "Source batch CSV (means for varda)")->required();
    disc->add_option("zt", da.zt, "Target batch CSV (means for varda)")->required();
    disc->add_option("--metric", da.metric, "Metric")->check(CLI::IsMember(kDiscrepancyMetrics));
    disc->add_flag("--all", da.all, "Every applicable metric in one JSON report");
    disc->add_option("--a", da.a, "Frequency box half-width");
    disc->add_option("--sigma", da.sigma, "MMD bandwidth (default: median heuristic)");
    disc->add_option("--zs-vars", da.zs_vars, "Source variances CSV (varda)");
    disc->add_option("--zt-vars", da.zt_vars, "Target variances CSV (varda)");

    std::string fault = "none";
    std::uint64_t check_seed = SelfCheckOptions{}.seed;
    auto* selfcheck = app.add_subcommand("selfcheck", "Run the embedded oracle suite");
    selfcheck->add_option("--inject-fault", fault, "none | cf_kernel_x2")->check(CLI::IsMember({"none", "cf_kernel_x2"}));
    selfcheck->add_option("--seed", check_seed, "Seed of the random cases");

    std::uint64_t seed = 0;
    std::string pout;
    CapPhantomConfig pc;
    auto* phantom = app.add_subcommand("phantom", "Write a bright-cap sphere phantom (image + mask)");
    phantom->add_option("--out", pout, "Output stem: <stem>_image.json and <stem>_mask.json")->required();
    phantom->add_option("--seed", seed, "Non-zero: random cap axis");
    phantom->add_option("--radius", pc.radius_mm, "Cavity radius (mm)");
    phantom->add_option("--cap-angle", pc.cap_half_angle_deg, "Cap half-angle (degrees)");

    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFormat;
    }
    if (threads > 0) set_thread_count(threads);

    Report rep;
    try {
        if (metrics->parsed()) {
            rep.command = "metrics";
            const auto seg = read_volume(ma.seg);
            const auto gd = read_volume(ma.gd);
            rep.input_volume(ma.seg);
            rep.input_volume(ma.gd);
            rep.parameters["labels"] = ma.labels;
            rep.results = metrics_results(seg, gd, ma.labels);
            out << rep.to_json().dump(2) << '\n';
            return kOk;
        }
        if (quantify->parsed()) {
            rep.command = "quantify";
            const auto img = read_volume(image);
            const auto la = read_volume(mask);
            rep.input_volume(image);
            rep.input_volume(mask);
            QuantifyConfig cfg;
            cfg.provider = provider == "otsu"       ? ProviderKind::otsu
                           : provider == "external" ? ProviderKind::external
                                                    : ProviderKind::two_sd;
            cfg.lambda = lambda;
            if (cfg.provider == ProviderKind::external) {
                require(!probs.empty(), ErrorKind::invalid_argument, "--provider external needs --probs");
                const auto n = extract_isosurface(la).vertices.size();
                cfg.external_probs = read_probability_csv(probs, n);
                rep.input_file(probs);
            }
            const auto res = quantify_scar(img, la, cfg);
            const std::filesystem::path stem(qout);
            const auto obj = stem.string() + ".obj";
            const auto csv = stem.string() + "_labels.csv";
            write_obj(obj, res.mesh);
            write_labeling_csv(csv, res.labels);
            rep.parameters = {{"provider", provider}, {"lambda", num(lambda)}, {"out", qout}};
            rep.results = {{"scar_fraction", num(res.scar_fraction)},
                           {"vertices", res.mesh.vertices.size()},
                           {"triangles", res.mesh.triangles.size()},
                           {"threshold", cfg.provider == ProviderKind::external ? json(nullptr) : num(res.threshold)},
                           {"energy", num(res.energy)},
                           {"mesh", obj},
                           {"labels", csv}};
            if (as_json)
                out << rep.to_json().dump(2) << '\n';
            else
                out << "scar_fraction " << rep.results["scar_fraction"].dump() << '\n';
            return kOk;
        }
        if (disc->parsed()) {
            rep.command = "discrepancy";
            const auto zs = read_feature_batch(da.zs);
            const auto zt = read_feature_batch(da.zt);
            rep.input_file(da.zs);
            rep.input_file(da.zt);
            std::optional<GaussianBatch> qs, qt;
            if (!da.zs_vars.empty() || !da.zt_vars.empty()) {
                require(!da.zs_vars.empty() && !da.zt_vars.empty(), ErrorKind::invalid_argument,
                        "varda needs both --zs-vars and --zt-vars");
                qs = read_gaussian_batch(da.zs, da.zs_vars);
                qt = read_gaussian_batch(da.zt, da.zt_vars);
                rep.input_file(da.zs_vars);
                rep.input_file(da.zt_vars);
            }
            const double sigma = da.sigma ? *da.sigma : median_heuristic_sigma(zs, zt);
            rep.parameters = {{"a", num(da.a)}, {"sigma", num(sigma)}};

            const auto compute = [&](const std::string& m) -> json {
                if (m == "cfd") return num(cfd_point(zs, zt, da.a));
                if (m == "sliced-cfd") return num(sliced_cfd(zs, zt, da.a));
                if (m == "mean") return num(mean_loss(zs, zt));
                if (m == "mmd") return num(mmd_gaussian(zs, zt, sigma));
                if (m == "coral") return num(coral_distance(zs, zt));
                require(qs.has_value(), ErrorKind::invalid_argument, m + " needs --zs-vars and --zt-vars");
                if (m == "varda") return num(varda_distance(*qs, *qt));
                return num(varda_marginal_distance(*qs, *qt));
            };
            if (da.all) {
                rep.parameters["metric"] = "all";
                for (const auto& m : kDiscrepancyMetrics) {
                    try {
                        rep.results[m] = compute(m);
                    } catch (const Error& e) {
                        // not applicable to these inputs (e.g. CORAL on one sample, varda without variances)
                        if (e.kind() == ErrorKind::shape || e.kind() == ErrorKind::format) throw;
                        rep.results[m] = nullptr;
                    }
                }
            } else {
                rep.parameters["metric"] = da.metric;
                rep.results[da.metric] = compute(da.metric);
            }
            if (as_json || da.all)
                out << rep.to_json().dump(2) << '\n';
            else
                out << da.metric << ' ' << rep.results[da.metric].dump() << '\n';
            return kOk;
        }
        if (selfcheck->parsed()) {
            rep.command = "selfcheck";
            SelfCheckOptions opt;
            opt.seed = check_seed;
            opt.fault = fault == "cf_kernel_x2" ? Fault::cf_kernel_x2 : Fault::none;
            rep.parameters = {{"inject_fault", fault}, {"seed", check_seed}};
            const auto families = run_selfcheck(opt);
            bool ok = true;
            json fam = json::array();
            for (const auto& f : families) {
                ok = ok && f.passed;
                fam.push_back({{"name", f.name},
                               {"passed", f.passed},
                               {"cases", f.cases},
                               {"worst", num(f.worst)},
                               {"tolerance", num(f.tolerance)},
                               {"detail", f.detail}});
                if (!as_json)
                    out << (f.passed ? "PASS " : "FAIL ") << f.name << " cases=" << f.cases
                        << " worst=" << num(f.worst).dump() << " tol=" << num(f.tolerance).dump()
                        << (f.detail.empty() || f.passed ? "" : " (" + f.detail + ")") << '\n';
            }
            rep.results = {{"families", fam}, {"all_passed", ok}};
            if (as_json) out << rep.to_json().dump(2) << '\n';
            return ok ? kOk : kSelfcheckFailed;
        }
        if (phantom->parsed()) {
            rep.command = "phantom";
            pc.seed = seed;
            const auto ph = make_cap_phantom(pc);
            const auto img_path = write_volume(pout + "_image", ph.image);
            const auto mask_path = write_volume(pout + "_mask", ph.la_mask);
            const auto truth = cap_ground_truth(ph, extract_isosurface(ph.la_mask));
            rep.parameters = {{"seed", seed}, {"radius_mm", num(pc.radius_mm)}, {"cap_angle_deg", num(pc.cap_half_angle_deg)}};
            rep.results = {{"image", img_path.string()},
                           {"mask", mask_path.string()},
                           {"axis", {num(ph.axis[0]), num(ph.axis[1]), num(ph.axis[2])}},
                           {"cap_vertex_fraction", num(scar_fraction(truth))}};
            if (as_json)
                out << rep.to_json().dump(2) << '\n';
            else
                out << "cap_vertex_fraction " << rep.results["cap_vertex_fraction"].dump() << '\n';
            return kOk;
        }
    } catch (const Error& e) {
        err << "cardioquant " << rep.command << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "cardioquant " << rep.command << ": " << e.what() << '\n';
        return kFormat;
    }
    return kFormat;
}

}  // namespace cq::cli
