// mfq: sampling, quantile fitting, regression sweeps, and diagnostics for
// center-outward quantiles on (products of) spheres.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifoldq/io.hpp"
#include "manifoldq/presets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mfq;

namespace {

constexpr const char* kVersion = "0.1.0";
const double kPi = 3.14159265358979323846;

void write_manifest(const fs::path& dir, json config) {
    config["version"] = kVersion;
    std::ofstream out(dir / "manifest.json");
    out << config.dump(2) << "\n";
}

std::vector<int> parse_levels(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

GridMode parse_mode(const std::string& mode) {
    if (mode == "iid") return GridMode::IID;
    if (mode == "equispaced") return GridMode::Equispaced;
    if (mode == "fibered") return GridMode::Fibered;
    throw CLI::ValidationError("--grid-mode", "unknown grid mode: " + mode);
}

CenterRule parse_center(const std::string& center, int factor) {
    if (center == "cap") return CenterRule::frechet_cap();
    if (center == "strip") return CenterRule::frechet_strip(factor);
    throw CLI::ValidationError("--center", "unknown center rule: " + center);
}

std::map<int, int> rank_counts(const std::vector<int>& ranks) {
    std::map<int, int> counts;
    for (int r : ranks) ++counts[r];
    return counts;
}

json rank_count_json(const std::vector<int>& ranks) {
    json j = json::object();
    for (auto [r, c] : rank_counts(ranks)) j[std::to_string(r)] = c;
    return j;
}

void emit_fit(const fs::path& dir, const std::string& tag, const QuantileFit& fit,
              const std::vector<int>& levels) {
    io::write_fit_json((dir / (tag + "_fit.json")).string(), fit);
    io::write_ranks_csv((dir / (tag + "_ranks.csv")).string(), fit);
    for (int r : levels) {
        auto contour = extract_contour(fit, r);
        std::vector<int> ring(contour.size(), r);
        io::write_contour_csv((dir / (tag + "_contour_r" + std::to_string(r) + ".csv")).string(),
                              fit.spec, contour, ring);
    }
}

// ---------------------------------------------------------------- sample ---

struct SampleOpts {
    std::string preset = "uniform";
    std::string manifold = "s2";
    int n = 100;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string format = "csv";
};

int run_sample(const SampleOpts& o) {
    fs::create_directories(o.out);
    ManifoldSpec spec =
        o.preset == "uniform" ? ManifoldSpec::parse(o.manifold) : preset_manifold(o.preset);
    auto points = sample_preset(o.preset, o.n, o.seed, &spec);
    fs::path dir(o.out);
    std::string file;
    if (o.format == "json") {
        file = "sample.json";
        io::write_points_json((dir / file).string(), spec, points);
    } else {
        file = "sample.csv";
        io::write_points_csv((dir / file).string(), spec, points);
    }
    write_manifest(dir, {{"command", "sample"},
                         {"preset", o.preset},
                         {"manifold", spec.name()},
                         {"n", o.n},
                         {"seed", o.seed},
                         {"format", o.format},
                         {"file", file}});
    return 0;
}

// ------------------------------------------------------------------- fit ---

struct FitOpts {
    std::string preset;
    std::string input;
    std::string manifold = "s2";
    int n = 0;
    int n0 = 1, nR = 10, nS = 50;
    std::string center = "cap";
    int factor = 0;
    std::string mode = "iid";
    std::string levels = "0";
    std::uint64_t seed = 0;
    std::string out = ".";
};

int run_fit(const FitOpts& o) {
    fs::create_directories(o.out);
    ManifoldSpec spec;
    std::vector<ManifoldPoint> sample;
    if (!o.input.empty()) {
        spec = ManifoldSpec::parse(o.manifold);
        sample = io::read_points_csv(o.input, spec);
    } else {
        if (o.preset.empty()) {
            std::cerr << "fit: need --preset or --input\n";
            return 1;
        }
        spec = o.preset == "uniform" ? ManifoldSpec::parse(o.manifold)
                                     : preset_manifold(o.preset);
        int n = o.n > 0 ? o.n : o.n0 + o.nR * o.nS;
        sample = sample_preset(o.preset, n, o.seed, &spec);
    }
    auto fit = fit_quantiles(spec, sample, parse_center(o.center, o.factor), o.nR, o.nS, o.n0,
                             o.seed, parse_mode(o.mode));
    auto levels = parse_levels(o.levels);
    fs::path dir(o.out);
    emit_fit(dir, "fit", fit, levels);
    write_manifest(dir, {{"command", "fit"},
                         {"preset", o.preset},
                         {"input", o.input},
                         {"manifold", spec.name()},
                         {"n", static_cast<int>(sample.size())},
                         {"n0", o.n0},
                         {"nR", o.nR},
                         {"nS", o.nS},
                         {"center", o.center},
                         {"factor", o.factor},
                         {"grid_mode", o.mode},
                         {"levels", levels},
                         {"seed", o.seed},
                         {"rank_counts", rank_count_json(fit.ranks)}});
    return 0;
}

// --------------------------------------------------------------- regress ---

struct RegressOpts {
    std::string preset;
    int n = 10000;
    int N0 = 1, NR = 20, NS = 100;
    std::string center = "cap";
    int factor = 0;
    std::string mode = "iid";
    std::string levels = "0";
    std::uint64_t seed = 0;
    std::string out = ".";
    std::vector<std::string> queries;  // comma-separated coordinates
    int knn = 0;
    double bandwidth = 0.0;
    std::string kernel = "gauss";
    int jobs = 0;
};

Covariate parse_query(const CovariateSpace& space, const std::string& q) {
    std::vector<double> coords;
    std::stringstream ss(q);
    std::string tok;
    while (std::getline(ss, tok, ',')) coords.push_back(std::stod(tok));
    if (space.kind == CovariateSpace::Kind::Euclidean) return coords;
    return ManifoldPoint::from_flat(space.manifold, coords);
}

int run_regress(const RegressOpts& o) {
    fs::create_directories(o.out);
    if (!is_regression_preset(o.preset)) {
        std::cerr << "regress: unknown preset '" << o.preset << "'\n";
        return 1;
    }
    if (o.queries.empty()) {
        std::cerr << "regress: need at least one --query\n";
        return 1;
    }
    RegressionPreset preset = regression_preset(o.preset);
    RegressionSample data = sample_regression_preset(o.preset, o.n, o.seed);

    WeightFunction wf =
        o.knn > 0 ? WeightFunction::knn(o.knn)
                  : WeightFunction::kernel_fn(o.bandwidth > 0 ? o.bandwidth : kPi / 10,
                                              o.kernel == "box"
                                                  ? WeightFunction::KernelType::Box
                                                  : WeightFunction::KernelType::TrimmedGaussian);
    CenterRule rule = parse_center(o.center, o.factor);
    GridMode mode = parse_mode(o.mode);
    auto levels = parse_levels(o.levels);
    fs::path dir(o.out);

    struct QueryResult {
        bool ok = false;
        std::string error;
        ConditionalFit fit;
    };
    std::vector<QueryResult> results(o.queries.size());
    const int workers = o.jobs > 0
                            ? o.jobs
                            : std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < o.queries.size(); base += workers) {
        std::vector<std::future<void>> batch;
        for (std::size_t q = base; q < std::min(o.queries.size(), base + workers); ++q) {
            batch.push_back(std::async(std::launch::async, [&, q] {
                try {
                    Covariate x = parse_query(preset.covariate_space, o.queries[q]);
                    results[q].fit =
                        fit_conditional(preset.response_spec, preset.covariate_space, data.x,
                                        data.y, x, wf, rule, o.NR, o.NS, o.N0, o.seed, mode);
                    results[q].ok = true;
                } catch (const std::exception& e) {
                    results[q].error = e.what();  // soft failure; sweep continues
                }
            }));
        }
        for (auto& f : batch) f.get();
    }

    json queries_json = json::array();
    for (std::size_t q = 0; q < results.size(); ++q) {
        json qj;
        qj["query"] = o.queries[q];
        qj["ok"] = results[q].ok;
        if (!results[q].ok) {
            qj["error"] = results[q].error;
        } else {
            const auto& fit = results[q].fit;
            qj["distinct_images"] = fit.distinct_images;
            for (int r : levels) {
                auto contour = extract_conditional_contour(fit, r);
                std::vector<int> ring(contour.size(), r);
                std::string name =
                    "query" + std::to_string(q) + "_contour_r" + std::to_string(r) + ".csv";
                io::write_contour_csv((dir / name).string(), fit.spec, contour, ring);
            }
            io::write_coupling_csv(
                (dir / ("query" + std::to_string(q) + "_coupling.csv")).string(), fit.coupling);
        }
        queries_json.push_back(std::move(qj));
    }
    write_manifest(dir, {{"command", "regress"},
                         {"preset", o.preset},
                         {"n", o.n},
                         {"N0", o.N0},
                         {"NR", o.NR},
                         {"NS", o.NS},
                         {"center", o.center},
                         {"factor", o.factor},
                         {"grid_mode", o.mode},
                         {"levels", levels},
                         {"seed", o.seed},
                         {"knn", o.knn},
                         {"bandwidth", o.bandwidth},
                         {"kernel", o.kernel},
                         {"queries", queries_json}});
    return 0;
}

// ---------------------------------------------------------------- comets ---

struct CometOpts {
    std::string input;
    std::string node_col = "om";
    std::string peri_col = "w";
    std::string levels = "0,10,18,26,34";
    std::uint64_t seed = 0;
    std::string out = ".";
};

int run_comets(const CometOpts& o) {
    fs::create_directories(o.out);
    auto data = io::read_comets_csv(o.input, o.node_col, o.peri_col);
    ManifoldSpec spec = ManifoldSpec::parse("t2");

    // (omega, Omega) as a point on T^2
    std::vector<ManifoldPoint> points;
    for (const auto& rec : data.records)
        points.push_back(point_from_angles(spec, {rec.omega, rec.Omega}));

    const int cap_n = 1 + 39 * 100;
    const int strip_n = 61 + 40 * 96;
    if (static_cast<int>(points.size()) < std::max(cap_n, strip_n)) {
        std::cerr << "comets: need at least " << std::max(cap_n, strip_n)
                  << " usable rows, have " << points.size() << "\n";
        return 1;
    }
    auto levels = parse_levels(o.levels);
    fs::path dir(o.out);

    std::vector<ManifoldPoint> cap_pts(points.begin(), points.begin() + cap_n);
    auto cap_fit =
        fit_quantiles(spec, cap_pts, CenterRule::frechet_cap(), 39, 100, 1, o.seed);
    emit_fit(dir, "cap", cap_fit, levels);

    std::vector<ManifoldPoint> strip_pts(points.begin(), points.begin() + strip_n);
    auto strip_fit =
        fit_quantiles(spec, strip_pts, CenterRule::frechet_strip(0), 40, 96, 61, o.seed);
    emit_fit(dir, "strip", strip_fit, levels);

    write_manifest(dir, {{"command", "comets"},
                         {"input", o.input},
                         {"rows_used_cap", cap_n},
                         {"rows_used_strip", strip_n},
                         {"rows_dropped", data.dropped},
                         {"levels", levels},
                         {"seed", o.seed},
                         {"cap_rank_counts", rank_count_json(cap_fit.ranks)},
                         {"strip_rank_counts", rank_count_json(strip_fit.ranks)}});
    return 0;
}

// ----------------------------------------------------------------- check ---

struct CheckOpts {
    std::uint64_t seed = 0;
    std::string out = ".";
};

int run_check(const CheckOpts& o) {
    fs::create_directories(o.out);
    json checks = json::array();
    auto record = [&](const std::string& name, bool pass, double measured, double tol) {
        checks.push_back(
            {{"name", name}, {"pass", pass}, {"measured", measured}, {"tolerance", tol}});
    };

    ManifoldSpec s2 = ManifoldSpec::parse("s2");

    // assignment vs brute force on small instances
    {
        double worst = 0.0;
        std::mt19937_64 rng(derive_seed(o.seed, 11));
        for (int n = 2; n <= 6; ++n) {
            for (int rep = 0; rep < 20; ++rep) {
                auto src = uniform_sample(s2, n, rng());
                auto dst = uniform_sample(s2, n, rng());
                auto cm = cost_matrix(s2, src, dst);
                auto plan = solve_assignment(cm);
                std::vector<int> perm(n);
                for (int i = 0; i < n; ++i) perm[i] = i;
                double best = std::numeric_limits<double>::infinity();
                do {
                    double c = 0.0;
                    for (int i = 0; i < n; ++i) c += cm.at(i, perm[i]);
                    best = std::min(best, c);
                } while (std::next_permutation(perm.begin(), perm.end()));
                worst = std::max(worst, std::abs(plan.objective - best));
            }
        }
        record("assignment_vs_brute_force", worst < 1e-12, worst, 1e-12);
    }

    // cyclical monotonicity of an optimal plan, plus an injected 2-cycle swap
    {
        auto src = uniform_sample(s2, 50, derive_seed(o.seed, 12));
        auto dst = uniform_sample(s2, 50, derive_seed(o.seed, 13));
        auto plan = solve_assignment(cost_matrix(s2, src, dst));
        std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
        for (int i = 0; i < 50; ++i) pairs.emplace_back(src[i], dst[plan.perm[i]]);
        auto rep = check_cyclical_monotonicity(s2, pairs, 4, 1000, derive_seed(o.seed, 14));
        record("cyclical_monotonicity_optimal", rep.max_violation <= 1e-9, rep.max_violation,
               1e-9);
        // injected 2-cycle on a small instance so random cycles hit it
        auto src8 = uniform_sample(s2, 8, derive_seed(o.seed, 16));
        auto dst8 = uniform_sample(s2, 8, derive_seed(o.seed, 17));
        auto plan8 = solve_assignment(cost_matrix(s2, src8, dst8));
        std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs8;
        for (int i = 0; i < 8; ++i) pairs8.emplace_back(src8[i], dst8[plan8.perm[i]]);
        std::swap(pairs8[0].second, pairs8[1].second);  // deliberately suboptimal
        auto bad = check_cyclical_monotonicity(s2, pairs8, 4, 2000, derive_seed(o.seed, 14));
        record("cyclical_monotonicity_detects_swap", bad.max_violation > 0.0, bad.max_violation,
               0.0);
    }

    // latitude profile vs closed form for p = 2
    {
        double worst = 0.0;
        for (int t = 1; t <= 99; ++t) {
            double tau = t / 100.0;
            worst = std::max(worst,
                             std::abs(latitude_profile(2, tau) - std::acos(1 - 2 * tau) / kPi));
        }
        record("latitude_profile_p2_closed_form", worst < 1e-9, worst, 1e-9);
    }

    // rank multiplicities on a small fit
    {
        auto sample = sample_preset("S1", 61, derive_seed(o.seed, 15));
        auto fit = fit_quantiles(s2, sample, CenterRule::frechet_cap(), 3, 20, 1, o.seed);
        auto counts = rank_counts(fit.ranks);
        bool ok = counts[0] == 1 && counts[1] == 20 && counts[2] == 20 && counts[3] == 20;
        record("rank_multiplicities", ok, ok ? 0.0 : 1.0, 0.0);
    }

    bool all_pass = true;
    for (const auto& c : checks) all_pass = all_pass && c.at("pass").get<bool>();
    json report = {{"command", "check"}, {"seed", o.seed}, {"all_pass", all_pass},
                   {"checks", checks}};
    std::ofstream out(fs::path(o.out) / "check.json");
    out << report.dump(2) << "\n";
    std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES") << "\n";
    return all_pass ? 0 : 1;
}

// ----------------------------------------------------------------- s-tau ---

int run_stau(int p, const std::string& taus, const std::string& out) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        os = &file;
    }
    *os << "tau,s\n" << std::setprecision(17);
    std::stringstream ss(taus);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double tau = std::stod(tok);
        *os << tau << "," << latitude_profile(p, tau) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"center-outward quantiles on spheres, tori, and their products"};
    app.require_subcommand(1);

    SampleOpts so;
    auto* sample = app.add_subcommand("sample", "draw a preset or uniform sample");
    sample->add_option("--preset", so.preset, "preset name or 'uniform'");
    sample->add_option("--manifold", so.manifold, "manifold for 'uniform'");
    sample->add_option("--n", so.n, "sample size");
    sample->add_option("--seed", so.seed, "RNG seed");
    sample->add_option("--out", so.out, "output directory");
    sample->add_option("--format", so.format, "csv or json");

    FitOpts fo;
    auto* fit = app.add_subcommand("fit", "fit empirical quantile contours");
    fit->add_option("--preset", fo.preset, "preset to sample from");
    fit->add_option("--input", fo.input, "points CSV (overrides --preset)");
    fit->add_option("--manifold", fo.manifold, "manifold of --input points");
    fit->add_option("--n", fo.n, "sample size (defaults to n0 + nR*nS)");
    fit->add_option("--n0", fo.n0, "center copies");
    fit->add_option("--nR", fo.nR, "number of contours");
    fit->add_option("--nS", fo.nS, "points per contour");
    fit->add_option("--center", fo.center, "cap or strip");
    fit->add_option("--factor", fo.factor, "strip factor index");
    fit->add_option("--grid-mode", fo.mode, "iid, equispaced, or fibered");
    fit->add_option("--r", fo.levels, "comma-separated contour orders");
    fit->add_option("--seed", fo.seed, "RNG seed");
    fit->add_option("--out", fo.out, "output directory");

    RegressOpts ro;
    auto* regress = app.add_subcommand("regress", "conditional quantile contours");
    regress->add_option("--preset", ro.preset, "regression preset");
    regress->add_option("--n", ro.n, "sample size");
    regress->add_option("--N0", ro.N0, "center copies");
    regress->add_option("--NR", ro.NR, "number of contours");
    regress->add_option("--NS", ro.NS, "points per contour");
    regress->add_option("--center", ro.center, "cap or strip");
    regress->add_option("--factor", ro.factor, "strip factor index");
    regress->add_option("--grid-mode", ro.mode, "iid, equispaced, or fibered");
    regress->add_option("--r", ro.levels, "comma-separated contour orders");
    regress->add_option("--seed", ro.seed, "RNG seed");
    regress->add_option("--out", ro.out, "output directory");
    regress->add_option("--query", ro.queries, "query covariate, comma-separated coordinates");
    regress->add_option("--knn", ro.knn, "k-NN weights with this k");
    regress->add_option("--bandwidth", ro.bandwidth, "kernel bandwidth (default pi/10)");
    regress->add_option("--kernel", ro.kernel, "gauss or box");
    regress->add_option("--jobs", ro.jobs, "parallel query workers");

    CometOpts co;
    auto* comets = app.add_subcommand("comets", "orbital-element case study on T^2");
    comets->add_option("--input", co.input, "JPL small-body CSV export")->required();
    comets->add_option("--node-col", co.node_col, "column with the ascending node (degrees)");
    comets->add_option("--peri-col", co.peri_col, "column with the perihelion argument (degrees)");
    comets->add_option("--r", co.levels, "comma-separated contour orders");
    comets->add_option("--seed", co.seed, "RNG seed");
    comets->add_option("--out", co.out, "output directory");

    CheckOpts ko;
    auto* check = app.add_subcommand("check", "run built-in diagnostics");
    check->add_option("--seed", ko.seed, "RNG seed");
    check->add_option("--out", ko.out, "output directory");

    int stau_p = 2;
    std::string stau_taus = "0.1,0.25,0.5,0.75,0.9";
    std::string stau_out;
    auto* stau = app.add_subcommand("s-tau", "evaluate the latitude profile s(tau)");
    stau->add_option("--p", stau_p, "sphere dimension");
    stau->add_option("--tau", stau_taus, "comma-separated tau values");
    stau->add_option("--out", stau_out, "output CSV (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) return run_sample(so);
        if (*fit) return run_fit(fo);
        if (*regress) return run_regress(ro);
        if (*comets) return run_comets(co);
        if (*check) return run_check(ko);
        if (*stau) return run_stau(stau_p, stau_taus, stau_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
