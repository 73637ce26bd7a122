// Command-line front end: lattice, search, classical, period, fit,
// hypothesis, pipeline.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "fracsearch/analysis.hpp"
#include "fracsearch/classical_walk.hpp"
#include "fracsearch/io.hpp"
#include "fracsearch/lattice.hpp"
#include "fracsearch/pipeline.hpp"

namespace {

using namespace fracsearch;
using io::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kNumeric = 3, kResource = 4 };

CellCoord parse_coord(const std::string& text) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument("");
        std::size_t used = 0;
        const std::string a = text.substr(0, comma);
        const std::string b = text.substr(comma + 1);
        const long long i = std::stoll(a, &used);
        if (used != a.size()) throw std::invalid_argument("");
        const long long j = std::stoll(b, &used);
        if (used != b.size()) throw std::invalid_argument("");
        return {i, j};
    } catch (const std::logic_error&) {
        throw DomainError("expected a coordinate 'i,j', got '" + text + "'");
    }
}

FitRange parse_window(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        const FitRange r{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
        if (!(r.x_min <= r.x_max)) throw std::invalid_argument("");
        return r;
    } catch (const std::logic_error&) {
        throw DomainError("expected a window 'tmin:tmax', got '" + text + "'");
    }
}

std::vector<int> parse_stages(const std::string& text) {
    std::vector<int> stages;
    try {
        if (const auto dash = text.find('-'); dash != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dash));
            const int hi = std::stoi(text.substr(dash + 1));
            for (int s = lo; s <= hi; ++s) stages.push_back(s);
        } else {
            std::stringstream in(text);
            std::string item;
            while (std::getline(in, item, ',')) stages.push_back(std::stoi(item));
        }
    } catch (const std::logic_error&) {
        throw DomainError("expected stages as 'lo-hi' or a comma list, got '" + text + "'");
    }
    return stages;
}

std::optional<std::int64_t> parse_steps(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size() || v < 1) throw std::invalid_argument("");
        return v;
    } catch (const std::logic_error&) {
        throw DomainError("expected a positive step count or 'auto', got '" + text + "'");
    }
}

void set_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("FRACSEARCH_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

void emit(const json& j, const std::string& out, bool force) {
    const std::string text = j.dump(2) + "\n";
    if (!out.empty()) io::write_file(out, text, force);
    std::cout << text;
}

struct Common {
    int threads = 0;
    bool force = false;
    double mem_limit_mb = 0.0;

    std::uint64_t budget() const {
        return mem_limit_mb > 0.0 ? static_cast<std::uint64_t>(mem_limit_mb * 1024.0 * 1024.0)
                                  : default_memory_budget();
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--threads", c.threads, "Worker threads (default: FRACSEARCH_THREADS or all cores)");
    cmd->add_flag("--force", c.force, "Overwrite existing outputs");
    cmd->add_option("--mem-limit-mb", c.mem_limit_mb, "Memory budget in MiB (default: 80% of RAM)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum spatial search and random walks on Sierpinski carpets"};
    app.set_version_flag("--version", io::tool_version());
    app.require_subcommand(1);
    Common common;

    // lattice
    struct {
        int stage = 0;
        std::string marked;
        std::string format = "json";
        std::string out;
    } lat;
    auto* lattice_cmd = app.add_subcommand("lattice", "Build a carpet and report its structure");
    lattice_cmd->add_option("--stage", lat.stage, "Carpet stage S")->required();
    lattice_cmd->add_option("--marked", lat.marked, "Marked cell 'i,j'");
    lattice_cmd->add_option("--format", lat.format, "json, or csv to add the adjacency table")
        ->check(CLI::IsMember({"json", "csv"}));
    lattice_cmd->add_option("--out", lat.out, "Output directory");
    add_common(lattice_cmd, common);

    // search
    struct {
        int stage = 0;
        std::string steps = "auto";
        std::string marked;
        std::string out;
        std::int64_t stride = 1;
        std::optional<std::int64_t> snapshot;
        bool quiet = false;
    } srch;
    auto* search_cmd = app.add_subcommand("search", "Evolve the search state and record P(marked, t)");
    search_cmd->add_option("--stage", srch.stage, "Carpet stage S")->required();
    search_cmd->add_option("--steps", srch.steps, "Step count or 'auto'");
    search_cmd->add_option("--marked", srch.marked, "Marked cell 'i,j'");
    search_cmd->add_option("--out", srch.out, "Output directory")->required();
    search_cmd->add_option("--stride", srch.stride, "Record every n-th step");
    search_cmd->add_option("--snapshot-step", srch.snapshot, "Also dump P(x) after this step");
    search_cmd->add_flag("--quiet", srch.quiet, "No progress on stderr");
    add_common(search_cmd, common);

    // classical
    struct {
        int stage = 0;
        std::int64_t steps = 0;
        std::string method = "exact";
        std::uint64_t walkers = 1'000'000;
        std::uint64_t seed = 1;
        std::string rule = "stay";
        std::string start;
        std::string out;
    } cls;
    auto* classical_cmd = app.add_subcommand("classical", "Return probability of a classical random walk");
    classical_cmd->add_option("--stage", cls.stage, "Carpet stage S")->required();
    classical_cmd->add_option("--steps", cls.steps, "Number of steps")->required();
    classical_cmd->add_option("--method", cls.method, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    classical_cmd->add_option("--walkers", cls.walkers, "Monte Carlo walkers");
    classical_cmd->add_option("--seed", cls.seed, "Monte Carlo seed");
    classical_cmd->add_option("--rule", cls.rule, "stay or neighbor")->check(CLI::IsMember({"stay", "neighbor"}));
    classical_cmd->add_option("--start", cls.start, "Start cell 'i,j' (default 0,0)");
    classical_cmd->add_option("--out", cls.out, "Output directory")->required();
    add_common(classical_cmd, common);

    // period
    struct {
        std::string input;
        bool hann = false;
        std::string out;
    } per;
    auto* period_cmd = app.add_subcommand("period", "Dominant period and mean peak of a t,P series");
    period_cmd->add_option("--input", per.input, "Series CSV")->required();
    period_cmd->add_flag("--hann", per.hann, "Apply a Hann window before the transform");
    period_cmd->add_option("--out", per.out, "Also write the report here");
    add_common(period_cmd, common);

    // fit
    struct {
        std::string input;
        std::string window;
        bool spectral = false;
        std::string out;
    } fit;
    auto* fit_cmd = app.add_subcommand("fit", "Log-log power-law fit of a two-column CSV");
    fit_cmd->add_option("--input", fit.input, "CSV with a header and two columns")->required();
    fit_cmd->add_option("--window", fit.window, "Restrict x to 'min:max'");
    fit_cmd->add_flag("--spectral", fit.spectral,
                      "Treat as a return-probability series: default window [100, tmax/2], report d_s");
    fit_cmd->add_option("--out", fit.out, "Also write the report here");
    add_common(fit_cmd, common);

    // hypothesis
    struct {
        std::string b, a, ds;
        std::optional<double> berr, aerr, dserr;
        std::string b_fit, a_fit, ds_fit;
        int de = 2;
        int pieces = 8;
        int scale = 3;
        std::optional<double> df;
        bool gasket_ds = false;
        std::string out;
    } hyp;
    auto* hyp_cmd = app.add_subcommand("hypothesis", "Evaluate c = b + a/2 against d_s/(d_E-1) + d_f - s");
    hyp_cmd->add_option("--b", hyp.b, "Q exponent b, plain or last-digit notation");
    hyp_cmd->add_option("--berr", hyp.berr, "Standard error of b");
    hyp_cmd->add_option("--a", hyp.a, "P exponent a (P ~ N^-a)");
    hyp_cmd->add_option("--aerr", hyp.aerr, "Standard error of a");
    hyp_cmd->add_option("--ds", hyp.ds, "Spectral dimension d_s");
    hyp_cmd->add_option("--dserr", hyp.dserr, "Standard error of d_s");
    hyp_cmd->add_option("--b-fit", hyp.b_fit, "Fit JSON of Q vs N (from `fit`)");
    hyp_cmd->add_option("--a-fit", hyp.a_fit, "Fit JSON of P vs N");
    hyp_cmd->add_option("--ds-fit", hyp.ds_fit, "Fit JSON of a return-probability series");
    hyp_cmd->add_flag("--gasket-ds", hyp.gasket_ds, "Use 2 ln(d_E+1)/ln(d_E+3) for d_s");
    hyp_cmd->add_option("--dE", hyp.de, "Euclidean dimension");
    hyp_cmd->add_option("--M", hyp.pieces, "Self-similar piece count");
    hyp_cmd->add_option("--s", hyp.scale, "Scale factor");
    hyp_cmd->add_option("--df", hyp.df, "Fractal dimension (overrides ln M / ln s)");
    hyp_cmd->add_option("--out", hyp.out, "Also write the report here");
    add_common(hyp_cmd, common);

    // pipeline
    struct {
        std::string stages = "1-5";
        std::string steps = "auto";
        std::string marked;
        int classical_stage = 7;
        std::int64_t classical_steps = 20'000;
        std::string method = "exact";
        std::uint64_t walkers = 1'000'000;
        std::uint64_t seed = 1;
        std::string rule = "stay";
        std::string window;
        bool no_classical = false;
        std::size_t p_fit_stages = 4;
        std::string out;
    } pipe;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Searches over stages, scaling fits, classical walk, hypothesis");
    pipeline_cmd->add_option("--stages", pipe.stages, "'lo-hi' or comma list");
    pipeline_cmd->add_option("--steps", pipe.steps, "'auto' or one count per stage, comma separated");
    pipeline_cmd->add_option("--marked", pipe.marked, "Marked cell 'i,j' (same for every stage)");
    pipeline_cmd->add_option("--classical-stage", pipe.classical_stage, "Stage of the classical walk");
    pipeline_cmd->add_option("--classical-steps", pipe.classical_steps, "Steps of the classical walk");
    pipeline_cmd->add_option("--method", pipe.method, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    pipeline_cmd->add_option("--walkers", pipe.walkers, "Monte Carlo walkers");
    pipeline_cmd->add_option("--seed", pipe.seed, "Monte Carlo seed");
    pipeline_cmd->add_option("--rule", pipe.rule, "stay or neighbor")->check(CLI::IsMember({"stay", "neighbor"}));
    pipeline_cmd->add_option("--window", pipe.window, "Classical fit window 'tmin:tmax'");
    pipeline_cmd->add_flag("--no-classical", pipe.no_classical, "Skip the classical walk and hypothesis");
    pipeline_cmd->add_option("--p-fit-stages", pipe.p_fit_stages, "Largest stages used in the P fit");
    pipeline_cmd->add_option("--out", pipe.out, "Output directory")->required();
    add_common(pipeline_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        set_threads(common.threads);

        if (lattice_cmd->parsed()) {
            std::optional<CellCoord> marked;
            if (!lat.marked.empty()) marked = parse_coord(lat.marked);
            const CarpetLattice lattice = CarpetLattice::build(Stage{lat.stage}, marked);
            const json summary = io::lattice_summary(lattice);
            if (!lat.out.empty()) {
                const fs::path dir = lat.out;
                const fs::path json_path = dir / "lattice.json";
                const fs::path csv_path = dir / "adjacency.csv";
                const fs::path manifest_path = dir / "lattice_manifest.json";
                std::vector<fs::path> targets = {json_path, manifest_path};
                if (lat.format == "csv") targets.push_back(csv_path);
                io::ensure_writable(targets, common.force);
                io::write_file(json_path, summary.dump(2) + "\n", common.force);
                io::RunManifest manifest("lattice", {{"stage", lat.stage}, {"marked", lat.marked},
                                                     {"format", lat.format}});
                manifest.add_output(json_path);
                if (lat.format == "csv") {
                    io::write_file(csv_path, io::adjacency_csv(lattice), common.force);
                    manifest.add_output(csv_path);
                }
                manifest.write(manifest_path, common.force);
            }
            if (lat.format == "csv" && lat.out.empty())
                std::cout << io::adjacency_csv(lattice);
            else
                std::cout << summary.dump(2) << "\n";
        } else if (search_cmd->parsed()) {
            SearchJob job;
            job.stage = Stage{srch.stage};
            if (!srch.marked.empty()) job.marked = parse_coord(srch.marked);
            job.steps = parse_steps(srch.steps);
            job.record_stride = srch.stride;
            job.snapshot_step = srch.snapshot;
            job.out_dir = srch.out;
            job.force = common.force;
            job.memory_budget = common.budget();
            if (!srch.quiet) job.log = &std::cerr;
            const SearchOutputs out = run_search_job(job);
            json report = {{"csv", out.csv.string()},
                           {"manifest", out.manifest.string()},
                           {"steps", out.steps},
                           {"final_norm_squared", out.run.final_norm_squared}};
            if (out.snapshot) report["snapshot"] = out.snapshot->string();
            std::cout << report.dump(2) << "\n";
        } else if (classical_cmd->parsed()) {
            ClassicalJob job;
            job.config.stage = Stage{cls.stage};
            job.config.steps = cls.steps;
            job.config.method = parse_classical_method(cls.method);
            job.config.walkers = cls.walkers;
            job.config.seed = cls.seed;
            job.config.rule = parse_move_rule(cls.rule);
            job.config.memory_limit_bytes = common.budget();
            if (!cls.start.empty()) job.config.start = parse_coord(cls.start);
            job.out_dir = cls.out;
            job.force = common.force;
            const ClassicalOutputs out = run_classical_job(job);
            std::cout << json{{"csv", out.csv.string()}, {"manifest", out.manifest.string()}}.dump(2)
                      << "\n";
        } else if (period_cmd->parsed()) {
            const TimeSeries series = io::read_series_csv(per.input);
            const PeriodEstimate est = estimate_period(series, {per.hann});
            json report = {{"input", per.input}, {"period", io::to_json(est)}};
            try {
                report["mean_peak_probability"] = mean_peak_probability(series, est.period_q);
            } catch (const InsufficientSpan&) {
                report["mean_peak_probability"] = nullptr;
            }
            emit(report, per.out, common.force);
        } else if (fit_cmd->parsed()) {
            const auto points = io::read_xy_csv(fit.input);
            std::optional<FitRange> window;
            if (!fit.window.empty()) {
                window = parse_window(fit.window);
            } else if (fit.spectral) {
                window = default_classical_window(static_cast<std::int64_t>(points.back().first));
            }
            const PowerLawFit f = power_law_fit(points, window);
            json report = {{"input", fit.input}, {"fit", io::to_json(f)}};
            if (window) report["window"] = {window->x_min, window->x_max};
            if (fit.spectral) report["spectral_dimension"] = io::to_json(spectral_dimension_from_fit(f));
            emit(report, fit.out, common.force);
        } else if (hyp_cmd->parsed()) {
            auto read_fit = [](const std::string& path) {
                std::ifstream in(path);
                if (!in) throw DomainError("cannot open " + path);
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw DomainError(path + ": " + e.what());
                }
                return io::fit_from_json(j.contains("fit") ? j["fit"] : j);
            };
            auto measured = [](const std::string& text, std::optional<double> err, const char* name) {
                if (text.empty()) throw DomainError(std::string("missing --") + name);
                Measured m = parse_last_digit(text);
                if (err) m.error = *err;
                return m;
            };

            Measured b;
            Measured a;
            Measured ds;
            if (!hyp.b_fit.empty())
                b = read_fit(hyp.b_fit).exponent_measured();
            else
                b = measured(hyp.b, hyp.berr, "b");
            if (!hyp.a_fit.empty()) {
                const PowerLawFit f = read_fit(hyp.a_fit);
                a = {-f.exponent, f.stderr_exponent};
            } else {
                a = measured(hyp.a, hyp.aerr, "a");
            }
            if (!hyp.ds_fit.empty())
                ds = spectral_dimension_from_fit(read_fit(hyp.ds_fit));
            else if (hyp.gasket_ds)
                ds = {gasket_spectral_dimension(hyp.de), 0.0};
            else
                ds = measured(hyp.ds, hyp.dserr, "ds");

            DimensionSet dims = DimensionSet::self_similar(hyp.de, hyp.pieces, hyp.scale, ds);
            if (hyp.df) dims.fractal = *hyp.df;
            const HypothesisReport report = check_hypothesis(b, a, dims);
            json j = {{"b", io::to_json(b)},
                      {"a", io::to_json(a)},
                      {"dimensions",
                       {{"d_E", dims.euclidean},
                        {"d_f", dims.fractal},
                        {"d_s", io::to_json(dims.spectral)},
                        {"s", dims.scale},
                        {"M", dims.pieces}}},
                      {"hypothesis", io::to_json(report)},
                      {"one_over_df", 1.0 / dims.fractal}};
            if (ds.value > 0.0) j["inverse_spectral"] = io::to_json(inverse_spectral_comparison(b, ds));
            emit(j, hyp.out, common.force);
        } else if (pipeline_cmd->parsed()) {
            PipelineSpec spec;
            spec.stages = parse_stages(pipe.stages);
            if (pipe.steps != "auto") {
                std::stringstream in(pipe.steps);
                std::string item;
                while (std::getline(in, item, ',')) {
                    const auto s = parse_steps(item);
                    if (!s) throw DomainError("mixing 'auto' with explicit steps is not supported");
                    spec.steps.push_back(*s);
                }
            }
            if (!pipe.marked.empty()) spec.marked = parse_coord(pipe.marked);
            spec.run_classical = !pipe.no_classical;
            spec.classical.stage = Stage{pipe.classical_stage};
            spec.classical.steps = pipe.classical_steps;
            spec.classical.method = parse_classical_method(pipe.method);
            spec.classical.walkers = pipe.walkers;
            spec.classical.seed = pipe.seed;
            spec.classical.rule = parse_move_rule(pipe.rule);
            spec.classical.memory_limit_bytes = common.budget();
            if (!pipe.window.empty()) spec.classical_window = parse_window(pipe.window);
            spec.p_fit_stages = pipe.p_fit_stages;
            spec.out_dir = pipe.out;
            spec.force = common.force;
            spec.memory_budget = common.budget();
            spec.log = &std::cerr;
            const PipelineResult result = run_pipeline(spec);
            std::cout << result.summary_json.dump(2) << "\n";
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericIntegrityError& e) {
        std::cerr << "numeric integrity failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const ResourceError& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return kResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
