#include "fracsearch/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include <unistd.h>

#include "fracsearch/io.hpp"

namespace fracsearch {

namespace {

using Clock = std::chrono::steady_clock;
using io::json;

json coord_json(CellCoord c) { return {{"i", c.i}, {"j", c.j}}; }

json coord_json(std::optional<CellCoord> c, const char* fallback) {
    return c ? coord_json(*c) : json(fallback);
}

json classical_config_json(const ClassicalConfig& c) {
    json j = {{"stage", c.stage.level},
              {"start", coord_json(c.start.value_or(CellCoord{0, 0}))},
              {"steps", c.steps},
              {"method", to_string(c.method)},
              {"rule", to_string(c.rule)}};
    if (c.method == ClassicalMethod::MonteCarlo) {
        j["walkers"] = c.walkers;
        j["seed"] = c.seed;
    }
    return j;
}

void check_search_budget(Stage stage, std::uint64_t budget) {
    if (stage.level < 0) throw DomainError("stage must be non-negative");
    const std::uint64_t need = search_memory_bytes(stage);
    if (need > budget)
        throw ResourceError("search at stage " + std::to_string(stage.level) + " needs " +
                            std::to_string(need) + " bytes, budget is " + std::to_string(budget));
}

} // namespace

std::int64_t auto_steps(Stage stage) {
    const double n = static_cast<double>(stage.vertex_count());
    const auto target = static_cast<std::uint64_t>(
        std::ceil(kPeriodsPerRun * kSeedQPrefactor * std::pow(n, kSeedQExponent)));
    return std::max<std::int64_t>(kMinSteps, static_cast<std::int64_t>(std::bit_ceil(target)));
}

std::uint64_t default_memory_budget() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page <= 0) return std::uint64_t{4} << 30;
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page) / 10 * 8;
}

SearchOutputs run_search_job(const SearchJob& job) {
    check_search_budget(job.stage, job.memory_budget);
    const std::int64_t steps = job.steps.value_or(auto_steps(job.stage));
    SearchOutputs out;
    out.steps = steps;
    out.csv = job.out_dir / "search.csv";
    out.manifest = job.out_dir / "search_manifest.json";
    std::vector<fs::path> targets = {out.csv, out.manifest};
    if (job.snapshot_step) targets.push_back(job.out_dir / "snapshot.csv");
    io::ensure_writable(targets, job.force);

    const auto t0 = Clock::now();
    const CarpetLattice lattice = CarpetLattice::build(job.stage, job.marked);
    SearchConfig config;
    config.steps = steps;
    config.record_stride = job.record_stride;
    config.snapshot_step = job.snapshot_step;
    if (job.log) {
        const std::int64_t every = std::max<std::int64_t>(1, steps / 10);
        config.progress = [&, every](std::int64_t t, double p) {
            if (t % every == 0 || t == steps)
                *job.log << "[search S=" << job.stage.level << "] t=" << t << "/" << steps
                         << " P=" << p << '\n';
        };
    }
    out.run = evolve(lattice, config);
    const auto wall = Clock::now() - t0;

    io::write_file(out.csv, io::series_csv(out.run.series), job.force);
    if (out.run.snapshot) {
        out.snapshot = job.out_dir / "snapshot.csv";
        io::write_file(*out.snapshot, io::distribution_csv(lattice, *out.run.snapshot), job.force);
    }

    json cfg = {{"stage", job.stage.level},
                {"N", lattice.vertex_count()},
                {"marked", coord_json(lattice.coord_of(lattice.marked()))},
                {"steps", steps},
                {"steps_policy", job.steps ? "explicit" : "auto"},
                {"record_stride", job.record_stride},
                {"precision", "double"}};
    if (job.snapshot_step) cfg["snapshot_step"] = *job.snapshot_step;
    io::RunManifest manifest("search", cfg);
    manifest.set_wall_time(wall);
    manifest.set_extra("final_norm_squared", out.run.final_norm_squared);
    manifest.add_output(out.csv);
    if (out.snapshot) manifest.add_output(*out.snapshot);
    manifest.write(out.manifest, job.force);
    return out;
}

ClassicalOutputs run_classical_job(const ClassicalJob& job) {
    ClassicalOutputs out;
    out.csv = job.out_dir / "classical.csv";
    out.manifest = job.out_dir / "classical_manifest.json";
    io::ensure_writable({out.csv, out.manifest}, job.force);

    const auto t0 = Clock::now();
    out.series = job.config.method == ClassicalMethod::Exact ? return_series_exact(job.config)
                                                             : return_series_mc(job.config);
    const auto wall = Clock::now() - t0;

    io::write_file(out.csv, io::series_csv(out.series), job.force);
    io::RunManifest manifest("classical", classical_config_json(job.config));
    manifest.set_wall_time(wall);
    manifest.add_output(out.csv);
    manifest.write(out.manifest, job.force);
    return out;
}

FitRange default_classical_window(std::int64_t steps) {
    return {100.0, static_cast<double>(steps / 2)};
}

void PipelineSpec::validate() const {
    if (stages.size() < 2) throw DomainError("pipeline needs at least two stages");
    for (std::size_t k = 0; k < stages.size(); ++k) {
        if (stages[k] < 1) throw DomainError("pipeline stages must be >= 1");
        if (k > 0 && stages[k] <= stages[k - 1])
            throw DomainError("pipeline stages must be strictly increasing");
    }
    if (!steps.empty()) {
        if (steps.size() != stages.size())
            throw DomainError("explicit steps need one entry per stage");
        for (std::int64_t s : steps)
            if (s < kMinSteps)
                throw DomainError("pipeline steps must be >= " + std::to_string(kMinSteps));
    }
    if (p_fit_stages < 2) throw DomainError("the P fit needs at least two stages");
}

PipelineResult run_pipeline(const PipelineSpec& spec) {
    spec.validate();
    const auto t0 = Clock::now();
    PipelineResult result;
    result.summary = spec.out_dir / "summary.json";
    io::ensure_writable({result.summary}, spec.force);
    for (int s : spec.stages) check_search_budget(Stage{s}, spec.memory_budget);

    json config = {{"stages", spec.stages},
                   {"steps_policy", spec.steps.empty() ? "auto" : "explicit"},
                   {"marked", coord_json(spec.marked, "default")},
                   {"p_fit_stages", spec.p_fit_stages},
                   {"run_classical", spec.run_classical}};
    if (!spec.steps.empty()) config["steps"] = spec.steps;
    if (spec.run_classical) config["classical"] = classical_config_json(spec.classical);

    io::RunManifest summary("pipeline", config);
    json stage_reports = json::array();
    json manifests = json::array();
    auto write_summary = [&](const std::string& status, const std::string& error) {
        summary.set_wall_time(Clock::now() - t0);
        summary.set_extra("status", status);
        if (!error.empty()) summary.set_extra("error", error);
        summary.set_extra("stages", stage_reports);
        summary.set_extra("manifests", manifests);
        summary.write(result.summary, true);
        result.summary_json = summary.to_json(spec.out_dir);
    };

    try {
        std::vector<std::pair<double, double>> q_points;
        std::vector<std::pair<double, double>> p_points;
        for (std::size_t k = 0; k < spec.stages.size(); ++k) {
            const Stage stage{spec.stages[k]};
            SearchJob job;
            job.stage = stage;
            job.marked = spec.marked;
            if (!spec.steps.empty()) job.steps = spec.steps[k];
            job.out_dir = spec.out_dir / ("stage_" + std::to_string(stage.level));
            job.force = spec.force;
            job.memory_budget = spec.memory_budget;
            job.log = spec.log;
            const SearchOutputs run = run_search_job(job);
            manifests.push_back(fs::relative(run.manifest, spec.out_dir).generic_string());

            StageResult sr;
            sr.stage = stage.level;
            sr.vertex_count = stage.vertex_count();
            sr.steps = run.steps;
            sr.period = estimate_period(run.run.series);
            sr.mean_peak = mean_peak_probability(run.run.series, sr.period.period_q);
            sr.manifest = run.manifest;

            const fs::path period_path = job.out_dir / "period.json";
            json period = {{"period", io::to_json(sr.period)}, {"mean_peak_probability", sr.mean_peak}};
            io::write_file(period_path, period.dump(2) + "\n", spec.force);
            summary.add_output(period_path);

            stage_reports.push_back({{"stage", sr.stage},
                                     {"N", sr.vertex_count},
                                     {"steps", sr.steps},
                                     {"period_Q", sr.period.period_q},
                                     {"spectral_power_ratio", sr.period.spectral_power_ratio},
                                     {"harmonic_flag", sr.period.harmonic_flag},
                                     {"mean_peak_probability", sr.mean_peak},
                                     {"manifest", manifests.back()}});
            if (spec.log)
                *spec.log << "[pipeline] stage " << sr.stage << ": Q=" << sr.period.period_q
                          << " P=" << sr.mean_peak << '\n';
            q_points.emplace_back(static_cast<double>(sr.vertex_count), sr.period.period_q);
            p_points.emplace_back(static_cast<double>(sr.vertex_count), sr.mean_peak);
            result.stages.push_back(sr);
        }

        auto scaling_csv = [](const std::vector<std::pair<double, double>>& pts, const char* name) {
            std::string csv = std::string("N,") + name + "\n";
            for (const auto& [x, y] : pts) csv += io::format_real(x) + "," + io::format_real(y) + "\n";
            return csv;
        };
        const fs::path q_path = spec.out_dir / "q_scaling.csv";
        const fs::path p_path = spec.out_dir / "p_scaling.csv";
        io::write_file(q_path, scaling_csv(q_points, "Q"), spec.force);
        io::write_file(p_path, scaling_csv(p_points, "P"), spec.force);
        summary.add_output(q_path);
        summary.add_output(p_path);

        result.q_fit = power_law_fit(q_points);
        const std::size_t p_count = std::min(spec.p_fit_stages, p_points.size());
        result.p_fit = power_law_fit(std::vector<std::pair<double, double>>(
            p_points.end() - static_cast<std::ptrdiff_t>(p_count), p_points.end()));
        summary.set_extra("q_fit", io::to_json(result.q_fit));
        summary.set_extra("p_fit", io::to_json(result.p_fit));
        summary.set_extra("b", io::to_json(result.q_fit.exponent_measured()));
        summary.set_extra("a", io::to_json(Measured{-result.p_fit.exponent, result.p_fit.stderr_exponent}));
        if (spec.log)
            *spec.log << "[pipeline] b=" << format_last_digit(result.q_fit.exponent_measured())
                      << " a=" << format_last_digit({-result.p_fit.exponent, result.p_fit.stderr_exponent})
                      << '\n';

        if (spec.run_classical) {
            ClassicalJob cj{spec.classical, spec.out_dir / "classical", spec.force};
            if (spec.log)
                *spec.log << "[pipeline] classical walk, stage " << spec.classical.stage.level
                          << ", " << spec.classical.steps << " steps\n";
            const ClassicalOutputs co = run_classical_job(cj);
            manifests.push_back(fs::relative(co.manifest, spec.out_dir).generic_string());
            const FitRange window =
                spec.classical_window.value_or(default_classical_window(spec.classical.steps));
            result.classical_fit = power_law_fit(co.series, window);
            result.spectral_dimension = spectral_dimension_from_fit(*result.classical_fit);
            const DimensionSet dims = DimensionSet::self_similar(2, 8, 3, *result.spectral_dimension);
            result.hypothesis = check_hypothesis(result.q_fit, result.p_fit, dims);
            result.inverse =
                inverse_spectral_comparison(result.q_fit.exponent_measured(), *result.spectral_dimension);
            summary.set_extra("classical_fit", io::to_json(*result.classical_fit));
            summary.set_extra("classical_window", {window.x_min, window.x_max});
            summary.set_extra("spectral_dimension", io::to_json(*result.spectral_dimension));
            summary.set_extra("fractal_dimension", dims.fractal);
            summary.set_extra("hypothesis", io::to_json(*result.hypothesis));
            summary.set_extra("inverse_spectral", io::to_json(*result.inverse));
        }
    } catch (const std::exception& e) {
        write_summary("failed", e.what());
        throw;
    }
    write_summary("ok", "");
    return result;
}

} // namespace fracsearch
