#include "scp/runner.hpp"

#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "scp/artifacts.hpp"
#include "scp/concrete.hpp"
#include "scp/diagnostics.hpp"
#include "scp/kernels.hpp"

namespace scp {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagObserved = 11;
constexpr std::uint64_t kTagPrior = 13;
constexpr std::uint64_t kTagSolutionDraws = 23;
constexpr std::uint64_t kTagBootstrap = 29;
constexpr std::uint64_t kTagReplicate = 5000;

SharedExperiment shared_from(const ExperimentConfig& c) {
    SharedExperiment s;
    s.domain = c.domain;
    s.map = make_map(c.map_id, c.powerlaw_r);
    s.prior = c.prior;
    s.n_observed = c.n_observed;
    s.n_prior = c.n_prior;
    s.n_bins = c.n_bins;
    s.grid_cells = c.grid_cells;
    s.shell_width = c.shell_width;
    return s;
}

std::vector<DensitySpec> resolve_stages(const ExperimentConfig& c) {
    if (!c.stages.empty()) return c.stages;
    if (c.shrink) return shrinking_sequence(c.shrink->atoms, c.shrink->scales);
    throw ConfigError("experiment '" + c.experiment + "' needs 'stages' or 'shrink'");
}

std::vector<TestFunction> resolve_test_functions(const ExperimentConfig& c) {
    std::vector<std::string> names = c.test_functions;
    if (names.empty()) names = {"l1", "l2", "l1l2"};
    std::vector<TestFunction> fs;
    for (const auto& n : names) fs.push_back(bundled_test_function(n));
    return fs;
}

struct Emitter {
    std::filesystem::path dir;
    std::vector<std::string> outputs;

    void emit(const std::string& name, const std::string& content) {
        write_text_atomic((dir / name).string(), content);
        outputs.push_back(name);
    }
};

void emit_manifest(Emitter& em, const ExperimentConfig& c, json derived_seeds) {
    json m;
    m["artifact_version"] = kArtifactVersion;
    m["rng"] = kRngName;
    m["experiment"] = c.experiment;
    m["config"] = json::parse(config_to_json(c));
    m["derived_seeds"] = std::move(derived_seeds);
    m["outputs"] = em.outputs;
    em.emit("manifest.json", m.dump(2) + "\n");
}

// Shared by the synthetic solve and the concrete pipeline.
RunResult run_solve_pipeline(const ExperimentConfig& c, Emitter& em,
                             std::vector<double> observed_q, json extra_diag,
                             json derived_seeds) {
    const SharedExperiment shared = shared_from(c);
    const OutputPartition partition = make_partition(observed_q, c.n_bins);
    const SampleSet prior_set =
        sample(c.prior, c.domain, c.n_prior, split_seed(c.seed, kTagPrior));
    const InputGrid grid(c.domain, c.grid_cells);
    const ScpSolution sol = solve_cells(prior_set, observed_q, partition, grid, shared.map);

    const SampleSet draws = sample_solution(sol, c.prior, c.n_solution_samples,
                                            split_seed(c.seed, kTagSolutionDraws));
    // the consistency diagnostic needs enough draws to sit below its noise
    // floor even when the artifact keeps only a handful of samples
    const std::size_t n_check = std::max<std::size_t>(c.n_solution_samples, 20000);
    const SampleSet check_draws =
        n_check == c.n_solution_samples
            ? draws
            : sample_solution(sol, c.prior, n_check, split_seed(c.seed, kTagSolutionDraws));
    const std::vector<double> draws_q =
        kernels::eval_map_points(shared.map, check_draws.points, c.domain.dim());
    const BinnedDensity draws_hist = histogram_density(draws_q, partition);
    const double consistency_tv = tv_distance(draws_hist, sol.rho_D);

    em.emit("solution_heatmap.csv", heatmap_csv(sol));
    em.emit("observed_pushforward.csv", binned_density_csv(sol.rho_D));
    em.emit("prior_pushforward.csv", binned_density_csv(sol.rho_pD));
    em.emit("solution_pushforward.csv", binned_density_csv(draws_hist));
    em.emit("solution_samples.csv", samples_csv(draws));

    json d = std::move(extra_diag);
    d["pushforward_consistency_tv"] = consistency_tv;
    d["unassigned_observed_mass"] = sol.unassigned_mass;
    d["flagged_bins"] = sol.flagged_bins;
    d["prior_in_range_fraction"] = sol.prior_in_range;
    d["n_solution_samples"] = c.n_solution_samples;
    em.emit("diagnostics.json", d.dump(2) + "\n");
    derived_seeds["prior"] = split_seed(c.seed, kTagPrior);
    derived_seeds["solution_draws"] = split_seed(c.seed, kTagSolutionDraws);
    emit_manifest(em, c, std::move(derived_seeds));

    RunResult r;
    r.outputs = em.outputs;
    r.summary = "solve: pushforward consistency TV = " + format_double(consistency_tv) +
                ", unassigned mass = " + format_double(sol.unassigned_mass);
    return r;
}

RunResult run_solve(const ExperimentConfig& c, Emitter& em) {
    if (!c.tgd) throw ConfigError("solve experiment needs 'tgd'");
    const SharedExperiment shared = shared_from(c);
    const SampleSet tgd_set =
        sample(*c.tgd, c.domain, c.n_observed, split_seed(c.seed, kTagObserved));
    std::vector<double> observed_q =
        kernels::eval_map_points(shared.map, tgd_set.points, c.domain.dim());
    return run_solve_pipeline(c, em, std::move(observed_q), json::object(),
                              json{{"observed", split_seed(c.seed, kTagObserved)}});
}

RunResult run_concrete(const ExperimentConfig& c, Emitter& em) {
    if (!c.data) throw ConfigError("concrete experiment needs 'data'");
    const auto records = load_concrete_csv(c.data->csv_path, c.data->age_lo, c.data->age_hi,
                                           c.data->r_lo, c.data->r_hi);
    std::vector<double> observed_q =
        bootstrap_noise(records, c.data->bootstrap_count, c.data->noise_sd,
                        split_seed(c.seed, kTagBootstrap));

    double lo = records.front().strength, hi = lo;
    for (const auto& r : records) {
        lo = std::min(lo, r.strength);
        hi = std::max(hi, r.strength);
    }
    json d;
    d["n_records"] = records.size();
    d["strength_min"] = lo;
    d["strength_max"] = hi;
    d["noise_sd"] = c.data->noise_sd;
    d["bootstrap_count"] = c.data->bootstrap_count;
    return run_solve_pipeline(c, em, std::move(observed_q), std::move(d),
                              json{{"bootstrap", split_seed(c.seed, kTagBootstrap)}});
}

RunResult run_stability(const ExperimentConfig& c, Emitter& em) {
    if (!c.tgd || !c.tgd_b) throw ConfigError("stability experiment needs 'tgd' and 'tgd_b'");
    const SharedExperiment shared = shared_from(c);

    json reps = json::array();
    std::string trace = "replicate,metric,value\n";
    for (int r = 0; r < c.replicates; ++r) {
        const StabilityReport rep =
            stability_experiment(*c.tgd, *c.tgd_b, shared, split_seed(c.seed, kTagReplicate + r));
        reps.push_back({{"tv_solutions", rep.tv_solutions},
                        {"tv_pushforwards", rep.tv_pushforwards},
                        {"tv_tgds", rep.tv_tgds},
                        {"identity_gap", rep.identity_gap},
                        {"inequality_slack", rep.inequality_slack}});
        const auto row = [&](const char* name, double v) {
            trace += std::to_string(r);
            trace += ',';
            trace += name;
            trace += ',';
            trace += format_double(v);
            trace += '\n';
        };
        row("tv_solutions", rep.tv_solutions);
        row("tv_pushforwards", rep.tv_pushforwards);
        row("tv_tgds", rep.tv_tgds);
        row("identity_gap", rep.identity_gap);
        row("inequality_slack", rep.inequality_slack);
    }
    json d;
    d["replicates"] = reps;
    em.emit("diagnostics.json", d.dump(2) + "\n");
    em.emit("trace.csv", trace);
    json seeds = json::array();
    for (int r = 0; r < c.replicates; ++r) seeds.push_back(split_seed(c.seed, kTagReplicate + r));
    emit_manifest(em, c, json{{"replicates", seeds}});

    RunResult out;
    out.outputs = em.outputs;
    out.summary = "stability: " + std::to_string(c.replicates) + " replicate(s) written";
    return out;
}

RunResult run_local_limit(const ExperimentConfig& c, Emitter& em) {
    if (!c.limit) throw ConfigError("local_limit experiment needs 'limit'");
    if (!c.limit->has_density())
        throw NoDensityError("local_limit limit must have a density");
    const SharedExperiment shared = shared_from(c);
    const std::vector<DensitySpec> stages = resolve_stages(c);

    json reps = json::array();
    std::string trace = "replicate,stage,metric,value\n";
    for (int r = 0; r < c.replicates; ++r) {
        const auto stages_out =
            local_limit_experiment(stages, *c.limit, shared, split_seed(c.seed, kTagReplicate + r));
        json stage_arr = json::array();
        for (const auto& st : stages_out) {
            stage_arr.push_back({{"stage", st.stage},
                                 {"tv_to_limit", st.tv_to_limit},
                                 {"tv_pushforward_to_limit", st.tv_pushforward_to_limit}});
            trace += std::to_string(r) + "," + std::to_string(st.stage) + ",tv_to_limit," +
                     format_double(st.tv_to_limit) + "\n";
            trace += std::to_string(r) + "," + std::to_string(st.stage) +
                     ",tv_pushforward_to_limit," + format_double(st.tv_pushforward_to_limit) +
                     "\n";
        }
        reps.push_back(stage_arr);
    }
    json d;
    d["replicates"] = reps;
    em.emit("diagnostics.json", d.dump(2) + "\n");
    em.emit("trace.csv", trace);
    json seeds = json::array();
    for (int r = 0; r < c.replicates; ++r) seeds.push_back(split_seed(c.seed, kTagReplicate + r));
    emit_manifest(em, c, json{{"replicates", seeds}});

    RunResult out;
    out.outputs = em.outputs;
    out.summary = "local_limit: " + std::to_string(stages.size()) + " stage(s), " +
                  std::to_string(c.replicates) + " replicate(s)";
    return out;
}

RunResult run_weak(const ExperimentConfig& c, Emitter& em) {
    if (!c.limit) throw ConfigError("weak experiment needs 'limit'");
    const SharedExperiment shared = shared_from(c);
    const std::vector<DensitySpec> stages = resolve_stages(c);
    const std::vector<TestFunction> fs = resolve_test_functions(c);

    json reps = json::array();
    std::string trace = "replicate,stage,metric,value\n";
    for (int r = 0; r < c.replicates; ++r) {
        const WeakTrace wt = weak_convergence_experiment(stages, *c.limit, fs, shared,
                                                         split_seed(c.seed, kTagReplicate + r));
        json jt;
        jt["shell_width"] = wt.shell_width;
        jt["function_names"] = wt.function_names;
        jt["reference"] = wt.reference;
        json stage_arr = json::array();
        for (const auto& st : wt.stages) {
            stage_arr.push_back(
                {{"stage", st.stage}, {"integrals", st.integrals}, {"errors", st.errors}});
            for (std::size_t k = 0; k < fs.size(); ++k) {
                trace += std::to_string(r) + "," + std::to_string(st.stage) + ",error_" +
                         wt.function_names[k] + "," + format_double(st.errors[k]) + "\n";
            }
        }
        jt["stages"] = stage_arr;
        reps.push_back(jt);
    }
    json d;
    d["replicates"] = reps;
    em.emit("diagnostics.json", d.dump(2) + "\n");
    em.emit("trace.csv", trace);
    json seeds = json::array();
    for (int r = 0; r < c.replicates; ++r) seeds.push_back(split_seed(c.seed, kTagReplicate + r));
    emit_manifest(em, c, json{{"replicates", seeds}});

    RunResult out;
    out.outputs = em.outputs;
    out.summary = "weak: " + std::to_string(stages.size()) + " stage(s), " +
                  std::to_string(fs.size()) + " test function(s)";
    return out;
}

RunResult run_audit(const ExperimentConfig& c, Emitter& em) {
    if (!c.tgd) throw ConfigError("audit experiment needs 'tgd'");
    const QoiMap map = make_map(c.map_id, c.powerlaw_r);
    const AuditReport rep = assumption_audit(map, c.domain, c.prior, *c.tgd, c.n_probes,
                                             c.n_observed, c.n_prior, c.n_bins, c.seed);
    json d;
    d["box_valid"] = rep.box_valid;
    d["box_volume"] = rep.box_volume;
    d["n_probes"] = rep.n_probes;
    d["degenerate_hits"] = rep.degenerate_hits;
    d["degenerate_fraction"] = rep.degenerate_fraction;
    d["min_gram"] = rep.min_gram;
    d["n_bins"] = rep.n_bins;
    d["flagged_bins"] = rep.flagged_bins;
    d["flagged_observed_mass"] = rep.flagged_observed_mass;
    d["zero_pushforward_bins"] = rep.zero_pushforward_bins;
    d["min_pushforward_height"] = rep.min_pushforward_height;
    d["infinitely_many_k_condition"] = rep.k_clause;
    em.emit("audit_report.json", d.dump(2) + "\n");
    emit_manifest(em, c, json{{"master", c.seed}});

    RunResult out;
    out.outputs = em.outputs;
    out.summary = "audit: degenerate fraction = " + format_double(rep.degenerate_fraction) +
                  ", flagged bins = " + std::to_string(rep.flagged_bins.size());
    return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Emitter em{out_dir, {}};
    if (config.experiment == "solve") return run_solve(config, em);
    if (config.experiment == "concrete") return run_concrete(config, em);
    if (config.experiment == "stability") return run_stability(config, em);
    if (config.experiment == "local_limit") return run_local_limit(config, em);
    if (config.experiment == "weak") return run_weak(config, em);
    if (config.experiment == "audit") return run_audit(config, em);
    throw ConfigError("unknown experiment kind '" + config.experiment + "'");
}

}  // namespace scp
