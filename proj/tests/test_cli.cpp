#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scp/concrete.hpp"
#include "scp/config.hpp"
#include "scp/runner.hpp"
#include "test_oracles.hpp"

using namespace scp;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("scp_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SCP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

const std::string kFixture = SCP_FIXTURE_CSV;
const std::string kConfigDir = SCP_CONFIG_DIR;

}  // namespace

TEST_CASE("fixture filters reproduce the frozen record counts") {
    CHECK(load_concrete_csv(kFixture, 0, 25, 0.2, 0.4).size() == 11);
    CHECK(load_concrete_csv(kFixture, 25, 50, 0.2, 0.4).size() == 8);
    CHECK(load_concrete_csv(kFixture, 0, 1000, 0.0, 10.0).size() == 30);
}

TEST_CASE("physically impossible ratio filters come back empty") {
    CHECK_THROWS_AS(load_concrete_csv(kFixture, 0, 25, 2.0, 3.0), EmptyFilterError);
}

TEST_CASE("missing columns raise SchemaError") {
    const fs::path dir = temp_dir("schema");
    const fs::path bad = dir / "bad.csv";
    std::ofstream(bad) << "cement,slag,water,age,strength\n100,0,50,7,30\n";
    CHECK_THROWS_AS(load_concrete_csv(bad.string(), 0, 100, 0.0, 10.0), SchemaError);
    CHECK_THROWS_AS(load_concrete_csv("/nonexistent/file.csv", 0, 100, 0.0, 10.0),
                    SchemaError);
}

TEST_CASE("bootstrap draws have the resample moments") {
    const auto records = load_concrete_csv(kFixture, 0, 25, 0.2, 0.4);
    std::vector<double> strengths;
    for (const auto& r : records) strengths.push_back(r.strength);
    const double mu = oracles::mean(strengths);
    const double var = oracles::variance(strengths);

    const auto draws = bootstrap_noise(records, 100000, 5.0, 7);
    const double draw_mu = oracles::mean(draws);
    const double draw_var = oracles::variance(draws);

    const double se = std::sqrt((var + 25.0) / 100000.0);
    CHECK(std::fabs(draw_mu - mu) <= 4.0 * se);
    CHECK(std::fabs(draw_var - (var + 25.0)) / (var + 25.0) <= 0.10);
}

TEST_CASE("noise-free bootstrap draws stay inside the original multiset") {
    const auto records = load_concrete_csv(kFixture, 0, 25, 0.2, 0.4);
    const auto draws = bootstrap_noise(records, records.size(), 0.0, 3);
    for (double d : draws) {
        bool found = false;
        for (const auto& r : records) found = found || r.strength == d;
        CHECK(found);
    }
    CHECK(bootstrap_noise(records, 100, 0.0, 3) == bootstrap_noise(records, 100, 0.0, 3));
}

TEST_CASE("bundled configs parse and validate") {
    for (const char* name :
         {"gaussian_mixture.json", "prior_fixed_point.json", "stability_shift.json",
          "stability_widen.json", "stability_prior.json", "local_limit.json",
          "weak_dirac.json", "weak_mixture.json", "audit_ellipse.json",
          "concrete_young.json", "concrete_old.json"}) {
        const ExperimentConfig c = load_config(kConfigDir + "/" + name);
        CHECK(!c.experiment.empty());
        // round-trip through the serialized form
        const ExperimentConfig c2 = parse_config_json(config_to_json(c));
        CHECK(c2.experiment == c.experiment);
        CHECK(c2.seed == c.seed);
        CHECK(c2.n_bins == c.n_bins);
    }
}

TEST_CASE("config errors carry the offending path") {
    CHECK_THROWS_AS(parse_config_json("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"experiment\": \"solve\"}"), ConfigError);
    try {
        parse_config_json(R"({"experiment":"dance","map":{"id":"ellipse"},
            "domain":{"lower":[-1,-1],"upper":[1,1]},"prior":{"kind":"uniform"}})");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("experiment") != std::string::npos);
    }
}

TEST_CASE("solve pipeline writes its artifact bundle and reruns bit-identically") {
    ExperimentConfig c = load_config(kConfigDir + "/gaussian_mixture.json");
    c.n_observed = 20000;
    c.n_prior = 20000;
    c.n_solution_samples = 5000;
    c.grid_cells = {40, 40};

    const fs::path out1 = temp_dir("solve1");
    const RunResult r1 = run_experiment(c, out1.string());
    for (const char* f :
         {"solution_heatmap.csv", "observed_pushforward.csv", "prior_pushforward.csv",
          "solution_pushforward.csv", "solution_samples.csv", "diagnostics.json",
          "manifest.json"}) {
        CAPTURE(f);
        CHECK(fs::exists(out1 / f));
    }

    // rerun from the manifest alone
    const ExperimentConfig from_manifest = load_config((out1 / "manifest.json").string());
    const fs::path out2 = temp_dir("solve2");
    run_experiment(from_manifest, out2.string());
    for (const std::string& f : r1.outputs) {
        CAPTURE(f);
        CHECK(read_file(out1 / f) == read_file(out2 / f));
    }
}

TEST_CASE("audit runs write the report and nothing else") {
    ExperimentConfig c = load_config(kConfigDir + "/audit_ellipse.json");
    c.n_observed = 10000;
    c.n_prior = 20000;
    c.n_probes = 2000;
    const fs::path out = temp_dir("audit");
    const RunResult r = run_experiment(c, out.string());
    CHECK(fs::exists(out / "audit_report.json"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(!fs::exists(out / "solution_heatmap.csv"));
    const std::string report = read_file(out / "audit_report.json");
    CHECK(report.find("empirically untested") != std::string::npos);
}

TEST_CASE("concrete pipeline runs on the fixture") {
    ExperimentConfig c = load_config(kConfigDir + "/concrete_young.json");
    c.data->csv_path = kFixture;
    c.data->bootstrap_count = 20000;
    c.n_prior = 50000;
    const fs::path out = temp_dir("concrete");
    run_experiment(c, out.string());
    CHECK(fs::exists(out / "solution_heatmap.csv"));
    const std::string samples = read_file(out / "solution_samples.csv");
    // header plus the 30 sampled power-law parameter pairs
    CHECK(std::count(samples.begin(), samples.end(), '\n') == 31);

    // the sampled solution must reproduce the bootstrapped observations
    const std::string diag = read_file(out / "diagnostics.json");
    const auto pos = diag.find("pushforward_consistency_tv");
    REQUIRE(pos != std::string::npos);
    const double tv = std::stod(diag.substr(diag.find(':', pos) + 1));
    CHECK(tv <= 0.05);
}

TEST_CASE("cli seed override lands in the manifest") {
    const fs::path dir = temp_dir("seed_override");
    ExperimentConfig audit = load_config(kConfigDir + "/audit_ellipse.json");
    audit.n_observed = 5000;
    audit.n_prior = 10000;
    audit.n_probes = 1000;
    std::ofstream(dir / "audit.json") << config_to_json(audit);
    CHECK(run_cli("audit --config " + (dir / "audit.json").string() + " --out " +
                  (dir / "out").string() + " --seed 777") == 0);
    const std::string manifest = read_file(dir / "out" / "manifest.json");
    CHECK(manifest.find("\"seed\": 777") != std::string::npos);
}

TEST_CASE("cli exit codes follow the error taxonomy") {
    CHECK(run_cli("solve --config /nonexistent.json") == 2);

    const fs::path dir = temp_dir("cli");
    // schema failure inside the data file -> config error
    const fs::path bad_csv = dir / "bad.csv";
    std::ofstream(bad_csv) << "a,b\n1,2\n";
    ExperimentConfig c = load_config(kConfigDir + "/concrete_young.json");
    c.data->csv_path = bad_csv.string();
    std::ofstream(dir / "bad_concrete.json") << config_to_json(c);
    CHECK(run_cli("concrete --config " + (dir / "bad_concrete.json").string() + " --out " +
                  (dir / "out").string()) == 2);

    // subcommand/config kind mismatch
    CHECK(run_cli("weak --config " + kConfigDir + "/gaussian_mixture.json") == 2);

    // a healthy tiny audit run
    ExperimentConfig audit = load_config(kConfigDir + "/audit_ellipse.json");
    audit.n_observed = 5000;
    audit.n_prior = 10000;
    audit.n_probes = 1000;
    std::ofstream(dir / "audit_small.json") << config_to_json(audit);
    CHECK(run_cli("audit --config " + (dir / "audit_small.json").string() + " --out " +
                  (dir / "audit_out").string()) == 0);

    // assumption failure: TGD mass where the prior pushforward vanishes
    ExperimentConfig mism = load_config(kConfigDir + "/gaussian_mixture.json");
    mism.prior = DensitySpec::gaussian({0.0, 0.0}, 0.05);
    mism.n_observed = 5000;
    mism.n_prior = 5000;
    std::ofstream(dir / "mismatch.json") << config_to_json(mism);
    CHECK(run_cli("solve --config " + (dir / "mismatch.json").string() + " --out " +
                  (dir / "mismatch_out").string()) == 3);

    // numeric failure: a point-mass TGD gives a zero-width observed range
    ExperimentConfig degen = load_config(kConfigDir + "/gaussian_mixture.json");
    degen.tgd = DensitySpec::dirac_mixture({{1.0, {2.0, 2.0}}});
    degen.n_observed = 5000;
    degen.n_prior = 5000;
    std::ofstream(dir / "degen.json") << config_to_json(degen);
    CHECK(run_cli("solve --config " + (dir / "degen.json").string() + " --out " +
                  (dir / "degen_out").string()) == 4);
}

TEST_CASE("manifest records the generator and derived seeds") {
    ExperimentConfig c = load_config(kConfigDir + "/gaussian_mixture.json");
    c.n_observed = 5000;
    c.n_prior = 5000;
    c.n_solution_samples = 1000;
    c.grid_cells = {20, 20};
    const fs::path out = temp_dir("manifest");
    run_experiment(c, out.string());
    const std::string m = read_file(out / "manifest.json");
    CHECK(m.find("philox4x32-10") != std::string::npos);
    CHECK(m.find("derived_seeds") != std::string::npos);
    CHECK(m.find("solution_draws") != std::string::npos);
}
