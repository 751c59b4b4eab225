#include "scp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace scp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail(path, "missing key '" + key + "'");
    return j.at(key);
}

std::vector<double> as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

json spec_to_json(const DensitySpec& spec) {
    json j;
    switch (spec.kind) {
        case DensityKind::uniform:
            j["kind"] = "uniform";
            break;
        case DensityKind::gaussian_mixture: {
            j["kind"] = "gaussian_mixture";
            json comps = json::array();
            for (const auto& c : spec.components) {
                json e;
                e["weight"] = c.weight;
                e["center"] = c.center;
                const int n = static_cast<int>(c.center.size());
                json rows = json::array();
                for (int r = 0; r < n; ++r) {
                    json row = json::array();
                    for (int k = 0; k < n; ++k)
                        row.push_back(c.cov[static_cast<std::size_t>(r) * n + k]);
                    rows.push_back(row);
                }
                e["cov"] = rows;
                comps.push_back(e);
            }
            j["components"] = comps;
            break;
        }
        case DensityKind::dirac_mixture: {
            j["kind"] = "dirac_mixture";
            json atoms = json::array();
            for (const auto& a : spec.atoms) {
                json e;
                e["weight"] = a.weight;
                e["center"] = a.center;
                atoms.push_back(e);
            }
            j["atoms"] = atoms;
            break;
        }
        case DensityKind::convex_combination: {
            j["kind"] = "convex_combination";
            json parts = json::array();
            for (std::size_t i = 0; i < spec.parts.size(); ++i) {
                json e;
                e["weight"] = spec.part_weights[i];
                e["spec"] = spec_to_json(*spec.parts[i]);
                parts.push_back(e);
            }
            j["parts"] = parts;
            break;
        }
    }
    return j;
}

DensitySpec spec_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "density spec must be an object");
    const std::string kind = require(j, "kind", path).get<std::string>();
    if (kind == "uniform") return DensitySpec::uniform();

    if (kind == "gaussian_mixture" || kind == "gaussian") {
        std::vector<GaussianComponent> comps;
        const json& arr = j.contains("components") ? j.at("components") : json::array({j});
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = path + ".components[" + std::to_string(i) + "]";
            const json& e = arr[i];
            GaussianComponent c;
            c.weight = e.value("weight", 1.0);
            c.center = as_vector(require(e, "center", p), p + ".center");
            const int n = static_cast<int>(c.center.size());
            if (e.contains("cov")) {
                const json& rows = e.at("cov");
                if (!rows.is_array() || static_cast<int>(rows.size()) != n)
                    fail(p, "cov must be an n-by-n matrix");
                for (const auto& row : rows) {
                    const auto r = as_vector(row, p + ".cov");
                    if (static_cast<int>(r.size()) != n) fail(p, "cov must be an n-by-n matrix");
                    c.cov.insert(c.cov.end(), r.begin(), r.end());
                }
            } else if (e.contains("sd")) {
                const double sd = e.at("sd").get<double>();
                c.cov.assign(static_cast<std::size_t>(n) * n, 0.0);
                for (int k = 0; k < n; ++k) c.cov[static_cast<std::size_t>(k) * n + k] = sd * sd;
            } else if (e.contains("sds")) {
                const auto sds = as_vector(e.at("sds"), p + ".sds");
                if (static_cast<int>(sds.size()) != n) fail(p, "sds length mismatch");
                c.cov.assign(static_cast<std::size_t>(n) * n, 0.0);
                for (int k = 0; k < n; ++k)
                    c.cov[static_cast<std::size_t>(k) * n + k] = sds[k] * sds[k];
            } else {
                fail(p, "gaussian component needs 'cov', 'sd' or 'sds'");
            }
            comps.push_back(std::move(c));
        }
        return DensitySpec::gaussian_mixture(std::move(comps));
    }

    if (kind == "dirac_mixture") {
        std::vector<DiracAtom> atoms;
        const json& arr = require(j, "atoms", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = path + ".atoms[" + std::to_string(i) + "]";
            DiracAtom a;
            a.weight = arr[i].value("weight", 1.0);
            a.center = as_vector(require(arr[i], "center", p), p + ".center");
            atoms.push_back(std::move(a));
        }
        return DensitySpec::dirac_mixture(std::move(atoms));
    }

    if (kind == "convex_combination") {
        DensitySpec s;
        s.kind = DensityKind::convex_combination;
        const json& arr = require(j, "parts", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = path + ".parts[" + std::to_string(i) + "]";
            s.part_weights.push_back(require(arr[i], "weight", p).get<double>());
            s.parts.push_back(std::make_shared<const DensitySpec>(
                spec_from_json(require(arr[i], "spec", p), p + ".spec")));
        }
        return s;
    }
    fail(path, "unknown density kind '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    // A manifest embeds the resolved config; rerunning from it is supported.
    if (j.contains("config") && j.at("config").is_object()) j = j.at("config");

    ExperimentConfig c;
    c.experiment = require(j, "experiment", "$").get<std::string>();

    const json& map = require(j, "map", "$");
    c.map_id = require(map, "id", "$.map").get<std::string>();
    c.powerlaw_r = map.value("r", 0.3);

    const json& dom = require(j, "domain", "$");
    c.domain = BoxDomain(as_vector(require(dom, "lower", "$.domain"), "$.domain.lower"),
                         as_vector(require(dom, "upper", "$.domain"), "$.domain.upper"));

    c.prior = spec_from_json(require(j, "prior", "$"), "$.prior");

    if (j.contains("tgd")) c.tgd = spec_from_json(j.at("tgd"), "$.tgd");
    if (j.contains("tgd_b")) c.tgd_b = spec_from_json(j.at("tgd_b"), "$.tgd_b");
    if (j.contains("limit")) c.limit = spec_from_json(j.at("limit"), "$.limit");
    if (j.contains("stages")) {
        const json& arr = j.at("stages");
        for (std::size_t i = 0; i < arr.size(); ++i)
            c.stages.push_back(
                spec_from_json(arr[i], "$.stages[" + std::to_string(i) + "]"));
    }
    if (j.contains("shrink")) {
        const json& s = j.at("shrink");
        ShrinkConfig sh;
        const json& atoms = require(s, "atoms", "$.shrink");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            DiracAtom a;
            a.weight = atoms[i].value("weight", 1.0);
            a.center = as_vector(require(atoms[i], "center", "$.shrink.atoms"),
                                 "$.shrink.atoms.center");
            sh.atoms.push_back(std::move(a));
        }
        sh.scales = as_vector(require(s, "scales", "$.shrink"), "$.shrink.scales");
        c.shrink = std::move(sh);
    }
    if (j.contains("test_functions")) {
        for (const auto& e : j.at("test_functions"))
            c.test_functions.push_back(e.get<std::string>());
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        CsvDataConfig dc;
        dc.csv_path = require(d, "csv", "$.data").get<std::string>();
        if (d.contains("age_range")) {
            const auto r = as_vector(d.at("age_range"), "$.data.age_range");
            if (r.size() != 2) fail("$.data.age_range", "expected [lo, hi]");
            dc.age_lo = r[0];
            dc.age_hi = r[1];
        }
        if (d.contains("r_range")) {
            const auto r = as_vector(d.at("r_range"), "$.data.r_range");
            if (r.size() != 2) fail("$.data.r_range", "expected [lo, hi]");
            dc.r_lo = r[0];
            dc.r_hi = r[1];
        }
        dc.noise_sd = d.value("noise_sd", 5.0);
        dc.bootstrap_count = d.value("bootstrap_count", static_cast<std::size_t>(100000));
        c.data = std::move(dc);
    }

    c.n_observed = j.value("n_observed", static_cast<std::size_t>(100000));
    c.n_prior = j.value("n_prior", static_cast<std::size_t>(100000));
    c.n_bins = j.value("n_bins", 100);
    if (j.contains("grid")) {
        c.grid_cells.clear();
        for (const auto& e : j.at("grid")) c.grid_cells.push_back(e.get<int>());
    }
    c.seed = j.value("seed", static_cast<std::uint64_t>(20200913));
    c.replicates = j.value("replicates", 1);
    if (j.contains("shell_width")) c.shell_width = j.at("shell_width").get<double>();
    c.n_solution_samples = j.value("n_solution_samples", static_cast<std::size_t>(10000));
    c.n_probes = j.value("n_probes", static_cast<std::size_t>(10000));

    if (c.n_observed < 1 || c.n_prior < 1) fail("$", "sample counts must be >= 1");
    if (c.n_bins < 2) fail("$.n_bins", "need at least 2 bins");
    if (c.replicates < 1) fail("$.replicates", "need at least 1 replicate");
    if (static_cast<int>(c.grid_cells.size()) != c.domain.dim())
        fail("$.grid", "grid resolution must match the domain dimension");

    static const char* kinds[] = {"solve", "stability", "local_limit", "weak", "audit",
                                  "concrete"};
    bool known = false;
    for (const char* k : kinds) known = known || c.experiment == k;
    if (!known) fail("$.experiment", "unknown experiment kind '" + c.experiment + "'");

    try {
        validate_spec(c.prior, c.domain);
        if (c.tgd) validate_spec(*c.tgd, c.domain);
        if (c.tgd_b) validate_spec(*c.tgd_b, c.domain);
        if (c.limit) validate_spec(*c.limit, c.domain);
        for (const auto& s : c.stages) validate_spec(s, c.domain);
    } catch (const InvalidSpecError& e) {
        throw ConfigError(std::string("invalid density spec: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["map"] = {{"id", c.map_id}};
    if (c.map_id == "powerlaw") j["map"]["r"] = c.powerlaw_r;
    j["domain"] = {{"lower", c.domain.lower}, {"upper", c.domain.upper}};
    j["prior"] = spec_to_json(c.prior);
    if (c.tgd) j["tgd"] = spec_to_json(*c.tgd);
    if (c.tgd_b) j["tgd_b"] = spec_to_json(*c.tgd_b);
    if (c.limit) j["limit"] = spec_to_json(*c.limit);
    if (!c.stages.empty()) {
        json arr = json::array();
        for (const auto& s : c.stages) arr.push_back(spec_to_json(s));
        j["stages"] = arr;
    }
    if (c.shrink) {
        json atoms = json::array();
        for (const auto& a : c.shrink->atoms)
            atoms.push_back({{"weight", a.weight}, {"center", a.center}});
        j["shrink"] = {{"atoms", atoms}, {"scales", c.shrink->scales}};
    }
    if (!c.test_functions.empty()) j["test_functions"] = c.test_functions;
    if (c.data) {
        j["data"] = {{"csv", c.data->csv_path},
                     {"age_range", {c.data->age_lo, c.data->age_hi}},
                     {"r_range", {c.data->r_lo, c.data->r_hi}},
                     {"noise_sd", c.data->noise_sd},
                     {"bootstrap_count", c.data->bootstrap_count}};
    }
    j["n_observed"] = c.n_observed;
    j["n_prior"] = c.n_prior;
    j["n_bins"] = c.n_bins;
    j["grid"] = c.grid_cells;
    j["seed"] = c.seed;
    j["replicates"] = c.replicates;
    if (c.shell_width) j["shell_width"] = *c.shell_width;
    j["n_solution_samples"] = c.n_solution_samples;
    j["n_probes"] = c.n_probes;
    return j.dump(2);
}

}  // namespace scp
