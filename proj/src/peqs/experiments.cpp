#include "peqs/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peqs/bounds.hpp"
#include "peqs/cumulant.hpp"
#include "peqs/error.hpp"
#include "peqs/noise.hpp"
#include "peqs/problems.hpp"
#include "peqs/qaoa.hpp"
#include "peqs/rng.hpp"
#include "peqs/statevec.hpp"

namespace peqs {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string trimmed(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        require(known, errc::invalid_argument,
                "unknown key '" + item.key() + "' in " + where);
    }
}

// Scalars are accepted wherever a list is expected (CLI overrides produce
// them), so a lone number becomes a one-element list.
std::vector<double> number_list(const json& v, const std::string& field) {
    std::vector<double> out;
    const auto take = [&](const json& e) {
        require(e.is_number(), errc::invalid_argument, field + " must hold numbers");
        const double x = e.get<double>();
        require(std::isfinite(x), errc::invalid_argument, field + " must be finite");
        out.push_back(x);
    };
    if (v.is_array()) {
        require(!v.empty(), errc::invalid_argument, field + " must not be empty");
        for (const json& e : v) take(e);
    } else {
        take(v);
    }
    return out;
}

std::vector<int> int_list(const json& v, const std::string& field) {
    std::vector<int> out;
    const auto take = [&](const json& e) {
        require(e.is_number_integer(), errc::invalid_argument, field + " must hold integers");
        out.push_back(e.get<int>());
    };
    if (v.is_array()) {
        require(!v.empty(), errc::invalid_argument, field + " must not be empty");
        for (const json& e : v) take(e);
    } else {
        take(v);
    }
    return out;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

json parse_scalar(const std::string& raw) {
    const std::string s = trimmed(raw);
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return json(s);
    }
}

std::uint64_t cell_seed(const char* op, const char* tag, int n, int p, double sigma, double eta,
                        std::uint64_t base) {
    const std::string key = std::string(op) + '|' + tag + "|n=" + std::to_string(n) +
                            "|p=" + std::to_string(p) + "|sigma=" + fmt(sigma) +
                            "|eta=" + fmt(eta);
    return splitmix64(base ^ fnv1a64(key));
}

NoiseModel grid_model(double sigma, double eta) {
    NoiseModel model;
    model.eta_m = eta;
    model.eta_c = eta;
    model.gamma_m = sigma * sigma;
    model.gamma_c = sigma * sigma;
    return model;
}

// ---------------------------------------------------------------- resolution

struct ResolvedProblem {
    DiagonalObservable cost;
    std::vector<std::pair<int, Schedule>> schedules;  // (p, schedule), p ascending
    int p_star = 0;
    std::string error;  // nonempty: every cell of this n is skipped
};

ResolvedProblem resolve_problem(const ExperimentConfig& config, int n) {
    ResolvedProblem r;
    try {
        if (config.problem == ProblemKind::grover) {
            GroverInstance inst = grover_instance(n);
            r.cost = std::move(inst.cost);
            r.p_star = grover_p_star(n);
            if (config.p_optimal) {
                r.schedules.emplace_back(r.p_star, grover_schedule(n, r.p_star));
            } else {
                for (int p = config.p_lo; p <= config.p_hi; ++p)
                    r.schedules.emplace_back(p, grover_schedule(n, p));
            }
        } else {
            IsingRingInstance inst = ising_ring_instance(n);
            r.cost = std::move(inst.cost);
            r.p_star = n / 2;
            r.schedules.emplace_back(r.p_star, ising_optimal_schedule(n));
        }
    } catch (const error& e) {
        r = ResolvedProblem{};
        r.error = e.what();
    }
    return r;
}

// ------------------------------------------------------------------- outputs

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

RunSummary make_summary(const ExperimentConfig& config, const char* op) {
    const fs::path dir(config.outputs);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, errc::io, "cannot create output directory " + dir.string());
    const std::string stem =
        (config.name.empty() ? std::string(problem_name(config.problem)) : config.name) + "_" + op;
    RunSummary s;
    s.csv_path = dir / (stem + ".csv");
    s.meta_path = dir / (stem + ".csv.meta.json");
    return s;
}

json base_conventions() {
    json c;
    c["layer_counting"] =
        "p counts W-layers for grover (two signed cost and two mixer sub-blocks each, 4p "
        "sub-blocks total) and (cost, mixer) layers for ising-ring (2p sub-blocks, depth pinned "
        "at p = n/2)";
    c["noise_model"] =
        "every applied sub-block angle is scaled by an independent N(1 + eta, sigma) draw "
        "(sigma = sqrt(Gamma), never truncated); eta and sigma hit the cost and mixer channels "
        "alike";
    c["realizations"] =
        "the R column records realizations actually evaluated; zero-noise and coherent cells are "
        "point masses and collapse to R = 1";
    c["rows"] =
        "rows are ordered by (n, p, sigma, eta); unrunnable cells keep their row and carry a "
        "skipped_reason";
    c["coherent_axis"] =
        "coherent decays fit against eta*p for grover (squared exponential) and eta^2*p for "
        "ising-ring (plain exponential); both axes derive from the eta and p columns";
    c["gradient_indexing"] =
        "derivative bounds index sub-blocks 0-based; the differentiated layer is index/2 + 1";
    return c;
}

void write_outputs(const ExperimentConfig& config, const char* op, const Table& t,
                   const RunSummary& summary, const json& conventions) {
    std::ofstream f(summary.csv_path, std::ios::binary);
    require(f.good(), errc::io, "cannot write " + summary.csv_path.string());
    f << "# peqs " << op << " schema=" << kSchemaVersion << " config_hash=" << config.config_hash
      << " base_seed=" << config.base_seed << "\n";
    const auto write_row = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) f << ',';
            f << fields[i];
        }
        f << "\n";
    };
    write_row(t.columns);
    for (const auto& row : t.rows) write_row(row);
    f.flush();
    require(f.good(), errc::io, "write failed for " + summary.csv_path.string());

    json meta;
    meta["operation"] = op;
    meta["schema_version"] = kSchemaVersion;
    meta["tool_version"] = kToolVersion;
    meta["config_hash"] = config.config_hash;
    meta["base_seed"] = config.base_seed;
    meta["config"] = config.canonical;
    meta["columns"] = t.columns;
    meta["rows"] = t.rows.size();
    meta["skipped"] = summary.skipped;
    meta["conventions"] = conventions;
    if (!summary.violations.empty()) meta["violations"] = summary.violations;
    std::ofstream m(summary.meta_path, std::ios::binary);
    require(m.good(), errc::io, "cannot write " + summary.meta_path.string());
    m << meta.dump(2) << "\n";
    m.flush();
    require(m.good(), errc::io, "write failed for " + summary.meta_path.string());
}

// ----------------------------------------------------------------- fit input

struct CsvTable {
    std::vector<std::string> columns;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::string>> rows;
    std::optional<std::string> config_hash;
    std::optional<std::uint64_t> base_seed;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream f(path);
    require(f.good(), errc::io, "cannot open csv: " + path.string());
    CsvTable t;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                if (tok.rfind("config_hash=", 0) == 0) t.config_hash = tok.substr(12);
                if (tok.rfind("base_seed=", 0) == 0) {
                    try {
                        t.base_seed = std::stoull(tok.substr(10));
                    } catch (const std::exception&) {
                    }
                }
            }
            continue;
        }
        std::vector<std::string> fields = split_csv(line);
        if (t.columns.empty()) {
            t.columns = fields;
            for (std::size_t i = 0; i < fields.size(); ++i) t.index[fields[i]] = i;
        } else {
            require(fields.size() == t.columns.size(), errc::io,
                    "csv row width does not match the header");
            t.rows.push_back(std::move(fields));
        }
    }
    require(!t.columns.empty(), errc::io, "csv has no header row");
    return t;
}

std::size_t column_of(const CsvTable& t, const std::string& name) {
    const auto it = t.index.find(name);
    require(it != t.index.end(), errc::io, "csv schema mismatch: missing column '" + name + "'");
    return it->second;
}

std::optional<double> cell_value(const std::string& field) {
    if (field.empty()) return std::nullopt;
    double v = 0.0;
    const char* b = field.data();
    const auto res = std::from_chars(b, b + field.size(), v);
    require(res.ec == std::errc{} && res.ptr == b + field.size(), errc::io,
            "unparseable numeric field '" + field + "'");
    return v;
}

FitModel model_for(FitKind kind) {
    switch (kind) {
        case FitKind::exp_decay: return FitModel::exp_decay;
        case FitKind::squared_exp: return FitModel::squared_exp_decay;
        case FitKind::power_law: return FitModel::power_law;
        case FitKind::saturation: return FitModel::saturation;
        case FitKind::layer_growth: return FitModel::layer_growth;
        case FitKind::unitary_distance: return FitModel::power_law;
    }
    return FitModel::exp_decay;
}

}  // namespace

const char* problem_name(ProblemKind kind) {
    return kind == ProblemKind::grover ? "grover" : "ising-ring";
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
    require(doc.is_object(), errc::invalid_argument, "config must be a JSON object");
    check_keys(doc,
               {"name", "problem", "n_list", "p_mode", "p_range", "noise", "realizations",
                "base_seed", "outputs", "distance", "digitization"},
               "config");

    ExperimentConfig c;
    if (doc.contains("name")) {
        require(doc["name"].is_string(), errc::invalid_argument, "name must be a string");
        c.name = doc["name"].get<std::string>();
    }

    require(doc.contains("problem"), errc::invalid_argument, "config needs a problem");
    require(doc["problem"].is_string(), errc::invalid_argument, "problem must be a string");
    const std::string prob = doc["problem"].get<std::string>();
    if (prob == "grover") {
        c.problem = ProblemKind::grover;
    } else if (prob == "ising-ring") {
        c.problem = ProblemKind::ising_ring;
    } else {
        raise(errc::invalid_argument, "unknown problem '" + prob + "' (grover | ising-ring)");
    }

    require(doc.contains("n_list"), errc::invalid_argument, "config needs n_list");
    c.n_list = int_list(doc["n_list"], "n_list");
    for (const int n : c.n_list)
        require(n >= 1, errc::invalid_argument, "n_list entries must be positive");
    sort_unique(c.n_list);

    std::string p_mode = "optimal";
    if (doc.contains("p_mode")) {
        require(doc["p_mode"].is_string(), errc::invalid_argument, "p_mode must be a string");
        p_mode = doc["p_mode"].get<std::string>();
    }
    if (p_mode == "sweep") {
        c.p_optimal = false;
        require(c.problem == ProblemKind::grover, errc::invalid_argument,
                "ising-ring runs at the optimal depth p = n/2; use p_mode \"optimal\"");
        require(doc.contains("p_range"), errc::invalid_argument, "p_mode sweep needs p_range");
        std::vector<int> pr = int_list(doc["p_range"], "p_range");
        if (pr.size() == 1) pr.push_back(pr[0]);
        require(pr.size() == 2, errc::invalid_argument, "p_range is [lo, hi]");
        c.p_lo = pr[0];
        c.p_hi = pr[1];
        require(0 <= c.p_lo && c.p_lo <= c.p_hi, errc::invalid_argument,
                "p_range needs 0 <= lo <= hi");
    } else {
        require(p_mode == "optimal", errc::invalid_argument,
                "unknown p_mode '" + p_mode + "' (sweep | optimal)");
        require(!doc.contains("p_range"), errc::invalid_argument,
                "p_range only applies to p_mode sweep");
    }

    c.sigma_list = {0.0};
    c.eta_list = {0.0};
    if (doc.contains("noise")) {
        const json& nz = doc["noise"];
        require(nz.is_object(), errc::invalid_argument, "noise must be an object");
        check_keys(nz, {"sigma", "eta"}, "noise");
        if (nz.contains("sigma")) c.sigma_list = number_list(nz["sigma"], "noise.sigma");
        if (nz.contains("eta")) c.eta_list = number_list(nz["eta"], "noise.eta");
    }
    for (const double s : c.sigma_list)
        require(s >= 0.0, errc::invalid_argument, "noise.sigma entries must be nonnegative");
    sort_unique(c.sigma_list);
    sort_unique(c.eta_list);

    if (doc.contains("realizations")) {
        const json& r = doc["realizations"];
        require(r.is_number_integer() && r.get<std::int64_t>() >= 1, errc::invalid_argument,
                "realizations must be an integer >= 1");
        c.realizations = r.get<std::uint64_t>();
    }
    if (doc.contains("base_seed")) {
        const json& b = doc["base_seed"];
        require(b.is_number_integer() && b.get<std::int64_t>() >= 0, errc::invalid_argument,
                "base_seed must be a nonnegative integer");
        c.base_seed = b.get<std::uint64_t>();
    }
    if (doc.contains("outputs")) {
        require(doc["outputs"].is_string(), errc::invalid_argument, "outputs must be a string");
        c.outputs = doc["outputs"].get<std::string>();
        if (c.outputs.empty()) c.outputs = ".";
    }
    if (doc.contains("distance")) {
        require(doc["distance"].is_boolean(), errc::invalid_argument, "distance must be a bool");
        c.distance = doc["distance"].get<bool>();
    }
    if (doc.contains("digitization")) {
        const json& d = doc["digitization"];
        require(d.is_object(), errc::invalid_argument, "digitization must be an object");
        check_keys(d, {"n_bits_gamma", "n_bits_beta", "sweep"}, "digitization");
        DigitizationSpec spec;
        const auto bits = [&](const char* field) {
            require(d.contains(field), errc::invalid_argument,
                    std::string("digitization needs ") + field);
            const json& v = d[field];
            require(v.is_number_integer(), errc::invalid_argument,
                    std::string("digitization.") + field + " must be an integer");
            const int b = v.get<int>();
            require(b >= 1 && b <= 62, errc::invalid_argument,
                    std::string("digitization.") + field + " must lie in [1, 62]");
            return b;
        };
        spec.n_bits_gamma = bits("n_bits_gamma");
        spec.n_bits_beta = bits("n_bits_beta");
        if (d.contains("sweep")) {
            std::vector<int> sw = int_list(d["sweep"], "digitization.sweep");
            if (sw.size() == 1) sw.push_back(sw[0]);
            require(sw.size() == 2, errc::invalid_argument, "digitization.sweep is [lo, hi]");
            spec.sweep_lo = sw[0];
            spec.sweep_hi = sw[1];
        }
        require(1 <= spec.sweep_lo && spec.sweep_lo <= spec.sweep_hi && spec.sweep_hi <= 62,
                errc::invalid_argument, "digitization.sweep needs 1 <= lo <= hi <= 62");
        c.digitization = spec;
    }

    json canon;
    canon["name"] = c.name;
    canon["problem"] = prob;
    canon["n_list"] = c.n_list;
    canon["p_mode"] = c.p_optimal ? "optimal" : "sweep";
    if (!c.p_optimal) canon["p_range"] = json::array({c.p_lo, c.p_hi});
    canon["noise"] = json{{"sigma", c.sigma_list}, {"eta", c.eta_list}};
    canon["realizations"] = c.realizations;
    canon["base_seed"] = c.base_seed;
    canon["outputs"] = c.outputs;
    canon["distance"] = c.distance;
    if (c.digitization) {
        canon["digitization"] =
            json{{"n_bits_gamma", c.digitization->n_bits_gamma},
                 {"n_bits_beta", c.digitization->n_bits_beta},
                 {"sweep", json::array({c.digitization->sweep_lo, c.digitization->sweep_hi})}};
    }
    c.canonical = canon;
    c.config_hash = hash_hex(fnv1a64(canon.dump()));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    require(f.good(), errc::io, "cannot open config: " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        raise(errc::invalid_argument, std::string("config parse: ") + e.what());
    }
    return parse_config(doc);
}

void apply_override(nlohmann::json& doc, const std::string& path, const std::string& value) {
    require(!path.empty(), errc::invalid_argument, "empty override path");
    try {
        json* cur = &doc;
        std::size_t pos = 0;
        while (true) {
            const std::size_t dot = path.find('.', pos);
            const std::string seg =
                dot == std::string::npos ? path.substr(pos) : path.substr(pos, dot - pos);
            require(!seg.empty(), errc::invalid_argument, "bad override path '" + path + "'");
            if (dot == std::string::npos) {
                if (value.find(',') != std::string::npos) {
                    json arr = json::array();
                    std::string item;
                    std::istringstream ss(value);
                    while (std::getline(ss, item, ',')) arr.push_back(parse_scalar(item));
                    (*cur)[seg] = arr;
                } else {
                    (*cur)[seg] = parse_scalar(value);
                }
                return;
            }
            cur = &((*cur)[seg]);
            pos = dot + 1;
        }
    } catch (const json::exception& e) {
        raise(errc::invalid_argument, "override '" + path + "': " + e.what());
    }
}

RunSummary run_sweep(const ExperimentConfig& config) {
    RunSummary out = make_summary(config, "sweep");
    Table t;
    t.columns = {"n",           "p",           "p_star_flag",     "sigma", "eta",
                 "mean_HC",     "stderr_HC",   "noiseless_HC",    "mean_dU_inf",
                 "mean_dU_frob_sq", "R",       "base_seed",       "skipped_reason"};

    const auto push_row = [&](int n, int p, int flag, double sigma, double eta,
                              const std::optional<double>& mean, const std::optional<double>& se,
                              const std::optional<double>& noiseless,
                              const std::optional<double>& du_inf,
                              const std::optional<double>& du_frob, std::size_t r_eff,
                              const std::string& reason) {
        t.rows.push_back({std::to_string(n), std::to_string(p), std::to_string(flag), fmt(sigma),
                          fmt(eta), fmt_opt(mean), fmt_opt(se), fmt_opt(noiseless),
                          fmt_opt(du_inf), fmt_opt(du_frob), std::to_string(r_eff),
                          std::to_string(config.base_seed), sanitize(reason)});
        if (!reason.empty()) ++out.skipped;
    };

    for (const int n : config.n_list) {
        const ResolvedProblem prob = resolve_problem(config, n);
        if (!prob.error.empty()) {
            for (const double sigma : config.sigma_list)
                for (const double eta : config.eta_list)
                    push_row(n, 0, 0, sigma, eta, {}, {}, {}, {}, {}, 0, prob.error);
            continue;
        }
        for (const auto& [p, schedule] : prob.schedules) {
            const double noiseless = expectation(evolve(prob.cost, schedule), prob.cost);
            for (const double sigma : config.sigma_list) {
                for (const double eta : config.eta_list) {
                    const NoiseModel model = grid_model(sigma, eta);
                    const std::size_t r_eff = model.is_coherent() ? 1 : config.realizations;
                    std::optional<double> mean, se, du_inf, du_frob;
                    if (model.is_zero()) {
                        mean = noiseless;
                        se = 0.0;
                        if (config.distance) {
                            du_inf = 0.0;
                            du_frob = 0.0;
                        }
                    } else {
                        const std::uint64_t seed =
                            cell_seed("sweep", "", n, p, sigma, eta, config.base_seed);
                        const EnsembleStats stats = ensemble_expectation(
                            prob.cost, schedule, model, prob.cost, r_eff, seed);
                        mean = stats.mean;
                        se = stats.stderr_mean;
                        if (config.distance) {
                            const UnitaryDistanceStats d = ensemble_unitary_distance(
                                prob.cost, schedule, model, r_eff, seed, n <= 8);
                            du_inf = d.spectral.mean;
                            if (d.frobenius_sq.count > 0)
                                du_frob = d.frobenius_sq.mean / std::pow(2.0, n);
                        }
                    }
                    push_row(n, p, p == prob.p_star ? 1 : 0, sigma, eta, mean, se, noiseless,
                             du_inf, du_frob, r_eff, {});
                }
            }
        }
    }
    out.rows = t.rows.size();
    json conv = base_conventions();
    conv["distance"] =
        "mean_dU_inf is the ensemble-mean spectral distance ||U - U0||_inf; mean_dU_frob_sq is "
        "dimension-normalized ||U - U0||_F^2 / 2^n and reported on the dense route (n <= 8)";
    write_outputs(config, "sweep", t, out, conv);
    return out;
}

RunSummary run_bounds(const ExperimentConfig& config) {
    RunSummary out = make_summary(config, "bounds");
    Table t;
    t.columns = {"n",         "p",          "p_star_flag",     "sigma",
                 "eta",       "noiseless_HC", "mean_HC",       "stderr_HC",
                 "approx_HC", "measured_dev", "approx_dev",    "numerical_bound",
                 "analytic_bound", "paper_estimate", "R",      "base_seed",
                 "skipped_reason"};

    const auto push_row = [&](int n, int p, int flag, double sigma, double eta,
                              const std::optional<double>& noiseless,
                              const std::optional<double>& mean, const std::optional<double>& se,
                              const std::optional<double>& approx,
                              const std::optional<double>& measured_dev,
                              const std::optional<double>& approx_dev,
                              const std::optional<double>& numerical,
                              const std::optional<double>& analytic,
                              const std::optional<double>& paper, std::size_t r_eff,
                              const std::string& reason) {
        t.rows.push_back({std::to_string(n), std::to_string(p), std::to_string(flag), fmt(sigma),
                          fmt(eta), fmt_opt(noiseless), fmt_opt(mean), fmt_opt(se),
                          fmt_opt(approx), fmt_opt(measured_dev), fmt_opt(approx_dev),
                          fmt_opt(numerical), fmt_opt(analytic), fmt_opt(paper),
                          std::to_string(r_eff), std::to_string(config.base_seed),
                          sanitize(reason)});
        if (!reason.empty()) ++out.skipped;
    };

    for (const int n : config.n_list) {
        const ResolvedProblem prob = resolve_problem(config, n);
        if (!prob.error.empty()) {
            for (const double sigma : config.sigma_list)
                for (const double eta : config.eta_list)
                    push_row(n, 0, 0, sigma, eta, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0,
                             prob.error);
            continue;
        }
        const ObservableSum obs_sum = decompose_observable(prob.cost);
        for (const auto& [p, schedule] : prob.schedules) {
            const double noiseless = expectation(evolve(prob.cost, schedule), prob.cost);
            for (const double sigma : config.sigma_list) {
                for (const double eta : config.eta_list) {
                    const NoiseModel model = grid_model(sigma, eta);
                    const std::size_t r_eff = model.is_coherent() ? 1 : config.realizations;
                    std::string reason;
                    std::optional<double> mean, se, approx;
                    if (model.is_zero()) {
                        mean = noiseless;
                        se = 0.0;
                        approx = noiseless;
                    } else {
                        const std::uint64_t seed =
                            cell_seed("bounds", "", n, p, sigma, eta, config.base_seed);
                        const EnsembleStats stats = ensemble_expectation(
                            prob.cost, schedule, model, prob.cost, r_eff, seed);
                        mean = stats.mean;
                        se = stats.stderr_mean;
                        try {
                            approx = approx_expectation(prob.cost, schedule, obs_sum, model);
                        } catch (const error& e) {
                            if (e.code() != errc::truncation_warning) throw;
                            reason = "truncation_warning";
                        }
                    }
                    const BoundPair pair = abs_error_bound(prob.cost, schedule, obs_sum, model);
                    std::optional<double> measured_dev, approx_dev, paper;
                    if (mean) measured_dev = std::abs(*mean - noiseless);
                    if (approx) approx_dev = std::abs(*approx - noiseless);
                    if (config.problem == ProblemKind::grover && sigma > 0.0 && eta == 0.0)
                        paper = grover_paper_abs_bound(p, sigma * sigma, prob.cost.norm_inf());
                    if (!(pair.numerical <= pair.analytic + 1e-9) ||
                        !std::isfinite(pair.numerical) || !std::isfinite(pair.analytic)) {
                        out.violations.push_back(
                            "n=" + std::to_string(n) + " p=" + std::to_string(p) + " sigma=" +
                            fmt(sigma) + " eta=" + fmt(eta) + ": numerical bound " +
                            fmt(pair.numerical) + " exceeds analytic bound " +
                            fmt(pair.analytic));
                    }
                    push_row(n, p, p == prob.p_star ? 1 : 0, sigma, eta, noiseless, mean, se,
                             approx, measured_dev, approx_dev, pair.numerical, pair.analytic,
                             paper, r_eff, reason);
                }
            }
        }
    }
    out.rows = t.rows.size();
    json conv = base_conventions();
    conv["paper_estimate"] =
        "stochastic grover cells also carry the closed-form estimate min[2(exp(4 pi p Gamma) - "
        "1), ||H_C||]; it is a continuous-weight reporting estimate, separate from the "
        "numerical/analytic dominance pair";
    write_outputs(config, "bounds", t, out, conv);
    return out;
}

RunSummary run_digitization(const ExperimentConfig& config) {
    require(config.digitization.has_value(), errc::invalid_argument,
            "digitization block required");
    for (const double eta : config.eta_list)
        require(eta == 0.0, errc::invalid_argument,
                "digitization runs use stochastic noise (eta must be 0)");
    const DigitizationSpec spec = *config.digitization;

    RunSummary out = make_summary(config, "digitization");
    Table t;
    t.columns = {"row_kind",       "n",
                 "p",              "n_bits_gamma",
                 "n_bits_beta",    "sub_blocks",
                 "depth_proxy",    "ideal_HC",
                 "digitized_ideal_HC", "gap",
                 "sigma",          "analog_mean_HC",
                 "analog_stderr",  "digitized_mean_HC",
                 "digitized_stderr", "analog_err",
                 "digitized_err",  "R",
                 "base_seed",      "skipped_reason"};

    const auto push_row =
        [&](const char* kind, int n, int p, std::optional<int> nbg, std::optional<int> nbb,
            std::optional<std::size_t> sub_blocks, std::optional<std::size_t> depth,
            const std::optional<double>& ideal, const std::optional<double>& dig_ideal,
            const std::optional<double>& gap, const std::optional<double>& sigma,
            const std::optional<double>& a_mean, const std::optional<double>& a_se,
            const std::optional<double>& d_mean, const std::optional<double>& d_se,
            const std::optional<double>& a_err, const std::optional<double>& d_err,
            std::size_t r_eff, const std::string& reason) {
            t.rows.push_back({kind, std::to_string(n), std::to_string(p),
                              nbg ? std::to_string(*nbg) : std::string{},
                              nbb ? std::to_string(*nbb) : std::string{},
                              sub_blocks ? std::to_string(*sub_blocks) : std::string{},
                              depth ? std::to_string(*depth) : std::string{}, fmt_opt(ideal),
                              fmt_opt(dig_ideal), fmt_opt(gap), fmt_opt(sigma), fmt_opt(a_mean),
                              fmt_opt(a_se), fmt_opt(d_mean), fmt_opt(d_se), fmt_opt(a_err),
                              fmt_opt(d_err), std::to_string(r_eff),
                              std::to_string(config.base_seed), sanitize(reason)});
            if (!reason.empty()) ++out.skipped;
        };

    for (const int n : config.n_list) {
        const ResolvedProblem prob = resolve_problem(config, n);
        if (!prob.error.empty()) {
            push_row("skipped", n, 0, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0,
                     prob.error);
            continue;
        }
        for (const auto& [p, schedule] : prob.schedules) {
            const double ideal = expectation(evolve(prob.cost, schedule), prob.cost);
            std::size_t cost_blocks = 0;
            std::size_t mixer_blocks = 0;
            for (const SubBlock& block : schedule.blocks)
                (block.kind == SubBlockKind::cost ? cost_blocks : mixer_blocks) += 1;

            for (int nb = spec.sweep_lo; nb <= spec.sweep_hi; ++nb) {
                const Schedule dig = digitized_schedule(schedule, nb, nb);
                const double dig_ideal = expectation(evolve(prob.cost, dig), prob.cost);
                const std::size_t depth = (cost_blocks + mixer_blocks) * std::size_t(nb);
                push_row("gap", n, p, nb, nb, dig.blocks.size(), depth, ideal, dig_ideal,
                         std::abs(dig_ideal - ideal), {}, {}, {}, {}, {}, {}, {}, 1, {});
            }

            for (const double sigma : config.sigma_list) {
                if (sigma == 0.0) continue;
                const Schedule dig =
                    digitized_schedule(schedule, spec.n_bits_gamma, spec.n_bits_beta);
                const double dig_ideal = expectation(evolve(prob.cost, dig), prob.cost);
                const std::size_t depth = cost_blocks * std::size_t(spec.n_bits_gamma) +
                                          mixer_blocks * std::size_t(spec.n_bits_beta);
                NoiseModel analog;
                analog.gamma_m = sigma * sigma;
                analog.gamma_c = sigma * sigma;
                NoiseModel budget;
                budget.gamma_c = sigma * sigma / spec.n_bits_gamma;
                budget.gamma_m = sigma * sigma / spec.n_bits_beta;
                const EnsembleStats a = ensemble_expectation(
                    prob.cost, schedule, analog, prob.cost, config.realizations,
                    cell_seed("digitization", "analog", n, p, sigma, 0.0, config.base_seed));
                const EnsembleStats d = ensemble_expectation(
                    prob.cost, dig, budget, prob.cost, config.realizations,
                    cell_seed("digitization", "digitized", n, p, sigma, 0.0, config.base_seed));
                push_row("mitigation", n, p, spec.n_bits_gamma, spec.n_bits_beta,
                         dig.blocks.size(), depth, ideal, dig_ideal,
                         std::abs(dig_ideal - ideal), sigma, a.mean, a.stderr_mean, d.mean,
                         d.stderr_mean, std::abs(a.mean - ideal), std::abs(d.mean - ideal),
                         config.realizations, {});
            }
        }
    }
    out.rows = t.rows.size();
    json conv = base_conventions();
    conv["digitization_budget"] =
        "matched-budget mitigation: the digitized run draws per-building-block noise with "
        "variance Gamma/N_bits per channel (Gamma/N_gamma on cost blocks, Gamma/N_beta on mixer "
        "blocks) so accumulated multiplier variance matches the analog run";
    conv["depth_proxy"] =
        "depth_proxy counts (cost sub-blocks)*N_gamma + (mixer sub-blocks)*N_beta of the "
        "undigitized schedule (= p*(N_gamma+N_beta) for layered rings, 2p*(N_gamma+N_beta) for "
        "grover); sub_blocks is the realized building-block count (set bits only)";
    write_outputs(config, "digitization", t, out, conv);
    return out;
}

FitKind parse_fit_kind(const std::string& name) {
    std::string s = name;
    for (char& c : s)
        if (c == '_') c = '-';
    if (s == "exp-decay") return FitKind::exp_decay;
    if (s == "squared-exp") return FitKind::squared_exp;
    if (s == "power-law") return FitKind::power_law;
    if (s == "saturation") return FitKind::saturation;
    if (s == "layer-growth") return FitKind::layer_growth;
    if (s == "unitary-distance") return FitKind::unitary_distance;
    raise(errc::invalid_argument, "unknown fit kind '" + name + "'");
}

const char* fit_kind_name(FitKind kind) {
    switch (kind) {
        case FitKind::exp_decay: return "exp-decay";
        case FitKind::squared_exp: return "squared-exp";
        case FitKind::power_law: return "power-law";
        case FitKind::saturation: return "saturation";
        case FitKind::layer_growth: return "layer-growth";
        case FitKind::unitary_distance: return "unitary-distance";
    }
    return "?";
}

FitOutcome run_fit(const std::filesystem::path& csv_path, const FitRequest& request) {
    const CsvTable t = read_csv(csv_path);
    const std::size_t c_n = column_of(t, "n");
    const std::size_t c_p = column_of(t, "p");
    const std::size_t c_sigma = column_of(t, "sigma");
    const std::size_t c_eta = column_of(t, "eta");
    const std::size_t c_mean = column_of(t, "mean_HC");
    const std::size_t c_noiseless = column_of(t, "noiseless_HC");
    const std::size_t c_skip = column_of(t, "skipped_reason");
    const std::size_t c_du =
        request.kind == FitKind::unitary_distance ? column_of(t, "mean_dU_inf") : 0;

    struct Record {
        int n = 0;
        double p = 0.0, sigma = 0.0, eta = 0.0;
        std::optional<double> mean, noiseless, du;
    };
    std::vector<Record> recs;
    for (const auto& row : t.rows) {
        if (!row[c_skip].empty()) continue;
        Record r;
        r.n = static_cast<int>(std::llround(cell_value(row[c_n]).value_or(0.0)));
        if (request.n_filter && r.n != *request.n_filter) continue;
        r.p = cell_value(row[c_p]).value_or(0.0);
        r.sigma = cell_value(row[c_sigma]).value_or(0.0);
        r.eta = cell_value(row[c_eta]).value_or(0.0);
        r.mean = cell_value(row[c_mean]);
        r.noiseless = cell_value(row[c_noiseless]);
        if (request.kind == FitKind::unitary_distance) r.du = cell_value(row[c_du]);
        recs.push_back(r);
    }

    bool any_stochastic = false;
    for (const Record& r : recs) any_stochastic = any_stochastic || r.sigma > 0.0;
    std::string axis = request.x_axis;
    if (axis.empty()) {
        switch (request.kind) {
            case FitKind::exp_decay:
            case FitKind::power_law: axis = "gamma_p"; break;
            case FitKind::squared_exp: axis = "eta_p"; break;
            case FitKind::unitary_distance: axis = any_stochastic ? "gamma_p" : "eta_p"; break;
            default: break;
        }
    } else {
        require(request.kind != FitKind::saturation && request.kind != FitKind::layer_growth,
                errc::invalid_argument,
                std::string(fit_kind_name(request.kind)) + " does not take an x_axis");
    }
    if (!axis.empty())
        require(axis == "gamma_p" || axis == "eta_p" || axis == "eta2_p", errc::invalid_argument,
                "unknown x_axis '" + axis + "' (gamma_p | eta_p | eta2_p)");

    const auto x_of = [&](const Record& r) {
        if (axis == "gamma_p") return r.sigma * r.sigma * r.p;
        if (axis == "eta_p") return r.eta * r.p;
        return r.eta * r.eta * r.p;
    };
    const auto noise_selected = [&](const Record& r) {
        if (axis == "gamma_p") return r.sigma > 0.0 && r.eta == 0.0;
        return r.eta != 0.0 && r.sigma == 0.0;
    };

    FitOutcome out;
    try {
        std::vector<double> xs, ys;
        switch (request.kind) {
            case FitKind::exp_decay:
            case FitKind::squared_exp:
                for (const Record& r : recs) {
                    if (!noise_selected(r) || !r.mean || !r.noiseless) continue;
                    const double denom = *r.noiseless - request.saturation;
                    require(denom != 0.0, errc::invalid_argument,
                            "saturation equals the noiseless value");
                    xs.push_back(x_of(r));
                    ys.push_back((*r.mean - request.saturation) / denom);
                }
                break;
            case FitKind::power_law:
                for (const Record& r : recs) {
                    if (!noise_selected(r) || !r.mean) continue;
                    xs.push_back(x_of(r));
                    ys.push_back(*r.mean - request.saturation);
                }
                break;
            case FitKind::unitary_distance:
                for (const Record& r : recs) {
                    if (!noise_selected(r) || !r.du) continue;
                    xs.push_back(x_of(r));
                    ys.push_back(*r.du);
                }
                break;
            case FitKind::saturation: {
                std::map<int, std::pair<double, std::size_t>> acc;
                for (const Record& r : recs) {
                    if (r.sigma <= 0.0 || !r.mean) continue;
                    acc[r.n].first += *r.mean;
                    acc[r.n].second += 1;
                }
                for (const auto& [n, sum_count] : acc) {
                    xs.push_back(n);
                    ys.push_back(sum_count.first / static_cast<double>(sum_count.second));
                }
                break;
            }
            case FitKind::layer_growth: {
                std::map<int, std::map<double, double>> curves;
                for (const Record& r : recs)
                    if (r.sigma == 0.0 && r.eta == 0.0 && r.noiseless)
                        curves[r.n][r.p] = *r.noiseless;
                for (const auto& [n, curve] : curves) {
                    const std::vector<std::pair<double, double>> pts(curve.begin(), curve.end());
                    int star = -1;
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        const bool left = i == 0 || pts[i].second >= pts[i - 1].second;
                        const bool right =
                            i + 1 < pts.size() && pts[i].second >= pts[i + 1].second;
                        if (left && right) {
                            star = static_cast<int>(i);
                            break;
                        }
                    }
                    require(star >= 0, errc::window,
                            "no interior <H_C> maximum for n = " + std::to_string(n) +
                                " inside the sweep");
                    xs.push_back(n);
                    ys.push_back(pts[static_cast<std::size_t>(star)].first);
                }
                break;
            }
        }

        switch (request.kind) {
            case FitKind::exp_decay: out.fit = fit_exp_decay(xs, ys, request.window); break;
            case FitKind::squared_exp: out.fit = fit_squared_exp(xs, ys, request.window); break;
            case FitKind::power_law: out.fit = fit_power_law(xs, ys, request.window); break;
            case FitKind::saturation: out.fit = fit_saturation(xs, ys, request.window); break;
            case FitKind::layer_growth: out.fit = fit_layer_growth(xs, ys, request.window); break;
            case FitKind::unitary_distance:
                out.fit = fit_unitary_distance(xs, ys, request.window);
                break;
        }
    } catch (const error& e) {
        if (e.code() != errc::window) throw;
        out.window_error = e.what();
        out.fit = FitResult{};
        out.fit.model = model_for(request.kind);
        if (request.window) out.fit.window = *request.window;
    }

    json doc;
    doc["kind"] = fit_kind_name(request.kind);
    doc["model"] = fit_model_name(out.fit.model);
    if (!axis.empty()) doc["x_axis"] = axis;
    doc["saturation"] = request.saturation;
    doc["n_filter"] = request.n_filter ? json(*request.n_filter) : json(nullptr);
    json params = json::object();
    for (const auto& [key, value] : out.fit.params) params[key] = value;
    doc["params"] = params;
    doc["r_squared"] = out.fit.r_squared;
    doc["window"] = json::array({out.fit.window.x_min, out.fit.window.x_max});
    doc["points"] = out.fit.points;
    doc["valid"] = out.fit.valid;
    json source;
    source["csv"] = csv_path.string();
    source["config_hash"] = t.config_hash ? json(*t.config_hash) : json(nullptr);
    source["base_seed"] = t.base_seed ? json(*t.base_seed) : json(nullptr);
    doc["source"] = source;
    doc["schema_version"] = kSchemaVersion;
    doc["tool_version"] = kToolVersion;
    if (out.window_error) doc["error"] = *out.window_error;
    out.document = doc;
    return out;
}

nlohmann::json optimal_angles_report(int n) {
    const IsingRingInstance inst = ising_ring_instance(n);
    const Schedule s = ising_optimal_schedule(n);
    const double value = expectation(evolve(inst.cost, s), inst.cost);
    const std::vector<double> grads = gradient_all(inst.cost, s, inst.cost);
    double gmax = 0.0;
    for (const double g : grads) gmax = std::max(gmax, std::abs(g));
    json out;
    out["problem"] = "ising-ring";
    out["n"] = n;
    out["p"] = s.num_layers();
    json gamma = json::array();
    json beta = json::array();
    for (int j = 1; j <= s.num_layers(); ++j) {
        gamma.push_back(s.gamma(j));
        beta.push_back(s.beta(j));
    }
    out["gamma"] = gamma;
    out["beta"] = beta;
    out["value"] = value;
    out["ratio"] = value / n;
    out["max_abs_gradient"] = gmax;
    out["tool_version"] = kToolVersion;
    return out;
}

}  // namespace peqs
