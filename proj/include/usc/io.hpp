// io.hpp — declarative job documents, deterministic CSV/JSON artifacts,
// content digests and the command dispatch used by the command-line tool.

#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "usc/errors.hpp"
#include "usc/phase.hpp"

namespace usc {

using nlohmann::json;

// ----- strict-schema helpers ---------------------------------------------

namespace detail {

inline int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = int(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = int(i);
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& where) {
    if (!obj.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        std::string best;
        int best_d = 1 << 20;
        for (const auto& cand : allowed) {
            const int d = edit_distance(key, cand);
            if (d < best_d) { best_d = d; best = cand; }
        }
        std::string msg = "config: unknown key '" + key + "' in '" + where + "'";
        if (best_d <= std::max<int>(2, int(best.size()) / 3))
            msg += " (did you mean '" + best + "'?)";
        throw ConfigError(msg);
    }
}

inline double need_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ConfigError("config: missing '" + key + "' in '" + where + "'");
    if (!obj[key].is_number())
        throw ConfigError("config: '" + where + "." + key + "' must be a number");
    return obj[key].get<double>();
}

inline Eigen::VectorXd parse_grid(const json& g, const std::string& where) {
    if (g.is_array()) {
        Eigen::VectorXd v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g[i].is_number())
                throw ConfigError("config: '" + where + "' entries must be numbers");
            v[Eigen::Index(i)] = g[i].get<double>();
        }
        return v;
    }
    if (g.is_object()) {
        check_keys(g, {"min", "max", "points"}, where);
        const double lo = need_number(g, "min", where);
        const double hi = need_number(g, "max", where);
        const int n = int(need_number(g, "points", where));
        if (n < 2 || hi <= lo)
            throw ConfigError("config: '" + where + "' needs max > min and points >= 2");
        return Eigen::VectorXd::LinSpaced(n, lo, hi);
    }
    throw ConfigError("config: '" + where + "' must be an array or {min,max,points}");
}

}  // namespace detail

// ----- model / family documents ------------------------------------------

inline ModelSpec model_from_json(const json& j) {
    detail::check_keys(j, {"modes", "spins", "mode_mode", "mode_spin", "spin_spin"}, "model");
    if (!j.contains("modes") || !j["modes"].is_array())
        throw ConfigError("config: 'model.modes' array is required");
    ModelSpec s;
    for (const auto& m : j["modes"]) {
        detail::check_keys(m, {"omega", "epsilon"}, "model.modes[]");
        Mode mode;
        mode.omega = detail::need_number(m, "omega", "model.modes[]");
        mode.epsilon = m.value("epsilon", 0.0);
        s.modes.push_back(mode);
    }
    if (j.contains("spins"))
        for (const auto& q : j["spins"]) {
            detail::check_keys(q, {"omega_q"}, "model.spins[]");
            s.spins.push_back({detail::need_number(q, "omega_q", "model.spins[]")});
        }
    auto read_pairs = [&](const char* key, auto setter) {
        if (!j.contains(key)) return;
        for (const auto& t : j[key]) {
            if (!t.is_array() || t.size() != 3)
                throw ConfigError(std::string("config: 'model.") + key +
                                  "' entries must be [i, j, value]");
            setter(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
        }
    };
    read_pairs("mode_mode", [&](int a, int b, double v) { s.set_mode_mode(a, b, v); });
    read_pairs("mode_spin", [&](int a, int b, double v) { s.set_mode_spin(a, b, v); });
    read_pairs("spin_spin", [&](int a, int b, double v) { s.set_spin_spin(a, b, v); });
    s.validate();
    return s;
}

inline ScaledFamily family_from_json(const json& j) {
    detail::check_keys(j,
                       {"type", "omega1", "omega2", "eps1", "eps2", "omega", "omega_q",
                        "g", "control", "N"},
                       "family");
    ScaledFamily f;
    const std::string t = j.value("type", "");
    if (t == "dicke_type") f.family = Family::dicke_type;
    else if (t == "rabi_type") f.family = Family::rabi_type;
    else if (t == "two_atom_dicke") f.family = Family::two_atom_dicke;
    else throw ConfigError("config: 'family.type' must be dicke_type, rabi_type or two_atom_dicke");
    f.omega1 = j.value("omega1", 1.0);
    f.omega2 = j.value("omega2", 1.0);
    f.eps1 = j.value("eps1", 0.0);
    f.eps2 = j.value("eps2", 0.0);
    f.omega = j.value("omega", 1.0);
    f.omega_q = j.value("omega_q", 0.0);
    f.g = j.value("g", 0.0);
    f.control = j.value("control", 1.0);
    f.N = j.value("N", 1.0);
    return f;
}

// ----- job documents ------------------------------------------------------

struct JobSpec {
    std::string command;
    json config;  // fully defaulted, self-describing
};

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c = {"spectrum", "displace", "bogoliubov",
                                               "sweep",    "lambda-scan", "crossing",
                                               "splitting"};
    return c;
}

// Validate a job document and materialize every default into the echo.
inline JobSpec parse_config(const json& doc) {
    detail::check_keys(doc, {"command", "model", "family", "numerics", "params", "output"},
                       "config");
    JobSpec job;
    if (!doc.contains("command") || !doc["command"].is_string())
        throw ConfigError("config: 'command' string is required");
    job.command = doc["command"].get<std::string>();
    if (std::find(known_commands().begin(), known_commands().end(), job.command) ==
        known_commands().end()) {
        std::string best;
        int bd = 1 << 20;
        for (const auto& c : known_commands()) {
            const int d = detail::edit_distance(job.command, c);
            if (d < bd) { bd = d; best = c; }
        }
        throw ConfigError("config: unknown command '" + job.command + "' (did you mean '" +
                          best + "'?)");
    }
    json cfg = doc;

    const bool needs_family = (job.command == "lambda-scan" || job.command == "crossing");
    if (needs_family) {
        if (!cfg.contains("family"))
            throw ConfigError("config: '" + job.command + "' requires a 'family' document");
        (void)family_from_json(cfg["family"]);  // validates
    } else {
        if (!cfg.contains("model"))
            throw ConfigError("config: '" + job.command + "' requires a 'model' document");
        (void)model_from_json(cfg["model"]);  // validates
    }

    json num = cfg.value("numerics", json::object());
    detail::check_keys(num,
                       {"cutoff", "cutoffs", "k_lowest", "tol_degeneracy_abs",
                        "tol_degeneracy_rel", "newton_tol", "extra_box_seeds", "threads",
                        "levels", "well_cutoff", "ed_max_N"},
                       "numerics");
    if (!num.contains("cutoff")) num["cutoff"] = 32;
    if (!num.contains("k_lowest")) num["k_lowest"] = 4;
    if (!num.contains("tol_degeneracy_abs")) num["tol_degeneracy_abs"] = 1e-8;
    if (!num.contains("tol_degeneracy_rel")) num["tol_degeneracy_rel"] = 1e-6;
    if (!num.contains("newton_tol")) num["newton_tol"] = 1e-10;
    if (!num.contains("extra_box_seeds")) num["extra_box_seeds"] = true;
    if (!num.contains("threads")) num["threads"] = 1;
    if (!num.contains("levels")) num["levels"] = 3;
    if (!num.contains("well_cutoff")) num["well_cutoff"] = 32;
    if (!num.contains("ed_max_N")) num["ed_max_N"] = 8.0;
    cfg["numerics"] = num;

    json par = cfg.value("params", json::object());
    detail::check_keys(par,
                       {"g_grid", "lambda_grid", "chi_grid", "N_list", "frame",
                        "frame_policy", "seeds"},
                       "params");
    if (job.command == "sweep" || job.command == "splitting")
        if (!par.contains("g_grid"))
            throw ConfigError("config: '" + job.command + "' requires 'params.g_grid'");
    if (job.command == "lambda-scan") {
        if (!par.contains("lambda_grid"))
            throw ConfigError("config: 'lambda-scan' requires 'params.lambda_grid'");
        if (!par.contains("N_list")) par["N_list"] = {1000.0};
    }
    if (job.command == "crossing" && !par.contains("chi_grid"))
        throw ConfigError("config: 'crossing' requires 'params.chi_grid'");
    if (job.command == "splitting" && !par.contains("frame_policy"))
        par["frame_policy"] = "auto_displaced";
    if (par.contains("frame_policy")) {
        const std::string p = par["frame_policy"].get<std::string>();
        if (p != "auto_displaced" && p != "lab")
            throw ConfigError("config: 'params.frame_policy' must be auto_displaced or lab");
    }
    cfg["params"] = par;

    json out = cfg.value("output", json::object());
    detail::check_keys(out, {"directory", "formats", "precision"}, "output");
    if (!out.contains("directory")) out["directory"] = ".";
    if (!out.contains("formats")) out["formats"] = {"csv"};
    if (!out.contains("precision")) out["precision"] = 12;
    const int prec = out["precision"].get<int>();
    if (prec < 6 || prec > 17)
        throw ConfigError("config: 'output.precision' must be in [6, 17]");
    for (const auto& f : out["formats"])
        if (f != "csv" && f != "json")
            throw ConfigError("config: 'output.formats' entries must be csv or json");
    cfg["output"] = out;

    job.config = cfg;
    return job;
}

inline JobSpec parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not well-formed JSON: ") + e.what());
    }
    return parse_config(doc);
}

// ----- deterministic serialization ----------------------------------------

inline std::string format_value(double x, int precision) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision, x);
    return buf;
}

inline std::string table_to_csv(const SweepTable& t, const json& config, int precision) {
    std::string out;
    out += "# config: " + config.dump() + "\n";
    out += t.axis_name;
    for (const auto& n : t.column_order) out += "," + n;
    out += "\n";
    for (Eigen::Index r = 0; r < t.grid.size(); ++r) {
        out += format_value(t.grid[r], precision);
        for (const auto& n : t.column_order)
            out += "," + format_value(t.column(n)[r], precision);
        out += "\n";
    }
    return out;
}

inline json table_to_json(const SweepTable& t, const json& config) {
    json cols = json::object();
    for (const auto& n : t.column_order) {
        json a = json::array();
        const auto& v = t.column(n);
        for (Eigen::Index r = 0; r < v.size(); ++r)
            a.push_back(std::isnan(v[r]) ? json() : json(v[r]));
        cols[n] = a;
    }
    json grid = json::array();
    for (Eigen::Index r = 0; r < t.grid.size(); ++r) grid.push_back(t.grid[r]);
    json order = json::array();
    for (const auto& n : t.column_order) order.push_back(n);
    return {{"config", config},
            {"axis", t.axis_name},
            {"grid", grid},
            {"column_order", order},
            {"columns", cols},
            {"metadata", t.metadata}};
}

inline SweepTable table_from_json(const json& j) {
    SweepTable t;
    t.axis_name = j.at("axis").get<std::string>();
    const auto& grid = j.at("grid");
    t.grid.resize(grid.size());
    for (std::size_t r = 0; r < grid.size(); ++r) t.grid[Eigen::Index(r)] = grid[r].get<double>();
    for (const auto& n : j.at("column_order")) {
        auto& col = t.add_column(n.get<std::string>());
        const auto& a = j.at("columns").at(n.get<std::string>());
        for (std::size_t r = 0; r < a.size(); ++r)
            col[Eigen::Index(r)] = a[r].is_null()
                                       ? std::numeric_limits<double>::quiet_NaN()
                                       : a[r].get<double>();
    }
    t.metadata = j.value("metadata", json::object());
    t.check();
    return t;
}

inline bool tables_equal(const SweepTable& a, const SweepTable& b) {
    if (a.axis_name != b.axis_name || a.column_order != b.column_order) return false;
    if (a.grid.size() != b.grid.size()) return false;
    for (Eigen::Index r = 0; r < a.grid.size(); ++r)
        if (a.grid[r] != b.grid[r]) return false;
    for (const auto& n : a.column_order) {
        const auto& x = a.column(n);
        const auto& y = b.column(n);
        for (Eigen::Index r = 0; r < x.size(); ++r) {
            const bool nx = std::isnan(x[r]), ny = std::isnan(y[r]);
            if (nx != ny || (!nx && x[r] != y[r])) return false;
        }
    }
    return true;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

// Atomic write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string());
        f.write(data.data(), std::streamsize(data.size()));
        if (!f) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ----- job execution -------------------------------------------------------

struct JobResult {
    std::vector<SweepTable> tables;          // one or more named outputs
    std::vector<std::string> table_names;
    std::string summary;                     // human-readable headline block
};

namespace detail {

inline SolveOptions solve_options_from(const json& num) {
    SolveOptions o;
    o.newton.tol = num["newton_tol"].get<double>();
    o.extra_box_seeds = num["extra_box_seeds"].get<bool>();
    o.threads = num["threads"].get<int>();
    return o;
}

inline std::vector<int> cutoffs_from(const json& num, int n_modes) {
    if (num.contains("cutoffs")) {
        std::vector<int> c = num["cutoffs"].get<std::vector<int>>();
        if (int(c.size()) != n_modes)
            throw ConfigError("config: 'numerics.cutoffs' length must match mode count");
        return c;
    }
    return std::vector<int>(n_modes, num["cutoff"].get<int>());
}

inline Eigen::VectorXd frame_from(const json& par, int n_modes) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n_modes);
    if (par.contains("frame")) {
        auto v = par["frame"].get<std::vector<double>>();
        if (int(v.size()) != n_modes)
            throw ConfigError("config: 'params.frame' length must match mode count");
        for (int i = 0; i < n_modes; ++i) f[i] = v[i];
    }
    return f;
}

}  // namespace detail

inline JobResult run_job(const JobSpec& job) {
    const json& cfg = job.config;
    const json& num = cfg["numerics"];
    const json& par = cfg["params"];
    JobResult res;
    std::ostringstream sum;
    sum.precision(12);

    if (job.command == "spectrum") {
        const ModelSpec spec = model_from_json(cfg["model"]);
        auto basis = build_basis(detail::cutoffs_from(num, spec.n_modes()), spec.n_spins());
        auto H = build_hamiltonian(spec, basis, detail::frame_from(par, spec.n_modes()));
        const int k = num["k_lowest"].get<int>();
        auto rep = spectrum(H, k);
        rep.clusters = cluster_doublets(rep.eigenvalues, num["tol_degeneracy_abs"].get<double>(),
                                        num["tol_degeneracy_rel"].get<double>());
        const auto P = parity_op(basis);
        SweepTable t;
        t.axis_name = "level";
        t.grid = Eigen::VectorXd::LinSpaced(k, 0, k - 1);
        auto& en = t.add_column("energy");
        auto& cl = t.add_column("cluster");
        auto& pv = t.add_column("parity");
        en = rep.eigenvalues;
        int doublets = 0;
        for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
            const auto& cluster = rep.clusters[c];
            Eigen::MatrixXd V(H.dim(), cluster.indices.size());
            for (std::size_t i = 0; i < cluster.indices.size(); ++i) {
                cl[cluster.indices[i]] = double(c);
                V.col(Eigen::Index(i)) = rep.eigenvectors.col(cluster.indices[i]);
            }
            const Eigen::VectorXd p = parity_in_subspace(V, P);
            for (std::size_t i = 0; i < cluster.indices.size(); ++i)
                pv[cluster.indices[i]] = p[Eigen::Index(i)];
            if (cluster.doublet_candidate) ++doublets;
        }
        t.metadata = {{"operation", "spectrum"}, {"spec", spec_to_json(spec)}};
        sum << "levels = " << k << "\n";
        sum << "doublets = " << doublets << "\n";
        for (const auto& c : rep.clusters)
            if (c.doublet_candidate) {
                sum << "doublet at E = " << rep.eigenvalues[c.indices[0]]
                    << "  splitting = " << c.max_internal_splitting << "  parity = {"
                    << pv[c.indices[1]] << ", " << pv[c.indices[0]] << "}\n";
            }
        res.tables.push_back(std::move(t));
        res.table_names.push_back("spectrum");
    } else if (job.command == "displace") {
        const ModelSpec spec = model_from_json(cfg["model"]);
        std::vector<Eigen::VectorXd> seeds;
        try {
            seeds = asymptotic_seed(spec);
        } catch (const ConfigError&) {
        }
        if (par.contains("seeds"))
            for (const auto& s : par["seeds"]) {
                auto v = s.get<std::vector<double>>();
                seeds.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), Eigen::Index(v.size())));
            }
        auto sols = solve_displacements(spec, seeds, detail::solve_options_from(num));
        SweepTable t;
        t.axis_name = "branch";
        t.grid = Eigen::VectorXd::LinSpaced(std::max<int>(1, int(sols.size())), 0,
                                            std::max<int>(0, int(sols.size()) - 1));
        std::vector<Eigen::VectorXd*> ac(spec.n_modes());
        for (int i = 0; i < spec.n_modes(); ++i)
            ac[i] = &t.add_column("alpha_" + std::to_string(i));
        auto& en = t.add_column("energy");
        auto& rn = t.add_column("residual_norm");
        auto& st = t.add_column("stable");
        auto& mg = t.add_column("stability_margin");
        for (std::size_t s = 0; s < sols.size(); ++s) {
            for (int i = 0; i < spec.n_modes(); ++i) (*ac[i])[Eigen::Index(s)] = sols[s].alphas[i];
            en[Eigen::Index(s)] = sols[s].energy;
            rn[Eigen::Index(s)] = sols[s].residual_norm;
            st[Eigen::Index(s)] = sols[s].stable ? 1.0 : 0.0;
            mg[Eigen::Index(s)] = sols[s].stability_margin;
        }
        t.metadata = {{"operation", "displace"}, {"spec", spec_to_json(spec)}};
        sum << "k_root = " << solve_k() << "\n";
        sum << "branches = " << sols.size() << "\n";
        if (!sols.empty())
            sum << "lowest energy = " << sols[0].energy << " (stable = " << sols[0].stable
                << ")\n";
        res.tables.push_back(std::move(t));
        res.table_names.push_back("displace");
    } else if (job.command == "bogoliubov") {
        const ModelSpec spec = model_from_json(cfg["model"]);
        const Eigen::VectorXd frame = detail::frame_from(par, spec.n_modes());
        const auto qe = quadratic_expansion(spec, frame);
        const auto rep = stability(qe.form);
        const auto bg = diagonalize(qe.form);
        SweepTable t;
        t.axis_name = "mode";
        t.grid = Eigen::VectorXd::LinSpaced(spec.n_modes(), 0, spec.n_modes() - 1);
        t.add_column("frequency") = bg.frequencies;
        t.metadata = {{"operation", "bogoliubov"},
                      {"spec", spec_to_json(spec)},
                      {"ground_energy", bg.ground_energy},
                      {"stability_margin", rep.margin}};
        sum << "stable = " << rep.stable << "  margin = " << rep.margin << "\n";
        sum << "ground_energy = " << bg.ground_energy << "\n";
        sum << "gap = " << bg.frequencies.minCoeff() << "\n";
        res.tables.push_back(std::move(t));
        res.table_names.push_back("bogoliubov");
    } else if (job.command == "sweep") {
        const ModelSpec spec = model_from_json(cfg["model"]);
        SweepOptions o;
        o.solve = detail::solve_options_from(num);
        auto t = sweep_displacements(spec, detail::parse_grid(par["g_grid"], "params.g_grid"), o);
        sum << "points = " << t.grid.size() << "\n";
        sum << "max residual = " << t.column("residual_norm").maxCoeff() << "\n";
        res.tables.push_back(std::move(t));
        res.table_names.push_back("sweep");
    } else if (job.command == "lambda-scan") {
        const ScaledFamily fam = family_from_json(cfg["family"]);
        LambdaScanOptions o;
        o.solve = detail::solve_options_from(num);
        o.ed_max_N = num["ed_max_N"].get<double>();
        auto t = lambda_scan(fam, par["N_list"].get<std::vector<double>>(),
                             detail::parse_grid(par["lambda_grid"], "params.lambda_grid"), o);
        sum << "points = " << t.grid.size() << "\n";
        res.tables.push_back(std::move(t));
        res.table_names.push_back("lambda-scan");
    } else if (job.command == "crossing") {
        const ScaledFamily fam = family_from_json(cfg["family"]);
        auto cr = first_order_crossing(fam, detail::parse_grid(par["chi_grid"], "params.chi_grid"));
        sum << "chi_c_analytic = " << cr.analytic_crossing << "\n";
        sum << "chi_c_ed = " << cr.ed_crossing << "\n";
        sum << "ed_jump = " << cr.ed_jump << "\n";
        res.tables.push_back(std::move(cr.table));
        res.table_names.push_back("crossing");
    } else if (job.command == "splitting") {
        const ModelSpec spec = model_from_json(cfg["model"]);
        SplittingOptions o;
        o.solve = detail::solve_options_from(num);
        o.k = num["k_lowest"].get<int>();
        o.tol_abs = num["tol_degeneracy_abs"].get<double>();
        o.tol_rel = num["tol_degeneracy_rel"].get<double>();
        o.cutoff_start = num["cutoff"].get<int>();
        o.levels = num["levels"].get<int>();
        o.well_cutoff = num["well_cutoff"].get<int>();
        const FramePolicy policy = par["frame_policy"] == "lab" ? FramePolicy::lab
                                                                : FramePolicy::auto_displaced;
        auto t = splitting_curve(spec, detail::parse_grid(par["g_grid"], "params.g_grid"),
                                 policy, o);
        sum << "points = " << t.grid.size() << "\n";
        sum << "doublets flagged = " << t.column("doublet").sum() << "\n";
        res.tables.push_back(std::move(t));
        res.table_names.push_back("splitting");
    } else {
        throw ConfigError("config: unknown command '" + job.command + "'");
    }
    res.summary = sum.str();
    return res;
}

// Write the artifacts for a completed job plus a digest manifest; returns
// the manifest document.
inline json emit_artifacts(const JobSpec& job, const JobResult& res,
                           const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto& out = job.config["output"];
    const int precision = out["precision"].get<int>();
    json manifest;
    manifest["command"] = job.command;
    manifest["files"] = json::array();
    for (std::size_t i = 0; i < res.tables.size(); ++i) {
        for (const auto& fmt : out["formats"]) {
            const std::string ext = fmt.get<std::string>();
            const std::string name = res.table_names[i] + "." + ext;
            std::string payload;
            if (ext == "csv")
                payload = table_to_csv(res.tables[i], job.config, precision);
            else
                payload = table_to_json(res.tables[i], job.config).dump(2) + "\n";
            write_file_atomic(out_dir / name, payload);
            manifest["files"].push_back({{"name", name},
                                         {"bytes", payload.size()},
                                         {"sha256", sha256_hex(payload)}});
        }
    }
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

// Extract the embedded config line from a CSV artifact.
inline json embedded_config(const std::string& csv_text) {
    const std::string prefix = "# config: ";
    if (csv_text.rfind(prefix, 0) != 0)
        throw ConfigError("artifact: no embedded config line");
    const auto eol = csv_text.find('\n');
    return json::parse(csv_text.substr(prefix.size(), eol - prefix.size()));
}

}  // namespace usc
