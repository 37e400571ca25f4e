// uscspec — command-line front end: declarative JSON jobs in, deterministic
// CSV/JSON artifacts and a digest manifest out.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <usc/io.hpp>

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw usc::ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::string format;
    int threads{0};
    int precision{0};
    double tol_degeneracy{0.0};
    int cutoff{0};
};

void add_flags(CLI::App* cmd, GlobalFlags& g) {
    cmd->add_option("--config", g.config_path, "job document (JSON), or - for stdin")
        ->required();
    cmd->add_option("--out", g.out_dir, "output directory (overrides config)");
    cmd->add_option("--format", g.format, "csv|json|both (overrides config)");
    cmd->add_option("--threads", g.threads, "worker threads (overrides config)");
    cmd->add_option("--precision", g.precision, "decimal digits, 6..17 (overrides config)");
    cmd->add_option("--tol-degeneracy", g.tol_degeneracy,
                    "absolute clustering tolerance (overrides config)");
    cmd->add_option("--cutoff", g.cutoff, "per-mode Fock cutoff (overrides config)");
}

int run(const std::string& command, const GlobalFlags& g) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_input(g.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw usc::ConfigError(std::string("config: ") + e.what());
    }
    if (doc.contains("command") && doc["command"] != command)
        throw usc::ConfigError("config: document command '" +
                               doc["command"].dump() + "' does not match subcommand '" +
                               command + "'");
    doc["command"] = command;
    if (!g.out_dir.empty()) doc["output"]["directory"] = g.out_dir;
    if (!g.format.empty()) {
        if (g.format == "both")
            doc["output"]["formats"] = {"csv", "json"};
        else
            doc["output"]["formats"] = {g.format};
    }
    if (g.threads > 0) doc["numerics"]["threads"] = g.threads;
    if (g.precision > 0) doc["output"]["precision"] = g.precision;
    if (g.tol_degeneracy > 0.0) doc["numerics"]["tol_degeneracy_abs"] = g.tol_degeneracy;
    if (g.cutoff > 0) doc["numerics"]["cutoff"] = g.cutoff;

    usc::JobSpec job = usc::parse_config(doc);
    usc::JobResult res = usc::run_job(job);
    const std::filesystem::path out_dir =
        job.config["output"]["directory"].get<std::string>();
    usc::emit_artifacts(job, res, out_dir);
    std::cout << res.summary;
    std::cout << "artifacts: " << out_dir.string() << "/manifest.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral analysis of ultrastrongly coupled boson/spin models"};
    app.require_subcommand(1);
    std::map<std::string, GlobalFlags> flags;
    for (const auto& name : usc::known_commands()) {
        auto* cmd = app.add_subcommand(name);
        add_flags(cmd, flags[name]);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().at(0)->get_name();
    try {
        return run(command, flags[command]);
    } catch (const usc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const usc::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const usc::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (achieved " << e.achieved << ")\n";
        return 3;
    } catch (const usc::InstabilityError& e) {
        std::cerr << "error: " << e.what() << " (margin " << e.margin << ")\n";
        return 4;
    } catch (const usc::DimensionCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
