#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "fracheat/cli_report.hpp"
#include "fracheat/quadrature.hpp"

using namespace fracheat;

namespace {

int fail(ErrorKind kind, const std::string& msg, const std::string& out_dir) {
    const auto rec = error_record(kind, msg);
    std::cerr << rec.dump() << "\n";
    if (!out_dir.empty()) {
        try {
            CommandOutput out;
            out.envelope = rec;
            write_outputs(out, out_dir);
        } catch (const Error&) {
        }
    }
    return exit_code_for(kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional heat semigroups: kernels, Bernstein counterexamples, torus checks"};
    app.require_subcommand(0, 1);
    std::string config_path, out_dir;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads for sweeps");
    app.add_option("--tol", tol, "tolerance override");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--set", sets, "override a config key, key=value (repeatable)");
    for (const char* name : {"kernel", "counterexample", "torus", "verify-appendix", "plot"}) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(ErrorKind::config, e.what(), "");
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!app.get_subcommands().empty()) cfg.command = app.get_subcommands().front()->get_name();
        if (cfg.command.empty()) throw Error(ErrorKind::config, "no command given (subcommand or 'command' key)");
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::config, "--set expects key=value, got '" + kv + "'");
            apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (tol) cfg.tol = *tol;
        if (seed) cfg.seed = *seed;
        if (jobs) cfg.jobs = *jobs;
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), out_dir);
    }

    try {
        const CommandOutput out = run_command(cfg);
        write_outputs(out, cfg.out_dir);
        std::printf("%s: %s, %zu result(s) written to %s/report.json\n", cfg.command.c_str(),
                    out.envelope["status"].get<std::string>().c_str(), out.envelope["results"].size(),
                    cfg.out_dir.c_str());
        return out.exit_code;
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), cfg.out_dir);
    } catch (const std::exception& e) {
        return fail(ErrorKind::io, e.what(), cfg.out_dir);
    }
}
