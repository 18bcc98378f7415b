// wwsim: Stokes waves, envelope dynamics and modulational instability of periodic water waves.
//
// Exit codes: 0 all checks pass, 1 usage error, 2 a tolerance check failed,
// 3 the computation aborted (blow-up, no convergence).

#include <cstdio>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace wwsim;

namespace {

// Flags shared by the experiment subcommands. Values given on the command line
// override the config file, which overrides the defaults.
struct ExperimentFlags {
    std::string config;
    std::vector<std::string> sets;
    std::optional<double> eps, dt, t_end, delta, mu;
    std::optional<int> q, n;
    std::optional<std::string> out;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "key=value configuration file")->check(CLI::ExistingFile);
        app->add_option("--set", sets, "override a config key (key=value), repeatable");
        app->add_option("--eps", eps, "carrier steepness");
        app->add_option("--q", q, "period factor of the fast torus");
        app->add_option("--n", n, "grid nodes");
        app->add_option("--dt", dt, "time step");
        app->add_option("--t-end", t_end, "final time");
        app->add_option("--delta", delta, "seed size");
        app->add_option("--mu", mu, "instability threshold");
        app->add_option("-o,--out", out, "output directory");
    }

    ExperimentConfig resolve(const std::string& default_out) const {
        ExperimentConfig c;
        c.out_dir = default_out;
        if (!config.empty()) c = load_config(config, c);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
            set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (eps) c.eps = *eps;
        if (q) c.q = *q;
        if (n) c.n = *n;
        if (dt) c.dt = *dt;
        if (t_end) c.t_end = *t_end;
        if (delta) c.delta = *delta;
        if (mu) c.mu = *mu;
        if (out) c.out_dir = *out;
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic water waves: Stokes family, envelope equation and Benjamin-Feir instability"};
    app.require_subcommand(1);
    int code = cli::kPass;

    cli::StokesArgs sa;
    auto* st = app.add_subcommand("stokes", "Newton Stokes wave, coefficient table and Eulerian harmonics");
    st->add_option("--eps", sa.eps, "steepness")->check(CLI::Range(0.0, 0.15));
    st->add_option("--modes", sa.modes, "retained Fourier modes")->check(CLI::PositiveNumber);
    st->add_option("-o,--out", sa.out_dir, "output directory");
    st->callback([&] { code = cli::cmd_stokes(sa); });

    cli::NlsArgs na;
    auto* nl = app.add_subcommand("nls", "Nonlinear instability of the plane wave in the standard NLS");
    nl->add_option("--q", na.q1, "period factor of the NLS torus")->check(CLI::PositiveNumber);
    nl->add_option("--delta", na.delta, "seed size")->check(CLI::PositiveNumber);
    nl->add_option("--mu", na.mu, "threshold")->check(CLI::PositiveNumber);
    nl->add_option("--n", na.n, "grid nodes");
    nl->add_option("--dt", na.dt, "split-step size")->check(CLI::PositiveNumber);
    nl->add_option("-o,--out", na.out_dir, "output directory");
    nl->callback([&] { code = cli::cmd_nls(na); });

    ExperimentFlags inf, cmf, swf;
    long checkpoint_every = 50;
    auto* in = app.add_subcommand("instability", "Seeded Stokes wave evolved through the instability time");
    inf.attach(in);
    in->add_option("--checkpoint-every", checkpoint_every, "snapshots between checkpoints (0 disables)");
    in->callback([&] {
        try {
            code = cli::cmd_instability(inf.resolve("instability_out"), checkpoint_every);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "instability: %s\n", e.what());
            code = cli::kUsage;
        }
    });

    auto* cm = app.add_subcommand("compare", "Water wave against the modulation approximation");
    cmf.attach(cm);
    cm->callback([&] {
        try {
            code = cli::cmd_compare(cmf.resolve("compare_out"));
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "compare: %s\n", e.what());
            code = cli::kUsage;
        }
    });

    cli::SweepArgs wa;
    auto* sw = app.add_subcommand("sweep", "Independent runs over one config key, one directory each");
    swf.attach(sw);
    sw->add_option("--command", wa.command, "instability or compare")
        ->check(CLI::IsMember({"instability", "compare"}));
    sw->add_option("--key", wa.key, "config key to vary")->required();
    sw->add_option("--values", wa.values, "values of the key")->required()->delimiter(',');
    sw->add_option("-j,--jobs", wa.jobs, "concurrent runs")->check(CLI::PositiveNumber);
    sw->callback([&] {
        try {
            code = cli::cmd_sweep(swf.resolve("sweep_out"), wa);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "sweep: %s\n", e.what());
            code = cli::kUsage;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kUsage;
    }
    return code;
}
