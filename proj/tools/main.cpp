#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <dmdecoh/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

using namespace dmdecoh;

int main(int argc, char** argv)
{
    CLI::App app{"Dark-matter decoherence rates, sidereal signals and interferometer sensitivity"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string configPath, experiment, mGrid, mode, shielding, out;
    std::optional<double> M, m;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, points;
    std::optional<std::int64_t> replicas;
    bool greenhouse = false, plotScript = false, json = false, phaseRegion = false;

    app.add_option("--config", configPath, "Configuration file")->check(CLI::ExistingFile);
    app.add_option("--experiment", experiment, "Registry experiment name");
    app.add_option("--M", M, "DM mass [eV]");
    app.add_option("--m", m, "Mediator mass [eV]");
    app.add_option("--m-grid", mGrid, "Mediator grid lo:hi:points [eV]");
    app.add_option("--mode", mode, "anisotropic | isotropized | thermalized");
    app.add_option("--shielding", shielding, "absorbing | reflecting | space");
    app.add_flag("--greenhouse", greenhouse, "Add the crust-thermalized population");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--threads", threads, "Worker threads");
    app.add_option("--points", points, "Sidereal samples for daily");
    app.add_option("--replicas", replicas, "Monte Carlo replicas for stats-sim");
    app.add_option("--out", out, "Output directory");
    app.add_flag("--emit-plot-script", plotScript, "Write a matplotlib script next to the CSVs");
    app.add_flag("--json", json, "Mirror every CSV as JSON");
    app.add_flag("--phase-region", phaseRegion, "Also compute the phase-shift region");

    for (auto name : cli::command_names())
        app.add_subcommand(std::string(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_validation;
    }

    cli::RunConfig config;
    try {
        if (!configPath.empty())
            config = cli::parse_config_file(configPath);
        if (!experiment.empty()) {
            config.experiment = find_experiment(experiment);
            config.plan.experiment = config.experiment;
        }
        if (M)
            config.scenario.M = *M;
        if (m)
            config.scenario.m = *m;
        if (!mGrid.empty())
            config.mGrid = cli::parse_m_grid(mGrid);
        if (!mode.empty())
            config.mode = parse_flux_mode(mode);
        if (!shielding.empty())
            config.site.shielding = parse_shielding(shielding);
        if (greenhouse)
            config.greenhouse = true;
        if (seed)
            config.seed = *seed;
        if (threads)
            config.threads = *threads;
        if (points)
            config.points = *points;
        if (replicas)
            config.replicas = *replicas;
        if (!out.empty())
            config.out = out;
        if (plotScript)
            config.emitPlotScript = true;
        if (json)
            config.json = true;
        if (phaseRegion)
            config.phaseRegion = true;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_validation;
    }

    const auto* sub = app.get_subcommands().front();
    return cli::run_command_guarded(config, sub->get_name(), std::cout, std::cerr);
}
