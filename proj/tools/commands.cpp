#include "commands.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <dmdecoh/born.hpp>
#include <dmdecoh/decoherence.hpp>
#include <dmdecoh/errors.hpp>
#include <dmdecoh/parallel.hpp>
#include <dmdecoh/sensitivity.hpp>
#include <dmdecoh/units.hpp>

#include "table.hpp"

namespace dmdecoh::cli {

namespace {

using Files = std::vector<std::filesystem::path>;

constexpr double deg = std::numbers::pi / 180.0;

std::vector<double> mediator_grid(const RunConfig& c, bool wideDefault)
{
    if (c.mGrid)
        return log_grid(c.mGrid->lo, c.mGrid->hi, c.mGrid->points);
    if (wideDefault) {
        const MGrid g;
        return log_grid(g.lo, g.hi, g.points);
    }
    return {c.scenario.m};
}

FluxModel flux_for(const RunConfig& c, const DMScenario& sc, FluxMode mode, double phase)
{
    FluxModel f{sc, c.site, mode, 0.0, phase};
    if (c.experiment.space)
        f.site.shielding = ShieldingMode::space;
    if (mode == FluxMode::thermalized)
        f.temperature = c.temperatureK * units::kelvin;
    f.validate();
    return f;
}

TargetModel target_for(const RunConfig& c)
{
    TargetModel t(c.experiment);
    t.debyeWaller = c.debyeWaller;
    return t;
}

RunPlan plan_for(const RunConfig& c)
{
    RunPlan p = c.plan;
    p.experiment = c.experiment;
    return p;
}

void emit_plot_script(const RunConfig& c, std::string_view command, Files& files)
{
    if (!c.emitPlotScript)
        return;
    std::string body;
    if (command == "daily") {
        body = R"(d = pd.read_csv(os.path.join(here, "daily.csv"))
fig, ax = plt.subplots()
ax.plot(d.sidereal_hours, d.flux_fraction / d.flux_fraction.mean(), "k-", label="flux")
ax.plot(d.sidereal_hours, d.re_F_aniso / d.re_F_aniso.mean(), label="rate")
ax.plot(d.sidereal_hours, d.re_F_iso / d.re_F_iso.mean(), "--", label="rate, isotropized")
ax.set_xlabel("sidereal time [h]")
ax.set_ylabel("relative to daily mean")
ax.legend()
)";
    } else if (command == "sensitivity") {
        body = R"(d = pd.read_csv(os.path.join(here, "sensitivity.csv"))
fig, ax = plt.subplots()
ax.loglog(d.m_eV, d.alpha_hat, label=d.experiment[0])
ax.loglog(d.m_eV, d.alpha_scatt, "k:", d.m_eV, d.alpha_iso, "k:", d.m_eV, d.alpha_therm, "k:")
if d.alpha_hat_greenhouse.notna().any():
    ax.loglog(d.m_eV, d.alpha_hat_greenhouse, "--", label="greenhouse")
ax.set_xlabel("m [eV]")
ax.set_ylabel("alpha_M")
ax.legend()
)";
    } else if (command == "atmosphere") {
        body = R"(d = pd.read_csv(os.path.join(here, "thresholds.csv"))
fig, ax = plt.subplots()
for col in ["alphaM_scatt", "alphaM_iso", "alphaM_therm"]:
    ax.loglog(d.m_eV, d[col], label=col)
ax.set_xlabel("m [eV]")
ax.set_ylabel("alpha_M at zeta = 1")
ax.legend()
)";
    } else if (command == "decohere") {
        body = R"(d = pd.read_csv(os.path.join(here, "decohere.csv"))
fig, ax = plt.subplots()
ax.loglog(d.m_eV, d.re_F_per_s, label="Re F")
ax.loglog(d.m_eV, d.im_F_per_s.abs(), label="|Im F|")
ax.set_xlabel("m [eV]")
ax.set_ylabel("rate [1/s]")
ax.legend()
)";
    } else if (command == "born-check") {
        body = R"(d = pd.read_csv(os.path.join(here, "born.csv"))
fig, ax = plt.subplots()
ax.loglog(d.m_eV, d.ratio)
ax.axhline(1.0, color="k", ls=":")
ax.set_xlabel("m [eV]")
ax.set_ylabel("|T2/T1|")
)";
    } else {
        body = R"(d = pd.read_csv(os.path.join(here, "stats_counts.csv"))
s = 2 * (d.mrn_plus * d.eve_minus - d.mrn_minus * d.eve_plus) / (d.mrn_plus * d.eve_plus - d.mrn_minus * d.eve_minus)
fig, ax = plt.subplots()
ax.hist(s, bins=50)
ax.set_xlabel("estimated sidereal decoherence")
)";
    }
    std::string name(command);
    for (auto& ch : name)
        if (ch == '-')
            ch = '_';
    const std::string script = "import os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\n"
                               "import matplotlib.pyplot as plt\nimport pandas as pd\n\n"
                               "here = os.path.dirname(os.path.abspath(__file__))\n"
                               + body + "fig.savefig(os.path.join(here, \"" + name
                               + ".png\"), dpi=150)\n";
    const auto path = c.out / ("plot_" + name + ".py");
    write_text(path, script);
    files.push_back(path);
}

Files cmd_decohere(const RunConfig& c)
{
    const auto grid = mediator_grid(c, false);
    const TargetModel target = target_for(c);
    std::vector<DecoherenceResult> res(grid.size());
    std::vector<BornValidity> born(grid.size());
    RateOptions ro;
    ro.relTol = c.relTol;
    parallel_for(grid.size(), c.threads, [&](std::size_t i) {
        DMScenario sc = c.scenario;
        sc.m = grid[i];
        res[i] = decoherence_rate(sc, target, flux_for(c, sc, c.mode, c.siderealPhase),
                                  c.windAngleDeg * deg, ro);
        born[i] = born_validity(sc, c.experiment);
    });
    Table t{{"experiment", "M_eV", "m_eV", "mode", "shielding", "sidereal_phase", "re_F_per_s",
             "im_F_per_s", "abs_err_per_s", "total_rate_per_s", "s_dm", "phi_dm",
             "regime", "born_ratio", "born_valid"},
            {}};
    const double T = c.experiment.exposure * units::hbar_eV_s;
    const auto shielding = c.experiment.space ? ShieldingMode::space : c.site.shielding;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = res[i];
        t.add({c.experiment.name, c.scenario.M, grid[i], std::string(to_string(c.mode)),
               std::string(to_string(shielding)), c.siderealPhase, r.rate.real(), r.rate.imag(),
               r.absErr, r.totalRate, r.rate.real() * T, r.rate.imag() * T, r.regime,
               born[i].ratio, born[i].valid});
    }
    return {write_table(c.out, "decohere", t, c.json)};
}

Files cmd_daily(const RunConfig& c)
{
    const auto phases = sidereal_grid(c.points);
    const TargetModel target = target_for(c);
    RateOptions ro;
    ro.relTol = c.relTol;
    std::vector<double> flux(phases.size()), reA(phases.size()), imA(phases.size()),
        reI(phases.size());
    parallel_for(phases.size(), c.threads, [&](std::size_t i) {
        const auto& sc = c.scenario;
        flux[i] = horizon_flux_fraction(sc, c.site, phases[i]).total();
        const auto a = decoherence_rate(sc, target, flux_for(c, sc, FluxMode::anisotropic, phases[i]),
                                        c.windAngleDeg * deg, ro);
        const auto b = decoherence_rate(sc, target, flux_for(c, sc, FluxMode::isotropized, phases[i]),
                                        c.windAngleDeg * deg, ro);
        reA[i] = a.rate.real();
        imA[i] = a.rate.imag();
        reI[i] = b.rate.real();
    });
    constexpr double siderealHours = 23.9344696;
    Table t{{"phase", "sidereal_hours", "flux_fraction", "re_F_aniso", "im_F_aniso", "re_F_iso"},
            {}};
    for (std::size_t i = 0; i < phases.size(); ++i)
        t.add({phases[i], phases[i] * siderealHours, flux[i], reA[i], imA[i], reI[i]});
    Files files{write_table(c.out, "daily", t, c.json)};

    auto series = [&](const std::vector<double>& v) {
        return SiderealSeries{phases, v};
    };
    double offset = fundamental_phase(reA) - fundamental_phase(flux);
    offset -= std::round(offset);
    Table s{{"M_eV", "m_eV", "flux_variation", "rate_variation", "iso_rate_variation",
             "flux_peak_phase", "rate_peak_phase", "phase_offset_cycles"},
            {}};
    s.add({c.scenario.M, c.scenario.m, daily_variation(series(flux)),
           daily_variation(series(reA)), daily_variation(series(reI)), fundamental_phase(flux),
           fundamental_phase(reA), offset});
    files.push_back(write_table(c.out, "daily_summary", s, c.json));
    return files;
}

Files cmd_atmosphere(const RunConfig& c)
{
    const auto grid = mediator_grid(c, true);
    const auto rows = threshold_curves(c.scenario, grid, c.atmosphere, c.threads);
    Table t{{"m_eV", "alphaM_scatt", "alphaM_iso", "alphaM_therm"}, {}};
    for (const auto& r : rows)
        t.add({r.m, r.alphaScatt, r.alphaIso, r.alphaTherm});
    Files files{write_table(c.out, "thresholds", t, c.json)};

    const auto& sc = c.scenario;
    const auto th = shielding_thresholds(sc, c.atmosphere);
    const auto s2 = sigma_theta2(sc, sc.momentum());
    const auto tr = transport_cross_section(sc, sc.momentum());
    Table s{{"M_eV", "m_eV", "alphaM", "zeta_scatt", "zeta_iso", "zeta_therm", "ground_reach",
             "greenhouse_enhancement", "sin2theta_mean", "sin2theta_printed_form",
             "sigma_tr_cm2"},
            {}};
    s.add({sc.M, sc.m, sc.alphaM, th.zetaScatt, th.zetaIso, th.zetaTherm,
           ground_reach_probability(th), greenhouse_enhancement(sc, c.atmosphere), s2.quadrature,
           s2.printed, units::area_cm2(tr.closedForm)});
    files.push_back(write_table(c.out, "atmosphere_summary", s, c.json));
    return files;
}

Files cmd_born(const RunConfig& c)
{
    const auto grid = mediator_grid(c, false);
    Table t{{"m_eV", "k_eV", "q_eV", "ratio", "regime", "valid"}, {}};
    for (double m : grid) {
        DMScenario sc = c.scenario;
        sc.m = m;
        const double k = sc.momentum();
        const double q = 1.0 / std::max({1.0 / m, c.experiment.radius, 1.0 / k});
        const auto b = born_validity(sc, c.experiment, k, q);
        t.add({m, k, q, b.ratio, b.regime, b.valid});
    }
    Files files{write_table(c.out, "born", t, c.json)};

    const SquareWell well{c.well.V0, c.well.R * units::nm};
    const double k = c.scenario.momentum();
    const double nm2 = units::nm * units::nm;
    Table w{{"V0_eV", "R_nm", "k_eV", "kR", "sigma_exact_nm2", "sigma_born_nm2",
             "sigma_s_wave_nm2", "geometric_nm2"},
            {}};
    w.add({well.V0, c.well.R, k, k * well.R,
           square_well_exact_sigma(well, k, c.scenario.M) / nm2,
           square_well_born_sigma(well, k, c.scenario.M) / nm2,
           square_well_s_wave_sigma(well, c.scenario.M) / nm2,
           4.0 * std::numbers::pi * c.well.R * c.well.R});
    files.push_back(write_table(c.out, "square_well", w, c.json));
    return files;
}

Files cmd_stats(const RunConfig& c)
{
    const auto& st = c.stats;
    std::vector<BinCounts> counts;
    const auto sum = simulate_replicas(st.sTilde, st.gammaVis, st.B0, st.deltaB, c.replicas,
                                       c.seed, c.threads, &counts);
    Table t{{"mrn_plus", "mrn_minus", "eve_plus", "eve_minus"}, {}};
    for (const auto& b : counts)
        t.add({b.mrnPlus, b.mrnMinus, b.evePlus, b.eveMinus});
    Files files{write_table(c.out, "stats_counts", t, c.json)};

    const auto sd = estimator_stddev(st.B0, st.gammaVis, st.sTilde, st.deltaB);
    Table s{{"replicas", "seed", "s_true", "gamma_vis", "B0", "deltaB", "mean", "stddev",
             "sigma_full", "sigma_asymptotic", "coverage", "degenerate"},
            {}};
    s.add({sum.replicas, static_cast<std::int64_t>(c.seed), st.sTilde, st.gammaVis, st.B0,
           st.deltaB, sum.mean, sum.stddev, sd.full, sd.asymptotic, sum.coverage,
           sum.degenerate});
    files.push_back(write_table(c.out, "stats_summary", s, c.json));

    const RunPlan plan = effective_plan(plan_for(c));
    const auto th = detection_threshold(plan);
    Table d{{"experiment", "B0", "sigma", "background", "threshold", "chi"}, {}};
    d.add({plan.experiment.name, plan.expected_events(), th.sigma, th.background, th.threshold,
           th.chi});
    files.push_back(write_table(c.out, "detection", d, c.json));
    return files;
}

Files cmd_sensitivity(const RunConfig& c)
{
    const auto grid = mediator_grid(c, true);
    SensitivityOptions opt;
    opt.site = c.site;
    opt.mode = c.mode;
    opt.greenhouse = c.greenhouse;
    opt.phases = c.phases;
    opt.windAngle = c.windAngleDeg * deg;
    opt.relTol = c.relTol;
    opt.threads = c.threads;
    opt.atmosphere = c.atmosphere;
    if (!c.overlay.empty())
        opt.overlay = read_overlay(c.overlay);
    const RunPlan plan = plan_for(c);
    const auto curve = sweep_curve(plan, c.scenario, grid, opt);

    Table t{{"experiment", "M_eV", "m_eV", "alpha_hat", "regime", "born_valid", "alpha_scatt",
             "alpha_iso", "alpha_therm", "alpha_hat_greenhouse", "detectable"},
            {}};
    Table lg{{"experiment", "M_eV", "m_eV", "series", "alphaM"}, {}};
    for (const auto& r : curve.rows) {
        t.add({curve.experimentName, curve.M, r.m, r.alphaHat, r.regime, r.bornValid,
               r.alphaScatt, r.alphaIso, r.alphaTherm, r.alphaHatGreenhouse, r.detectable});
        const std::pair<const char*, double> series[] = {
            {"alpha_hat", r.alphaHat},       {"alpha_scatt", r.alphaScatt},
            {"alpha_iso", r.alphaIso},       {"alpha_therm", r.alphaTherm},
            {"alpha_hat_greenhouse", r.alphaHatGreenhouse}};
        for (const auto& [name, v] : series)
            if (std::isfinite(v))
                lg.add({curve.experimentName, curve.M, r.m, std::string(name), v});
    }
    Files files{write_table(c.out, "sensitivity", t, c.json),
                write_table(c.out, "sensitivity_long", lg, c.json)};
    if (c.phaseRegion) {
        const auto region = phase_shift_region(plan, c.scenario, grid, opt);
        Table p{{"experiment", "M_eV", "m_eV", "alpha_hat_decoherence", "alpha_hat_phase"}, {}};
        for (const auto& r : region)
            p.add({curve.experimentName, curve.M, r.m, r.alphaHatDecoherence, r.alphaHatPhase});
        files.push_back(write_table(c.out, "phase_region", p, c.json));
    }
    return files;
}

} // namespace

const std::vector<std::string_view>& command_names()
{
    static const std::vector<std::string_view> names
        = {"decohere", "daily", "atmosphere", "born-check", "stats-sim", "sensitivity"};
    return names;
}

std::vector<std::filesystem::path> run_command(const RunConfig& config, std::string_view command)
{
    config.validate();
    std::filesystem::create_directories(config.out);
    Files files;
    if (command == "decohere")
        files = cmd_decohere(config);
    else if (command == "daily")
        files = cmd_daily(config);
    else if (command == "atmosphere")
        files = cmd_atmosphere(config);
    else if (command == "born-check")
        files = cmd_born(config);
    else if (command == "stats-sim")
        files = cmd_stats(config);
    else if (command == "sensitivity")
        files = cmd_sensitivity(config);
    else
        throw ValidationError("command", "unknown command '" + std::string(command) + "'");
    emit_plot_script(config, command, files);
    return files;
}

int run_command_guarded(const RunConfig& config, std::string_view command, std::ostream& out,
                        std::ostream& err)
{
    try {
        for (const auto& f : run_command(config, command))
            out << f.string() << '\n';
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const DegenerateDataError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const MixedRegimeError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (partial " << format_number(e.partial().real()) << ", "
            << format_number(e.partial().imag()) << " +- " << format_number(e.abs_err())
            << " 1/s)\n";
        return exit_convergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace dmdecoh::cli
