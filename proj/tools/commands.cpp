#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "wwsim/initdata.hpp"
#include "wwsim/io.hpp"
#include "wwsim/nls.hpp"
#include "wwsim/stokes.hpp"

namespace wwsim::cli {

namespace {

std::string join(const std::string& dir, const std::string& file) { return dir + "/" + file; }

void report(const char* what, bool ok) { std::printf("%-44s %s\n", what, ok ? "ok" : "OUT OF TOLERANCE"); }

template <class F>
int guarded(const char* name, F&& f) {
    try {
        return f();
    } catch (const BlowupDetected& e) {
        std::fprintf(stderr, "%s: blow-up: %s\n", name, e.what());
    } catch (const NoConvergence& e) {
        std::fprintf(stderr, "%s: no convergence: %s\n", name, e.what());
    } catch (const NewtonDiverged& e) {
        std::fprintf(stderr, "%s: Newton diverged: %s\n", name, e.what());
    } catch (const ChordArcViolation& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
    } catch (const NonMonotoneParametrization& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
    } catch (const AmplitudeOutOfRange& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return kUsage;
    } catch (const NoUnstableMode& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return kUsage;
    } catch (const IncompatiblePeriod& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return kUsage;
    } catch (const OrthogonalityViolated& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return kUsage;
    }
    return kNumericalAbort;
}

}  // namespace

int cmd_stokes(const StokesArgs& a) {
    return guarded("stokes", [&] {
        ensure_directory(a.out_dir);
        std::ostringstream cfg;
        cfg << "eps=" << a.eps << "\nmodes=" << a.modes << "\n";
        write_manifest(join(a.out_dir, "manifest.json"), "stokes", cfg.str());

        NewtonOptions opt;
        opt.n_modes = a.modes;
        const StokesWave w = stokes_newton(a.eps, opt);
        {
            std::ofstream f(join(a.out_dir, "coefficients.txt"));
            write_coefficient_table(f, w);
        }
        const StokesWave ex = stokes_expansion(a.eps);
        std::vector<std::vector<double>> rows;
        const double e = a.eps;
        const double expected[4] = {2.0 * e * e / 2.0, e + e * e * e / 8.0, e * e / 2.0, 3.0 * e * e * e / 8.0};
        if (a.eps > 0.0) {
            const Elevation el = eulerian_elevation(stokes_state(w, 0.0, Grid(1.0, 128)));
            for (int k = 0; k <= 3; ++k)
                rows.push_back({double(k), eulerian_harmonic(el, k).real(), expected[k]});
        }
        write_csv(join(a.out_dir, "harmonics.csv"), {"k", "cos_amplitude", "expansion"}, rows);

        const double derr = std::abs(w.omega - 1.0 - e * e / 2.0);
        const bool ok_omega = derr <= 2.0 * e * e * e;
        const bool ok_res = !(w.residual > 1e-9);
        Summary s;
        s.numbers = {{"eps", e}, {"omega", w.omega}, {"omega_expansion", ex.omega},
                     {"dispersion_error", derr}, {"residual", w.residual}};
        s.flags = {{"dispersion_within_2eps3", ok_omega}, {"newton_converged", ok_res}};
        write_summary(join(a.out_dir, "summary.json"), s);
        std::printf("omega = %.17g  (1 + eps^2/2 = %.17g)\n", w.omega, 1.0 + e * e / 2.0);
        report("|omega - 1 - eps^2/2| <= 2 eps^3", ok_omega);
        report("Newton residual <= 1e-9", ok_res);
        return ok_omega && ok_res ? kPass : kToleranceFail;
    });
}

int cmd_nls(const NlsArgs& a) {
    return guarded("nls", [&] {
        ensure_directory(a.out_dir);
        std::ostringstream cfg;
        cfg << "q1=" << a.q1 << "\ndelta=" << a.delta << "\nmu=" << a.mu << "\nn=" << a.n << "\ndt=" << a.dt
            << "\ns_prime=" << a.s_prime << "\n";
        write_manifest(join(a.out_dir, "manifest.json"), "nls", cfg.str());

        const Grid g(a.q1, a.n);
        const GrowthRate gr = growth_rate(a.q1);
        const CVec w0 = unstable_seed(g, a.delta, gr.k0, a.s_prime);
        CVec u(a.n);
        for (int j = 0; j < a.n; ++j) u[j] = cplx(0.0, 1.0) * (1.0 + w0[j]);
        const double T0 = std::log(a.mu / a.delta) / gr.tau;
        std::vector<std::vector<double>> rows;
        PlotSeries ps{"||w||_{H^s'}", {}, {}}, pb{"delta e^{tau t}", {}, {}};
        nls_evolve(g, u, CubicNls::standard(), a.dt, T0, [&](double t, const CVec& v) {
            const CVec w = perturbation(v, t);
            const double hs = sobolev_norm(g, w, a.s_prime, 1e-12), l2 = sobolev_norm(g, w, 0.0, 1e-12);
            const double bound = a.delta * std::exp(gr.tau * t);
            rows.push_back({t, hs, l2, hs / bound});
            ps.x.push_back(t);
            ps.y.push_back(hs);
            pb.x.push_back(t);
            pb.y.push_back(bound);
        }, std::max(1L, std::lround(0.01 / a.dt)));
        write_csv(join(a.out_dir, "growth.csv"), {"t", "norm_hs", "norm_l2", "ratio"}, rows);
        write_svg_plot(join(a.out_dir, "growth.svg"), {"NLS perturbation growth", "t", "norm", true}, {ps, pb});

        std::vector<std::vector<double>> scan;
        for (int i = 1; i <= 8; ++i) {
            const double q = 0.5 * i;
            const GrowthRate r = growth_rate(q);
            double fitted = std::nan(""), rel = std::nan("");
            if (r.k0 > 0) {
                const RateFit fit = linear_rate_fit(q);
                fitted = fit.fitted;
                rel = fit.rel_err;
            }
            scan.push_back({q, double(r.k0), r.tau, fitted, rel});
        }
        write_csv(join(a.out_dir, "rate_scan.csv"), {"q", "k0", "tau", "fitted_rate", "rel_err"}, scan);

        const InstabilityReport rep = instability_run(a.q1, a.delta, a.mu, a.n, a.dt, a.s_prime);
        const bool ok_ratio = rep.max_ratio <= 2.0, ok_final = rep.final_norm >= a.mu / 4.0;
        Summary s;
        s.numbers = {{"tau", rep.tau}, {"k0", double(rep.k0)}, {"T0", rep.T0},
                     {"initial_norm", rep.initial_norm}, {"max_ratio", rep.max_ratio},
                     {"final_norm", rep.final_norm}, {"final_l2", rep.final_l2}};
        s.flags = {{"ratio_within_2", ok_ratio}, {"final_at_least_mu_over_4", ok_final}};
        write_summary(join(a.out_dir, "summary.json"), s);
        std::printf("tau = %.6f  k0 = %d  T0 = %.4f  ||w0|| = %.4g  max ratio = %.4g  ||w(T0)|| = %.4g\n", rep.tau,
                    rep.k0, rep.T0, rep.initial_norm, rep.max_ratio, rep.final_norm);
        report("sup ||w|| / (delta e^{tau t}) <= 2", ok_ratio);
        report("||w(T0)|| >= mu / 4", ok_final);
        return ok_ratio && ok_final ? kPass : kToleranceFail;
    });
}

int cmd_instability(const ExperimentConfig& c, long checkpoint_every) {
    return guarded("instability", [&] {
        validate(c);
        ensure_directory(c.out_dir);
        write_manifest(join(c.out_dir, "manifest.json"), "instability", config_text(c));
        long count = 0;
        const InstabilityResult r = run_instability(c, [&](const Snapshot& sn, const WaterState& s) {
            if (checkpoint_every > 0 && count++ % checkpoint_every == 0) {
                char name[64];
                std::snprintf(name, sizeof name, "checkpoint_t%08.2f.bin", sn.t);
                write_checkpoint(join(c.out_dir, name), s, c.eps);
            }
        });
        std::vector<std::vector<double>> rows;
        PlotSeries sm{"|c_{q-1}|", {}, {}}, sp{"|c_{q+1}|", {}, {}}, dist{"family distance", {}, {}},
            es{"E_s^{1/2}", {}, {}}, bound{"5 eps^{3/2} delta e^{eps^2 t}", {}, {}};
        for (const auto& sn : r.series) {
            rows.push_back({sn.t, sn.es_sqrt, sn.rho_norm, sn.side_minus, sn.side_plus, sn.distance, sn.holo_zeta,
                            sn.holo_v});
            sm.x.push_back(sn.t);
            sm.y.push_back(sn.side_minus);
            sp.x.push_back(sn.t);
            sp.y.push_back(sn.side_plus);
            if (std::isfinite(sn.distance)) {
                dist.x.push_back(sn.t);
                dist.y.push_back(sn.distance);
            }
            es.x.push_back(sn.t);
            es.y.push_back(sn.es_sqrt);
            bound.x.push_back(sn.t);
            bound.y.push_back(5.0 * std::pow(c.eps, 1.5) * c.delta * std::exp(c.eps * c.eps * sn.t));
        }
        write_csv(join(c.out_dir, "series.csv"),
                  {"t", "Es_sqrt", "rho_norm", "sideband_minus", "sideband_plus", "family_distance", "holo_zeta",
                   "holo_v"},
                  rows);
        write_svg_plot(join(c.out_dir, "sidebands.svg"), {"Sideband amplitudes", "t", "amplitude", true}, {sm, sp});
        write_svg_plot(join(c.out_dir, "distance.svg"), {"Distance to the Stokes family", "t", "distance", true},
                       {dist});
        write_svg_plot(join(c.out_dir, "remainder.svg"), {"Remainder energy", "t", "E_s^{1/2}", true}, {es, bound});

        const double se = std::sqrt(c.eps);
        const bool ok_init = r.initial_distance <= 2.0 * c.delta * se;
        const bool ok_final = r.final_distance >= 0.05 * se;
        const bool ok_rate = std::abs(r.fitted_rate - r.expected_rate) <= 0.25 * r.expected_rate;
        Summary s;
        s.numbers = {{"initial_distance", r.initial_distance}, {"final_distance", r.final_distance},
                     {"t_star", r.t_star}, {"fitted_sideband_rate", r.fitted_rate},
                     {"expected_rate", r.expected_rate}, {"envelope_rate", r.envelope_rate},
                     {"holo_growth", r.holo_growth}, {"admissibility_zeta", r.admissibility.zeta_residual},
                     {"admissibility_v", r.admissibility.v_residual}};
        s.flags = {{"aborted", r.aborted}, {"initial_within_2_delta_sqrt_eps", ok_init},
                   {"final_at_least_0.05_sqrt_eps", ok_final}, {"rate_within_25pct", ok_rate}};
        if (r.aborted) s.strings["abort_reason"] = r.abort_reason;
        write_summary(join(c.out_dir, "summary.json"), s);

        std::printf("initial distance %.4g  distance at t* = %.2f: %.4g\n", r.initial_distance, r.t_star,
                    r.final_distance);
        std::printf("sideband rate %.5g  (eps^2 tau = %.5g, envelope prediction %.5g)\n", r.fitted_rate,
                    r.expected_rate, r.envelope_rate);
        if (r.aborted) {
            std::fprintf(stderr, "instability: run stopped early: %s\n", r.abort_reason.c_str());
            return int(kNumericalAbort);
        }
        report("initial distance <= 2 delta eps^{1/2}", ok_init);
        report("distance at t* >= 0.05 eps^{1/2}", ok_final);
        report("sideband rate within 25% of eps^2 tau", ok_rate);
        return ok_init && ok_final && ok_rate ? int(kPass) : int(kToleranceFail);
    });
}

int cmd_compare(const ExperimentConfig& base) {
    return guarded("compare", [&] {
        ExperimentConfig c = base;
        c.t_end = c.es_until;
        c.distance_every = c.t_end + 1.0;
        validate(c);
        ensure_directory(c.out_dir);
        write_manifest(join(c.out_dir, "manifest.json"), "compare", config_text(c));
        const InstabilityResult r = run_instability(c);
        std::vector<std::vector<double>> rows;
        bool ok_bound = true;
        PlotSeries es{"E_s^{1/2}", {}, {}}, bd{"5 eps^{3/2} delta e^{eps^2 t}", {}, {}};
        for (const auto& sn : r.series) {
            const double b = 5.0 * std::pow(c.eps, 1.5) * c.delta * std::exp(c.eps * c.eps * sn.t);
            ok_bound = ok_bound && sn.es_sqrt <= b;
            rows.push_back({sn.t, sn.es_sqrt, b, sn.rho_norm});
            es.x.push_back(sn.t);
            es.y.push_back(sn.es_sqrt);
            bd.x.push_back(sn.t);
            bd.y.push_back(b);
        }
        write_csv(join(c.out_dir, "compare.csv"), {"t", "Es_sqrt", "bound", "rho_norm"}, rows);
        write_svg_plot(join(c.out_dir, "compare.svg"), {"Water wave against the modulation approximation", "t",
                                                        "E_s^{1/2}", true},
                       {es, bd});
        const ScalingStudy st = es_scaling(c, {0.5 * c.eps, c.eps});
        std::vector<std::vector<double>> srows;
        for (const auto& p : st.points) srows.push_back({p.eps, double(p.q), double(p.n), p.es0_sqrt});
        write_csv(join(c.out_dir, "scaling.csv"), {"eps", "q", "n", "Es0_sqrt"}, srows);
        const bool ok_slope = std::abs(st.slope - 1.5) <= 0.25;
        Summary s;
        s.numbers = {{"slope", st.slope}, {"Es0_sqrt", r.series.empty() ? NAN : r.series.front().es_sqrt}};
        s.flags = {{"aborted", r.aborted}, {"bound_holds", ok_bound}, {"slope_within_0.25", ok_slope}};
        write_summary(join(c.out_dir, "summary.json"), s);
        std::printf("log-log slope of E_s^{1/2}(0): %.4f\n", st.slope);
        if (r.aborted) return int(kNumericalAbort);
        report("E_s^{1/2} <= 5 eps^{3/2} delta e^{eps^2 t}", ok_bound);
        report("slope within 0.25 of 1.5", ok_slope);
        return ok_bound && ok_slope ? int(kPass) : int(kToleranceFail);
    });
}

int cmd_sweep(const ExperimentConfig& base, const SweepArgs& a) {
    if (a.command != "instability" && a.command != "compare") {
        std::fprintf(stderr, "sweep: command must be instability or compare\n");
        return kUsage;
    }
    std::vector<ExperimentConfig> runs;
    try {
        for (const auto& v : a.values) {
            ExperimentConfig c = base;
            set_config_value(c, a.key, v);
            c.out_dir = base.out_dir + "/" + a.key + "=" + v;
            validate(c);
            runs.push_back(c);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "sweep: %s\n", e.what());
        return kUsage;
    }
    int worst = kPass;
    auto one = [&](const ExperimentConfig& c) {
        return a.command == "instability" ? cmd_instability(c) : cmd_compare(c);
    };
    const size_t jobs = std::max(1, a.jobs);
    for (size_t i = 0; i < runs.size(); i += jobs) {
        std::vector<std::future<int>> batch;
        for (size_t j = i; j < std::min(runs.size(), i + jobs); ++j)
            batch.push_back(std::async(std::launch::async, one, runs[j]));
        for (auto& f : batch) worst = std::max(worst, f.get());
    }
    return worst;
}

}  // namespace wwsim::cli
