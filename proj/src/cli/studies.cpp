#include "csl/cli/studies.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "csl/cli/writers.hpp"
#include "csl/clump_states.hpp"
#include "csl/field_density.hpp"
#include "csl/fock_oracle.hpp"
#include "csl/kernel_solution.hpp"
#include "csl/observables.hpp"
#include "csl/units_modes.hpp"

namespace csl::cli {

namespace {

using njson = nlohmann::ordered_json;

njson jnum(double v) {
    if (std::isnan(v) || (std::isinf(v) && v > 0))
        throw NonFiniteValue("non-finite value in report");
    if (std::isinf(v)) return njson("-INF");
    return njson(v);
}

std::string iso_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Deterministic by construction: workers write disjoint row indices,
// output assembly stays ordered.
void parallel_rows(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    int use = std::max(1, threads);
    if (use == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(use));
    for (int w = 0; w < use; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> sample_times(const TimesSpec& ts, double m) {
    if (ts.stroboscopic) {
        auto st = stroboscopic_times(ts.t_final, m, static_cast<std::size_t>(ts.samples));
        if (st.times.empty())
            throw std::domain_error(
                "stroboscopic sampling needs t_final of at least one oscillation period");
        return st.times;
    }
    std::vector<double> times;
    if (ts.samples == 1) {
        times.push_back(ts.t_final);
        return times;
    }
    for (int i = 0; i < ts.samples; ++i)
        times.push_back(ts.t_final * i / (ts.samples - 1));
    return times;
}

HeaderLines header_lines(const ScenarioConfig& cfg, const ModeGrid& grid,
                         const RunOptions& opts) {
    HeaderLines h;
    h.emplace_back("schema_version", "1");
    h.emplace_back("study", study_name(cfg.study));
    if (opts.timestamp) h.emplace_back("generated_at", iso_timestamp());
    for (auto& kv : config_echo_flat(cfg)) h.push_back(std::move(kv));
    h.emplace_back("grid.dk", format_value(grid.dk));
    h.emplace_back("grid.k_max", format_value(cfg.model.k_max));
    h.emplace_back("grid.modes", std::to_string(grid.size()));
    return h;
}

njson meta_json(const ScenarioConfig& cfg, const ModeGrid& grid, const RunOptions& opts) {
    njson j;
    j["schema_version"] = "1";
    j["study"] = study_name(cfg.study);
    if (opts.timestamp) j["generated_at"] = iso_timestamp();

    njson model;
    model["mass"] = jnum(cfg.model.m);
    model["lambda"] = jnum(cfg.model.lambda);
    model["box_length"] = jnum(cfg.model.box_length);
    model["k_max"] = jnum(cfg.model.k_max);
    njson clumps;
    auto profile = [](const ClumpProfile& p) {
        njson jp;
        jp["n_particles"] = jnum(p.n_particles);
        jp["sigma"] = jnum(p.sigma);
        jp["center"] = jnum(p.center);
        return jp;
    };
    clumps["left"] = profile(cfg.clumps.left);
    clumps["right"] = profile(cfg.clumps.right);
    njson times;
    times["t_final"] = jnum(cfg.times.t_final);
    times["samples"] = cfg.times.samples;
    times["stroboscopic"] = cfg.times.stroboscopic;
    njson tol;
    tol["element"] = jnum(cfg.numerics.tolerances.element);
    tol["moment"] = jnum(cfg.numerics.tolerances.moment);
    tol["residual"] = jnum(cfg.numerics.tolerances.residual);
    tol["trace"] = jnum(cfg.numerics.tolerances.trace);
    njson numerics;
    numerics["n_max"] = cfg.numerics.n_max;
    numerics["dt"] = jnum(cfg.numerics.dt);
    numerics["tolerances"] = tol;
    njson output;
    output["directory"] = cfg.output.directory;
    output["formats"] = cfg.output.formats;

    njson config;
    config["model"] = model;
    config["clumps"] = clumps;
    config["times"] = times;
    config["study"] = study_name(cfg.study);
    config["numerics"] = numerics;
    config["output"] = output;
    j["config"] = config;

    njson jgrid;
    jgrid["dk"] = jnum(grid.dk);
    jgrid["k_max"] = jnum(cfg.model.k_max);
    jgrid["modes"] = grid.size();
    j["grid"] = jgrid;
    return j;
}

njson table_json(const ScenarioConfig& cfg, const ModeGrid& grid, const RunOptions& opts,
                 const Table& tb) {
    njson j = meta_json(cfg, grid, opts);
    j["columns"] = tb.columns;
    njson rows = njson::array();
    for (const auto& row : tb.rows) {
        njson jr = njson::array();
        for (double v : row) jr.push_back(jnum(v));
        rows.push_back(std::move(jr));
    }
    j["rows"] = rows;
    return j;
}

Table decoherence_table(const ScenarioConfig& cfg, const ModeGrid& grid,
                        const std::vector<double>& times, int threads) {
    Table tb;
    tb.columns = {"t", "diag", "offdiag", "ratio", "K"};
    tb.rows.assign(times.size(), {});
    parallel_rows(times.size(), threads, [&](std::size_t i) {
        double t = times[i];
        auto [diag_part, off_part] = clump_dm_parts(t, cfg.clumps, cfg.model);
        double kf = k_factor(t, grid, cfg.model);
        tb.rows[i] = {t, kf * diag_part, kf * off_part, off_part / diag_part, kf};
    });
    return tb;
}

Table production_table(const ScenarioConfig& cfg, const ModeGrid& grid,
                       const std::vector<double>& times, int threads) {
    Table tb;
    tb.columns = {"t", "k", "n_a", "n_b", "energy_per_mode", "energy_density_rate"};
    std::size_t modes = grid.size();
    tb.rows.assign(times.size() * modes, {});
    double rate = grid.dk * cfg.model.lambda / (2.0 * std::numbers::pi);
    parallel_rows(times.size(), threads, [&](std::size_t i) {
        double t = times[i];
        for (std::size_t j = 0; j < modes; ++j) {
            auto [na, nb] = mode_occupation(t, grid.k[j], 0.0, 0.0, cfg.model);
            double em = mode_energy(t, grid.k[j], 0.0, cfg.model);
            tb.rows[i * modes + j] = {t, grid.k[j], na, nb, em, rate};
        }
    });
    return tb;
}

// Reads the first grid mode: frequency w(k_1) and the per-branch
// displacements sqrt(2 dk) Re chi~(k_1).
Table kernel_table(const ScenarioConfig& cfg, const ModeGrid& grid,
                   const std::vector<double>& times, int threads) {
    Table tb;
    tb.columns = {"t", "s", "kbt", "mean_n", "trace", "n_mean", "a_mean_re", "a_mean_im",
                  "x_diag"};
    double w = grid.omega.front();
    double root = std::sqrt(2.0 * grid.dk);
    double g1 = root * chi_momentum(grid.k.front(), cfg.clumps.left).real();
    double g2 = root * chi_momentum(grid.k.front(), cfg.clumps.right).real();
    double trace = std::exp(-0.5 * (g1 - g2) * (g1 - g2));
    double xm = 0.5 * (g1 + g2);
    tb.rows.assign(times.size(), {});
    parallel_rows(times.size(), threads, [&](std::size_t i) {
        double t = times[i];
        KernelCoeffs co =
            coeffs_approx(t, w, cfg.model.lambda, g1, g2, cfg.times.stroboscopic);
        double kbt = 0.0, mean_n = 0.0;
        if (co.s > 0) {
            ThermalMap th = thermal_map(co.s, w);
            kbt = th.kbt;
            mean_n = th.mean_n;
        }
        MomentSet mo = closed_moments(t, w, cfg.model.lambda, g1, g2);
        tb.rows[i] = {t,
                      co.s,
                      kbt,
                      mean_n,
                      trace,
                      mo.n_mean.real() / trace,
                      mo.a_mean.real() / trace,
                      mo.a_mean.imag() / trace,
                      x_matrix_element(xm, xm, co)};
    });
    return tb;
}

Table field_exponent_table(const ScenarioConfig& cfg, const ModeGrid& grid,
                           const std::vector<double>& times, int threads) {
    Table tb;
    tb.columns = {"t",           "h0_diag_left", "h0_offdiag",   "h0_diag_right",
                  "h0_log_ratio", "h_offdiag",    "max_limit_log"};
    FieldProfile fl = clump_center_profile(cfg.clumps.left, grid, cfg.model);
    FieldProfile fr = clump_center_profile(cfg.clumps.right, grid, cfg.model);
    double limit = h0_max_limit_log(cfg.clumps, grid, cfg.model);
    tb.rows.assign(times.size(), {});
    parallel_rows(times.size(), threads, [&](std::size_t i) {
        double t = times[i];
        double dll = h0_field_element_log(fl, fl, t, cfg.clumps, grid, cfg.model).log_magnitude;
        double drr = h0_field_element_log(fr, fr, t, cfg.clumps, grid, cfg.model).log_magnitude;
        double off = h0_field_element_log(fl, fr, t, cfg.clumps, grid, cfg.model).log_magnitude;
        double hoff = h_field_element_log(fl, fr, t, cfg.clumps, grid, cfg.model).log_magnitude;
        tb.rows[i] = {t, dll, off, drr, off - 0.5 * (dll + drr), hoff, limit};
    });
    return tb;
}

njson suite_entry(const char* name, bool pass, double measured, double tolerance,
                  njson detail) {
    njson s;
    s["name"] = name;
    s["pass"] = pass;
    s["measured"] = jnum(measured);
    s["tolerance"] = jnum(tolerance);
    s["detail"] = std::move(detail);
    return s;
}

// Invariant suites of the brute-force integrator, run at the first grid
// mode with displacements taken from the configured clumps.
njson oracle_suites(const ScenarioConfig& cfg, const ModeGrid& grid) {
    const ModelParams& mp = cfg.model;
    const Tolerances& tol = cfg.numerics.tolerances;
    double w = grid.omega.front();
    double k1 = grid.k.front();
    double root = std::sqrt(2.0 * grid.dk);
    double g1 = root * chi_momentum(k1, cfg.clumps.left).real();
    double g2 = root * chi_momentum(k1, cfg.clumps.right).real();
    double t_span = cfg.times.t_final;
    double dt = cfg.numerics.dt > 0 ? cfg.numerics.dt : suggest_dt(w, mp.lambda);

    njson suites = njson::array();

    // physical (hermitian) run: trace drift, hermiticity, positivity
    double gs = 0.5 * (g1 + g2);
    int n_phys = cfg.numerics.n_max > 0 ? cfg.numerics.n_max
                                        : suggest_n_max(gs, gs, mp.lambda, w, t_span);
    TruncatedDM dm = integrate_lindblad_x(gs, gs, mp.lambda, w, t_span, n_phys, dt);
    njson run_detail;
    run_detail["omega"] = jnum(w);
    run_detail["gamma"] = jnum(gs);
    run_detail["t_final"] = jnum(t_span);
    run_detail["dt"] = jnum(dt);
    run_detail["n_max"] = n_phys;

    double drift = std::abs(dm.trace() - cplx(1.0, 0.0)) / t_span;
    suites.push_back(suite_entry("trace_drift", drift < tol.trace, drift, tol.trace, run_detail));

    double herm = dm.hermiticity_error();
    suites.push_back(suite_entry("hermiticity", herm < 1e-12, herm, 1e-12, run_detail));

    int d = dm.dim();
    Eigen::MatrixXcd mrho(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mrho(i, j) = dm.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (mrho + mrho.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    suites.push_back(
        suite_entry("positivity", min_eig >= -1e-8, min_eig, -1e-8, run_detail));

    // moment laws hold for non-hermitian (partial) initial data too
    int n_mom = cfg.numerics.n_max > 0 ? cfg.numerics.n_max
                                       : suggest_n_max(g1, g2, mp.lambda, w, t_span);
    MomentSet om = moments(integrate_lindblad_x(g1, g2, mp.lambda, w, t_span, n_mom, dt));
    MomentSet cm = closed_moments(t_span, w, mp.lambda, g1, g2);
    double moment_err = std::max(
        {std::abs(om.a_mean - cm.a_mean), std::abs(om.adag_mean - cm.adag_mean),
         std::abs(om.n_mean - cm.n_mean), std::abs(om.a2_mean - cm.a2_mean),
         std::abs(om.adag2_mean - cm.adag2_mean)});
    njson mom_detail;
    mom_detail["gamma1"] = jnum(g1);
    mom_detail["gamma2"] = jnum(g2);
    mom_detail["n_max"] = n_mom;
    suites.push_back(suite_entry("moment_equivalence", moment_err < tol.moment, moment_err,
                                 tol.moment, mom_detail));

    // observed step-halving order of the integrator
    double dt0 = 16.0 * suggest_dt(w, mp.lambda);
    double span = 20.0 * dt0;
    int n_cv = suggest_n_max(0.5, 0.5, mp.lambda, w, span);
    auto probe = [&](double h) {
        return moments(integrate_lindblad_x(0.5, 0.5, mp.lambda, w, span, n_cv, h))
            .n_mean.real();
    };
    double f0 = probe(dt0);
    double f1 = probe(0.5 * dt0);
    double f2 = probe(0.25 * dt0);
    double d01 = std::abs(f0 - f1);
    double d12 = std::abs(f1 - f2);
    double order = (d01 > 0 && d12 > 1e-15) ? std::log2(d01 / d12) : 16.0;
    njson cv_detail;
    cv_detail["dt0"] = jnum(dt0);
    cv_detail["span"] = jnum(span);
    cv_detail["halving_diffs"] = njson::array({jnum(d01), jnum(d12)});
    suites.push_back(suite_entry("convergence_order", order >= 3.8, order, 3.8, cv_detail));

    // eigenstate residual across truncations, probed at unit displacement
    // scale kappa = sqrt(2 w dk_probe) = 1 where the sweep decreases; the
    // absolute tolerance is out of reach for the hard-truncated state
    // (boundary inflow grows like kappa|f~|sqrt(n_max)), so this suite
    // records the measured values and reports the failure.
    cplx ft(0.3, 0.1);
    double dk_probe = 0.5 / w;
    double r10 = eigenstate_residual(ft, k1, mp, dk_probe, 10);
    double r20 = eigenstate_residual(ft, k1, mp, dk_probe, 20);
    double r30 = eigenstate_residual(ft, k1, mp, dk_probe, 30);
    double r40 = eigenstate_residual(ft, k1, mp, dk_probe, 40);
    bool mono = r10 > r20 && r20 > r30 && r30 > r40;
    njson res_detail;
    res_detail["residuals"] =
        njson::array({jnum(r10), jnum(r20), jnum(r30), jnum(r40)});
    suites.push_back(suite_entry("residual_decreasing", mono && r40 < tol.residual, r40,
                                 tol.residual, res_detail));

    // truncated mode-product overlap against the discrete closed form
    double v = coherent_overlap_oracle(cfg.clumps.left, cfg.clumps.right, grid, 40);
    double lg = std::log(v);
    double closed = log_clump_overlap_discrete(cfg.clumps.left, cfg.clumps.right, grid);
    double oerr = std::abs(lg - closed);
    njson ov_detail;
    ov_detail["log_product"] = jnum(lg);
    ov_detail["log_closed"] = jnum(closed);
    suites.push_back(suite_entry("overlap_log", oerr < 1e-6, oerr, 1e-6, ov_detail));

    njson out;
    out["suites"] = suites;
    bool all = true;
    for (const auto& s : suites) all = all && s["pass"].get<bool>();
    out["pass"] = all;
    return out;
}

int emit_error(int code, const char* kind, const std::string& message) {
    njson err;
    err["error"]["kind"] = kind;
    err["error"]["message"] = message;
    err["error"]["exit"] = code;
    std::cout << err.dump() << "\n";
    std::cerr << "error (" << kind << "): " << message << "\n";
    return code;
}

bool has_format(const ScenarioConfig& cfg, const char* fmt) {
    for (const auto& f : cfg.output.formats)
        if (f == fmt) return true;
    return false;
}

}  // namespace

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("SIM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v < 1024) return static_cast<int>(v);
    }
    return 1;
}

int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
    namespace fs = std::filesystem;
    try {
        ModeGrid grid = build_mode_grid(cfg.model);
        std::string dir = opts.out_override.empty() ? cfg.output.directory : opts.out_override;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
        auto path = [&](const char* ext) {
            return dir + "/" + study_name(cfg.study) + ext;
        };

        if (cfg.study == Study::oracle_check) {
            njson rep = meta_json(cfg, grid, opts);
            njson body = oracle_suites(cfg, grid);
            rep["suites"] = body["suites"];
            rep["pass"] = body["pass"];
            write_text_file(path(".json"), rep.dump(2) + "\n");
            return kExitOk;
        }

        std::vector<double> times = sample_times(cfg.times, cfg.model.m);
        Table tb;
        switch (cfg.study) {
            case Study::decoherence:
                tb = decoherence_table(cfg, grid, times, opts.threads);
                break;
            case Study::production:
                tb = production_table(cfg, grid, times, opts.threads);
                break;
            case Study::kernel:
                tb = kernel_table(cfg, grid, times, opts.threads);
                break;
            case Study::field_exponent:
                tb = field_exponent_table(cfg, grid, times, opts.threads);
                break;
            case Study::oracle_check:
                break;  // handled above
        }
        if (has_format(cfg, "csv"))
            write_text_file(path(".csv"), csv_text(tb, header_lines(cfg, grid, opts)));
        if (has_format(cfg, "json"))
            write_text_file(path(".json"), table_json(cfg, grid, opts, tb).dump(2) + "\n");
        return kExitOk;
    } catch (const IoError& e) {
        return emit_error(kExitIo, "io", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return emit_error(kExitIo, "io", e.what());
    } catch (const TruncationOverflow& e) {
        return emit_error(kExitNumerics, "numerics",
                          std::string(e.what()) + " (suggested n_max " +
                              std::to_string(e.suggested_n_max) + ")");
    } catch (const std::exception& e) {
        return emit_error(kExitNumerics, "numerics", e.what());
    }
}

int validate_config(const std::string& path) {
    ScenarioConfig cfg;
    ConfigReport rep = check_config(path, &cfg);
    njson out;
    out["valid"] = rep.ok();
    out["errors"] = rep.errors;
    out["warnings"] = rep.warnings;
    std::cout << out.dump(2) << "\n";
    return rep.ok() ? kExitOk : kExitConfig;
}

}  // namespace csl::cli
