#include "contgrow/experiments.hpp"

#include "contgrow/brw.hpp"
#include "contgrow/couplings.hpp"
#include "contgrow/estimators.hpp"
#include "contgrow/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace contgrow {

namespace {

struct Outputs {
    std::vector<ResultRow> rows;
    std::string events_jsonl;
    std::string certificates_csv;
    int exit_code = 0;
    std::string message = "ok";
};

ResultRow row(const ExperimentSpec& spec, const std::string& name, EstimateResult est) {
    return ResultRow{name, std::move(est), config_hash(spec), spec.seed};
}

ResultRow point_row(const ExperimentSpec& spec, const std::string& name, double value,
                    long replicas) {
    EstimateResult est;
    est.point = est.ci_low = est.ci_high = value;
    est.replicas = replicas;
    return row(spec, name, est);
}

Outputs run_simulate(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    struct Rep {
        double events = 0.0, norm = 0.0;
        bool truncated = false;
        std::string jsonl;
    };
    const ProcessConfig base = spec.process_config();
    const auto reps = parallel_replicas<Rep>(spec.replicas, parallelism, [&](long i) {
        ProcessConfig cfg = base;
        cfg.stream_salt = static_cast<std::uint64_t>(i) + 1;
        Engine engine(cfg);
        Rep r;
        r.truncated = !engine.run_until(cfg.horizon_time);
        r.events = static_cast<double>(engine.history().outburst_count());
        r.norm = norm_sup_all(engine.history(), cfg.horizon_time);
        if (i == 0) {
            std::ostringstream os;
            export_events_jsonl(engine.history(), cfg, os);
            r.jsonl = os.str();
        }
        return r;
    });
    std::vector<double> events, norms;
    long truncated = 0;
    for (const auto& r : reps) {
        events.push_back(r.events);
        norms.push_back(r.norm);
        if (r.truncated) ++truncated;
    }
    out.events_jsonl = reps.front().jsonl;
    out.rows.push_back(row(spec, "event_count", summarize(events)));
    out.rows.push_back(row(spec, "norm_sup_all", summarize(norms)));
    out.rows.push_back(point_row(spec, "truncated_replicas", static_cast<double>(truncated),
                                 spec.replicas));
    if (truncated > 0) {
        out.exit_code = 3;
        out.message = "event cap truncated " + std::to_string(truncated) + " replica(s)";
    }
    return out;
}

Outputs run_estimate_mu(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    ProcessConfig cfg = spec.process_config();
    cfg.mode = GrowthMode::one_type;
    cfg.lambda2 = 0.0;
    cfg.initial_2.clear();
    EstimateResult mu = estimate_mu(cfg, spec.mu_distances, spec.replicas, parallelism);
    out.rows.push_back(row(spec, "mu", mu));
    for (const auto& [k, v] : mu.diagnostics)
        out.rows.push_back(point_row(spec, k, v, mu.replicas));
    {
        ProcessConfig c = cfg;
        c.stream_salt = 1;
        std::optional<InfectionHistory> h;
        hitting_profile(spec.mu_distances, c, &h);
        std::ostringstream os;
        export_events_jsonl(*h, c, os);
        out.events_jsonl = os.str();
    }
    if (mu.diagnostics.at("valid") == 0.0) {
        out.exit_code = 3;
        out.message = "censoring above 5%; run invalid";
    }
    return out;
}

Outputs run_shape_check(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    ProcessConfig cfg = spec.process_config();
    cfg.mode = GrowthMode::one_type;
    cfg.lambda2 = 0.0;
    cfg.initial_2.clear();
    const EstimateResult mu = estimate_mu(cfg, spec.mu_distances, spec.replicas, parallelism);
    out.rows.push_back(row(spec, "mu", mu));

    struct Rep {
        double dev = 0.0;
    };
    const auto reps = parallel_replicas<Rep>(spec.shape_replicas, parallelism, [&](long i) {
        ProcessConfig c = cfg;
        c.stream_salt = 100000 + static_cast<std::uint64_t>(i);
        c.horizon_time = spec.shape_t;
        Engine engine(c);
        if (!engine.run_until(spec.shape_t))
            throw ExplosionGuardError("shape-check: event cap before the shape time");
        return Rep{shape_deviation(engine.history(), c.lambda1, spec.shape_t, mu.point,
                                   static_cast<std::size_t>(spec.shape_directions))};
    });
    {
        ProcessConfig c = cfg;
        c.stream_salt = 100000;
        c.horizon_time = spec.shape_t;
        Engine engine(c);
        engine.run_until(spec.shape_t);
        std::ostringstream os;
        export_events_jsonl(engine.history(), c, os);
        out.events_jsonl = os.str();
    }
    std::vector<double> devs;
    long ok = 0;
    for (const auto& r : reps) {
        devs.push_back(r.dev);
        if (r.dev <= spec.shape_max_deviation) ++ok;
    }
    out.rows.push_back(row(spec, "shape_deviation", summarize(devs)));
    out.rows.push_back(row(spec, "shape_within_threshold", summarize_proportion(ok, spec.shape_replicas)));
    return out;
}

Outputs run_coexist(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    const ProcessConfig base = spec.process_config();
    struct Rep {
        bool a1 = false, a2 = false;
        std::string jsonl;
    };
    const auto reps = parallel_replicas<Rep>(spec.replicas, parallelism, [&](long i) {
        ProcessConfig cfg = base;
        cfg.stream_salt = static_cast<std::uint64_t>(i) + 1;
        Engine engine(cfg);
        if (!engine.run_until(cfg.horizon_time))
            throw ExplosionGuardError("coexist: event cap before the horizon");
        const auto proxy =
            coexistence_proxy(engine.history(), cfg.horizon_time, spec.coexist_window);
        Rep r{proxy.type1_alive, proxy.type2_alive, {}};
        if (i == 0) {
            std::ostringstream os;
            export_events_jsonl(engine.history(), cfg, os);
            r.jsonl = os.str();
        }
        return r;
    });
    out.events_jsonl = reps.front().jsonl;
    long a1 = 0, a2 = 0, both = 0;
    for (const auto& r : reps) {
        a1 += r.a1;
        a2 += r.a2;
        both += r.a1 && r.a2;
    }
    out.rows.push_back(row(spec, "type1_alive_freq", summarize_proportion(a1, spec.replicas)));
    out.rows.push_back(row(spec, "type2_alive_freq", summarize_proportion(a2, spec.replicas)));
    out.rows.push_back(row(spec, "both_alive_freq", summarize_proportion(both, spec.replicas)));
    return out;
}

Outputs run_couple_check(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    struct Rep {
        long failures = 0;
        std::string csv;
    };
    const bool all = spec.couple_kind == "all";
    const auto reps = parallel_replicas<Rep>(spec.replicas, parallelism, [&](long i) {
        CoupleConfig cc(*spec.radius);
        cc.d = spec.d;
        cc.lambda = spec.couple_lambda;
        cc.lambdas = spec.couple_lambdas;
        cc.horizon = spec.horizon;
        cc.seed = spec.seed + static_cast<std::uint64_t>(i) * 1000003ULL;
        cc.max_events = spec.max_events;
        cc.audit_points = spec.audit_points;
        cc.covering_resolution = spec.covering_resolution;
        cc.cell_side = spec.cell_side;
        cc.population_cap = spec.population_cap;
        Rep r;
        std::ostringstream csv;
        const auto absorb = [&](const CoupledTrace& trace) {
            r.failures += trace.failures();
            std::ostringstream os;
            export_certificates_csv(trace, os);
            csv << os.str();
        };
        if (all || spec.couple_kind == "subset") absorb(couple_two_type_vs_one_type(cc));
        if (all || spec.couple_kind == "union") absorb(couple_one_type_vs_two_type_union(cc));
        if (all || spec.couple_kind == "domination") {
            CoupleConfig c21 = cc;
            // the branching side grows exponentially; keep its horizon short
            c21.horizon = std::min(cc.horizon, 2.0);
            absorb(couple_one_type_vs_brw(c21));
        }
        if (all || spec.couple_kind == "family") absorb(couple_lambda_family(cc));
        r.csv = csv.str();
        return r;
    });
    long failures = 0;
    long clean_runs = 0;
    std::ostringstream csv;
    csv << "event_seq,time,check_name,pass\n";
    for (const auto& r : reps) {
        failures += r.failures;
        if (r.failures == 0) ++clean_runs;
        std::istringstream is(r.csv);
        std::string line;
        while (std::getline(is, line)) {
            if (line == "event_seq,time,check_name,pass") continue;
            csv << line << '\n';
        }
    }
    out.certificates_csv = csv.str();
    out.rows.push_back(point_row(spec, "certificate_failures", static_cast<double>(failures),
                                 spec.replicas));
    out.rows.push_back(row(spec, "runs_all_passed", summarize_proportion(clean_runs, spec.replicas)));
    if (failures > 0) {
        out.exit_code = 2;
        out.message = std::to_string(failures) + " certificate check(s) failed";
    }
    return out;
}

Outputs run_brw_speed(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    EstimateResult zeta = estimate_zeta(*spec.radius, spec.d, spec.horizon, spec.replicas,
                                        spec.seed, parallelism, spec.population_cap,
                                        spec.iid_ancestor);
    out.rows.push_back(row(spec, "zeta", zeta));
    out.rows.push_back(point_row(spec, "zeta_half_horizon", zeta.diagnostics.at("half_horizon"),
                                 zeta.replicas));
    out.rows.push_back(point_row(spec, "capped_replicas", zeta.diagnostics.at("capped_replicas"),
                                 zeta.replicas));
    {
        BrwConfig bc(*spec.radius);
        bc.d = spec.d;
        bc.population_cap = spec.population_cap;
        bc.iid_ancestor = spec.iid_ancestor;
        bc.seed = spec.seed;
        bc.stream_namespace = 0;
        BrwEngine engine(bc);
        engine.run_until(spec.horizon);
        std::ostringstream os;
        export_population_jsonl(engine.population(), bc, os);
        out.events_jsonl = os.str();
    }
    if (zeta.diagnostics.at("capped_replicas") > 0.0) {
        out.exit_code = 3;
        out.message = "population cap truncated some replicas";
    }
    return out;
}

Outputs run_effective_count(const ExperimentSpec& spec, int parallelism) {
    Outputs out;
    const ProcessConfig base = spec.process_config();
    const Ball region{Point(spec.d, 0.0), spec.region_radius};
    struct Rep {
        double count = 0.0;
        std::string jsonl;
    };
    const auto reps = parallel_replicas<Rep>(spec.replicas, parallelism, [&](long i) {
        ProcessConfig cfg = base;
        cfg.stream_salt = static_cast<std::uint64_t>(i) + 1;
        Engine engine(cfg);
        if (!engine.run_until(cfg.horizon_time))
            throw ExplosionGuardError("effective-count: event cap before the horizon");
        Rep r;
        r.count = static_cast<double>(
            count_effective_in_region(engine.history(), region, cfg.horizon_time));
        if (i == 0) {
            std::ostringstream os;
            export_events_jsonl(engine.history(), cfg, os);
            r.jsonl = os.str();
        }
        return r;
    });
    std::vector<double> counts;
    for (const auto& r : reps) counts.push_back(r.count);
    out.events_jsonl = reps.front().jsonl;
    out.rows.push_back(row(spec, "effective_count", summarize(counts)));
    out.rows.push_back(point_row(spec, "region_volume",
                                 ball_volume(spec.d, spec.region_radius), spec.replicas));
    return out;
}

}  // namespace

ExperimentStatus run_experiment(const ExperimentSpec& spec, int parallelism,
                                const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out;
    try {
        if (spec.kind == "simulate") out = run_simulate(spec, parallelism);
        else if (spec.kind == "estimate-mu") out = run_estimate_mu(spec, parallelism);
        else if (spec.kind == "shape-check") out = run_shape_check(spec, parallelism);
        else if (spec.kind == "coexist") out = run_coexist(spec, parallelism);
        else if (spec.kind == "couple-check") out = run_couple_check(spec, parallelism);
        else if (spec.kind == "brw-speed") out = run_brw_speed(spec, parallelism);
        else if (spec.kind == "effective-count") out = run_effective_count(spec, parallelism);
        else return {1, "unknown kind '" + spec.kind + "'"};
    } catch (const CertificateError& e) {
        return {2, e.what()};
    } catch (const ExplosionGuardError& e) {
        return {3, e.what()};
    } catch (const RejectionGuardError& e) {
        return {3, e.what()};
    } catch (const BrwCapError& e) {
        return {3, e.what()};
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();

    namespace fs = std::filesystem;
    try {
        fs::create_directories(out_dir);
        {
            std::ofstream f(fs::path(out_dir) / "results.csv", std::ios::binary);
            if (!f) throw std::runtime_error("cannot open results.csv");
            std::ostringstream os;
            export_results_csv(out.rows, os);
            f << os.str();
        }
        if (!out.events_jsonl.empty()) {
            std::ofstream f(fs::path(out_dir) / "events.jsonl", std::ios::binary);
            if (!f) throw std::runtime_error("cannot open events.jsonl");
            f << out.events_jsonl;
        }
        if (!out.certificates_csv.empty()) {
            std::ofstream f(fs::path(out_dir) / "certificates.csv", std::ios::binary);
            if (!f) throw std::runtime_error("cannot open certificates.csv");
            f << out.certificates_csv;
        }
        {
            std::ofstream f(fs::path(out_dir) / "manifest.txt", std::ios::binary);
            if (!f) throw std::runtime_error("cannot open manifest.txt");
            f << manifest_text(spec, wall);
        }
    } catch (const std::exception& e) {
        return {4, std::string("I/O failure: ") + e.what()};
    }
    return {out.exit_code, out.message};
}

}  // namespace contgrow
