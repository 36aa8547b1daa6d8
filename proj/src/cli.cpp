#include "poseq/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "poseq/edc.hpp"
#include "poseq/errors.hpp"
#include "poseq/io.hpp"
#include "poseq/lasso.hpp"
#include "poseq/quality.hpp"
#include "poseq/simulator.hpp"

namespace poseq::cli {

namespace {

using nlohmann::json;

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

struct SimulateArgs {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& args) {
    SimulatorConfig config =
        args.config_path.empty() ? default_simulator_config() : load_simulator_config(args.config_path);
    if (args.seed) {
        config.seed = *args.seed;
    }
    std::vector<ComparisonRecord> records = simulate_mated(config);
    const std::vector<ComparisonRecord> nonmated = simulate_nonmated_records(config);
    records.insert(records.end(), nonmated.begin(), nonmated.end());
    save_scores(args.out, records);
    std::cout << "records=" << records.size() << "\n";
    return 0;
}

struct FitArgs {
    std::string scores;
    std::string out;
    int degree = 2;
    double lambda = 1e-6;
    // Far above the library default: unstandardized polynomial covariates
    // correlate strongly, and the gram-based sweeps are cheap enough to
    // converge them outright.
    int max_sweeps = 5000000;
    double tolerance = 1e-10;
    bool no_intercept = false;
    bool halved_objective = false;
};

int run_fit(const FitArgs& args) {
    const Dataset dataset = load_scores(args.scores);

    std::vector<PoseAngles> poses;
    std::vector<double> targets;
    for (const ComparisonRecord& rec : dataset.records) {
        if (!rec.mated || !rec.probe_pose) continue;
        poses.push_back(*rec.probe_pose);
        targets.push_back(rec.score);
    }
    if (poses.empty()) {
        throw std::invalid_argument("fit: no mated rows with probe poses in " + args.scores);
    }

    const CovariateSpec spec{args.degree, !args.no_intercept};
    const DesignMatrix design = design_matrix(poses, spec);

    FitOptions options;
    options.lambda = args.lambda;
    options.max_sweeps = args.max_sweeps;
    options.tolerance = args.tolerance;
    options.fit_intercept = spec.include_intercept;
    options.halved_objective = args.halved_objective;

    const LassoModel model = fit(design, targets, options, spec);
    const Calibration cal = calibrate(model, design, poses);
    save_model(args.out, model, cal);

    std::cout << "rows=" << design.rows << "\n";
    std::cout << "terms=" << design.cols << "\n";
    std::cout << "converged=" << (model.fit_stats.converged ? "true" : "false") << "\n";
    std::cout << "sweeps=" << model.fit_stats.iterations << "\n";
    if (design.rows > design.cols + 1) {
        std::cout << "adjusted_r2=" << format_double(adjusted_r2(model, design, targets)) << "\n";
    }
    return 0;
}

struct QualityArgs {
    std::string model;
    std::string poses;
    std::string out;
};

int run_quality(const QualityArgs& args) {
    const LoadedModel loaded = load_model(args.model);
    if (!loaded.calibration) {
        throw CalibrationError(args.model + ": model has no calibration, cannot emit quality");
    }
    const std::vector<PoseRow> rows = load_poses(args.poses);
    std::vector<QualityRow> out;
    out.reserve(rows.size());
    for (const PoseRow& row : rows) {
        out.push_back({row.sample_id, row.pose, iso_fused(row.pose),
                       syp_quality(loaded.model, *loaded.calibration, row.pose)});
    }
    write_quality_csv(args.out, out);
    return 0;
}

struct EvaluateArgs {
    std::string scores;
    std::string metric = "eer";
    double target = 0.01;
    bool by_cell = false;
    std::string out;
};

PoseGrid grid_from_probe_poses(const std::vector<ComparisonRecord>& records) {
    std::set<double> yaws, pitches;
    for (const ComparisonRecord& rec : records) {
        if (!rec.mated) continue;
        if (!rec.probe_pose) {
            throw std::invalid_argument("evaluate: mated record " + rec.probe_id +
                                        " has no probe pose, cannot group by cell");
        }
        yaws.insert(rec.probe_pose->yaw_deg);
        pitches.insert(rec.probe_pose->pitch_deg);
    }
    if (yaws.empty()) {
        throw std::invalid_argument("evaluate: no mated records with probe poses");
    }
    return make_grid(std::vector<double>(yaws.begin(), yaws.end()),
                     std::vector<double>(pitches.begin(), pitches.end()));
}

int run_evaluate(const EvaluateArgs& args) {
    const Dataset dataset = load_scores(args.scores);
    const Metric metric = parse_metric(args.metric);

    if (args.by_cell) {
        if (args.out.empty()) {
            throw std::invalid_argument("evaluate: --by-cell requires --out");
        }
        const PoseGrid grid = grid_from_probe_poses(dataset.records);
        const SurfaceGrid surface =
            surface_grid(dataset.records, dataset.nonmated_scores, grid, metric, args.target);
        write_surface_csv(args.out, surface);
        return 0;
    }

    ScoreSet scores;
    for (const ComparisonRecord& rec : dataset.records) {
        if (rec.mated) scores.mated.push_back(rec.score);
    }
    scores.nonmated = dataset.nonmated_scores;

    double value = 0.0;
    switch (metric) {
        case Metric::Eer: value = eer(scores); break;
        case Metric::FnmrAtFmr: value = fnmr_at_fmr(scores, args.target); break;
        case Metric::FmrAtFnmr: value = fmr_at_fnmr(scores, args.target); break;
    }
    std::cout << format_double(value) << "\n";
    return 0;
}

struct EdcArgs {
    std::string scores;
    std::string quality_column;
    std::string model;
    bool iso = false;
    double fmr_target = 0.01;
    double max_discard = 0.2;
    std::string out;
};

int run_edc(const EdcArgs& args) {
    const int sources = (!args.quality_column.empty() ? 1 : 0) + (!args.model.empty() ? 1 : 0) +
                        (args.iso ? 1 : 0);
    if (sources != 1) {
        throw std::invalid_argument(
            "edc: exactly one of --quality-column, --model, --iso must be given");
    }
    if (!args.quality_column.empty() && args.quality_column != "quality") {
        throw std::invalid_argument("edc: the score schema only carries the 'quality' column pair "
                                    "(ref_quality/probe_quality)");
    }

    Dataset dataset = load_scores(args.scores);
    if (!args.model.empty()) {
        const LoadedModel loaded = load_model(args.model);
        if (!loaded.calibration) {
            throw CalibrationError(args.model + ": model has no calibration, cannot score poses");
        }
        for (ComparisonRecord& rec : dataset.records) {
            if (!rec.mated) continue;
            if (!rec.reference_pose || !rec.probe_pose) {
                throw std::invalid_argument("edc: mated record " + rec.probe_id +
                                            " lacks poses required for model-based quality");
            }
            rec.reference_quality =
                syp_quality(loaded.model, *loaded.calibration, *rec.reference_pose);
            rec.probe_quality = syp_quality(loaded.model, *loaded.calibration, *rec.probe_pose);
        }
    } else if (args.iso) {
        for (ComparisonRecord& rec : dataset.records) {
            if (!rec.mated) continue;
            if (!rec.reference_pose || !rec.probe_pose) {
                throw std::invalid_argument("edc: mated record " + rec.probe_id +
                                            " lacks poses required for the iso baseline");
            }
            rec.reference_quality = iso_fused(*rec.reference_pose);
            rec.probe_quality = iso_fused(*rec.probe_pose);
        }
    }

    const EdcCurve curve =
        edc_curve(dataset.records, dataset.nonmated_scores, args.fmr_target, args.max_discard);
    const double area = pauc(curve, args.max_discard);
    write_edc_csv(args.out, curve);
    write_edc_sidecar(args.out + ".json", curve, area);

    char key[32];
    std::snprintf(key, sizeof(key), "pauc@%.2f", args.max_discard);
    std::cout << "threshold=" << format_double(curve.threshold) << "\n";
    std::cout << key << "=" << format_double(area) << "\n";
    return 0;
}

struct ReannotateArgs {
    std::string estimates;
    std::string apply;
    std::string poses;
    std::string out;
};

int run_reannotate(const ReannotateArgs& args) {
    const bool build_mode = !args.estimates.empty();
    const bool apply_mode = !args.apply.empty();
    if (build_mode == apply_mode) {
        throw std::invalid_argument("reannotate: exactly one of --estimates, --apply must be given");
    }
    if (build_mode) {
        const ReannotationTable table = build_reannotation_table(load_estimates(args.estimates));
        save_reannotation_table(args.out, table);
        std::cout << "entries=" << table.entries().size() << "\n";
        return 0;
    }
    if (args.poses.empty()) {
        throw std::invalid_argument("reannotate: --apply requires --poses");
    }
    const ReannotationTable table = load_reannotation_table(args.apply);
    std::vector<PoseRow> rows = load_poses(args.poses);
    for (PoseRow& row : rows) {
        row.pose = reannotate(table, row.pose);
    }
    save_poses(args.out, rows);
    return 0;
}

}  // namespace

int dispatch(std::vector<std::string> args) {
    CLI::App app{"Head-pose quality toolkit: score simulation, pose-utility regression, "
                 "ISO-style quality scores, and biometric benchmarking"};
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    auto* simulate =
        app.add_subcommand("simulate", "Generate a synthetic comparison-score dataset");
    simulate->add_option("--config", simulate_args.config_path, "Simulator config JSON");
    simulate->add_option("--out", simulate_args.out, "Output score CSV")->required();
    simulate->add_option("--seed", simulate_args.seed, "Override the config seed");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit the pose-utility regression on mated scores");
    fit->add_option("--scores", fit_args.scores, "Score CSV with probe poses")->required();
    fit->add_option("--degree", fit_args.degree, "Polynomial degree")->default_val(2);
    fit->add_option("--lambda", fit_args.lambda, "L1 penalty")->default_val(1e-6);
    fit->add_option("--max-sweeps", fit_args.max_sweeps, "Coordinate-descent sweep cap")
        ->default_val(5000000);
    fit->add_option("--tolerance", fit_args.tolerance, "Convergence tolerance")
        ->default_val(1e-10);
    fit->add_flag("--no-intercept", fit_args.no_intercept, "Do not fit an intercept");
    fit->add_flag("--halved-objective", fit_args.halved_objective,
                  "Interpret lambda under the (1/2N) objective convention");
    fit->add_option("--out", fit_args.out, "Output model JSON")->required();

    QualityArgs quality_args;
    auto* quality = app.add_subcommand("quality", "Emit integer quality scores for poses");
    quality->add_option("--model", quality_args.model, "Model JSON with calibration")->required();
    quality->add_option("--poses", quality_args.poses, "Pose CSV")->required();
    quality->add_option("--out", quality_args.out, "Output quality CSV")->required();

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "Compute biometric error metrics");
    evaluate->add_option("--scores", evaluate_args.scores, "Score CSV")->required();
    evaluate->add_option("--metric", evaluate_args.metric, "eer, fnmr@fmr, or fmr@fnmr")
        ->required();
    evaluate->add_option("--target", evaluate_args.target, "Rate target for the @ metrics")
        ->default_val(0.01);
    evaluate->add_flag("--by-cell", evaluate_args.by_cell,
                       "Per yaw-pitch cell surface instead of one scalar");
    evaluate->add_option("--out", evaluate_args.out, "Surface CSV (required with --by-cell)");

    EdcArgs edc_args;
    auto* edc = app.add_subcommand("edc", "Error-vs-discard curve and partial AUC");
    edc->add_option("--scores", edc_args.scores, "Score CSV")->required();
    edc->add_option("--quality-column", edc_args.quality_column,
                    "Use the file's quality column pair");
    edc->add_option("--model", edc_args.model, "Compute qualities from a model JSON");
    edc->add_flag("--iso", edc_args.iso, "Compute qualities from the ISO cos^2 baseline");
    edc->add_option("--fmr-target", edc_args.fmr_target, "FMR anchoring the fixed threshold")
        ->default_val(0.01);
    edc->add_option("--max-discard", edc_args.max_discard, "Largest discard fraction")
        ->default_val(0.2);
    edc->add_option("--out", edc_args.out, "Curve CSV; sidecar written to <out>.json")->required();

    ReannotateArgs reannotate_args;
    auto* reannotate = app.add_subcommand("reannotate", "Build or apply a pose re-annotation table");
    reannotate->add_option("--estimates", reannotate_args.estimates, "Pose-estimate CSV");
    reannotate->add_option("--apply", reannotate_args.apply, "Re-annotation table JSON");
    reannotate->add_option("--poses", reannotate_args.poses, "Pose CSV to re-annotate");
    reannotate->add_option("--out", reannotate_args.out, "Output path")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (quality->parsed()) return run_quality(quality_args);
        if (evaluate->parsed()) return run_evaluate(evaluate_args);
        if (edc->parsed()) return run_edc(edc_args);
        if (reannotate->parsed()) return run_reannotate(reannotate_args);
        report_error("usage", "no subcommand given");
        return 2;
    } catch (const RowErrors& e) {
        for (const RowError& err : e.errors()) {
            std::cerr << json{{"error", "row"}, {"file", e.path()}, {"line", err.line},
                              {"message", err.message}}
                             .dump()
                      << "\n";
        }
        report_error("rows", e.what());
        return 1;
    } catch (const NotFoundError& e) {
        report_error("not-found", e.what());
        return 1;
    } catch (const FormatError& e) {
        report_error("format", e.what());
        return 1;
    } catch (const CalibrationError& e) {
        report_error("calibration", e.what());
        return 1;
    } catch (const ModelVersionError& e) {
        report_error("incompatible-model", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        report_error("invalid-argument", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 1;
    }
}

}  // namespace poseq::cli
