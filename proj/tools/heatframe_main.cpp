#include "heatframe/heatframe.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace heatframe;

namespace {

FrameContext context_from_config(const RunConfig& cfg, const OperatorModel& op) {
    DyadicParams params;
    if (cfg.auto_range) {
        params = auto_params(cfg.delta, cfg.M, cfg.domain());
    } else {
        params.delta = cfg.delta;
        params.M = cfg.M;
        params.j_min = cfg.j_min;
        params.j_max = cfg.j_max;
    }
    FrameOptions opts;
    opts.contour = ContourQuadrature::make(cfg.contour_nodes, cfg.contour_theta);
    return build_frame_context(op, symbol_from_config(cfg), params, opts);
}

int cmd_build(const std::string& config_path) {
    RunConfig cfg = parse_config(config_path);
    OperatorModel op = build_operator_from_config(cfg);
    auto t0 = std::chrono::steady_clock::now();
    bool warm = spectral_with_cache(cfg, op);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    Json out{{"operator", to_string(op.kind)},
             {"points", op.domain.total_points()},
             {"cache", spectral_cache_path(cfg.cache_dir, op)},
             {"cache_warm", warm},
             {"duration_ms", ms},
             {"config_hash", cfg.hash}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_analyze(const std::string& config_path, const std::string& input,
                const std::string& output, double tol, int max_iter) {
    RunConfig cfg = parse_config(config_path);
    OperatorModel op = build_operator_from_config(cfg);
    spectral_with_cache(cfg, op);
    FrameContext ctx = context_from_config(cfg, op);
    double rho = estimate_R_norm(ctx);
    GridFunction f = read_grid_function(input, cfg.side);
    require_same_domain(f.domain, op.domain, "analyze input");
    FrameCoefficients coeffs = analyze(ctx, f, tol, max_iter);
    write_coefficients_csv(output, coeffs);
    Json out{{"coefficients", output},
             {"cubes", ctx.net.total_cubes()},
             {"r_norm", rho},
             {"delta", ctx.params.delta},
             {"M", ctx.params.M}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_synthesize(const std::string& config_path, const std::string& coeff_path,
                   const std::string& output) {
    RunConfig cfg = parse_config(config_path);
    OperatorModel op = build_operator_from_config(cfg);
    spectral_with_cache(cfg, op);
    FrameContext ctx = context_from_config(cfg, op);
    FrameCoefficients coeffs = read_coefficients_csv(coeff_path, ctx.net);
    GridFunction f = synthesize(ctx, coeffs);
    write_grid_function(output, f);
    std::cout << Json{{"output", output}, {"l2", lp_norm(f, 2.0)}}.dump(2) << "\n";
    return 0;
}

int cmd_search(const std::string& config_path, double target) {
    RunConfig cfg = parse_config(config_path);
    OperatorModel op = build_operator_from_config(cfg);
    spectral_with_cache(cfg, op);
    SearchResult sr = search_params(op, symbol_from_config(cfg),
                                    target > 0.0 ? target : cfg.target_norm);
    Json out{{"delta", sr.delta},
             {"M", sr.M},
             {"achieved_norm", sr.achieved_norm},
             {"achieved", sr.achieved},
             {"j_min", sr.params.j_min},
             {"j_max", sr.params.j_max}};
    std::cout << out.dump(2) << "\n";
    return sr.achieved ? 0 : 1;
}

int cmd_norms(const std::string& config_path, const std::string& which, const std::string& input,
              const std::string& output, const std::string& json_path) {
    RunConfig cfg = parse_config(config_path);
    OperatorModel op = build_operator_from_config(cfg);
    spectral_with_cache(cfg, op);
    GridFunction f = read_grid_function(input, cfg.side);
    require_same_domain(f.domain, op.domain, "norms input");

    GridFunction result = GridFunction::zero(op.domain);
    ConeParams cone = ConeParams::make(op.domain, cfg.cone_points, cfg.cone_aperture);
    if (which == "sl") {
        FrameContext ctx = context_from_config(cfg, op);
        result = square_function_SL(op, ctx.q, f, cone);
    } else if (which == "g1" || which == "g2" || which == "g3" || which == "g4") {
        FrameContext ctx = context_from_config(cfg, op);
        result = g_function(which[1] - '0', ctx, f);
    } else if (which == "radial") {
        result = radial_maximal(op, f, cone.t_nodes);
    } else if (which == "nt") {
        result = nontangential_maximal(op, f, cone);
    } else if (which == "gradnt") {
        ConeParams wide = ConeParams::make(op.domain, cfg.cone_points, 2.0);
        result = gradient_nt_maximal(op, f, wide);
    } else if (which == "hl") {
        result = hl_maximal(f);
    } else {
        throw CLI::ValidationError("--which", "unknown functional '" + which + "'");
    }
    if (!output.empty()) write_grid_function(output, result);
    Json out{{"which", which}, {"l1", lp_norm(result, 1.0)}, {"l2", lp_norm(result, 2.0)}};
    if (!output.empty()) out["output"] = output;
    if (!json_path.empty()) {
        std::ofstream js(json_path, std::ios::binary);
        js << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_hardy(const std::string& config_path, const std::string& suite_name,
              const std::string& report_path) {
    RunConfig cfg = parse_config(config_path);
    if (suite_name != "standard")
        throw CLI::ValidationError("--suite", "unknown suite '" + suite_name + "'");
    OperatorModel lap = build_laplacian(cfg.domain());
    spectral_with_cache(cfg, lap);
    ConeParams cone = ConeParams::make(lap.domain, cfg.cone_points);
    auto suite = suites::standard_suite(cfg, lap);
    MaximalEquivalenceReport rep = maximal_equivalence_report(lap, suite, cone);

    Json records = Json::array();
    for (size_t i = 0; i < rep.records.size(); ++i) {
        const auto& r = rep.records[i];
        records.push_back({{"function", i},
                           {"kind", i < 5 ? "molecule" : "band_limited"},
                           {"radial_l1", r.radial_l1},
                           {"nt_l1", r.nt_l1},
                           {"grad_nt_l1", r.grad_l1},
                           {"nt_over_radial", r.nt_over_radial}});
    }
    Json out{{"records", records},
             {"summary",
              {{"max_nt_over_radial", rep.max_nt_over_radial},
               {"functions", rep.records.size()},
               {"config_hash", cfg.hash}}}};
    if (!report_path.empty()) {
        std::ofstream js(report_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot write " + report_path);
        js << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& suite_name,
               const std::string& report_path, const std::string& csv_dir) {
    RunConfig cfg = parse_config(config_path);
    Report rep = run_suite(cfg, suite_from_string(suite_name));
    for (const auto& sec : rep.sections)
        std::printf("%-28s %s  (%.0f ms)\n", sec.name.c_str(), sec.pass ? "PASS" : "FAIL",
                    sec.duration_ms);
    if (!report_path.empty()) rep.write(report_path);
    if (!csv_dir.empty()) {
        std::filesystem::create_directories(csv_dir);
        for (const auto& sec : rep.sections)
            emit_csv(rep, sec.name, csv_dir + "/" + sec.name + ".csv");
    }
    bool ok = rep.all_pass();
    std::printf("%s\n", ok ? "ALL PASS" : "FAILURES PRESENT");
    return ok ? 0 : 1;
}

int cmd_report(const std::string& input, const std::string& section, const std::string& csv) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot read " + input);
    Json j = Json::parse(in);
    Report rep = Report::from_json(j);
    emit_csv(rep, section, csv);
    std::cout << "wrote " << csv << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heat-semigroup frames: build, analyze, verify"};
    app.require_subcommand(1);

    std::string config_path, input, output, coeffs, which, suite, report_path, csv_dir, section;
    double tol = 1e-8, target = 0.0;
    int max_iter = 200;

    auto* build = app.add_subcommand("build", "assemble and cache the operator spectrum");
    build->add_option("--config", config_path)->required();

    auto* analyze = app.add_subcommand("analyze", "frame analysis of a grid function");
    analyze->add_option("--config", config_path)->required();
    analyze->add_option("--input", input)->required();
    analyze->add_option("--output", output)->default_val("coefficients.csv");
    analyze->add_option("--tol", tol);
    analyze->add_option("--max-iter", max_iter);

    auto* synth = app.add_subcommand("synthesize", "rebuild a grid function from coefficients");
    synth->add_option("--config", config_path)->required();
    synth->add_option("--coeffs", coeffs)->required();
    synth->add_option("--output", output)->default_val("synthesized.hfgf");

    auto* search = app.add_subcommand("search", "search (delta, M) for contraction");
    search->add_option("--config", config_path)->required();
    search->add_option("--target", target);

    auto* norms = app.add_subcommand("norms", "evaluate a square/maximal functional");
    norms->add_option("--config", config_path)->required();
    norms->add_option("--which", which)->required()
        ->check(CLI::IsMember({"sl", "g1", "g2", "g3", "g4", "radial", "nt", "gradnt", "hl"}));
    norms->add_option("--input", input)->required();
    norms->add_option("--output", output);
    norms->add_option("--json", report_path);

    auto* hardy = app.add_subcommand("hardy", "run the Hardy-space test suite");
    hardy->add_option("--config", config_path)->required();
    hardy->add_option("--suite", suite)->default_val("standard");
    hardy->add_option("--report", report_path);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--config", config_path)->required();
    verify->add_option("suite", suite)->required();
    verify->add_option("--report", report_path);
    verify->add_option("--csv-dir", csv_dir);

    auto* report = app.add_subcommand("report", "re-emit a section of a saved report as CSV");
    report->add_option("--input", input)->required();
    report->add_option("--section", section)->required();
    report->add_option("--csv", csv_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(config_path);
        if (analyze->parsed()) return cmd_analyze(config_path, input, output, tol, max_iter);
        if (synth->parsed()) return cmd_synthesize(config_path, coeffs, output);
        if (search->parsed()) return cmd_search(config_path, target);
        if (norms->parsed()) return cmd_norms(config_path, which, input, output, report_path);
        if (hardy->parsed()) return cmd_hardy(config_path, suite, report_path);
        if (verify->parsed()) return cmd_verify(config_path, suite, report_path, csv_dir);
        if (report->parsed()) return cmd_report(input, section, csv_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
