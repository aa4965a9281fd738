// pistab command line: exponential-stability certification of PDE-ODE
// interconnections plus a finite-difference cross-check.
//
// Exit codes: 0 stable-certified, 2 unknown-infeasible, 3 input error,
// 4 solver error.

#include "pistab/analysis.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitUnknown = 2;
constexpr int kExitInput = 3;
constexpr int kExitSolver = 4;

struct CommonOpts {
    int d1 = 2, d2 = 2;
    int d1_neg = -1, d2_neg = -1;
    double eps = -1.0;
    double eps_pos = -1.0, eps_neg = -1.0;
    bool auto_degree = false;
    int max_degree = 6;
    int max_iters = 150000;
    double tol = 1e-8;
    double timeout = 0.0;
    bool json_out = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--d1", d1, "univariate multiplier degree");
        cmd->add_option("--d2", d2, "bivariate kernel degree");
        cmd->add_option("--d1-neg", d1_neg, "negativity-side univariate degree (default: derived)");
        cmd->add_option("--d2-neg", d2_neg, "negativity-side bivariate degree (default: derived)");
        cmd->add_option("--eps", eps, "coercivity margin for both constraints (default 1e-4)");
        cmd->add_option("--eps-pos", eps_pos, "positivity-side margin override");
        cmd->add_option("--eps-neg", eps_neg, "negativity-side margin override");
        cmd->add_flag("--auto-degree", auto_degree, "escalate degrees until certified or capped");
        cmd->add_option("--max-degree", max_degree, "degree cap for --auto-degree");
        cmd->add_option("--max-iters", max_iters, "solver iteration cap");
        cmd->add_option("--tol", tol, "solver feasibility tolerance");
        cmd->add_option("--timeout", timeout, "solver wall-clock budget in seconds (0 = none)");
        cmd->add_flag("--json", json_out, "machine-readable output");
    }

    pistab::AnalysisConfig to_config() const {
        pistab::AnalysisConfig cfg;
        cfg.d1 = d1;
        cfg.d2 = d2;
        cfg.d1_neg = d1_neg;
        cfg.d2_neg = d2_neg;
        auto to_rat = [](double v) { return pistab::rational_from_double(v); };
        if (eps > 0) cfg.eps_pos = cfg.eps_neg = to_rat(eps);
        if (eps_pos > 0) cfg.eps_pos = to_rat(eps_pos);
        if (eps_neg > 0) cfg.eps_neg = to_rat(eps_neg);
        cfg.auto_degree = auto_degree;
        cfg.max_degree = max_degree;
        cfg.solver_max_iterations = max_iters;
        cfg.solver_tolerance = tol;
        cfg.timeout_seconds = timeout;
        return cfg;
    }
};

int emit(const pistab::Report& report, bool json_out) {
    if (json_out)
        std::cout << report.to_json().dump(2) << std::endl;
    else
        std::cout << report.to_text();
    return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability analysis of 1-D PDE / ODE interconnections"};
    app.require_subcommand(1);

    std::string file;
    CommonOpts common;
    std::string dump_path, cert_path;

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "decide exponential stability of a problem file");
    analyze_cmd->add_option("file", file, "problem JSON file")->required();
    common.attach(analyze_cmd);
    analyze_cmd->add_option("--dump-sdp", dump_path, "write the assembled SDP in sparse text form");
    analyze_cmd->add_option("--cert", cert_path, "export the Lyapunov certificate JSON");

    std::string param;
    std::string range;
    double sweep_tol = 0.05;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "bisect a scalar parameter for the certified range");
    sweep_cmd->add_option("file", file, "problem JSON file")->required();
    sweep_cmd->add_option("--param", param, "parameter name declared in the file")->required();
    sweep_cmd->add_option("--range", range, "LO,HI bisection bracket")->required();
    sweep_cmd->add_option("--tol", sweep_tol, "bisection tolerance on the parameter");
    common.attach(sweep_cmd);

    int grid = 64;
    double t_final = 10.0, dt = 0.0;
    std::string csv_path;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "finite-difference energy trace and spectrum check");
    sim_cmd->add_option("file", file, "problem JSON file")->required();
    sim_cmd->add_option("--grid", grid, "number of interior grid nodes");
    sim_cmd->add_option("--tfinal", t_final, "integration horizon");
    sim_cmd->add_option("--dt", dt, "time step (default 1e-3 * width^2)");
    sim_cmd->add_option("--csv", csv_path, "write the (t, E) trace as CSV");
    bool sim_json = false;
    sim_cmd->add_flag("--json", sim_json, "machine-readable output (always JSON summary)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_cmd->parsed()) {
            pistab::AnalysisConfig cfg = common.to_config();
            cfg.dump_sdp_path = dump_path;
            cfg.certificate_path = cert_path;
            pistab::ProblemFile pf = pistab::ProblemFile::load(file);
            return emit(pistab::analyze(pf, cfg), common.json_out);
        }
        if (sweep_cmd->parsed()) {
            pistab::SweepConfig sc;
            sc.param = param;
            sc.tol = sweep_tol;
            auto comma = range.find(',');
            if (comma == std::string::npos) throw pistab::ParseError("--range expects LO,HI");
            sc.lo = std::stod(range.substr(0, comma));
            sc.hi = std::stod(range.substr(comma + 1));
            pistab::ProblemFile pf = pistab::ProblemFile::load(file);
            return emit(pistab::sweep(pf, common.to_config(), sc), common.json_out);
        }
        // simulate
        pistab::ProblemFile pf = pistab::ProblemFile::load(file);
        pistab::SimulationReport report = pistab::run_simulation(pf, grid, t_final, dt);
        if (!csv_path.empty()) pistab::write_energy_csv(report.trace, csv_path);
        std::cout << report.to_json().dump(2) << std::endl;
        return 0;
    } catch (const pistab::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pistab::ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pistab::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    (void)kExitUnknown;
}
