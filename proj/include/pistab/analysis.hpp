#pragma once

// End-to-end orchestration: parse -> validate -> lift -> assemble -> solve,
// with optional degree escalation, parameter bisection, certificate export
// and machine-readable reports.

#include "pistab/lmi.hpp"
#include "pistab/simulate.hpp"

namespace pistab {

struct AnalysisConfig {
    int d1 = 2, d2 = 2;
    int d1_neg = -1, d2_neg = -1;  // -1: derive from the derivative operator
    Rational eps_pos = rat(1, 10000);
    Rational eps_neg = rat(1, 10000);
    bool auto_degree = false;
    int max_degree = 6;
    int solver_max_iterations = 150000;
    double solver_tolerance = 1e-8;
    double timeout_seconds = 0.0;    // per solve; 0 = unlimited
    int post_check_samples = 12;     // exact certificate check before reporting; 0 disables
    std::string dump_sdp_path;       // write the assembled problem here
    std::string certificate_path;    // export the certificate here when certified

    void check() const;
};

struct SweepConfig {
    std::string param;
    double lo = 0.0, hi = 0.0;
    double tol = 0.05;
};

struct SweepProbe {
    double value = 0.0;
    bool certified = false;
};

struct Report {
    std::string mode;  // "analyze" or "sweep"
    StabilityVerdict verdict;
    double seconds = 0.0;
    std::vector<std::pair<int, int>> degrees_attempted;
    std::string certificate_path;
    std::string dump_path;

    // sweep
    std::string param;
    bool none_certified = false;
    double certified_threshold = 0.0;
    double sweep_tol = 0.0;
    std::vector<SweepProbe> history;

    std::string verdict_name() const;
    int exit_code() const;  // 0 certified, 2 unknown
    nlohmann::json to_json() const;
    std::string to_text() const;
};

Report analyze(const ProblemFile& pf, const AnalysisConfig& cfg,
               const std::map<std::string, Rational>& overrides = {});

// Bisection for the largest certified parameter value; assumes monotone
// feasibility and aborts with both witnesses when the probes contradict it.
Report sweep(const ProblemFile& pf, const AnalysisConfig& cfg, const SweepConfig& sc);

// Certificate files: {schema, operator, T, config}; exact rational entries,
// so reload is bit-exact. Throws on non-certified verdicts.
void export_certificate(const StabilityVerdict& verdict, const Interval& iv, const std::string& path);
struct LoadedCertificate {
    PiOpQ op;
    RatMat t_lyap;
    int d1 = 0, d2 = 0;
    Rational eps_pos;
};
LoadedCertificate load_certificate(const std::string& path);

struct SimulationReport {
    double leading_eig_real = 0.0;
    double energy_ratio = 0.0;
    EnergyTrace trace;
    nlohmann::json to_json() const;
};

SimulationReport run_simulation(const ProblemFile& pf, int grid, double t_final, double dt,
                                const std::map<std::string, Rational>& overrides = {});

void write_energy_csv(const EnergyTrace& trace, const std::string& path);

}  // namespace pistab
