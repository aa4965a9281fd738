#include "pistab/analysis.hpp"

#include "pistab/serialize.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace pistab {

using nlohmann::json;

void AnalysisConfig::check() const {
    if (d1 < 0 || d2 < 0) throw Error("degrees must be non-negative");
    if (max_degree < std::max(d1, d2)) throw Error("max_degree must not be below the starting degrees");
    if (eps_pos <= 0 || eps_neg <= 0) throw Error("eps values must be positive");
    if (solver_tolerance <= 0) throw Error("solver tolerance must be positive");
    if (solver_max_iterations <= 0) throw Error("solver iteration cap must be positive");
}

std::string Report::verdict_name() const {
    switch (verdict.status) {
        case StabilityVerdict::Status::StableCertified: return "stable-certified";
        case StabilityVerdict::Status::UnknownInfeasible: return "unknown-infeasible";
        case StabilityVerdict::Status::SolverFailure: return "solver-error";
    }
    return "solver-error";
}

int Report::exit_code() const {
    switch (verdict.status) {
        case StabilityVerdict::Status::StableCertified: return 0;
        case StabilityVerdict::Status::UnknownInfeasible: return 2;
        case StabilityVerdict::Status::SolverFailure: return 4;
    }
    return 4;
}

json Report::to_json() const {
    json j;
    j["schema"] = "pistab-report/1";
    j["mode"] = mode;
    j["verdict"] = verdict_name();
    j["degrees"] = {{"d1", verdict.d1},
                    {"d2", verdict.d2},
                    {"d1_neg", verdict.d1_neg},
                    {"d2_neg", verdict.d2_neg}};
    json attempted = json::array();
    for (auto [a, b] : degrees_attempted) attempted.push_back({a, b});
    j["degrees_attempted"] = attempted;
    j["eps"] = {{"pos", to_string(verdict.eps_pos)}, {"neg", to_string(verdict.eps_neg)}};
    j["solver"] = {{"iterations", verdict.iterations},
                   {"eq_residual", verdict.eq_residual},
                   {"detail", verdict.solver_detail}};
    j["seconds"] = seconds;
    if (!certificate_path.empty()) j["certificate_path"] = certificate_path;
    if (!dump_path.empty()) j["sdp_dump_path"] = dump_path;
    if (mode == "sweep") {
        j["param"] = param;
        j["none_certified"] = none_certified;
        if (!none_certified) j["certified_threshold"] = certified_threshold;
        j["tolerance"] = sweep_tol;
        json h = json::array();
        for (const auto& p : history) h.push_back({{"value", p.value}, {"certified", p.certified}});
        j["history"] = h;
    }
    return j;
}

std::string Report::to_text() const {
    std::ostringstream os;
    if (mode == "analyze") {
        os << "verdict: " << verdict_name() << "\n";
        os << "degrees: d1=" << verdict.d1 << " d2=" << verdict.d2 << " (negativity side " << verdict.d1_neg
           << "," << verdict.d2_neg << ")\n";
        if (degrees_attempted.size() > 1) {
            os << "attempted:";
            for (auto [a, b] : degrees_attempted) os << " (" << a << "," << b << ")";
            os << "\n";
        }
        os << "solver: " << verdict.solver_detail << " [" << verdict.iterations
           << " iterations, residual " << verdict.eq_residual << "]\n";
        if (!certificate_path.empty()) os << "certificate: " << certificate_path << "\n";
        if (!dump_path.empty()) os << "sdp dump: " << dump_path << "\n";
    } else {
        os << "sweep over " << param << ": ";
        if (none_certified)
            os << "none certified\n";
        else
            os << "largest certified value " << certified_threshold << " (tolerance " << sweep_tol << ")\n";
        for (const auto& p : history)
            os << "  " << param << " = " << p.value << ": " << (p.certified ? "certified" : "not certified")
               << "\n";
    }
    os << "elapsed: " << seconds << " s\n";
    return os.str();
}

namespace {

StabilityVerdict solve_once(const CoupledSystem& sys, const AnalysisConfig& cfg, int d1, int d2,
                            std::string* dump_path) {
    AssemblyOptions opts;
    opts.d1 = d1;
    opts.d2 = d2;
    opts.d1_neg = cfg.d1_neg;
    opts.d2_neg = cfg.d2_neg;
    opts.eps_pos = cfg.eps_pos;
    opts.eps_neg = cfg.eps_neg;

    if (dump_path && !cfg.dump_sdp_path.empty()) {
        AssembledSdp assembled = assemble_sdp(sys, opts);
        dump_sdp_file(assembled.problem, cfg.dump_sdp_path);
        *dump_path = cfg.dump_sdp_path;
    }

    AdmmOptions solver_opts;
    solver_opts.max_iterations = cfg.solver_max_iterations;
    solver_opts.eq_tolerance = cfg.solver_tolerance;
    solver_opts.gap_tolerance = cfg.solver_tolerance;
    solver_opts.time_budget_seconds = cfg.timeout_seconds;
    AdmmSolver solver(solver_opts);
    StabilityVerdict verdict = solve_stability(sys, opts, solver);

    // Exact sampled validation guards the verdict against solver tolerance:
    // a candidate that fails is reported as not certified, never as stable.
    if (verdict.certified() && cfg.post_check_samples > 0) {
        std::mt19937_64 rng(0x5153ABu);
        std::string why;
        if (!certificate_post_check(sys, verdict, cfg.post_check_samples, rng, &why)) {
            verdict.status = StabilityVerdict::Status::UnknownInfeasible;
            verdict.certificate.reset();
            verdict.solver_detail += "; certificate rejected by exact post-check (" + why + ")";
        }
    }
    return verdict;
}

}  // namespace

Report analyze(const ProblemFile& pf, const AnalysisConfig& cfg,
               const std::map<std::string, Rational>& overrides) {
    cfg.check();
    auto t0 = std::chrono::steady_clock::now();
    CoupledSystem sys = pf.build(overrides);

    ValidationReport vr = validate(sys);
    if (!vr.ok) {
        std::string why = "system fails validation:";
        for (const auto& f : vr.failures) why += "\n  - " + f;
        throw ValidationError(why);
    }

    Report report;
    report.mode = "analyze";
    int d1 = cfg.d1, d2 = cfg.d2;
    for (;;) {
        report.degrees_attempted.emplace_back(d1, d2);
        report.verdict = solve_once(sys, cfg, d1, d2, &report.dump_path);
        bool retry = cfg.auto_degree &&
                     report.verdict.status == StabilityVerdict::Status::UnknownInfeasible &&
                     std::max(d1, d2) < cfg.max_degree;
        if (!retry) break;
        ++d1;
        ++d2;
    }

    if (report.verdict.certified() && !cfg.certificate_path.empty()) {
        export_certificate(report.verdict, sys.interval(), cfg.certificate_path);
        report.certificate_path = cfg.certificate_path;
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

Report sweep(const ProblemFile& pf, const AnalysisConfig& cfg, const SweepConfig& sc) {
    cfg.check();
    if (sc.param.empty()) throw Error("sweep needs a parameter name");
    if (!pf.params.count(sc.param))
        throw ParseError("parameter '" + sc.param + "' is not declared in the problem file");
    if (!(sc.lo < sc.hi)) throw Error("sweep range must satisfy lo < hi");
    if (sc.tol <= 0) throw Error("sweep tolerance must be positive");

    auto t0 = std::chrono::steady_clock::now();
    Report report;
    report.mode = "sweep";
    report.param = sc.param;
    report.sweep_tol = sc.tol;

    AnalysisConfig probe_cfg = cfg;
    probe_cfg.dump_sdp_path.clear();
    probe_cfg.certificate_path.clear();

    auto probe = [&](double value) {
        Report r = analyze(pf, probe_cfg, {{sc.param, rational_from_double(value)}});
        if (r.verdict.status == StabilityVerdict::Status::SolverFailure)
            throw SolverError("solver failure at " + sc.param + " = " + std::to_string(value) + ": " +
                              r.verdict.solver_detail);
        bool certified = r.verdict.certified();
        report.history.push_back({value, certified});
        if (certified) report.verdict = r.verdict;
        // monotonicity audit over everything observed so far
        for (const auto& pa : report.history)
            for (const auto& pb : report.history)
                if (pa.certified && !pb.certified && pb.value < pa.value) {
                    std::ostringstream os;
                    os << "non-monotone feasibility: " << sc.param << " = " << pa.value
                       << " certified but " << pb.value << " was not";
                    throw SolverError(os.str());
                }
        return certified;
    };

    double lo = sc.lo, hi = sc.hi;
    if (!probe(lo)) {
        report.none_certified = true;
        report.verdict.status = StabilityVerdict::Status::UnknownInfeasible;
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }
    if (probe(hi)) {
        report.certified_threshold = hi;
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }
    while (hi - lo > sc.tol) {
        double mid = 0.5 * (lo + hi);
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    report.certified_threshold = lo;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void export_certificate(const StabilityVerdict& verdict, const Interval& iv, const std::string& path) {
    if (!verdict.certified() || !verdict.certificate)
        throw Error("cannot export a certificate from a non-certified verdict");
    (void)iv;
    json j;
    j["schema"] = "pistab-certificate/1";
    j["operator"] = pi_to_json(*verdict.certificate);
    json t_rows = json::array();
    for (int i = 0; i < verdict.T_lyap.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < verdict.T_lyap.cols(); ++k) row.push_back(to_string(verdict.T_lyap.at(i, k)));
        t_rows.push_back(std::move(row));
    }
    j["T"] = std::move(t_rows);
    j["config"] = {{"d1", verdict.d1},
                   {"d2", verdict.d2},
                   {"d1_neg", verdict.d1_neg},
                   {"d2_neg", verdict.d2_neg},
                   {"eps_pos", to_string(verdict.eps_pos)},
                   {"eps_neg", to_string(verdict.eps_neg)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write certificate to '" + path + "'");
    out << j.dump(2) << "\n";
}

LoadedCertificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open certificate '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
    }
    if (j.value("schema", "") != "pistab-certificate/1")
        throw ParseError("unrecognized certificate schema");
    LoadedCertificate lc;
    lc.op = pi_from_json(j.at("operator"));
    const json& t = j.at("T");
    int n = static_cast<int>(t.size());
    lc.t_lyap = RatMat(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            lc.t_lyap.at(i, k) = rational_from_string(t.at(i).at(k).get<std::string>());
    lc.d1 = j.at("config").at("d1").get<int>();
    lc.d2 = j.at("config").at("d2").get<int>();
    lc.eps_pos = rational_from_string(j.at("config").at("eps_pos").get<std::string>());
    return lc;
}

json SimulationReport::to_json() const {
    return json{{"schema", "pistab-simulation/1"},
                {"leading_eig_real", leading_eig_real},
                {"energy_ratio", energy_ratio}};
}

SimulationReport run_simulation(const ProblemFile& pf, int grid, double t_final, double dt,
                                const std::map<std::string, Rational>& overrides) {
    CoupledSystem sys = pf.build(overrides);
    Discretization d = semidiscretize(sys, grid);
    if (dt <= 0) {
        double width = to_double(sys.interval().b) - to_double(sys.interval().a);
        dt = 1e-3 * width * width;
    }
    SimulationReport report;
    report.leading_eig_real = d.leading_eigenvalue_real();
    report.trace =
        integrate_energy(d, default_ode_init(d), default_pde_init(d, sys.interval()), t_final, dt);
    report.energy_ratio = report.trace.ratio();
    return report;
}

void write_energy_csv(const EnergyTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV to '" + path + "'");
    out << "t,E\n";
    char buf[64];
    for (size_t i = 0; i < trace.time.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", trace.time[i], trace.energy[i]);
        out << buf;
    }
}

}  // namespace pistab
