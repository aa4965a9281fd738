#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pistab/analysis.hpp"
#include "test_util.hpp"

#include <fstream>
#include <sstream>

using namespace pistab;

namespace {

ProblemFile load_pf(const std::string& name) {
    return ProblemFile::load(std::string(FIXTURE_DIR) + "/" + name);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("analyze: verdicts and exit codes on the scalar fixtures") {
    AnalysisConfig cfg;
    cfg.d1 = 0;
    cfg.d2 = 0;

    Report stable = analyze(load_pf("ode_stable.json"), cfg);
    CHECK(stable.verdict_name() == "stable-certified");
    CHECK(stable.exit_code() == 0);
    CHECK(stable.to_json()["verdict"] == "stable-certified");

    Report unstable = analyze(load_pf("ode_unstable.json"), cfg);
    CHECK(unstable.verdict_name() == "unknown-infeasible");
    CHECK(unstable.exit_code() == 2);

    // text and JSON report the same verdict
    CHECK(unstable.to_text().find("unknown-infeasible") != std::string::npos);
}

TEST_CASE("analyze: auto-degree escalation records every attempt") {
    AnalysisConfig cfg;
    cfg.d1 = 0;
    cfg.d2 = 0;
    cfg.auto_degree = true;
    cfg.max_degree = 2;
    Report r = analyze(load_pf("ode_unstable.json"), cfg);
    CHECK(r.verdict_name() == "unknown-infeasible");
    REQUIRE(r.degrees_attempted.size() == 3);
    CHECK(r.degrees_attempted.front() == std::pair<int, int>{0, 0});
    CHECK(r.degrees_attempted.back() == std::pair<int, int>{2, 2});
}

TEST_CASE("analyze: invalid configuration and validation failures") {
    AnalysisConfig bad;
    bad.d1 = -1;
    CHECK_THROWS_AS(analyze(load_pf("ode_stable.json"), bad), Error);

    ProblemFile pf = load_pf("toy_bidirectional.json");
    pf.raw["pde"]["Bc"] = "free-free";
    CHECK_THROWS_AS(analyze(pf, AnalysisConfig{}), ParseError);

    nlohmann::json nn = load_pf("toy_bidirectional.json").raw;
    nn["pde"]["Bc"] = {{0, 0, 1, 0}, {0, 0, 0, 1}};
    CHECK_THROWS_AS(analyze(ProblemFile::from_json(nn), AnalysisConfig{}), ValidationError);
}

TEST_CASE("determinism: identical runs produce identical SDP dump bytes") {
    AnalysisConfig cfg;
    cfg.d1 = 1;
    cfg.d2 = 1;
    cfg.post_check_samples = 0;
    cfg.dump_sdp_path = "/tmp/pistab_dump_a.txt";
    analyze(load_pf("heat_actuator.json"), cfg);
    cfg.dump_sdp_path = "/tmp/pistab_dump_b.txt";
    analyze(load_pf("heat_actuator.json"), cfg);
    CHECK(slurp("/tmp/pistab_dump_a.txt") == slurp("/tmp/pistab_dump_b.txt"));
    CHECK(slurp("/tmp/pistab_dump_a.txt").rfind("pistab-sdp 1", 0) == 0);
}

TEST_CASE("certificate export round-trips exactly and revalidates") {
    AnalysisConfig cfg;
    cfg.d1 = 2;
    cfg.d2 = 2;
    cfg.certificate_path = "/tmp/pistab_cert.json";
    ProblemFile pf = load_pf("heat_actuator.json");
    Report r = analyze(pf, cfg);
    REQUIRE(r.verdict_name() == "stable-certified");
    REQUIRE(r.certificate_path == cfg.certificate_path);

    LoadedCertificate lc = load_certificate(cfg.certificate_path);
    REQUIRE(r.verdict.certificate.has_value());
    CHECK(lc.op.P == r.verdict.certificate->P);
    CHECK(lc.op.Q1 == r.verdict.certificate->Q1);
    CHECK(lc.op.S == r.verdict.certificate->S);
    CHECK(lc.op.R1 == r.verdict.certificate->R1);
    CHECK(lc.op.R2 == r.verdict.certificate->R2);
    CHECK(lc.t_lyap == r.verdict.T_lyap);
    CHECK(lc.d1 == 2);

    // reloaded certificate passes the sampled validation
    StabilityVerdict reloaded = r.verdict;
    reloaded.certificate = lc.op;
    reloaded.T_lyap = lc.t_lyap;
    std::mt19937_64 rng(4242);
    std::string why;
    CHECK(certificate_post_check(pf.build(), reloaded, 25, rng, &why));

    // export is refused without a certificate
    StabilityVerdict unknown;
    unknown.status = StabilityVerdict::Status::UnknownInfeasible;
    CHECK_THROWS_AS(export_certificate(unknown, pf.build().interval(), "/tmp/nope.json"), Error);
}

TEST_CASE("sweep: bisection, endpoints and the none-certified path") {
    AnalysisConfig cfg;
    cfg.d1 = 0;
    cfg.d2 = 0;
    ProblemFile pf = load_pf("ode_param.json");

    SweepConfig sc;
    sc.param = "mu";
    sc.lo = 0.0;
    sc.hi = 2.0;
    sc.tol = 0.2;
    Report r = sweep(pf, cfg, sc);
    CHECK(r.mode == "sweep");
    CHECK(!r.none_certified);
    CHECK(r.certified_threshold >= 0.7);
    CHECK(r.certified_threshold < 1.001);
    CHECK(r.exit_code() == 0);
    CHECK(r.to_json()["history"].size() == r.history.size());

    SweepConfig all_bad;
    all_bad.param = "mu";
    all_bad.lo = 1.5;
    all_bad.hi = 2.0;
    Report rb = sweep(pf, cfg, all_bad);
    CHECK(rb.none_certified);
    CHECK(rb.exit_code() == 2);

    SweepConfig all_good;
    all_good.param = "mu";
    all_good.lo = 0.0;
    all_good.hi = 0.5;
    Report rg = sweep(pf, cfg, all_good);
    CHECK(!rg.none_certified);
    CHECK(rg.certified_threshold == 0.5);

    SweepConfig missing;
    missing.param = "lambda";
    missing.lo = 0;
    missing.hi = 1;
    CHECK_THROWS_AS(sweep(pf, cfg, missing), ParseError);
}

TEST_CASE("simulation report carries spectrum and energy ratio") {
    ProblemFile pf = load_pf("heat_dirichlet.json");
    SimulationReport r = run_simulation(pf, 64, 1.0, 1e-3);
    CHECK(std::abs(r.leading_eig_real + 9.8696) < 0.2);
    CHECK(r.energy_ratio < 1.0);
    CHECK(r.to_json()["schema"] == "pistab-simulation/1");

    write_energy_csv(r.trace, "/tmp/pistab_trace.csv");
    std::string csv = slurp("/tmp/pistab_trace.csv");
    CHECK(csv.rfind("t,E\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.trace.time.size()) + 1);
}
