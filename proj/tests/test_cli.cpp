#include "ddehopf/cli.hpp"
#include "ddehopf/equilibria.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ddehopf;
using namespace ddehopf::cli;

namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try
    {
        fn();
    }
    catch (Error const& e)
    {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

class TempDir
{
public:
    TempDir() : path_(fs::temp_directory_path() / ("ddehopf-cli-" + std::to_string(::getpid())))
    {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path file(std::string const& name, std::string const& content = {}) const
    {
        auto const p = path_ / name;
        if (!content.empty())
            std::ofstream{p} << content;
        return p;
    }

private:
    fs::path path_;
};

std::string slurp(fs::path const& p)
{
    std::ifstream in{p};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run
{
    int code = -1;
    std::string out;
};

// runs the installed binary with stdout captured into a file
Run run_cli(std::string const& args, TempDir const& tmp)
{
    auto const out = tmp.file("stdout.txt");
    std::string const cmd = std::string{DDEHOPF_CLI_PATH} + " " + args + " > " + out.string() + " 2>/dev/null";
    int const status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::vector<std::string> lines(std::string const& text)
{
    std::vector<std::string> out;
    std::istringstream in{text};
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

constexpr char const* kSisExpModel = R"(# SIS model with exponential behavioral response
[constants]
one = 1

[model]
name = sis-exp-file
rhs = -x + lam*exp(-mu*xd)*x*(one - x)
tau = 10
equilibrium.residual = exp(mu*x) - lam*(1 - x)
equilibrium.lower = 1e-12
equilibrium.upper = 1 - 1/lam - 1e-12
)";

} // namespace

TEST(ExitCodes, Mapping)
{
    EXPECT_EQ(exit_code_for(ErrorKind::NonConvergence), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::LeftDomain), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::DegenerateBeyondScope), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::BlowUp), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::InvalidConfig), 64);
    EXPECT_EQ(exit_code_for(ErrorKind::Syntax), 64);
}

TEST(Ini, SectionsCommentsAndErrors)
{
    auto const ini = parse_ini("# comment\n; also a comment\n[run]\nmodel = sis-exp\n\n[sim]\nstep=0.1\n", "t.ini");
    EXPECT_EQ(ini.at("run").at("model").text, "sis-exp");
    EXPECT_EQ(ini.at("run").at("model").line, 4);
    EXPECT_EQ(ini.at("sim").at("step").text, "0.1");

    EXPECT_EQ(kind_of([] { parse_ini("[run]\nmodel = a\nmodel = b\n", "t.ini"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_ini("[run\n", "t.ini"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_ini("[run]\njust text\n", "t.ini"); }), ErrorKind::InvalidConfig);
    try
    {
        parse_ini("[run]\nmodel = a\nmodel = b\n", "t.ini");
    }
    catch (Error const& e)
    {
        EXPECT_NE(std::string{e.what()}.find("t.ini:3"), std::string::npos) << e.what();
    }
}

TEST(Ini, ModelFileMatchesBuiltin)
{
    TempDir tmp;
    auto const path = tmp.file("sis-exp.ini", kSisExpModel);
    auto const m = resolve_model(path.string());
    EXPECT_EQ(m.name(), "sis-exp-file");
    auto const a = linearize(m, 2.1, 1.7);
    auto const b = linearize(sis_exp(), 2.1, 1.7);
    EXPECT_NEAR(a.ybar, b.ybar, 1e-14);
    EXPECT_NEAR(a.beta_lamlam, b.beta_lamlam, 1e-12);
    EXPECT_EQ(kind_of([] { resolve_model("no-such-model"); }), ErrorKind::InvalidConfig);
}

TEST(Ini, ModelErrors)
{
    EXPECT_EQ(kind_of([] { model_from_ini(parse_ini("[model]\nrhs = -x\ntau = 1\n", "m"), "m"); }),
              ErrorKind::InvalidModel);
    EXPECT_EQ(kind_of([] { model_from_ini(parse_ini("[model]\nrhs = -x +\ntau = 1\nequilibrium = 0\n", "m"), "m"); }),
              ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { model_from_ini(parse_ini("[model]\nrhs = -x\ntau = 0\nequilibrium = 0\n", "m"), "m"); }),
              ErrorKind::InvalidModel);
    EXPECT_EQ(kind_of([] { model_from_ini(parse_ini("[model]\nrhs = -x\ntau = 1\nequilibrium = 0\ncolor = red\n", "m"), "m"); }),
              ErrorKind::InvalidConfig);
}

TEST(Config, FileValuesAndActiveSection)
{
    TempDir tmp;
    auto const path = tmp.file("run.ini", "[run]\nmodel = sis-inverse\nworkers = 2\n\n[sim]\nstep = 0.1\n"
                                          "history = 0.3\n\n[analyze]\nguess = 1.8, 2.6\n\n[sweep]\nmu = 2.7\n"
                                          "lam_range = 1.6:2.0:0.01\n");
    RunConfig cfg;
    load_config(path.string(), cfg, "sweep");
    EXPECT_EQ(cfg.model, "sis-inverse");
    EXPECT_EQ(cfg.workers, 2);
    EXPECT_EQ(cfg.sim.step, 0.1);
    ASSERT_TRUE(std::holds_alternative<ConstantHistory>(cfg.sim.history));
    EXPECT_EQ(std::get<ConstantHistory>(cfg.sim.history).value, 0.3);
    EXPECT_EQ(cfg.mu, 2.7);
    ASSERT_TRUE(cfg.lam_range.has_value());
    EXPECT_EQ(cfg.lam_range->step, 0.01);
    EXPECT_FALSE(cfg.guess.has_value());

    RunConfig other;
    load_config(path.string(), other, "analyze");
    ASSERT_TRUE(other.guess.has_value());
    EXPECT_EQ((*other.guess)[1], 2.6);
    EXPECT_FALSE(other.mu.has_value());
}

TEST(Config, UnknownEntriesAreRejected)
{
    TempDir tmp;
    RunConfig cfg;
    auto const a = tmp.file("a.ini", "[run]\nmodle = sis-exp\n");
    EXPECT_EQ(kind_of([&] { load_config(a.string(), cfg, "analyze"); }), ErrorKind::InvalidConfig);
    auto const b = tmp.file("b.ini", "[plot]\nx = 1\n");
    EXPECT_EQ(kind_of([&] { load_config(b.string(), cfg, "analyze"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([&] { load_config((tmp.file("missing.ini")).string(), cfg, "analyze"); }), ErrorKind::Io);
}

TEST(Config, ModelSourceMustBeUnique)
{
    RunConfig cfg;
    EXPECT_EQ(kind_of([&] { (void)cfg.model_spec(); }), ErrorKind::InvalidConfig);
    cfg.model = "sis-exp";
    cfg.tau = 5.0;
    EXPECT_EQ(cfg.model_spec().tau(), 5.0);
    cfg.inline_model = sis_inverse();
    EXPECT_EQ(kind_of([&] { (void)cfg.model_spec(); }), ErrorKind::InvalidConfig);
}

TEST(Parsing, RangesPairsNumbers)
{
    auto const r = parse_range("1.6:2.0:0.01", true);
    EXPECT_EQ(r.lo, 1.6);
    EXPECT_EQ(r.hi, 2.0);
    EXPECT_EQ(r.step, 0.01);
    EXPECT_EQ(kind_of([] { parse_range("2:1", false); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_range("1:1", false); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_range("1:2", true); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_range("1:2:0", true); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(parse_pair("1.8,2.6")[0], 1.8);
    EXPECT_EQ(kind_of([] { parse_pair("1.8"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(parse_number(" 2.5e-3 ", "v"), 2.5e-3);
    EXPECT_EQ(kind_of([] { parse_number("2,5", "v"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([] { parse_number("nan", "v"); }), ErrorKind::InvalidConfig);
}

TEST(Output, DoublesRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 1.784019249742, 0.0})
    {
        auto const s = format_double(v);
        EXPECT_EQ(std::stod(s), v) << s;
        EXPECT_EQ(s.find(','), std::string::npos);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Output, SweepCsvLayout)
{
    SweepRecord eq;
    eq.lam = 1.5;
    eq.mu = 2.61;
    eq.summary.outcome = Outcome::Equilibrium;
    eq.summary.y_eq = 0.1;
    SweepRecord osc;
    osc.lam = 1.8;
    osc.mu = 2.61;
    osc.summary.outcome = Outcome::Oscillation;
    osc.summary.y_min = 0.1;
    osc.summary.y_max = 0.2;
    osc.summary.period = 25.0;
    SweepRecord err;
    err.lam = 1.9;
    err.mu = 2.61;
    err.summary.outcome = Outcome::Error;
    err.error = "boom";
    std::vector<SweepRecord> const rs{eq, osc, err};
    std::ostringstream os;
    write_sweep_csv(rs, os);
    auto const l = lines(os.str());
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "lam,mu,outcome,y_eq,y_min,y_max,period");
    EXPECT_EQ(l[1], "1.5,2.61,equilibrium,0.1,,,");
    EXPECT_EQ(l[2], "1.8,2.61,oscillation,,0.1,0.2,25");
    EXPECT_EQ(l[3], "1.9,2.61,error,,,,");
}

TEST(Analyze, ReportAndExitCodes)
{
    RunConfig cfg;
    cfg.model = "sis-inverse";
    std::ostringstream out, err;
    EXPECT_EQ(cmd_analyze(cfg, out, err), 64);

    cfg.guess = std::array{1.8, 2.6};
    std::ostringstream out2, err2;
    EXPECT_EQ(cmd_analyze(cfg, out2, err2), 0);
    auto const text = out2.str();
    EXPECT_NE(text.find("[degeneracy-report]"), std::string::npos);
    EXPECT_NE(text.find("lam_star = 1.784"), std::string::npos);
    EXPECT_NE(text.find("epsilon = +1"), std::string::npos);
    EXPECT_NE(text.find("K2 = unavailable"), std::string::npos);

    cfg.model = "sis-exp";
    cfg.guess = std::array{2.1, 1.7};
    std::ostringstream out3, err3;
    EXPECT_EQ(cmd_analyze(cfg, out3, err3), 0);
    EXPECT_NE(out3.str().find("mu_star = 1.6617"), std::string::npos);
}

TEST(Analyze, NonConvergenceExitCode)
{
    RunConfig cfg;
    cfg.model = "sis-inverse";
    cfg.guess = std::array{1.1, 0.2};  // beta^2 < alpha^2 here: no Hopf curve to be tangent to
    std::ostringstream out, err;
    EXPECT_EQ(cmd_analyze(cfg, out, err), 2);
    EXPECT_NE(err.str().find("error:"), std::string::npos);
}

TEST(HopfCurve, RowsAndSingularPoints)
{
    RunConfig cfg;
    cfg.model = "sis-inverse";
    cfg.tau = 1.0;
    cfg.no_header = true;
    cfg.omega_range = parse_range("0:3.141592653589793", false);
    cfg.points = 100;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_hopf_curve(cfg, out, err), 0);
    auto const l = lines(out.str());
    ASSERT_EQ(l.size(), 101u);
    EXPECT_EQ(l[0], "omega,alpha,beta");
    for (std::size_t i = 1; i < l.size(); ++i)
    {
        double w = 0, a = 0, b = 0;
        ASSERT_EQ(std::sscanf(l[i].c_str(), "%lf,%lf,%lf", &w, &a, &b), 3);
        EXPECT_LT(std::abs(w * w - (b * b - a * a)), 1e-10);
        EXPECT_LT(std::abs(char_eval(a, b, 1.0, Complex{0.0, w})), 1e-10);
    }

    cfg.points = 99;
    std::ostringstream mid, err2;
    ASSERT_EQ(cmd_hopf_curve(cfg, mid, err2), 0);
    auto const m = lines(mid.str());
    double w = 0, a = 0, b = 0;
    ASSERT_EQ(std::sscanf(m[50].c_str(), "%lf,%lf,%lf", &w, &a, &b), 3);
    EXPECT_NEAR(w, 1.5707963267948966, 1e-15);
    EXPECT_NEAR(a, 0.0, 1e-15);
    EXPECT_NEAR(b, -1.5707963267948966, 1e-15);

    cfg.omega_range = parse_range("0:6.283185307179586", false);
    cfg.points = 1;
    std::ostringstream skip, err3;
    ASSERT_EQ(cmd_hopf_curve(cfg, skip, err3), 0);
    EXPECT_NE(skip.str().find("# skipped omega="), std::string::npos);
}

TEST(HopfCurve, MultiLobeShapeAtTau5)
{
    // lobes between consecutive zeros of sin(5 omega) alternate in the sign of beta
    RunConfig cfg;
    cfg.model = "sis-inverse";
    cfg.tau = 5.0;
    cfg.no_header = true;
    cfg.omega_range = parse_range("0:1.8849555921538759", false);  // three lobes
    cfg.points = 599;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_hopf_curve(cfg, out, err), 0);
    std::vector<std::pair<double, double>> rows;
    for (auto const& l : lines(out.str()))
    {
        double w = 0, a = 0, b = 0;
        if (std::sscanf(l.c_str(), "%lf,%lf,%lf", &w, &a, &b) == 3)
            rows.emplace_back(w, b);
    }
    int sign_changes = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        sign_changes += (rows[i].second > 0) != (rows[i - 1].second > 0);
    EXPECT_EQ(sign_changes, 2);
    // the first lobe runs from (1/tau, -1/tau) to beta -> -infinity
    for (std::size_t i = 1; i < rows.size() && rows[i].first < 0.6; ++i)
        EXPECT_LT(rows[i].second, rows[i - 1].second);
}

TEST(Simulate, WritesTrajectoryCsv)
{
    TempDir tmp;
    RunConfig cfg;
    cfg.model = "sis-exp";
    cfg.lam = 2.14;
    cfg.mu = 1.662;
    cfg.sim.settle_max = 0.0;
    cfg.out = tmp.file("traj.csv").string();
    cfg.no_header = true;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_simulate(cfg, out, err), 0);
    EXPECT_NE(out.str().find("oscillation"), std::string::npos);
    auto const l = lines(slurp(cfg.out));
    EXPECT_EQ(l[0], "t,x");
    EXPECT_EQ(l.size(), 10002u);
}

TEST(Simulate, BlowUpExitCode)
{
    TempDir tmp;
    auto const model = tmp.file("growth.ini", "[model]\nrhs = x\ntau = 1\nequilibrium = 0\n");
    RunConfig cfg;
    cfg.model = model.string();
    cfg.lam = 0.0;
    cfg.mu = 0.0;
    cfg.sim.step = 0.02;
    cfg.sim.history = ConstantHistory{1.0};
    std::ostringstream out, err;
    EXPECT_EQ(cmd_simulate(cfg, out, err), 4);
}

TEST(Verify, MutationAndTightTolerance)
{
    VerifyOptions base;
    auto const checks = run_verify(base);
    auto find = [](auto const& cs, std::string const& name) {
        for (auto const& c : cs)
            if (c.name == name)
                return c;
        ADD_FAILURE() << "missing check " << name;
        return VerifyCheck{};
    };
    EXPECT_TRUE(find(checks, "k1-closed-vs-operator-psi-without-tau").pass);
    EXPECT_TRUE(find(checks, "sigma4-two-path").pass);
    EXPECT_TRUE(find(checks, "implicit-derivatives-vs-fd").pass);

    VerifyOptions flipped;
    flipped.flip_f21_sign = true;
    auto const mutated = run_verify(flipped);
    EXPECT_FALSE(find(mutated, "k1-closed-vs-operator-psi-without-tau").pass);
    EXPECT_FALSE(find(mutated, "k1-two-path").pass);

    VerifyOptions tight;
    tight.tolerance = 1e-14;
    auto const strict = run_verify(tight);
    EXPECT_FALSE(find(strict, "implicit-derivatives-vs-fd").pass);
    RunConfig cfg;
    cfg.tolerance = 1e-14;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_verify(cfg, out, err), 1);
    EXPECT_NE(out.str().find("FAIL implicit-derivatives-vs-fd"), std::string::npos);
}

TEST(Binary, UsageErrors)
{
    TempDir tmp;
    EXPECT_EQ(run_cli("analyze --model sis-inverse", tmp).code, 64);
    EXPECT_EQ(run_cli("analyze --model sis-inverse --guess 1.8", tmp).code, 64);
    EXPECT_EQ(run_cli("analyze --bogus", tmp).code, 64);
    EXPECT_EQ(run_cli("", tmp).code, 64);
    EXPECT_EQ(run_cli("hopf-curve --tau 1 --omega-range 2:1", tmp).code, 64);
    EXPECT_EQ(run_cli("sweep --model sis-inverse --mu 2.6", tmp).code, 64);
}

TEST(Binary, AnalyzeWritesReportFile)
{
    TempDir tmp;
    auto const out = tmp.file("report.txt");
    auto const r = run_cli("analyze --model sis-exp --guess 2.1,1.7 --out " + out.string(), tmp);
    EXPECT_EQ(r.code, 0);
    auto const report = slurp(out);
    EXPECT_EQ(report.rfind("[degeneracy-report]", 0), 0u);
    EXPECT_NE(report.find("lam_star = 2.1473"), std::string::npos);
}

TEST(Binary, HeaderlessOutputIsByteIdentical)
{
    TempDir tmp;
    auto const a = run_cli("hopf-curve --tau 5 --omega-range 0:2 --points 50 --no-header", tmp);
    auto const b = run_cli("hopf-curve --tau 5 --omega-range 0:2 --points 50 --no-header", tmp);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto const c = run_cli("hopf-curve --tau 5 --omega-range 0:2 --points 50", tmp);
    EXPECT_EQ(c.out.rfind("# ddehopf hopf-curve", 0), 0u);
    EXPECT_EQ(c.out.substr(c.out.find('\n') + 1), a.out);
}

TEST(Binary, SweepFromConfigWithFlagOverride)
{
    TempDir tmp;
    auto const cfg = tmp.file("sweep.ini", "[run]\nmodel = sis-inverse\nno_header = true\n\n[sim]\ntransient = 200\n"
                                           "settle_max = 0\n\n[sweep]\nmu = 2.61\nlam_range = 1.5:1.6:0.05\n");
    auto const a = run_cli("sweep --config " + cfg.string() + " --workers 2", tmp);
    auto const b = run_cli("sweep --config " + cfg.string() + " --workers 1", tmp);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto const l = lines(a.out);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "lam,mu,outcome,y_eq,y_min,y_max,period");
    EXPECT_EQ(l[1].rfind("1.5,2.61,", 0), 0u);

    auto const c = run_cli("sweep --config " + cfg.string() + " --mu 2.62", tmp);
    EXPECT_NE(c.out.find("1.5,2.62,"), std::string::npos);
}

TEST(Binary, ExampleModelFileInDocs)
{
    TempDir tmp;
    auto const model = std::string{DDEHOPF_SOURCE_DIR} + "/docs/examples/sis-exp.ini";
    auto const r = run_cli("analyze --model " + model + " --guess 2.1,1.7", tmp);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("mu_star = 1.6617"), std::string::npos);
}
