#include "dynbc/config.hpp"
#include "dynbc/io.hpp"
#include "dynbc/regime.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace dynbc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInconclusive = 4;

struct CliOptions {
    std::string configPath;
    std::string outDir;
    int jobs = 1;
    std::uint64_t seed = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig load_config_or_exit(const std::string& path) {
    ParseResult parsed = parse_config_file(path);
    if (!parsed.ok()) {
        std::cerr << "config errors in " << path << ":\n" << format_errors(parsed.errors);
        std::exit(kExitConfig);
    }
    return parsed.config;
}

int cmd_mesh(const std::string& geometry, double length, int n, double r0, double r1, int nr,
             int nt, double lx, double ly, int nx, int ny, const std::string& side,
             const std::string& outPath) {
    MeshSection section;
    section.geometry = geometry;
    section.length = length;
    section.n = n;
    section.r0 = r0;
    section.r1 = r1;
    section.nr = nr;
    section.nt = nt;
    section.lx = lx;
    section.ly = ly;
    section.nx = nx;
    section.ny = ny;
    section.gamma1Side = side;
    const Mesh mesh = build_mesh(section);
    validate_mesh(mesh);
    if (outPath.empty() || outPath == "-") write_mesh_csv(mesh, std::cout);
    else write_mesh_csv_file(mesh, outPath);
    return 0;
}

int cmd_classify(const CliOptions& opt) {
    const RunConfig cfg = load_config_or_exit(opt.configPath);
    const Mesh mesh = build_mesh(cfg.mesh);
    const ProblemSpec spec = build_problem_spec(cfg, mesh);
    RegimeReport report = classify(spec);
    if (cfg.u0Profile.kind != InitialProfile::Kind::Zero ||
        cfg.v0Profile.kind != InitialProfile::Kind::Zero) {
        const DiscreteOperators ops = assemble(mesh);
        try {
            auto [u0, v0] = build_initial_data(ops, spec, cfg.u0Profile, cfg.v0Profile);
            report.energySign = energy_sign(ops, spec, u0, v0);
        } catch (const std::exception& e) {
            std::cerr << "note: initial data unavailable (" << e.what() << ")\n";
        }
    }
    std::cout << format_report_text(report) << "---\n" << format_report_keyvalues(report);
    return 0;
}

int cmd_run(const CliOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = load_config_or_exit(opt.configPath);
    const Mesh mesh = build_mesh(cfg.mesh);
    const DiscreteOperators ops = assemble(mesh);
    const ProblemSpec spec = build_problem_spec(cfg, mesh);
    const RegimeReport report = classify(spec);

    const std::string outDir = opt.outDir.empty() ? cfg.output.directory : opt.outDir;
    fs::create_directories(outDir);

    std::pair<VecXd, VecXd> data;
    try {
        data = build_initial_data(ops, spec, cfg.u0Profile, cfg.v0Profile);
    } catch (const std::exception& e) {
        std::cerr << "initial data construction failed: " << e.what() << "\n";
        return kExitInconclusive;
    }

    const bool blowupExperiment = cfg.u0Profile.kind == InitialProfile::Kind::NegativeEnergy;
    const GlobalCertificate* cert = report.global.accepted ? &report.global.cert : nullptr;

    long long snapshotCounter = 0;
    std::function<void(const State&)> observer;
    if (cfg.output.snapshotEvery > 0) {
        observer = [&](const State& s) {
            if (++snapshotCounter % cfg.output.snapshotEvery != 0) return;
            std::ofstream snap(outDir + "/snapshot_" + std::to_string(snapshotCounter) + ".csv");
            write_snapshot_csv(ops, s.u, s.v, snap);
        };
    }

    const IntegrateResult run = integrate(data.first, data.second, cfg.tEnd, ops, spec, cfg.time,
                                          cfg.output.sampleEvery, cert, observer);
    {
        std::ofstream traj(outDir + "/trajectory.csv");
        write_trajectory_csv(run.trajectory, traj);
    }

    std::string status;
    int exitCode = 0;
    switch (run.status) {
        case Termination::ReachedTEnd:
            status = "reached_t_end";
            break;
        case Termination::BlowUpSuspected:
            status = "blowup_suspected";
            break;
        case Termination::ResolventBreakdown:
            status = "resolvent_breakdown";
            exitCode = kExitNumerical;
            break;
    }
    if (blowupExperiment && run.status != Termination::ResolventBreakdown) {
        const Verdict verdict = [&] {
            Verdict v;
            v.kind = Verdict::Kind::Inconclusive;
            if (run.status == Termination::BlowUpSuspected) {
                const bool phase = run.finalNormH1H0 > kBlowupPhaseNormThreshold;
                const bool source =
                    std::max(run.finalNormLp, run.finalNormLq) > kBlowupSourceNormThreshold;
                if (phase && source) v.kind = Verdict::Kind::BlowUp;
                else v.reason = "abort without joint norm divergence";
            } else {
                v.reason = "window too short or thresholds unmet";
            }
            return v;
        }();
        if (verdict.kind == Verdict::Kind::BlowUp) {
            status = "blowup_verdict t_estimate=" + format_double(run.tEstimate);
        } else {
            status = "inconclusive: " + verdict.reason;
            exitCode = kExitInconclusive;
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ManifestInfo info;
    info.configPath = opt.configPath;
    info.configHash = fnv1a_hash(slurp(opt.configPath));
    info.jobs = opt.jobs;
    info.wallSeconds = wall;
    info.status = status;
    std::ofstream manifest(outDir + "/manifest.txt");
    write_manifest(info, manifest);

    std::cout << "status: " << status << "\n"
              << "accepted steps: " << run.acceptedSteps
              << ", rejected: " << run.rejectedSteps << "\n"
              << "final t: " << format_double(run.finalState.t) << "\n"
              << "outputs in " << outDir << "\n";
    return exitCode;
}

int cmd_sweep(const CliOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = load_config_or_exit(opt.configPath);
    if (cfg.sweepSection.axes.empty()) {
        std::cerr << "config error: sweep needs at least one [sweep] axis.* entry\n";
        return kExitConfig;
    }
    const Mesh mesh = build_mesh(cfg.mesh);
    const ProblemSpec base = build_problem_spec(cfg, mesh);

    SweepOptions options;
    options.runDynamics = cfg.sweepSection.runDynamics;
    options.tEnd = cfg.sweepSection.tEnd;
    options.time = cfg.time;
    options.sampleEvery = cfg.output.sampleEvery;
    options.jobs = opt.jobs;
    const auto rows = sweep(mesh, base, cfg.sweepSection.axes, options);

    const std::string outDir = opt.outDir.empty() ? cfg.output.directory : opt.outDir;
    fs::create_directories(outDir);
    {
        std::ofstream out(outDir + "/sweep.csv");
        write_sweep_csv(cfg.sweepSection.axes, rows, out);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ManifestInfo info;
    info.configPath = opt.configPath;
    info.configHash = fnv1a_hash(slurp(opt.configPath));
    info.jobs = opt.jobs;
    info.wallSeconds = wall;
    info.status = "sweep_rows=" + std::to_string(rows.size());
    std::ofstream manifest(outDir + "/manifest.txt");
    write_manifest(info, manifest);
    std::cout << rows.size() << " rows written to " << outDir << "/sweep.csv\n";
    return 0;
}

// seeded randomized property checks, exposed for reproducibility experiments
int cmd_selftest(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-100.0, 100.0);
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            std::cout << "FAIL " << what << "\n";
        }
    };

    const PowerSumSpec damping = make_damping({{0.7, 3.0}, {1.3, 1.5}});
    for (int i = 0; i < 10000; ++i) {
        double s = unit(rng), t = unit(rng);
        if (s > t) std::swap(s, t);
        check(eval(damping, t) - eval(damping, s) >= 0, "damping monotonicity");
    }
    const double growthConst = 0.7 + 1.3;
    for (int i = 0; i < 10000; ++i) {
        const double s = unit(rng) * 1e4;
        const double bound = growthConst * (1.0 + std::pow(std::abs(s), 3.0 - 1.0));
        check(std::abs(eval(damping, s)) <= bound * (1 + 1e-12), "damping growth envelope");
    }
    const PowerSumSpec source = make_source({{0.5, 4.0}}, 0.25);
    for (int i = 0; i < 1000; ++i) {
        const double s = unit(rng) / 10;
        const double h = 1e-5;
        const double fd = (primitive(source, s + h) - primitive(source, s - h)) / (2 * h);
        check(std::abs(fd - eval(source, s)) <= 1e-5 * (1 + std::abs(eval(source, s))),
              "primitive/eval consistency");
    }

    const Mesh mesh = generate_interval(1.0, 32);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.P = make_damping({{1.0, 3.0}});
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randomVec = [&] {
        VecXd v(ops.numFree());
        for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        return v;
    };
    const VecXd rhs1 = randomVec();
    for (int i = 0; i < 20; ++i) {
        const VecXd a = randomVec(), b = randomVec();
        const auto ra = solve_resolvent(ops, spec, a, rhs1, 2.0);
        const auto rb = solve_resolvent(ops, spec, b, rhs1, 2.0);
        check(ra.converged && rb.converged, "resolvent convergence");
        check((ra.v - rb.v).dot(a - b) >= -1e-12, "resolvent monotonicity");
    }

    if (failures == 0) {
        std::cout << "selftest: all checks passed (seed " << seed << ")\n";
        return 0;
    }
    std::cout << "selftest: " << failures << " failures (seed " << seed << ")\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynbc-wave: wave equation with hyperbolic dynamical boundary conditions"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.configPath, "configuration file");
    app.add_option("--out", opt.outDir, "output directory override");
    app.add_option("--jobs", opt.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "seed for randomized self tests");

    auto* meshCmd = app.add_subcommand("mesh", "generate a mesh and emit its CSV");
    std::string geometry = "interval", side = "top", outPath;
    double length = 1.0, r0 = 0.3, r1 = 1.0, lx = 1.0, ly = 1.0;
    int n = 100, nr = 8, nt = 32, nx = 8, ny = 8;
    meshCmd->add_option("--geometry", geometry, "interval|annulus|rectangle");
    meshCmd->add_option("--length", length);
    meshCmd->add_option("--n", n);
    meshCmd->add_option("--r0", r0);
    meshCmd->add_option("--r1", r1);
    meshCmd->add_option("--nr", nr);
    meshCmd->add_option("--nt", nt);
    meshCmd->add_option("--lx", lx);
    meshCmd->add_option("--ly", ly);
    meshCmd->add_option("--nx", nx);
    meshCmd->add_option("--ny", ny);
    meshCmd->add_option("--gamma1-side", side);
    meshCmd->add_option("--mesh-out", outPath, "output path, '-' for stdout");

    auto* classifyCmd = app.add_subcommand("classify", "print the regime report for a config");
    auto* runCmd = app.add_subcommand("run", "integrate a configured scenario");
    auto* sweepCmd = app.add_subcommand("sweep", "run the configured parameter sweep");
    auto* selftestCmd = app.add_subcommand("selftest", "randomized property checks");
    selftestCmd->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (meshCmd->parsed())
            return cmd_mesh(geometry, length, n, r0, r1, nr, nt, lx, ly, nx, ny, side,
                            outPath.empty() ? opt.outDir : outPath);
        if (classifyCmd->parsed()) {
            if (opt.configPath.empty()) throw InvalidParameterError("classify needs --config");
            return cmd_classify(opt);
        }
        if (runCmd->parsed()) {
            if (opt.configPath.empty()) throw InvalidParameterError("run needs --config");
            return cmd_run(opt);
        }
        if (sweepCmd->parsed()) {
            if (opt.configPath.empty()) throw InvalidParameterError("sweep needs --config");
            return cmd_sweep(opt);
        }
        if (selftestCmd->parsed()) return cmd_selftest(opt.seed);
    } catch (const InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonFiniteStateError& e) {
        std::cerr << "numerical breakdown: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
