// Acceptance suite: one pass/fail line per criterion. An optional argument
// filters by id, e.g. `acceptance AC-5`.

#include "dynbc/config.hpp"
#include "dynbc/harness.hpp"
#include "dynbc/io.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

using namespace dynbc;

namespace {

struct Check {
    bool passed = true;
    std::string firstFailure;

    void require(bool ok, const std::string& what) {
        if (!ok && passed) {
            passed = false;
            firstFailure = what;
        }
    }
    template <typename T>
    void require_close(T value, T expected, T tol, const std::string& what) {
        std::ostringstream os;
        os << what << " (got " << value << ", want " << expected << " +- " << tol << ")";
        require(std::abs(value - expected) <= tol, os.str());
    }
    void require_below(double value, double bound, const std::string& what) {
        std::ostringstream os;
        os << what << " (got " << value << ", bound " << bound << ")";
        require(value < bound, os.str());
    }
};

VecXd rod_eigenmode_vector(const DiscreteOperators& ops, double k) {
    VecXd u(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) u[i] = std::sin(k * ops.freeCoords(i, 0));
    return u;
}

StepperConfig fixed_dt(double dt) {
    StepperConfig cfg;
    cfg.dtInit = cfg.dtMin = cfg.dtMax = dt;
    return cfg;
}

double min_eig(const SpMat& m) {
    Eigen::SelfAdjointEigenSolver<MatXd> es{MatXd(m)};
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------- AC-1
void ac1_operator_sanity(Check& c) {
    const DiscreteOperators ops = assemble(generate_interval(1.0, 2));
    const MatXd K = MatXd(ops.stiffness);
    const MatXd Mg = MatXd(ops.massBoundary);
    c.require(K(0, 0) == 4.0 && K(0, 1) == -2.0 && K(1, 0) == -2.0 && K(1, 1) == 2.0,
              "free-dof stiffness must equal [[4,-2],[-2,2]] exactly");
    c.require(Mg(0, 0) == 0.0 && Mg(0, 1) == 0.0 && Mg(1, 0) == 0.0 && Mg(1, 1) == 1.0,
              "boundary mass must equal diag(0,1) exactly");

    for (const Mesh& mesh :
         {generate_interval(1.0, 100), generate_annulus(0.3, 1.0, 4, 24),
          generate_rectangle(1.0, 1.0, 6, 6, RectangleSide::Top)}) {
        const DiscreteOperators o = assemble(mesh);
        c.require(o.numFree() <= 500, "eigensolve meshes stay small");
        c.require(min_eig(o.mass) > 0.0, "mass eigenvalues must be positive");
        c.require(min_eig(o.stiffness) > 0.0, "stiffness eigenvalues must be positive");
    }
}

// ---------------------------------------------------------------- AC-2
void ac2_conservation(Check& c) {
    const Mesh mesh = generate_interval(1.0, 200);
    const DiscreteOperators ops = assemble(mesh);
    const ProblemSpec spec = make_problem(mesh);
    const VecXd u0 = rod_eigenmode_vector(ops, rod_eigen_wavenumber(1.0));
    const VecXd v0 = VecXd::Zero(ops.numFree());
    const auto r = integrate(u0, v0, 10.0, ops, spec, fixed_dt(1e-3), 1);
    c.require(r.status == Termination::ReachedTEnd, "conservative run must finish");
    c.require(r.acceptedSteps == 10000, "expected 1e4 midpoint steps");
    const double e0 = r.trajectory.samples.front().E;
    double drift = 0;
    for (const auto& s : r.trajectory.samples)
        drift = std::max(drift, std::abs(s.E - e0) / std::max(1.0, std::abs(e0)));
    c.require_below(drift, 1e-8, "relative energy drift over 1e4 steps");
}

// ---------------------------------------------------------------- AC-3
void ac3_dispersion(Check& c) {
    const double k = rod_eigen_wavenumber(1.0);
    c.require_close(k, 0.860334, 1e-5, "rod wavenumber root of k tan k = 1");
    const ConvergenceResult r = run_convergence_study(StudyGeometry::Rod, {200, 400}, 1e-3);
    const double relErr = r.periodErrors[0] / r.analyticPeriod;
    c.require_below(relErr, 0.005, "period error at n=200, dt=1e-3");
    c.require(r.ratios.size() == 1, "one refinement ratio expected");
    c.require(r.ratios[0] >= 3.2 && r.ratios[0] <= 4.8,
              "period-error ratio per (h, dt) halving must lie in [3.2, 4.8], got " +
                  format_double(r.ratios[0]));
}

// ---------------------------------------------------------------- AC-4
void ac4_energy_identity(Check& c) {
    const Mesh mesh = generate_interval(1.0, 100);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.P = make_damping({{1.0, 4.0}});  // cubic damping |v|^2 v
    const VecXd u0 = rod_eigenmode_vector(ops, rod_eigen_wavenumber(1.0));
    const VecXd v0 = VecXd::Zero(ops.numFree());

    double residuals[2];
    int idx = 0;
    for (double dt : {1e-3, 5e-4}) {
        const auto r = integrate(u0, v0, 2.0, ops, spec, fixed_dt(dt), 1);
        c.require(r.status == Termination::ReachedTEnd, "damped run must finish");
        residuals[idx++] = energy_identity_residual(r.trajectory);
        double prev = kInf;
        for (const auto& s : r.trajectory.samples) {
            c.require(s.E <= prev + 1e-12, "E must be nonincreasing at every sample");
            prev = s.E;
        }
    }
    c.require_below(residuals[0], 1e-6, "identity residual at dt=1e-3");
    const double ratio = residuals[0] / residuals[1];
    c.require(ratio >= 3.2 && ratio <= 4.8,
              "identity residual must shrink ~4x per dt halving, got ratio " +
                  format_double(ratio));
}

// ---------------------------------------------------------------- AC-5
void ac5_blowup(Check& c) {
    const Mesh mesh = generate_interval(1.0, 100);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.P = make_damping({{1.0, 2.0}});  // alpha = beta = 1 linear damping
    spec.Q = make_damping({{1.0, 2.0}});
    spec.g = make_source({{1.0, 4.0}});   // boundary source u^3

    const auto cert = check_blowup_hypotheses(spec);
    c.require(cert.accepted, "blow-up hypotheses must certify the scenario");

    const auto data = build_negative_energy_data(ops, spec, VecXd::Zero(ops.numFree()), 1e9);
    c.require(data.ok, "negative-energy data construction");
    if (!data.ok) return;
    c.require(energy(ops, spec, data.u0, data.v0).E < 0.0, "E0 < 0 verified");

    double tEst[2];
    int idx = 0;
    for (double dt0 : {1e-3, 5e-4}) {
        StepperConfig cfg;
        cfg.dtInit = dt0;
        cfg.dtMin = 1e-13;
        cfg.dtMax = 1e-2;
        const Verdict v = run_blowup_experiment(ops, spec, data.u0, data.v0, cfg, 20.0, 50);
        c.require(v.kind == Verdict::Kind::BlowUp,
                  "verdict must be BlowUp (got " + v.reason + ")");
        c.require_below(v.tEstimate, 20.0, "blow-up before t=20");
        c.require(v.normAtAbort > kBlowupPhaseNormThreshold, "phase-norm divergence at abort");
        c.require(std::max(v.finalSample.normLp, v.finalSample.normLqGamma1) >
                      kBlowupSourceNormThreshold,
                  "source-norm divergence at abort");
        tEst[idx++] = v.tEstimate;
    }
    const double spread = std::abs(tEst[0] - tEst[1]) / std::max(tEst[0], tEst[1]);
    c.require_below(spread, 0.05, "T_est stable under dt refinement");
}

// ---------------------------------------------------------------- AC-6
void ac6_global(Check& c) {
    const Mesh mesh = generate_interval(1.0, 100);
    const DiscreteOperators ops = assemble(mesh);

    // damping-dominated interior source
    ProblemSpec strong = make_problem(mesh);
    strong.P = make_damping({{1.0, 5.0}});
    strong.f = make_source({{1.0, 4.0}});
    const auto certA = check_global_hypotheses(strong);
    c.require(certA.accepted, "damping-dominated scenario must certify");

    StepperConfig cfg;
    cfg.dtInit = cfg.dtMax = 1e-2;
    cfg.dtMin = 1e-10;
    const VecXd u0 = rod_eigenmode_vector(ops, rod_eigen_wavenumber(1.0));
    const VecXd v0 = VecXd::Zero(ops.numFree());
    const Verdict a = run_global_experiment(ops, strong, u0, v0, cfg, 50.0, certA.cert, 20);
    c.require(a.kind == Verdict::Kind::Global, "damping-dominated run must stay global");
    c.require(std::isfinite(a.maxUpsilon) && a.maxUpsilon > 0, "upsilon stays finite");
    c.require_below(a.upsilonFitResidual, 2.0, "affine log-upsilon fit residual");

    // pure sinks
    ProblemSpec sinks = make_problem(mesh);
    sinks.P = make_damping({{1.0, 2.0}});
    sinks.Q = make_damping({{1.0, 2.0}});
    sinks.f = make_source({{-1.0, 4.0}});
    sinks.g = make_source({{-1.0, 4.0}});
    const auto certB = check_global_hypotheses(sinks);
    c.require(certB.accepted, "sink scenario must certify");
    const Verdict b = run_global_experiment(ops, sinks, u0, v0, cfg, 50.0, certB.cert, 20);
    c.require(b.kind == Verdict::Kind::Global, "sink run must stay global");
    if (!b.finalSample.t) return;
    // sinks keep E bounded below along the run
    c.require(std::isfinite(b.finalSample.E), "sink-run energy stays finite");
}

// ---------------------------------------------------------------- AC-7
void ac7_continuous_dependence(Check& c) {
    const Mesh mesh = generate_interval(1.0, 100);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.P = make_damping({{1.0, 4.0}});  // cubic damping

    const double k = rod_eigen_wavenumber(1.0);
    const VecXd u0 = rod_eigenmode_vector(ops, k);
    const VecXd v0 = VecXd::Zero(ops.numFree());
    VecXd direction = rod_eigenmode_vector(ops, 3 * k);
    direction /= h1_norm(ops, direction);

    const auto r = run_continuous_dependence(ops, spec, u0, v0, direction,
                                             {0.0, 1e-1, 1e-2, 1e-3}, fixed_dt(1e-3), 2.0, 20);
    c.require(r.ok, "continuous-dependence runs must finish (" + r.reason + ")");
    if (!r.ok) return;
    c.require(r.supErrors[0] == 0.0, "zero perturbation must give exactly zero error");
    c.require(r.supErrors[1] > r.supErrors[2] && r.supErrors[2] > r.supErrors[3],
              "errors must decrease with delta");
    c.require_close(r.slope, 1.0, 0.2, "log-log slope of trajectory error vs delta");
}

// ---------------------------------------------------------------- AC-8
void ac8_resolvent(Check& c) {
    const Mesh mesh = generate_interval(1.0, 50);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.P = make_damping({{1.0, 4.0}});
    spec.Q = make_damping({{0.5, 3.0}});

    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> gauss;
    auto randomVec = [&] {
        VecXd v(ops.numFree());
        for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        return v;
    };
    const VecXd rhs1 = randomVec();

    std::vector<VecXd> rhs(100), sols(100);
    for (int i = 0; i < 100; ++i) {
        rhs[i] = randomVec();
        const auto r = solve_resolvent(ops, spec, rhs[i], rhs1, 2.0);
        c.require(r.converged, "Newton must converge on random rhs");
        c.require(r.residual <= 1e-10 * (1.0 + r.rhsNorm),
                  "final residual must meet the scaled tolerance");
        VecXd start = randomVec();
        const auto r2 = solve_resolvent(ops, spec, rhs[i], rhs1, 2.0, 1e-10, 50, &start);
        c.require(r2.converged, "Newton must converge from a random start");
        c.require((r.v - r2.v).cwiseAbs().maxCoeff() <= 1e-8,
                  "solutions from two starts must agree to 1e-8");
        sols[i] = r.v;
    }
    for (int i = 0; i < 100; ++i)
        for (int j = i + 1; j < 100; ++j)
            c.require((sols[i] - sols[j]).dot(rhs[i] - rhs[j]) >= -1e-12,
                      "resolvent monotonicity on all pairs");
}

// ---------------------------------------------------------------- AC-9
void ac9_classifier(Check& c) {
    for (int N = 2; N <= 8; ++N) {
        const auto [ro, rg] = critical_exponents(N);
        const double roRef = (N >= 3) ? 2.0 * N / (N - 2) : kInf;
        const double rgRef = (N >= 4) ? 2.0 * (N - 1) / (N - 3) : kInf;
        c.require(ro == roRef && rg == rgRef, "critical exponents formula at N=" +
                                                  std::to_string(N));
    }
    c.require(check_subcritical(4.0, 2.0, 3) && !check_subcritical(4.0 + 1e-9, 2.0, 3),
              "subcritical bound p <= 4 at N=3");
    c.require(check_subcritical(3.0, 2.0, 4) && !check_subcritical(3.0 + 1e-9, 2.0, 4),
              "subcritical bound p <= 3 at N=4");
    c.require(check_subcritical(2.0, 4.0, 4) && !check_subcritical(2.0, 4.0 + 1e-9, 4),
              "subcritical bound q <= 4 at N=4");

    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> expo(2.0, 6.0);
    std::uniform_int_distribution<int> terms(0, 2);
    auto randomSource = [&] {
        std::vector<PowerTerm> t;
        for (int i = 0, n = terms(rng); i < n; ++i) t.push_back({coef(rng), expo(rng)});
        return make_source(t);
    };
    ProblemSpec spec;
    spec.P = make_damping({{1.0, 2.0}});
    spec.Q = make_damping({{1.0, 2.0}});
    spec.alpha = uniform_field(4, 1.0);
    spec.beta = uniform_field(4, 1.0);
    spec.dimension = 3;
    for (int i = 0; i < 10000; ++i) {
        spec.f = randomSource();
        spec.g = randomSource();
        const bool both =
            check_blowup_hypotheses(spec).accepted && check_global_hypotheses(spec).accepted;
        c.require(!both, "blow-up and global certificates must exclude each other");
    }
}

// ---------------------------------------------------------------- AC-10
void ac10_gradient(Check& c) {
    const Mesh mesh = generate_interval(1.0, 50);
    const DiscreteOperators ops = assemble(mesh);
    ProblemSpec spec = make_problem(mesh);
    spec.f = make_source({{0.8, 4.0}, {-0.3, 3.0}});
    spec.g = make_source({{1.0, 4.0}}, 0.25);

    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> pick(0, ops.numFree() - 1);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        VecXd u(ops.numFree());
        for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
        const VecXd grad = source_gradient(ops, spec, u);
        const int i = pick(rng);
        VecXd up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        const double fd = (potential_J(ops, spec, up) - potential_J(ops, spec, dn)) / (2 * h);
        const double rel = std::abs(grad[i] - fd) / std::max(1.0, std::abs(grad[i]));
        c.require(rel <= 1e-6, "source vector vs central differences of J, component " +
                                   std::to_string(i));
    }
}

struct Criterion {
    const char* id;
    const char* label;
    double runtimeLimit;  // seconds; 0 means unconstrained
    std::function<void(Check&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"AC-1", "operator sanity", 1.0, ac1_operator_sanity},
        {"AC-2", "conservation oracle", 10.0, ac2_conservation},
        {"AC-3", "dispersion oracle", 0.0, ac3_dispersion},
        {"AC-4", "energy identity", 0.0, ac4_energy_identity},
        {"AC-5", "blow-up reproduction", 60.0, ac5_blowup},
        {"AC-6", "global existence", 120.0, ac6_global},
        {"AC-7", "continuous dependence", 0.0, ac7_continuous_dependence},
        {"AC-8", "resolvent properties", 0.0, ac8_resolvent},
        {"AC-9", "classifier truth tables", 5.0, ac9_classifier},
        {"AC-10", "gradient check", 0.0, ac10_gradient},
    };

    const char* filter = argc > 1 ? argv[1] : nullptr;
    int failures = 0, executed = 0;
    for (const auto& criterion : criteria) {
        if (filter && std::strcmp(filter, criterion.id) != 0) continue;
        ++executed;
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.runtimeLimit > 0 && seconds >= criterion.runtimeLimit)
            check.require(false, "runtime limit " + format_double(criterion.runtimeLimit) +
                                     " s exceeded");
        if (check.passed) {
            std::printf("%-6s PASS  (%6.2f s)  %s\n", criterion.id, seconds, criterion.label);
        } else {
            ++failures;
            std::printf("%-6s FAIL  (%6.2f s)  %s: %s\n", criterion.id, seconds, criterion.label,
                        check.firstFailure.c_str());
        }
    }
    if (filter && executed == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", filter);
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
