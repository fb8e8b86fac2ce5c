#include "dynbc/harness.hpp"
#include "dynbc/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dynbc;

namespace {

struct RodSetup {
    Mesh mesh;
    DiscreteOperators ops;
    ProblemSpec spec;
};

RodSetup rod(int n) {
    RodSetup s{generate_interval(1.0, n), {}, {}};
    s.ops = assemble(s.mesh);
    s.spec = make_problem(s.mesh);
    return s;
}

VecXd eigenmode(const DiscreteOperators& ops, double k) {
    VecXd u(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) u[i] = std::sin(k * ops.freeCoords(i, 0));
    return u;
}

StepperConfig fixed_dt(double dt) {
    StepperConfig cfg;
    cfg.dtInit = cfg.dtMin = cfg.dtMax = dt;
    return cfg;
}

}  // namespace

TEST_CASE("resolvent returns zero for zero right-hand sides") {
    auto s = rod(16);
    s.spec.P = make_damping({{1.0, 3.0}});
    const VecXd zero = VecXd::Zero(s.ops.numFree());
    const auto r = solve_resolvent(s.ops, s.spec, zero, zero, 2.0);
    CHECK(r.converged);
    CHECK(r.u.norm() == 0.0);
    CHECK(r.v.norm() == 0.0);
}

TEST_CASE("linear damping needs exactly one Newton iteration") {
    auto s = rod(16);
    s.spec.P = make_damping({{1.0, 2.0}});
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    VecXd rhs0(s.ops.numFree()), rhs1(s.ops.numFree());
    for (int i = 0; i < rhs0.size(); ++i) {
        rhs0[i] = gauss(rng);
        rhs1[i] = gauss(rng);
    }
    const auto r = solve_resolvent(s.ops, s.spec, rhs0, rhs1, 2.0);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
}

TEST_CASE("resolvent solution is independent of the Newton start") {
    auto s = rod(24);
    s.spec.P = make_damping({{1.0, 4.0}});
    s.spec.Q = make_damping({{0.5, 3.0}});
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        VecXd rhs0(s.ops.numFree()), rhs1(s.ops.numFree()), start(s.ops.numFree());
        for (int i = 0; i < rhs0.size(); ++i) {
            rhs0[i] = gauss(rng);
            rhs1[i] = gauss(rng);
            start[i] = 10 * gauss(rng);
        }
        const auto a = solve_resolvent(s.ops, s.spec, rhs0, rhs1, 2.0);
        const auto b = solve_resolvent(s.ops, s.spec, rhs0, rhs1, 2.0, 1e-10, 50, &start);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        CHECK((a.v - b.v).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("resolvent map is monotone in the right-hand side") {
    auto s = rod(16);
    s.spec.P = make_damping({{1.0, 3.0}});
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    VecXd rhs1(s.ops.numFree());
    for (int i = 0; i < rhs1.size(); ++i) rhs1[i] = gauss(rng);
    for (int trial = 0; trial < 50; ++trial) {
        VecXd a(s.ops.numFree()), b(s.ops.numFree());
        for (int i = 0; i < a.size(); ++i) {
            a[i] = gauss(rng);
            b[i] = gauss(rng);
        }
        const auto ra = solve_resolvent(s.ops, s.spec, a, rhs1, 2.0);
        const auto rb = solve_resolvent(s.ops, s.spec, b, rhs1, 2.0);
        REQUIRE(ra.converged);
        REQUIRE(rb.converged);
        CHECK((ra.v - rb.v).dot(a - b) >= -1e-12);
    }
}

TEST_CASE("equilibrium data stays at rest") {
    auto s = rod(20);
    s.spec.P = make_damping({{1.0, 3.0}});
    s.spec.f = make_source({{1.0, 3.0}});  // f(0) = 0 keeps zero an equilibrium
    const VecXd zero = VecXd::Zero(s.ops.numFree());
    const auto r = integrate(zero, zero, 1.0, s.ops, s.spec, fixed_dt(1e-2));
    CHECK(r.status == Termination::ReachedTEnd);
    CHECK(r.finalState.u.norm() == 0.0);
    CHECK(r.finalState.v.norm() == 0.0);
}

TEST_CASE("conservative eigenmode keeps its energy") {
    auto s = rod(50);
    const double k = rod_eigen_wavenumber(1.0);
    const VecXd u0 = eigenmode(s.ops, k);
    const VecXd v0 = VecXd::Zero(s.ops.numFree());
    const auto r = integrate(u0, v0, 2.0, s.ops, s.spec, fixed_dt(1e-3), 50);
    REQUIRE(r.status == Termination::ReachedTEnd);
    const double e0 = r.trajectory.samples.front().E;
    for (const auto& sample : r.trajectory.samples)
        CHECK(std::abs(sample.E - e0) <= 1e-10 * std::max(1.0, std::abs(e0)));
}

TEST_CASE("time reversal of the conservative midpoint step") {
    auto s = rod(30);
    const double k = rod_eigen_wavenumber(1.0);
    const VecXd u0 = eigenmode(s.ops, k);
    const VecXd v0 = 0.3 * eigenmode(s.ops, 3 * k);

    StepperConfig cfg = fixed_dt(1e-2);
    const auto fwd = integrate(u0, v0, 1e-2, s.ops, s.spec, cfg);
    REQUIRE(fwd.status == Termination::ReachedTEnd);
    // reverse: flip the velocity and step again
    const auto back = integrate(fwd.finalState.u, VecXd(-fwd.finalState.v), 1e-2, s.ops, s.spec,
                                cfg);
    REQUIRE(back.status == Termination::ReachedTEnd);
    CHECK((back.finalState.u - u0).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.finalState.v + v0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("linear damping decays the velocity monotonically") {
    auto s = rod(40);
    s.spec.P = make_damping({{1.0, 2.0}});
    s.spec.Q = make_damping({{1.0, 2.0}});
    const VecXd u0 = VecXd::Zero(s.ops.numFree());
    const VecXd v0 = eigenmode(s.ops, rod_eigen_wavenumber(1.0));
    const auto r = integrate(u0, v0, 2.0, s.ops, s.spec, fixed_dt(1e-2), 10);
    REQUIRE(r.status == Termination::ReachedTEnd);
    double prev = kInf;
    for (const auto& sample : r.trajectory.samples) {
        CHECK(sample.E <= prev + 1e-12);
        prev = sample.E;
    }
}

TEST_CASE("globally lipschitz sources always reach the window end") {
    auto s = rod(30);
    s.spec.P = make_damping({{1.0, 2.0}});
    s.spec.f = make_source({{2.0, 2.0}});  // linear source: p = 2
    s.spec.g = make_source({{1.5, 2.0}});
    VecXd u0 = eigenmode(s.ops, rod_eigen_wavenumber(1.0));
    StepperConfig cfg;
    cfg.dtInit = 1e-2;
    cfg.dtMin = 1e-10;
    cfg.dtMax = 5e-2;
    const auto r = integrate(u0, VecXd::Zero(s.ops.numFree()), 20.0, s.ops, s.spec, cfg, 100);
    CHECK(r.status == Termination::ReachedTEnd);
}

TEST_CASE("backward euler scheme dissipates and reaches the end") {
    auto s = rod(30);
    StepperConfig cfg = fixed_dt(1e-2);
    cfg.scheme = TimeScheme::BackwardEuler;
    const VecXd u0 = eigenmode(s.ops, rod_eigen_wavenumber(1.0));
    const auto r = integrate(u0, VecXd::Zero(s.ops.numFree()), 2.0, s.ops, s.spec, cfg, 10);
    REQUIRE(r.status == Termination::ReachedTEnd);
    // numerical dissipation only shrinks the energy
    const double e0 = r.trajectory.samples.front().E;
    const double eT = r.trajectory.samples.back().E;
    CHECK(eT <= e0 * (1 + 1e-12));
    CHECK(eT < e0);
}

TEST_CASE("truncation clips the source input") {
    auto s = rod(20);
    s.spec.f = make_source({{1.0, 4.0}});
    s.spec.P = make_damping({{1.0, 2.0}});
    StepperConfig cfg = fixed_dt(1e-3);
    cfg.truncationRadius = 1e-3;  // clip essentially everything
    const VecXd u0 = eigenmode(s.ops, rod_eigen_wavenumber(1.0));
    const auto clipped = integrate(u0, VecXd::Zero(s.ops.numFree()), 0.5, s.ops, s.spec, cfg, 50);
    CHECK(clipped.status == Termination::ReachedTEnd);

    StepperConfig open = fixed_dt(1e-3);
    const auto free = integrate(u0, VecXd::Zero(s.ops.numFree()), 0.5, s.ops, s.spec, open, 50);
    REQUIRE(free.status == Termination::ReachedTEnd);
    // the clipped run sees almost no source, so the trajectories differ
    CHECK((clipped.finalState.u - free.finalState.u).norm() > 1e-6);
}

TEST_CASE("stepper config validation") {
    StepperConfig cfg;
    cfg.dtMin = 1e-2;
    cfg.dtInit = 1e-3;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
    StepperConfig good;
    CHECK_NOTHROW(good.validate());
    auto s = rod(4);
    CHECK_THROWS_AS(
        integrate(VecXd::Zero(2), VecXd::Zero(s.ops.numFree()), 1.0, s.ops, s.spec, good),
        ShapeError);
}
