#pragma once

#include "dynbc/energy.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dynbc {

enum class TimeScheme { Midpoint, BackwardEuler };

struct StepperConfig {
    double dtInit = 1e-3;
    double dtMin = 1e-12;
    double dtMax = 1e-2;
    double newtonTol = 1e-10;  // on the scaled residual
    int newtonMaxIters = 50;
    double growthCap = 10.0;   // max per-step relative growth of |(u,v)|
    double truncationRadius = kInf;  // source truncation, inf disables
    TimeScheme scheme = TimeScheme::Midpoint;

    void validate() const;
};

struct State {
    double t = 0;
    VecXd u;
    VecXd v;
    double dt = 0;
    int newtonIters = 0;
};

struct ResolventResult {
    VecXd u;
    VecXd v;
    int iterations = 0;
    double residual = 0;  // final |T(v) - rhs|
    double rhsNorm = 0;   // |rhs| of the reduced single-field system
    bool converged = false;
};

/// Solves the damped stationary system
///   sigma u - v = rhs1,   sigma M v + K u + B_h(v) = rhs0
/// by substitution and Newton on v. The Newton matrix
/// sigma M + (1/sigma) K + diag(B_h') is symmetric positive definite.
ResolventResult solve_resolvent(const DiscreteOperators& ops, const ProblemSpec& spec,
                                const VecXd& rhs0, const VecXd& rhs1, double sigma,
                                double tol = 1e-10, int maxIters = 50,
                                const VecXd* initialGuess = nullptr);

enum class Termination { ReachedTEnd, BlowUpSuspected, ResolventBreakdown };

struct IntegrateResult {
    Trajectory trajectory;
    Termination status = Termination::ReachedTEnd;
    State finalState;
    double tEstimate = 0;      // blow-up time estimate (final time when global)
    double blowupGamma = 0;    // fitted divergence exponent, reported only
    double finalNormH1H0 = 0;  // sqrt(|u|_H1^2 + |v|_H0^2) at the last state
    double finalNormLp = 0;
    double finalNormLq = 0;
    long long acceptedSteps = 0;
    long long rejectedSteps = 0;
    std::string message;
    std::vector<std::pair<double, double>> normHistory;  // (t, |(u,v)|) per accepted step
};

using StepObserver = std::function<void(const State&)>;

/// Implicit time integration with adaptive step halving.
/// Records an EnergySample every `sampleEvery` accepted steps (and at both
/// endpoints). `cert` feeds the upsilon column; omitted means the plain
/// norm-only reduction.
IntegrateResult integrate(const VecXd& u0, const VecXd& v0, double tEnd,
                          const DiscreteOperators& ops, const ProblemSpec& spec,
                          const StepperConfig& cfg, int sampleEvery = 1,
                          const GlobalCertificate* cert = nullptr,
                          const StepObserver& observer = nullptr);

}  // namespace dynbc
