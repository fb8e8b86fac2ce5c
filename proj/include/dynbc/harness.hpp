#pragma once

#include "dynbc/stepper.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynbc {

// Joint-divergence thresholds for a BlowUp verdict: the phase-space norm and
// the source-norm family must both exceed these at abort.
inline constexpr double kBlowupPhaseNormThreshold = 1e6;
inline constexpr double kBlowupSourceNormThreshold = 1e4;

/// First rod eigenmode wavenumber: root of k tan(k L) = 1 on (0, pi/(2L)).
double rod_eigen_wavenumber(double length = 1.0);

/// First axisymmetric eigenfrequency of the annulus with a pinned inner
/// circle and a dynamic outer circle.
double annulus_eigen_frequency(double r0, double r1);

struct InitialProfile {
    enum class Kind { Zero, Eigenmode, Bump, File, NegativeEnergy } kind = Kind::Zero;
    double k = 0;          // eigenmode wavenumber, 0 means geometry default
    VecXd center;          // bump center
    double radius = 0.25;  // bump radius
    double scale = 1.0;    // bump amplitude
    std::string path;      // file profile: node,<id>,<u>,<v> rows
    double sMax = 1e9;     // negative-energy scale cap
};

/// Builds (u0, v0) on the free dofs. A File profile on u fills both vectors;
/// a NegativeEnergy profile on u runs the doubling search against v0.
std::pair<VecXd, VecXd> build_initial_data(const DiscreteOperators& ops, const ProblemSpec& spec,
                                           const InitialProfile& uProfile,
                                           const InitialProfile& vProfile);

struct NegativeEnergyData {
    bool ok = false;
    VecXd u0;
    VecXd v0;
    double scale = 0;        // accepted bump multiplier
    double energyValue = 0;  // E0 at return (last tried value on failure)
    std::string reason;
};

/// Scales a smooth bump supported where the source acts until the initial
/// energy turns negative (doubling search, capped by sMax).
NegativeEnergyData build_negative_energy_data(const DiscreteOperators& ops,
                                              const ProblemSpec& spec, const VecXd& v0,
                                              double sMax);

struct Verdict {
    enum class Kind { Global, BlowUp, Inconclusive } kind = Kind::Inconclusive;
    double windowEnd = 0;
    double tEstimate = 0;
    double normAtAbort = 0;
    double blowupGamma = 0;        // fitted divergence exponent, reported only
    double maxUpsilon = 0;
    double upsilonRate = 0;        // slope of the affine log-upsilon fit
    double upsilonFitResidual = 0; // max |log upsilon - fit|
    std::string reason;
    EnergySample finalSample;
    long long acceptedSteps = 0;
    long long rejectedSteps = 0;
};

Verdict run_blowup_experiment(const DiscreteOperators& ops, const ProblemSpec& spec,
                              const VecXd& u0, const VecXd& v0, const StepperConfig& cfg,
                              double tEnd, int sampleEvery = 10);

Verdict run_global_experiment(const DiscreteOperators& ops, const ProblemSpec& spec,
                              const VecXd& u0, const VecXd& v0, const StepperConfig& cfg,
                              double tEnd, const GlobalCertificate& cert, int sampleEvery = 10);

struct ContinuousDependenceResult {
    bool ok = false;
    std::vector<double> deltas;
    std::vector<double> supErrors;     // sup over samples of |du|_H1 + |dv|_H0
    std::vector<double> zNormProxies;  // time-integrated damping-weighted velocity gap
    double slope = 0;                  // log-log fit over the nonzero deltas
    std::string reason;
};

/// Perturbs u0 along `direction` by each delta and measures trajectory
/// divergence over [0, tEnd] at fixed mesh and dt.
ContinuousDependenceResult run_continuous_dependence(const DiscreteOperators& ops,
                                                     const ProblemSpec& spec, const VecXd& u0,
                                                     const VecXd& v0, const VecXd& direction,
                                                     const std::vector<double>& deltas,
                                                     const StepperConfig& cfg, double tEnd,
                                                     int sampleEvery = 10);

enum class StudyGeometry { Rod, Annulus };

struct ConvergenceResult {
    std::vector<int> levels;
    std::vector<double> measuredPeriods;
    std::vector<double> periodErrors;
    std::vector<double> ratios;  // consecutive error quotients
    double order = 0;            // mean log2 of the ratios
    double analyticPeriod = 0;
};

/// Conservative eigenmode run per refinement level with simultaneous dt
/// halving; returns the measured period-error decay.
ConvergenceResult run_convergence_study(StudyGeometry geometry, const std::vector<int>& levels,
                                        double dt0, double periods = 3.0);

/// Least-squares period from the zero crossings of a probe signal.
double measure_period(const std::vector<std::pair<double, double>>& probeSeries);

struct SweepAxis {
    std::string name;  // f_coef f_exponent g_coef g_exponent p_coef p_exponent
                       // q_coef q_exponent alpha beta
    std::vector<double> values;
};

struct SweepRow {
    std::vector<double> params;
    RegimeReport report;
    std::string verdictKind;  // Global | BlowUp | Inconclusive | none | error
    double tEstimate = 0;
    double maxUpsilon = 0;
    std::string note;
};

struct SweepOptions {
    bool runDynamics = true;
    double tEnd = 10.0;
    StepperConfig time;
    int sampleEvery = 50;
    double sMax = 1e9;
    int jobs = 1;
};

/// Cartesian grid over the axes; one row per grid point in lexicographic
/// order. Row failures are recorded in place, never propagated.
std::vector<SweepRow> sweep(const Mesh& mesh, const ProblemSpec& base,
                            const std::vector<SweepAxis>& axes, const SweepOptions& options);

/// Applies one axis value to a copy of the spec (helper shared with the CLI).
void apply_sweep_value(ProblemSpec& spec, const std::string& axis, double value);

}  // namespace dynbc
