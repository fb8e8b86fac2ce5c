#include "dynbc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace dynbc {

double rod_eigen_wavenumber(double length) {
    if (!(length > 0)) throw InvalidParameterError("rod_eigen_wavenumber: length must be > 0");
    // k tan(kL) = 1, first branch
    double lo = 1e-9, hi = M_PI / (2 * length) - 1e-12;
    auto f = [length](double k) { return k * std::tan(k * length) - 1.0; };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double annulus_eigen_frequency(double r0, double r1) {
    if (!(r0 > 0 && r0 < r1)) throw InvalidParameterError("annulus_eigen_frequency: bad radii");
    // radial profile R(r) = J0(wr) Y0(wr0) - Y0(wr) J0(wr0) vanishes at r0;
    // the outer dynamic condition gives -w^2 R(r1) + R'(r1) = 0
    auto f = [r0, r1](double w) {
        const double R = std::cyl_bessel_j(0, w * r1) * std::cyl_neumann(0, w * r0) -
                         std::cyl_neumann(0, w * r1) * std::cyl_bessel_j(0, w * r0);
        const double Rp = -w * (std::cyl_bessel_j(1, w * r1) * std::cyl_neumann(0, w * r0) -
                                std::cyl_neumann(1, w * r1) * std::cyl_bessel_j(0, w * r0));
        return -w * w * R + Rp;
    };
    double prev = f(1e-3), lo = 1e-3;
    for (double w = 1e-3 + 1e-3; w < 50.0; w += 1e-3) {
        const double cur = f(w);
        if (prev * cur < 0) {
            double a = lo, b = w;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (a + b);
                (f(a) * f(mid) <= 0 ? b : a) = mid;
            }
            return 0.5 * (a + b);
        }
        prev = cur;
        lo = w;
    }
    throw InvalidParameterError("annulus_eigen_frequency: no root found");
}

namespace {

// smooth cutoff: 1 below 1/4, 0 above 3/4
double eta0(double s) {
    if (s <= 0.25) return 1.0;
    if (s >= 0.75) return 0.0;
    const double x = (s - 0.25) / 0.5;
    return 1.0 - x * x * (3.0 - 2.0 * x);
}

int lex_max_dof(const DiscreteOperators& ops, const std::vector<int>& candidates) {
    int best = candidates.front();
    for (int c : candidates) {
        for (int d = 0; d < ops.dim; ++d) {
            if (ops.freeCoords(c, d) > ops.freeCoords(best, d) + 1e-14) {
                best = c;
                break;
            }
            if (ops.freeCoords(c, d) < ops.freeCoords(best, d) - 1e-14) break;
        }
    }
    return best;
}

double distance_to_dirichlet(const DiscreteOperators& ops, int dof) {
    if (ops.dirichletCoords.rows() == 0) {
        // no pinched part: fall back to half the free-node bounding box diagonal
        const VecXd lo = ops.freeCoords.colwise().minCoeff();
        const VecXd hi = ops.freeCoords.colwise().maxCoeff();
        return 0.5 * (hi - lo).norm();
    }
    double best = kInf;
    for (int i = 0; i < ops.dirichletCoords.rows(); ++i)
        best = std::min(best, (ops.dirichletCoords.row(i) - ops.freeCoords.row(dof)).norm());
    return best;
}

VecXd bump_vector(const DiscreteOperators& ops, const VecXd& center, double radius,
                  double scale) {
    if (center.size() != ops.dim) throw ShapeError("bump: center dimension mismatch");
    if (!(radius > 0)) throw InvalidParameterError("bump: radius must be > 0");
    VecXd out(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) {
        const double d = (ops.freeCoords.row(i).transpose() - center).norm();
        out[i] = scale * eta0(d / radius);
    }
    return out;
}

VecXd eigenmode_vector(const DiscreteOperators& ops, double k) {
    VecXd out(ops.numFree());
    if (ops.dim == 1) {
        const double length = ops.freeCoords.col(0).maxCoeff();
        const double kk = (k > 0) ? k : rod_eigen_wavenumber(length);
        for (int i = 0; i < ops.numFree(); ++i) out[i] = std::sin(kk * ops.freeCoords(i, 0));
        return out;
    }
    // radial first mode; meaningful for the annulus geometry
    double r0 = kInf, r1 = 0;
    for (int i = 0; i < ops.numFree(); ++i) {
        const double r = ops.freeCoords.row(i).norm();
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
    }
    if (ops.dirichletCoords.rows() > 0)
        for (int i = 0; i < ops.dirichletCoords.rows(); ++i)
            r0 = std::min(r0, ops.dirichletCoords.row(i).norm());
    const double w = (k > 0) ? k : annulus_eigen_frequency(r0, r1);
    for (int i = 0; i < ops.numFree(); ++i) {
        const double r = ops.freeCoords.row(i).norm();
        out[i] = std::cyl_bessel_j(0, w * r) * std::cyl_neumann(0, w * r0) -
                 std::cyl_neumann(0, w * r) * std::cyl_bessel_j(0, w * r0);
    }
    return out;
}

std::pair<VecXd, VecXd> read_initial_file(const DiscreteOperators& ops, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("cannot open initial data file '" + path + "'");
    VecXd uN = VecXd::Zero(ops.freeDofMap.size());
    VecXd vN = VecXd::Zero(ops.freeDofMap.size());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string kind, tok;
        std::getline(ss, kind, ',');
        if (kind != "node")
            throw InvalidParameterError("initial data line " + std::to_string(lineno) +
                                        ": expected node record");
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != 3)
            throw InvalidParameterError("initial data line " + std::to_string(lineno) +
                                        ": expected node,<id>,<u>,<v>");
        const int id = static_cast<int>(vals[0]);
        if (id < 0 || id >= static_cast<int>(ops.freeDofMap.size()))
            throw InvalidParameterError("initial data: node id out of range");
        uN[id] = vals[1];
        vN[id] = vals[2];
        if (ops.freeDofMap[id] < 0 && (vals[1] != 0 || vals[2] != 0))
            throw InvalidParameterError("initial data: nonzero value on a Dirichlet node");
    }
    VecXd u(ops.numFree()), v(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) {
        u[i] = uN[ops.freeNodes[i]];
        v[i] = vN[ops.freeNodes[i]];
    }
    return {u, v};
}

VecXd profile_vector(const DiscreteOperators& ops, const InitialProfile& p) {
    switch (p.kind) {
        case InitialProfile::Kind::Zero:
            return VecXd::Zero(ops.numFree());
        case InitialProfile::Kind::Eigenmode:
            return eigenmode_vector(ops, p.k);
        case InitialProfile::Kind::Bump: {
            VecXd center = p.center;
            if (center.size() == 0) center = VecXd::Zero(ops.dim);
            return bump_vector(ops, center, p.radius, p.scale);
        }
        default:
            throw InvalidParameterError("profile kind not usable in this position");
    }
}

}  // namespace

std::pair<VecXd, VecXd> build_initial_data(const DiscreteOperators& ops, const ProblemSpec& spec,
                                           const InitialProfile& uProfile,
                                           const InitialProfile& vProfile) {
    if (uProfile.kind == InitialProfile::Kind::File) return read_initial_file(ops, uProfile.path);
    const VecXd v0 = profile_vector(ops, vProfile);
    if (uProfile.kind == InitialProfile::Kind::NegativeEnergy) {
        const NegativeEnergyData data = build_negative_energy_data(ops, spec, v0, uProfile.sMax);
        if (!data.ok)
            throw InvalidParameterError("negative-energy data construction failed: " +
                                        data.reason);
        return {data.u0, data.v0};
    }
    return {profile_vector(ops, uProfile), v0};
}

NegativeEnergyData build_negative_energy_data(const DiscreteOperators& ops,
                                              const ProblemSpec& spec, const VecXd& v0,
                                              double sMax) {
    NegativeEnergyData out;
    if (v0.size() != ops.numFree()) throw ShapeError("build_negative_energy_data: v0 length");
    if (!spec.f.active() && !spec.g.active()) {
        out.reason = "both sources vanish; the negative-energy set is empty";
        return out;
    }

    // bump seated where the source acts: on Gamma1 for a boundary source,
    // deep inside Omega otherwise
    int seed;
    if (spec.g.active() && !ops.boundaryDofs.empty()) {
        seed = lex_max_dof(ops, ops.boundaryDofs);
    } else {
        std::vector<int> all(ops.numFree());
        for (int i = 0; i < ops.numFree(); ++i) all[i] = i;
        seed = all.front();
        double best = -1;
        for (int i : all) {
            const double d = distance_to_dirichlet(ops, i);
            if (d > best + 1e-14) {
                best = d;
                seed = i;
            }
        }
    }
    const double rho = distance_to_dirichlet(ops, seed);
    const VecXd w0 = bump_vector(ops, ops.freeCoords.row(seed).transpose(), rho, 1.0);

    double s = 1.0;
    while (true) {
        out.energyValue = energy(ops, spec, VecXd(s * w0), v0).E;
        if (out.energyValue < 0) break;
        s *= 2.0;
        if (s > sMax) {
            std::ostringstream os;
            os << "scale cap " << sMax << " reached with E0 = " << out.energyValue;
            out.reason = os.str();
            return out;
        }
    }
    out.ok = true;
    out.scale = s;
    out.u0 = s * w0;
    out.v0 = v0;
    return out;
}

namespace {

void fill_common(Verdict& v, const IntegrateResult& r) {
    v.tEstimate = r.tEstimate;
    v.normAtAbort = r.finalNormH1H0;
    v.blowupGamma = r.blowupGamma;
    v.acceptedSteps = r.acceptedSteps;
    v.rejectedSteps = r.rejectedSteps;
    if (!r.trajectory.samples.empty()) v.finalSample = r.trajectory.samples.back();
}

}  // namespace

Verdict run_blowup_experiment(const DiscreteOperators& ops, const ProblemSpec& spec,
                              const VecXd& u0, const VecXd& v0, const StepperConfig& cfg,
                              double tEnd, int sampleEvery) {
    Verdict verdict;
    verdict.windowEnd = tEnd;
    const IntegrateResult r = integrate(u0, v0, tEnd, ops, spec, cfg, sampleEvery);
    fill_common(verdict, r);
    if (r.status == Termination::BlowUpSuspected) {
        const bool phase = r.finalNormH1H0 > kBlowupPhaseNormThreshold;
        const bool source = std::max(r.finalNormLp, r.finalNormLq) > kBlowupSourceNormThreshold;
        if (phase && source) {
            verdict.kind = Verdict::Kind::BlowUp;
        } else {
            verdict.kind = Verdict::Kind::Inconclusive;
            verdict.reason = "abort without joint norm divergence";
        }
    } else if (r.status == Termination::ReachedTEnd) {
        verdict.kind = Verdict::Kind::Inconclusive;
        verdict.reason = "window too short or thresholds unmet";
    } else {
        verdict.kind = Verdict::Kind::Inconclusive;
        verdict.reason = "resolvent breakdown: " + r.message;
    }
    return verdict;
}

Verdict run_global_experiment(const DiscreteOperators& ops, const ProblemSpec& spec,
                              const VecXd& u0, const VecXd& v0, const StepperConfig& cfg,
                              double tEnd, const GlobalCertificate& cert, int sampleEvery) {
    Verdict verdict;
    verdict.windowEnd = tEnd;
    const IntegrateResult r = integrate(u0, v0, tEnd, ops, spec, cfg, sampleEvery, &cert);
    fill_common(verdict, r);
    if (r.status != Termination::ReachedTEnd) {
        verdict.kind = (r.status == Termination::BlowUpSuspected) ? Verdict::Kind::BlowUp
                                                                  : Verdict::Kind::Inconclusive;
        verdict.reason = (r.status == Termination::BlowUpSuspected)
                             ? "norm growth aborted a certified-global run"
                             : ("resolvent breakdown: " + r.message);
        return verdict;
    }
    verdict.kind = Verdict::Kind::Global;
    // affine fit of log upsilon: the discrete shadow of the Gronwall envelope
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& s : r.trajectory.samples) {
        verdict.maxUpsilon = std::max(verdict.maxUpsilon, s.upsilon);
        const double y = std::log(std::max(s.upsilon, 1e-300));
        sx += s.t;
        sy += y;
        sxx += s.t * s.t;
        sxy += s.t * y;
        ++n;
    }
    const double denom = n * sxx - sx * sx;
    if (denom > 0) {
        const double b = (n * sxy - sx * sy) / denom;
        const double a = (sy - b * sx) / n;
        verdict.upsilonRate = b;
        for (const auto& s : r.trajectory.samples) {
            const double y = std::log(std::max(s.upsilon, 1e-300));
            verdict.upsilonFitResidual =
                std::max(verdict.upsilonFitResidual, std::abs(y - (a + b * s.t)));
        }
    }
    return verdict;
}

ContinuousDependenceResult run_continuous_dependence(const DiscreteOperators& ops,
                                                     const ProblemSpec& spec, const VecXd& u0,
                                                     const VecXd& v0, const VecXd& direction,
                                                     const std::vector<double>& deltas,
                                                     const StepperConfig& cfg, double tEnd,
                                                     int sampleEvery) {
    ContinuousDependenceResult out;
    out.deltas = deltas;
    if (direction.size() != ops.numFree())
        throw ShapeError("run_continuous_dependence: direction length");

    std::vector<std::pair<VecXd, VecXd>> baseline;
    long long count = 0;
    auto baseObserver = [&](const State& s) {
        if (++count % sampleEvery == 0) baseline.push_back({s.u, s.v});
    };
    const IntegrateResult base =
        integrate(u0, v0, tEnd, ops, spec, cfg, sampleEvery, nullptr, baseObserver);
    if (base.status != Termination::ReachedTEnd) {
        out.reason = "baseline run aborted";
        return out;
    }

    const double m = spec.m(), mu = spec.mu();
    for (double delta : deltas) {
        double sup = 0, zBulk = 0, zBdry = 0;
        size_t idx = 0;
        long long c2 = 0;
        bool aligned = true;
        auto observer = [&](const State& s) {
            if (++c2 % sampleEvery != 0) return;
            if (idx >= baseline.size()) {
                aligned = false;
                return;
            }
            const VecXd du = s.u - baseline[idx].first;
            const VecXd dv = s.v - baseline[idx].second;
            sup = std::max(sup, h1_norm(ops, du) + h0_norm(ops, dv));
            const double w = s.dt * sampleEvery;  // quadrature weight between samples
            for (int i = 0; i < ops.numFree(); ++i) {
                const int node = ops.freeNodes[i];
                const double a = spec.alpha.values.size() ? spec.alpha.values[node] : 1.0;
                const double b = spec.beta.values.size() ? spec.beta.values[node] : 1.0;
                zBulk += w * ops.lumpedBulkWeights[i] * a * std::pow(std::abs(dv[i]), m);
                zBdry += w * ops.lumpedBoundaryWeights[i] * b * std::pow(std::abs(dv[i]), mu);
            }
            ++idx;
        };
        const VecXd up = u0 + delta * direction;
        const IntegrateResult r =
            integrate(up, v0, tEnd, ops, spec, cfg, sampleEvery, nullptr, observer);
        if (r.status != Termination::ReachedTEnd || !aligned) {
            out.reason = "perturbed run aborted";
            return out;
        }
        out.supErrors.push_back(sup);
        out.zNormProxies.push_back(std::pow(zBulk, 1.0 / m) + std::pow(zBdry, 1.0 / mu));
    }

    // log-log slope over the strictly positive deltas
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0) || !(out.supErrors[i] > 0)) continue;
        const double x = std::log(deltas[i]), y = std::log(out.supErrors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) {
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        out.ok = true;
    } else {
        out.reason = "not enough positive error points for a slope";
    }
    return out;
}

double measure_period(const std::vector<std::pair<double, double>>& probeSeries) {
    std::vector<double> crossings;
    for (size_t i = 0; i + 1 < probeSeries.size(); ++i) {
        const auto [t0, y0] = probeSeries[i];
        const auto [t1, y1] = probeSeries[i + 1];
        if (y0 == 0.0) crossings.push_back(t0);
        else if (y0 * y1 < 0) crossings.push_back(t0 - y0 * (t1 - t0) / (y1 - y0));
    }
    if (crossings.size() < 3)
        throw PreconditionError("measure_period: need at least three zero crossings");
    // crossings are half a period apart: least squares on index -> time
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(crossings.size());
    for (size_t j = 0; j < crossings.size(); ++j) {
        const double x = static_cast<double>(j);
        sx += x;
        sy += crossings[j];
        sxx += x * x;
        sxy += x * crossings[j];
    }
    const double halfPeriod = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return 2.0 * halfPeriod;
}

ConvergenceResult run_convergence_study(StudyGeometry geometry, const std::vector<int>& levels,
                                        double dt0, double periods) {
    if (levels.size() < 2)
        throw InvalidParameterError("run_convergence_study: need at least two levels");
    ConvergenceResult out;
    out.levels = levels;

    double analyticOmega;
    if (geometry == StudyGeometry::Rod) analyticOmega = rod_eigen_wavenumber(1.0);
    else analyticOmega = annulus_eigen_frequency(0.3, 1.0);
    out.analyticPeriod = 2.0 * M_PI / analyticOmega;

    for (size_t lev = 0; lev < levels.size(); ++lev) {
        const int n = levels[lev];
        Mesh mesh = (geometry == StudyGeometry::Rod) ? generate_interval(1.0, n)
                                                     : generate_annulus(0.3, 1.0, n, 4 * n);
        const DiscreteOperators ops = assemble(mesh);
        ProblemSpec spec = make_problem(mesh);
        InitialProfile uProf;
        uProf.kind = InitialProfile::Kind::Eigenmode;
        auto [u0, v0] = build_initial_data(ops, spec, uProf, InitialProfile{});

        StepperConfig cfg;
        const double dt = dt0 * levels[0] / n;
        cfg.dtInit = cfg.dtMin = cfg.dtMax = dt;

        const int probe = lex_max_dof(ops, ops.boundaryDofs.empty()
                                               ? std::vector<int>{0}
                                               : ops.boundaryDofs);
        std::vector<std::pair<double, double>> series;
        series.reserve(static_cast<size_t>(periods * out.analyticPeriod / dt) + 2);
        series.push_back({0.0, u0[probe]});
        auto observer = [&](const State& s) { series.push_back({s.t, s.u[probe]}); };
        integrate(u0, v0, periods * out.analyticPeriod, ops, spec, cfg, 1 << 30, nullptr,
                  observer);

        const double period = measure_period(series);
        out.measuredPeriods.push_back(period);
        out.periodErrors.push_back(std::abs(period - out.analyticPeriod));
    }
    for (size_t i = 0; i + 1 < out.periodErrors.size(); ++i)
        out.ratios.push_back(out.periodErrors[i] / std::max(out.periodErrors[i + 1], 1e-300));
    double s = 0;
    for (double r : out.ratios) s += std::log2(std::max(r, 1e-300));
    out.order = out.ratios.empty() ? 0.0 : s / static_cast<double>(out.ratios.size());
    return out;
}

void apply_sweep_value(ProblemSpec& spec, const std::string& axis, double value) {
    auto leading = [](PowerSumSpec& s) -> PowerTerm& {
        if (s.terms.empty())
            s.terms.push_back({1.0, s.kind == NonlinKind::Damping ? 2.0 : 2.0});
        return s.terms.back();
    };
    if (axis == "f_coef") leading(spec.f).coef = value;
    else if (axis == "f_exponent") leading(spec.f).exponent = value;
    else if (axis == "g_coef") leading(spec.g).coef = value;
    else if (axis == "g_exponent") leading(spec.g).exponent = value;
    else if (axis == "p_coef") leading(spec.P).coef = value;
    else if (axis == "p_exponent") leading(spec.P).exponent = value;
    else if (axis == "q_coef") leading(spec.Q).coef = value;
    else if (axis == "q_exponent") leading(spec.Q).exponent = value;
    else if (axis == "alpha") spec.alpha.values.setConstant(value), spec.alpha.essentialInfimum = value;
    else if (axis == "beta") spec.beta.values.setConstant(value), spec.beta.essentialInfimum = value;
    else throw InvalidParameterError("unknown sweep axis '" + axis + "'");
    validate_spec(spec.f);
    validate_spec(spec.g);
    validate_spec(spec.P);
    validate_spec(spec.Q);
}

std::vector<SweepRow> sweep(const Mesh& mesh, const ProblemSpec& base,
                            const std::vector<SweepAxis>& axes, const SweepOptions& options) {
    if (axes.empty()) throw InvalidParameterError("sweep: need at least one axis");
    size_t total = 1;
    for (const auto& ax : axes) {
        if (ax.values.empty()) throw InvalidParameterError("sweep: empty axis '" + ax.name + "'");
        total *= ax.values.size();
    }

    const DiscreteOperators ops = assemble(mesh);
    std::vector<SweepRow> rows(total);

    auto runRow = [&](size_t index) {
        SweepRow& row = rows[index];
        size_t rest = index;
        std::vector<double> params(axes.size());
        for (size_t a = axes.size(); a-- > 0;) {
            params[a] = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
        }
        row.params = params;
        try {
            ProblemSpec spec = base;
            for (size_t a = 0; a < axes.size(); ++a)
                apply_sweep_value(spec, axes[a].name, params[a]);
            row.report = classify(spec);
            if (!options.runDynamics) {
                row.verdictKind = "none";
                return;
            }
            const VecXd zero = VecXd::Zero(ops.numFree());
            if (row.report.blowup.accepted) {
                const NegativeEnergyData data =
                    build_negative_energy_data(ops, spec, zero, options.sMax);
                if (!data.ok) {
                    row.verdictKind = "Inconclusive";
                    row.note = data.reason;
                    return;
                }
                row.report.energySign = data.energyValue;
                const Verdict v = run_blowup_experiment(ops, spec, data.u0, data.v0,
                                                        options.time, options.tEnd,
                                                        options.sampleEvery);
                row.verdictKind = v.kind == Verdict::Kind::BlowUp ? "BlowUp" : "Inconclusive";
                row.tEstimate = v.tEstimate;
                row.maxUpsilon = v.finalSample.upsilon;
                row.note = v.reason;
            } else {
                InitialProfile bumpProf;
                bumpProf.kind = InitialProfile::Kind::Bump;
                bumpProf.radius = 0.5;
                auto [u0, v0] = build_initial_data(ops, spec, bumpProf, InitialProfile{});
                row.report.energySign = energy_sign(ops, spec, u0, v0);
                const Verdict v = run_global_experiment(ops, spec, u0, v0, options.time,
                                                        options.tEnd, row.report.global.cert,
                                                        options.sampleEvery);
                row.tEstimate = v.tEstimate;
                row.maxUpsilon = v.maxUpsilon;
                if (v.kind == Verdict::Kind::Global) row.verdictKind = "Global";
                else if (v.kind == Verdict::Kind::BlowUp) row.verdictKind = "BlowUp";
                else row.verdictKind = "Inconclusive";
                if (!row.report.global.accepted && row.note.empty())
                    row.note = "uncertified gap region";
            }
        } catch (const std::exception& e) {
            row.verdictKind = "error";
            row.note = e.what();
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < total; ++i) runRow(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) runRow(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace dynbc
