#include "dynbc/stepper.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace dynbc {

namespace {

constexpr int kDirectSolveMaxDofs = 20000;

// Symmetric sparse solve: direct factorization for small systems, diagonally
// preconditioned CG above kDirectSolveMaxDofs.
class SymmetricSolver {
public:
    explicit SymmetricSolver(double tol) : tol_(tol) {}

    bool factorize(const SpMat& A) {
        if (A.rows() <= kDirectSolveMaxDofs) {
            direct_ = true;
            if (!analyzed_) {
                ldlt_.analyzePattern(A);
                analyzed_ = true;
            }
            ldlt_.factorize(A);
            return ldlt_.info() == Eigen::Success;
        }
        direct_ = false;
        cg_.setTolerance(tol_);
        cg_.compute(A);
        return cg_.info() == Eigen::Success;
    }

    VecXd solve(const VecXd& b) {
        if (direct_) return ldlt_.solve(b);
        return cg_.solve(b);
    }

private:
    bool direct_ = true;
    bool analyzed_ = false;
    double tol_;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg_;
};

SpMat with_diagonal(const SpMat& base, const VecXd& diag) {
    SpMat out = base;
    for (int i = 0; i < diag.size(); ++i)
        if (diag[i] != 0) out.coeffRef(i, i) += diag[i];
    return out;
}

// Truncation scale for the source input: clips (u,v) to the radius R in the
// discrete phase-space norm.
double truncation_scale(const DiscreteOperators& ops, const VecXd& u, const VecXd& v, double R) {
    if (!(R < kInf)) return 1.0;
    const double h1 = h1_norm(ops, u), h0 = h0_norm(ops, v);
    const double norm = std::sqrt(h1 * h1 + h0 * h0);
    return norm > R ? R / norm : 1.0;
}

}  // namespace

void StepperConfig::validate() const {
    if (!(dtMin > 0) || !(dtMin <= dtInit) || !(dtInit <= dtMax))
        throw InvalidParameterError("stepper: need 0 < dtMin <= dtInit <= dtMax");
    if (!(newtonTol > 0)) throw InvalidParameterError("stepper: newtonTol must be > 0");
    if (newtonMaxIters < 1) throw InvalidParameterError("stepper: newtonMaxIters must be >= 1");
    if (!(growthCap > 1)) throw InvalidParameterError("stepper: growthCap must be > 1");
    if (!(truncationRadius > 0)) throw InvalidParameterError("stepper: truncationRadius must be > 0");
}

ResolventResult solve_resolvent(const DiscreteOperators& ops, const ProblemSpec& spec,
                                const VecXd& rhs0, const VecXd& rhs1, double sigma, double tol,
                                int maxIters, const VecXd* initialGuess) {
    const int n = ops.numFree();
    if (rhs0.size() != n || rhs1.size() != n)
        throw ShapeError("solve_resolvent: rhs length mismatch");
    if (!(sigma > 0)) throw InvalidParameterError("solve_resolvent: sigma must be > 0");

    // eliminate u = (v + rhs1)/sigma: T(v) = sigma M v + (1/sigma) K v + B_h(v)
    const VecXd rhs = rhs0 - (1.0 / sigma) * (ops.stiffness * rhs1);
    const SpMat constPart = sigma * ops.mass + (1.0 / sigma) * ops.stiffness;
    const double rhsScale = 1.0 + rhs.norm();

    ResolventResult result;
    result.rhsNorm = rhs.norm();
    VecXd v = initialGuess ? *initialGuess : VecXd::Zero(n);
    SymmetricSolver solver(tol / 10);

    for (int iter = 0; iter <= maxIters; ++iter) {
        const VecXd residual = constPart * v + damping_force(ops, spec, v) - rhs;
        result.residual = residual.norm();
        result.iterations = iter;
        if (!std::isfinite(result.residual)) break;
        if (result.residual <= tol * rhsScale) {
            result.converged = true;
            break;
        }
        if (iter == maxIters) break;
        const SpMat jac = with_diagonal(constPart, damping_jacobian_diag(ops, spec, v));
        if (!solver.factorize(jac)) break;
        const VecXd dv = solver.solve(residual);
        if (!dv.allFinite()) break;
        v -= dv;
    }
    result.v = v;
    result.u = (v + rhs1) / sigma;
    return result;
}

namespace {

// One implicit stage: solve for the stage velocity w of
//   sigma M w + (1/sigma) K w + B_h(w) - F_h(trunc(u_n + w/sigma)) = sigma M v_n - K u_n,
// with sigma = 2/dt (midpoint, w = midpoint velocity) or 1/dt (backward Euler,
// w = end velocity).
struct StageSolve {
    VecXd w;
    int iterations = 0;
    bool converged = false;
};

struct StepWorkspace {
    double sigma = -1;
    SpMat constPart;
    SymmetricSolver solver;
    bool factorized = false;  // valid only while the Jacobian is constant
    bool constantJacobian = false;

    explicit StepWorkspace(double tol) : solver(tol) {}
};

bool jacobian_is_constant(const ProblemSpec& spec, const StepperConfig& cfg) {
    auto linear = [](const PowerSumSpec& s) {
        return std::all_of(s.terms.begin(), s.terms.end(),
                           [](const PowerTerm& t) { return t.coef == 0 || t.exponent == 2.0; });
    };
    return linear(spec.P) && linear(spec.Q) && linear(spec.f) && linear(spec.g) &&
           !(cfg.truncationRadius < kInf);
}

StageSolve solve_stage(const DiscreteOperators& ops, const ProblemSpec& spec,
                       const StepperConfig& cfg, StepWorkspace& ws, const VecXd& un,
                       const VecXd& vn, double sigma) {
    if (ws.sigma != sigma) {
        ws.constPart = sigma * ops.mass + (1.0 / sigma) * ops.stiffness;
        ws.constPart.makeCompressed();
        ws.sigma = sigma;
        ws.factorized = false;
    }
    const bool sources = spec.f.active() || spec.g.active();
    const VecXd rhs = sigma * (ops.mass * vn) - ops.stiffness * un;
    const double rhsScale = 1.0 + rhs.norm();

    StageSolve out;
    VecXd w = vn;
    double best = kInf;
    for (int iter = 0; iter <= cfg.newtonMaxIters; ++iter) {
        const VecXd uMid = un + w / sigma;
        const double scale = truncation_scale(ops, uMid, w, cfg.truncationRadius);
        const VecXd uSrc = scale == 1.0 ? uMid : VecXd(scale * uMid);
        VecXd residual = ws.constPart * w + damping_force(ops, spec, w) - rhs;
        if (sources) residual -= source_gradient(ops, spec, uSrc);
        const double rnorm = residual.norm();
        out.iterations = iter;
        if (!std::isfinite(rnorm)) return out;
        if (rnorm <= cfg.newtonTol * rhsScale) {
            out.converged = true;
            break;
        }
        if (rnorm > 4.0 * best && iter > 2) return out;  // divergent, give up early
        best = std::min(best, rnorm);
        if (iter == cfg.newtonMaxIters) return out;

        if (!ws.constantJacobian || !ws.factorized) {
            VecXd diag = damping_jacobian_diag(ops, spec, w);
            if (sources) {
                VecXd srcDiag = VecXd::Zero(ops.numFree());
                if (spec.f.active())
                    srcDiag += nemitskii_jacobian_diag(ops, spec.f, VecXd(), uSrc,
                                                       WeightDomain::Bulk);
                if (spec.g.active())
                    srcDiag += nemitskii_jacobian_diag(ops, spec.g, VecXd(), uSrc,
                                                       WeightDomain::Gamma1);
                diag -= (scale / sigma) * srcDiag;
            }
            if (!ws.solver.factorize(with_diagonal(ws.constPart, diag))) return out;
            ws.factorized = true;
        }
        const VecXd dw = ws.solver.solve(residual);
        if (!dw.allFinite()) return out;
        w -= dw;
    }
    out.w = std::move(w);
    return out;
}

struct BlowupFit {
    double tEstimate = 0;
    double gamma = 0;
};

// Fits C (T - t)^(-gamma) to the tail of the norm history: least squares of
// log(norm) against log(T - t), with T located by golden-section search.
BlowupFit fit_blowup_time(const std::vector<std::pair<double, double>>& history) {
    BlowupFit fit;
    if (history.empty()) return fit;
    const double tLast = history.back().first;
    const double nLast = history.back().second;
    fit.tEstimate = tLast;
    if (history.size() < 4 || !(nLast > 0)) return fit;

    std::vector<std::pair<double, double>> tail;  // (t, log norm)
    for (const auto& [t, n] : history)
        if (n >= nLast / 10 && n > 0 && t < tLast) tail.push_back({t, std::log(n)});
    tail.push_back({tLast, std::log(nLast)});
    if (tail.size() < 4) return fit;

    const double span = tLast - tail.front().first;
    if (!(span > 0)) return fit;
    const double lastGap = tLast - tail[tail.size() - 2].first;

    auto regress = [&tail](double T, double* slope) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        const auto n = static_cast<double>(tail.size());
        for (const auto& [t, y] : tail) {
            const double x = std::log(T - t);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        const double denom = n * sxx - sx * sx;
        if (!(std::abs(denom) > 0)) return kInf;
        const double b = (n * sxy - sx * sy) / denom;
        const double a = (sy - b * sx) / n;
        if (slope) *slope = b;
        double ssr = 0;
        for (const auto& [t, y] : tail) {
            const double r = y - (a + b * std::log(T - t));
            ssr += r * r;
        }
        return ssr;
    };

    // golden section on log(T - tLast)
    double lo = std::log(std::max(1e-300, 0.05 * lastGap));
    double hi = std::log(10 * span + lastGap);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = regress(tLast + std::exp(x1), nullptr);
    double f2 = regress(tLast + std::exp(x2), nullptr);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = regress(tLast + std::exp(x1), nullptr);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = regress(tLast + std::exp(x2), nullptr);
        }
    }
    const double T = tLast + std::exp(0.5 * (lo + hi));
    double slope = 0;
    if (std::isfinite(regress(T, &slope))) {
        fit.tEstimate = T;
        fit.gamma = -slope;
    }
    return fit;
}

}  // namespace

IntegrateResult integrate(const VecXd& u0, const VecXd& v0, double tEnd,
                          const DiscreteOperators& ops, const ProblemSpec& spec,
                          const StepperConfig& cfg, int sampleEvery,
                          const GlobalCertificate* cert, const StepObserver& observer) {
    cfg.validate();
    if (!(tEnd > 0)) throw InvalidParameterError("integrate: tEnd must be > 0");
    if (sampleEvery < 1) throw InvalidParameterError("integrate: sampleEvery must be >= 1");
    if (u0.size() != ops.numFree() || v0.size() != ops.numFree())
        throw ShapeError("integrate: data length mismatch");

    IntegrateResult result;
    const GlobalCertificate plain;  // zero constants: norm-only upsilon
    const GlobalCertificate& ucert = cert ? *cert : plain;

    if (!u0.allFinite() || !v0.allFinite()) {
        result.status = Termination::ResolventBreakdown;
        result.message = "non-finite initial data";
        return result;
    }

    State state{0.0, u0, v0, cfg.dtInit, 0};
    double dissCum = 0;
    double e0 = 0;

    auto phase_norm = [&](const VecXd& u, const VecXd& v) {
        const double h1 = h1_norm(ops, u), h0 = h0_norm(ops, v);
        return std::sqrt(h1 * h1 + h0 * h0);
    };
    auto record = [&](double dtUsed) {
        EnergySample s = energy(ops, spec, state.u, state.v);
        s.t = state.t;
        s.dissipationCum = dissCum;
        if (result.trajectory.samples.empty()) e0 = s.E;
        s.identityResidual = std::abs(s.E - e0 + dissCum) / std::max(1.0, std::abs(e0));
        s.upsilon = upsilon(ops, spec, state.u, state.v, ucert);
        s.dt = dtUsed;
        result.trajectory.samples.push_back(s);
    };

    double normOld = phase_norm(state.u, state.v);
    result.normHistory.push_back({0.0, normOld});
    record(cfg.dtInit);

    StepWorkspace ws(cfg.newtonTol / 10);
    ws.constantJacobian = jacobian_is_constant(spec, cfg);
    double phiOld = damping_power(ops, spec, state.v);

    const double tGuard = 1e-13 * std::max(1.0, tEnd);
    bool sampledLast = true;
    int consecutiveAccepts = 0;
    result.status = Termination::ReachedTEnd;

    while (tEnd - state.t > tGuard) {
        const double dt = std::min(state.dt, tEnd - state.t);
        const double sigma = (cfg.scheme == TimeScheme::Midpoint) ? 2.0 / dt : 1.0 / dt;
        StageSolve stage = solve_stage(ops, spec, cfg, ws, state.u, state.v, sigma);

        bool accept = stage.converged;
        VecXd uNew, vNew;
        double normNew = 0;
        if (accept) {
            uNew = state.u + dt * stage.w;
            vNew = (cfg.scheme == TimeScheme::Midpoint) ? VecXd(2.0 * stage.w - state.v)
                                                        : stage.w;
            accept = uNew.allFinite() && vNew.allFinite();
        }
        if (accept) {
            normNew = phase_norm(uNew, vNew);
            if (!std::isfinite(normNew)) accept = false;
            else if (normOld > 0 && normNew > cfg.growthCap * normOld) accept = false;
        }

        if (!accept) {
            ++result.rejectedSteps;
            consecutiveAccepts = 0;
            state.dt *= 0.5;
            ws.factorized = false;
            if (state.dt < cfg.dtMin) {
                result.status = Termination::BlowUpSuspected;
                result.message = "step size underflow during norm growth";
                break;
            }
            continue;
        }

        const double phiNew = damping_power(ops, spec, vNew);
        dissCum += 0.5 * dt * (phiOld + phiNew);  // endpoint trapezoid recording
        phiOld = phiNew;

        state.u = std::move(uNew);
        state.v = std::move(vNew);
        state.t += dt;
        state.newtonIters = stage.iterations;
        ++result.acceptedSteps;
        normOld = normNew;
        result.normHistory.push_back({state.t, normNew});
        if (observer) observer(state);

        sampledLast = (result.acceptedSteps % sampleEvery == 0);
        if (sampledLast) record(dt);

        // regrow cautiously: a failed Newton attempt is the expensive path
        if (++consecutiveAccepts >= 4 && state.dt < cfg.dtMax) {
            state.dt = std::min(state.dt * 2.0, cfg.dtMax);
            consecutiveAccepts = 0;
        }
    }

    if (!sampledLast) record(state.dt);
    result.finalState = state;
    result.finalNormH1H0 = normOld;
    result.finalNormLp = weighted_lp_norm(ops, state.u, spec.p(), VecXd(), WeightDomain::Bulk);
    result.finalNormLq = weighted_lp_norm(ops, state.u, spec.q(), VecXd(), WeightDomain::Gamma1);
    if (result.status == Termination::BlowUpSuspected) {
        const BlowupFit fit = fit_blowup_time(result.normHistory);
        result.tEstimate = fit.tEstimate;
        result.blowupGamma = fit.gamma;
    } else {
        result.tEstimate = state.t;
    }
    return result;
}

}  // namespace dynbc
