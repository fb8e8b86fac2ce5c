#include "dynbc/energy.hpp"

#include <cmath>

namespace dynbc {

namespace {

// empty coefficient field acts as the constant 1
inline double field_at(const CoefficientField& f, int node) {
    return f.values.size() ? f.values[node] : 1.0;
}

}  // namespace

double potential_J(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u) {
    if (u.size() != ops.numFree()) throw ShapeError("potential_J: length mismatch");
    double J = 0;
    const bool fActive = spec.f.active(), gActive = spec.g.active();
    for (int i = 0; i < ops.numFree(); ++i) {
        if (fActive) J += ops.lumpedBulkWeights[i] * primitive(spec.f, u[i]);
        if (gActive) J += ops.lumpedBoundaryWeights[i] * primitive(spec.g, u[i]);
    }
    return J;
}

VecXd source_gradient(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u) {
    if (u.size() != ops.numFree()) throw ShapeError("source_gradient: length mismatch");
    VecXd out = VecXd::Zero(ops.numFree());
    const bool fActive = spec.f.active(), gActive = spec.g.active();
    for (int i = 0; i < ops.numFree(); ++i) {
        if (fActive) out[i] += ops.lumpedBulkWeights[i] * eval(spec.f, u[i]);
        if (gActive) out[i] += ops.lumpedBoundaryWeights[i] * eval(spec.g, u[i]);
    }
    return out;
}

VecXd damping_force(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& v) {
    if (v.size() != ops.numFree()) throw ShapeError("damping_force: length mismatch");
    VecXd out = VecXd::Zero(ops.numFree());
    const bool pActive = spec.P.active(), qActive = spec.Q.active();
    for (int i = 0; i < ops.numFree(); ++i) {
        if (pActive)
            out[i] += ops.lumpedBulkWeights[i] * field_at(spec.alpha, ops.freeNodes[i]) *
                      eval(spec.P, v[i]);
        if (qActive)
            out[i] += ops.lumpedBoundaryWeights[i] * field_at(spec.beta, ops.freeNodes[i]) *
                      eval(spec.Q, v[i]);
    }
    return out;
}

VecXd damping_jacobian_diag(const DiscreteOperators& ops, const ProblemSpec& spec,
                            const VecXd& v) {
    if (v.size() != ops.numFree()) throw ShapeError("damping_jacobian_diag: length mismatch");
    VecXd out = VecXd::Zero(ops.numFree());
    const bool pActive = spec.P.active(), qActive = spec.Q.active();
    for (int i = 0; i < ops.numFree(); ++i) {
        if (pActive)
            out[i] += ops.lumpedBulkWeights[i] * field_at(spec.alpha, ops.freeNodes[i]) *
                      eval_deriv(spec.P, v[i]);
        if (qActive)
            out[i] += ops.lumpedBoundaryWeights[i] * field_at(spec.beta, ops.freeNodes[i]) *
                      eval_deriv(spec.Q, v[i]);
    }
    return out;
}

double damping_power(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& v) {
    return damping_force(ops, spec, v).dot(v);
}

EnergySample energy(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u,
                    const VecXd& v) {
    if (u.size() != ops.numFree() || v.size() != ops.numFree())
        throw ShapeError("energy: length mismatch");
    if (!u.allFinite() || !v.allFinite()) throw NonFiniteStateError("energy: non-finite state");
    EnergySample s;
    s.kinetic = 0.5 * v.dot(ops.mass * v);
    s.potentialQuadratic = 0.5 * u.dot(ops.stiffness * u);
    s.J = potential_J(ops, spec, u);
    s.E = s.kinetic + s.potentialQuadratic - s.J;
    s.normH1 = h1_norm(ops, u);
    s.normVH0 = h0_norm(ops, v);
    s.normLp = weighted_lp_norm(ops, u, spec.p(), VecXd(), WeightDomain::Bulk);
    s.normLqGamma1 = weighted_lp_norm(ops, u, spec.q(), VecXd(), WeightDomain::Gamma1);
    return s;
}

double dissipation_increment(const DiscreteOperators& ops, const ProblemSpec& spec,
                             const VecXd& vMid, double dt) {
    if (!(dt > 0)) throw InvalidParameterError("dissipation_increment: dt must be > 0");
    return dt * damping_power(ops, spec, vMid);
}

double upsilon(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u,
               const VecXd& v, const GlobalCertificate& cert) {
    if (u.size() != ops.numFree() || v.size() != ops.numFree())
        throw ShapeError("upsilon: length mismatch");
    const double h0 = h0_norm(ops, v), h1 = h1_norm(ops, u);
    double I = 0;
    for (int i = 0; i < ops.numFree(); ++i) {
        const int n = ops.freeNodes[i];
        if (cert.Cp1 > 0)
            I += cert.Cp1 * ops.lumpedBulkWeights[i] * field_at(spec.alpha, n) *
                 std::pow(std::abs(u[i]), cert.p1);
        if (cert.Cq1 > 0)
            I += cert.Cq1 * ops.lumpedBoundaryWeights[i] * field_at(spec.beta, n) *
                 std::pow(std::abs(u[i]), cert.q1);
    }
    return 0.5 * h0 * h0 + 0.5 * h1 * h1 + I;
}

double energy_identity_residual(const Trajectory& traj) {
    if (traj.samples.size() < 2)
        throw PreconditionError("energy_identity_residual: need at least two samples");
    const double e0 = traj.samples.front().E;
    const double scale = std::max(1.0, std::abs(e0));
    double worst = 0;
    for (const auto& s : traj.samples)
        worst = std::max(worst, std::abs(s.E - e0 + s.dissipationCum) / scale);
    return worst;
}

}  // namespace dynbc
