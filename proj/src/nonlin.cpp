#include "dynbc/nonlin.hpp"

#include <algorithm>
#include <cmath>

namespace dynbc {

bool PowerSumSpec::active() const {
    if (constantTerm != 0) return true;
    return std::any_of(terms.begin(), terms.end(), [](const PowerTerm& t) { return t.coef != 0; });
}

double PowerSumSpec::max_exponent(double fallback) const {
    double m = 0;
    for (const auto& t : terms)
        if (t.coef != 0) m = std::max(m, t.exponent);
    return m > 0 ? m : fallback;
}

void normalize(PowerSumSpec& spec) {
    std::sort(spec.terms.begin(), spec.terms.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
    std::vector<PowerTerm> merged;
    for (const auto& t : spec.terms) {
        if (!merged.empty() && merged.back().exponent == t.exponent) merged.back().coef += t.coef;
        else merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const PowerTerm& t) { return t.coef == 0; }),
                 merged.end());
    spec.terms = std::move(merged);
}

void validate_spec(const PowerSumSpec& spec) {
    for (const auto& t : spec.terms) {
        if (!std::isfinite(t.coef) || !std::isfinite(t.exponent))
            throw InvalidParameterError("power term must be finite");
        if (spec.kind == NonlinKind::Damping) {
            if (t.coef < 0) throw InvalidParameterError("damping coefficient must be >= 0");
            if (t.exponent <= 1) throw InvalidParameterError("damping exponent must be > 1");
        } else if (t.exponent < 2) {
            throw InvalidParameterError("source exponent must be >= 2");
        }
    }
    if (spec.kind == NonlinKind::Damping && spec.constantTerm != 0)
        throw InvalidParameterError("damping constant term must be 0");
}

PowerSumSpec make_damping(std::vector<PowerTerm> terms) {
    PowerSumSpec spec;
    spec.kind = NonlinKind::Damping;
    spec.terms = std::move(terms);
    normalize(spec);
    validate_spec(spec);
    return spec;
}

PowerSumSpec make_source(std::vector<PowerTerm> terms, double constant) {
    PowerSumSpec spec;
    spec.kind = NonlinKind::Source;
    spec.terms = std::move(terms);
    spec.constantTerm = constant;
    normalize(spec);
    validate_spec(spec);
    return spec;
}

double eval(const PowerSumSpec& spec, double s) {
    double out = spec.constantTerm;
    for (const auto& t : spec.terms) {
        if (t.exponent == 2.0) out += t.coef * s;
        else out += t.coef * std::pow(std::abs(s), t.exponent - 2.0) * s;
    }
    return out;
}

double eval_deriv(const PowerSumSpec& spec, double s) {
    // kink regularization: for 1 < e < 2 the a.e. derivative blows up at 0;
    // cap with |s| >= eps so Newton matrices stay finite
    constexpr double eps = 1e-12;
    double out = 0;
    for (const auto& t : spec.terms) {
        const double e = t.exponent;
        if (e == 2.0) {
            out += t.coef;
        } else if (e > 2.0) {
            out += t.coef * (e - 1.0) * std::pow(std::abs(s), e - 2.0);
        } else {
            out += t.coef * (e - 1.0) * std::pow(std::max(std::abs(s), eps), e - 2.0);
        }
    }
    return out;
}

double primitive(const PowerSumSpec& spec, double s) {
    double out = spec.constantTerm * s;
    for (const auto& t : spec.terms)
        out += t.coef * std::pow(std::abs(s), t.exponent) / t.exponent;
    return out;
}

CoefficientField uniform_field(int numNodes, double value) {
    if (value < 0) throw InvalidParameterError("coefficient field must be >= 0");
    CoefficientField field;
    field.values = VecXd::Constant(numNodes, value);
    field.essentialInfimum = value;
    return field;
}

CoefficientField boundary_field(const Mesh& mesh, double value) {
    if (value < 0) throw InvalidParameterError("coefficient field must be >= 0");
    CoefficientField field;
    field.values = VecXd::Constant(mesh.numNodes(), value);
    field.essentialInfimum = mesh.gamma1Nodes().empty() ? 0.0 : value;
    return field;
}

ProblemSpec make_problem(const Mesh& mesh) {
    ProblemSpec spec;
    spec.alpha = uniform_field(mesh.numNodes(), 1.0);
    spec.beta = boundary_field(mesh, 1.0);
    spec.dimension = 2;
    return spec;
}

VecXd nemitskii_force(const DiscreteOperators& ops, const PowerSumSpec& spec, const VecXd& field,
                      const VecXd& vec, WeightDomain domain) {
    if (vec.size() != ops.numFree()) throw ShapeError("nemitskii_force: length mismatch");
    if (field.size() != 0 && field.size() != ops.numFree())
        throw ShapeError("nemitskii_force: field length mismatch");
    const VecXd& w =
        domain == WeightDomain::Bulk ? ops.lumpedBulkWeights : ops.lumpedBoundaryWeights;
    VecXd out(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) {
        const double fi = field.size() ? field[i] : 1.0;
        out[i] = w[i] * fi * eval(spec, vec[i]);
    }
    return out;
}

VecXd nemitskii_jacobian_diag(const DiscreteOperators& ops, const PowerSumSpec& spec,
                              const VecXd& field, const VecXd& vec, WeightDomain domain) {
    if (vec.size() != ops.numFree()) throw ShapeError("nemitskii_jacobian_diag: length mismatch");
    if (field.size() != 0 && field.size() != ops.numFree())
        throw ShapeError("nemitskii_jacobian_diag: field length mismatch");
    const VecXd& w =
        domain == WeightDomain::Bulk ? ops.lumpedBulkWeights : ops.lumpedBoundaryWeights;
    VecXd out(ops.numFree());
    for (int i = 0; i < ops.numFree(); ++i) {
        const double fi = field.size() ? field[i] : 1.0;
        out[i] = w[i] * fi * eval_deriv(spec, vec[i]);
    }
    return out;
}

}  // namespace dynbc
