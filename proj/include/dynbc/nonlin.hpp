#pragma once

#include "dynbc/assembly.hpp"
#include "dynbc/types.hpp"

#include <string>
#include <vector>

namespace dynbc {

struct PowerTerm {
    double coef = 0;
    double exponent = 2;  // s -> coef * |s|^(exponent-2) * s
};

enum class NonlinKind { Damping, Source };

/// Odd power sum s -> sum coef |s|^(e-2) s + constant. Damping specs are
/// monotone by construction: coef >= 0, exponents > 1, constant 0.
struct PowerSumSpec {
    std::vector<PowerTerm> terms;
    double constantTerm = 0;
    NonlinKind kind = NonlinKind::Source;

    bool active() const;  // any nonzero coefficient or constant
    /// Largest exponent over nonzero terms, or `fallback` when inactive.
    double max_exponent(double fallback = 2.0) const;
};

PowerSumSpec make_damping(std::vector<PowerTerm> terms);
PowerSumSpec make_source(std::vector<PowerTerm> terms, double constant = 0);

/// Merges equal exponents, drops zero coefficients, sorts by exponent.
void normalize(PowerSumSpec& spec);
void validate_spec(const PowerSumSpec& spec);

double eval(const PowerSumSpec& spec, double s);
double eval_deriv(const PowerSumSpec& spec, double s);
double primitive(const PowerSumSpec& spec, double s);

/// Nonnegative nodal multiplier (alpha on Omega nodes, beta on Gamma1 nodes).
struct CoefficientField {
    VecXd values;                // one entry per mesh node
    double essentialInfimum = 0; // min over the support region
};

CoefficientField uniform_field(int numNodes, double value);
/// essentialInfimum over Gamma1 nodes only (support region of beta).
CoefficientField boundary_field(const Mesh& mesh, double value);

struct ProblemSpec {
    PowerSumSpec P = make_damping({});
    PowerSumSpec Q = make_damping({});
    PowerSumSpec f = make_source({});
    PowerSumSpec g = make_source({});
    CoefficientField alpha;  // damping coefficient on Omega
    CoefficientField beta;   // damping coefficient on Gamma1
    int dimension = 2;       // Sobolev dimension used by the classifier

    // exponent metadata; 2 when the corresponding part is inactive
    double m() const { return P.max_exponent(); }
    double mu() const { return Q.max_exponent(); }
    double p() const { return f.max_exponent(); }
    double q() const { return g.max_exponent(); }
};

/// Problem spec with unit coefficient fields sized for `mesh`.
ProblemSpec make_problem(const Mesh& mesh);

/// Discrete Nemitskii action out_i = w_i field_i eval(spec, vec_i) with the
/// lumped quadrature weights of `domain`. Field values are indexed by free dof
/// (empty field means 1).
VecXd nemitskii_force(const DiscreteOperators& ops, const PowerSumSpec& spec, const VecXd& field,
                      const VecXd& vec, WeightDomain domain);

/// Diagonal of the Nemitskii Jacobian: w_i field_i eval_deriv(spec, vec_i).
VecXd nemitskii_jacobian_diag(const DiscreteOperators& ops, const PowerSumSpec& spec,
                              const VecXd& field, const VecXd& vec, WeightDomain domain);

}  // namespace dynbc
