#pragma once

#include "dynbc/assembly.hpp"
#include "dynbc/nonlin.hpp"
#include "dynbc/regime.hpp"

#include <vector>

namespace dynbc {

struct EnergySample {
    double t = 0;
    double kinetic = 0;             // 1/2 v' M v
    double potentialQuadratic = 0;  // 1/2 u' K u
    double J = 0;                   // source potential
    double E = 0;                   // kinetic + potentialQuadratic - J
    double dissipationCum = 0;      // running damping work
    double identityResidual = 0;    // |E(t) - E(0) + dissipationCum| / max(1, |E(0)|)
    double normH1 = 0;
    double normVH0 = 0;
    double normLp = 0;
    double normLqGamma1 = 0;
    double upsilon = 0;
    double dt = 0;
};

struct Trajectory {
    std::vector<EnergySample> samples;
};

/// Lumped source potential J(u) = sum w_i F(u_i) + sum w_i G(u_i).
double potential_J(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u);

/// Gradient of potential_J: the nodal source load vector.
VecXd source_gradient(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u);

/// Nodal damping action B_h(v)_i = w_i alpha_i P(v_i) + w_i beta_i Q(v_i).
VecXd damping_force(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& v);
VecXd damping_jacobian_diag(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& v);
/// Damping work rate <B_h(v), v>.
double damping_power(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& v);

/// Energy functionals at one instant (dissipation fields left at zero).
EnergySample energy(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u,
                    const VecXd& v);

/// Midpoint-velocity quadrature of the dissipation integral over one step.
double dissipation_increment(const DiscreteOperators& ops, const ProblemSpec& spec,
                             const VecXd& vMid, double dt);

/// Auxiliary functional 1/2|v|_H0^2 + 1/2|u|_H1^2 + I(u) with the certified
/// weighted-power functional I.
double upsilon(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u,
               const VecXd& v, const GlobalCertificate& cert);

/// Max relative residual of the discrete energy identity over the trajectory.
double energy_identity_residual(const Trajectory& traj);

}  // namespace dynbc
