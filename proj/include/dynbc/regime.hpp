#pragma once

#include "dynbc/nonlin.hpp"
#include "dynbc/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace dynbc {

/// Blow-up hypothesis certificate: the per-side superlinearity bounds.
/// A side is absent when the corresponding source vanishes.
struct BlowupCheck {
    bool accepted = false;
    std::optional<double> pBar;
    std::optional<double> qBar;
    std::string reason;  // rejection reason when not accepted
};

/// Global-existence certificate with the constants entering the auxiliary
/// functional: I(u) = Cp1 sum w alpha |u|^p1 + Cq1 sum w beta |u|^q1.
struct GlobalCertificate {
    double p1 = 2, q1 = 2;
    double Cp1 = 0, Cq1 = 0;
};

struct GlobalCheck {
    bool accepted = false;
    GlobalCertificate cert;
    std::string reason;
};

struct RegimeReport {
    int dimension = 2;
    double rOmega = kInf, rGamma = kInf;
    double l = 2, lambda = kInf;
    bool subcritical = false;
    bool regularityBasic = false;
    bool regularityOptimal = false;
    bool supercriticalDamping = false;
    BlowupCheck blowup;
    GlobalCheck global;
    std::optional<double> energySign;  // E0(u0,u1) when data supplied
};

/// Sobolev embedding limits (rOmega, rGamma); infinite in low dimension.
std::pair<double, double> critical_exponents(int N);

/// Regularity exponents (l, lambda) from the damping growth.
std::pair<double, double> exponents_l_lambda(double m, double mu, int N);

bool check_subcritical(double p, double q, int N);

/// (basic, optimal) regularity flags for the damping exponents.
std::pair<bool, bool> check_regularity(double m, double mu, int N);

BlowupCheck check_blowup_hypotheses(const ProblemSpec& spec);
GlobalCheck check_global_hypotheses(const ProblemSpec& spec);

struct DiscreteOperators;  // assembly.hpp

/// Initial energy E0(u0, v0); negative values mark the blow-up data set.
double energy_sign(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u0,
                   const VecXd& v0);

RegimeReport classify(const ProblemSpec& spec);

std::string format_report_text(const RegimeReport& report);
/// Flat key=value block; infinities emitted as "inf".
std::string format_report_keyvalues(const RegimeReport& report);

}  // namespace dynbc
