#include "dynbc/regime.hpp"

#include "dynbc/energy.hpp"

#include <cmath>
#include <sstream>

namespace dynbc {

std::pair<double, double> critical_exponents(int N) {
    if (N < 2) throw InvalidParameterError("critical_exponents: need N >= 2");
    const double rOmega = (N >= 3) ? 2.0 * N / (N - 2) : kInf;
    const double rGamma = (N >= 4) ? 2.0 * (N - 1) / (N - 3) : kInf;
    return {rOmega, rGamma};
}

std::pair<double, double> exponents_l_lambda(double m, double mu, int N) {
    if (!(m > 1) || !(mu > 1))
        throw InvalidParameterError("exponents_l_lambda: need m, mu > 1");
    const auto [rOmega, rGamma] = critical_exponents(N);
    const double l =
        std::min({2.0, std::max(m, rOmega) / (m - 1), std::max(mu, rGamma) / (mu - 1)});
    double lambda;
    if (m <= rOmega && mu <= rGamma) lambda = kInf;
    else lambda = std::min(m / (m - 1), mu / (mu - 1));
    return {l, lambda};
}

bool check_subcritical(double p, double q, int N) {
    if (!(p >= 2) || !(q >= 2)) throw InvalidParameterError("check_subcritical: need p, q >= 2");
    const auto [rOmega, rGamma] = critical_exponents(N);
    return p <= 1 + rOmega / 2 && q <= 1 + rGamma / 2;
}

std::pair<bool, bool> check_regularity(double m, double mu, int N) {
    if (!(m > 1) || !(mu > 1)) throw InvalidParameterError("check_regularity: need m, mu > 1");
    const auto [rOmega, rGamma] = critical_exponents(N);
    const bool basic = m <= rOmega && mu <= rGamma;
    const bool optimal = m <= 1 + rOmega / 2 && mu <= 1 + rGamma / 2;
    return {basic, optimal};
}

namespace {

bool is_linear_damping(const PowerSumSpec& damping) {
    PowerSumSpec d = damping;
    normalize(d);
    if (d.terms.empty()) return true;  // vanishing coefficient field
    return d.terms.size() == 1 && d.terms[0].exponent == 2.0 && d.terms[0].coef > 0;
}

// One side of the blow-up check; fills minExponent when the side is active.
bool blowup_side(const PowerSumSpec& src, const char* name, std::optional<double>& minExponent,
                 std::string& reason) {
    PowerSumSpec s = src;
    normalize(s);
    if (s.constantTerm != 0) {
        reason = std::string(name) + ": constant term must vanish";
        return false;
    }
    if (s.terms.empty()) return true;  // inactive side
    double lo = kInf;
    for (const auto& t : s.terms) {
        if (t.coef < 0) {
            reason = std::string(name) + ": mixed-sign terms are outside the certified family";
            return false;
        }
        lo = std::min(lo, t.exponent);
    }
    if (!(lo > 2)) {
        reason = std::string(name) + ": smallest active exponent must exceed 2";
        return false;
    }
    minExponent = lo;
    return true;
}

}  // namespace

BlowupCheck check_blowup_hypotheses(const ProblemSpec& spec) {
    BlowupCheck out;
    if (!is_linear_damping(spec.P) || !is_linear_damping(spec.Q)) {
        out.reason = "damping must be linear";
        return out;
    }
    if (!blowup_side(spec.f, "f", out.pBar, out.reason)) return out;
    if (!blowup_side(spec.g, "g", out.qBar, out.reason)) return out;
    if (!out.pBar && !out.qBar) {
        out.reason = "both sources vanish; the negative-energy set is empty";
        return out;
    }
    out.accepted = true;
    return out;
}

namespace {

// One side of the global check: every positive source term must be dominated
// by the damping growth, with an active coefficient field when superquadratic.
bool global_side(const PowerSumSpec& src, double dampingExp, double essInf, const char* name,
                 double& pOut, double& cOut, std::string& reason) {
    PowerSumSpec s = src;
    normalize(s);
    const double cap = std::max(2.0, dampingExp);
    double pMax = 2.0;
    double coefSum = 0;
    for (const auto& t : s.terms) {
        if (t.coef <= 0) continue;  // sinks need no domination
        if (t.exponent > cap) {
            std::ostringstream os;
            os << name << ": source exponent " << t.exponent
               << " exceeds the damping bound max(2, " << dampingExp << ")";
            reason = os.str();
            return false;
        }
        if (t.exponent > 2 && !(essInf > 0)) {
            reason = std::string(name) +
                     ": superquadratic source needs a strictly positive damping field";
            return false;
        }
        pMax = std::max(pMax, t.exponent);
        coefSum += t.coef / t.exponent;
    }
    pOut = pMax;
    cOut = (pMax > 2) ? (coefSum + std::abs(s.constantTerm)) / essInf : 0.0;
    return true;
}

}  // namespace

GlobalCheck check_global_hypotheses(const ProblemSpec& spec) {
    GlobalCheck out;
    if (!global_side(spec.f, spec.m(), spec.alpha.essentialInfimum, "f", out.cert.p1, out.cert.Cp1,
                     out.reason))
        return out;
    if (!global_side(spec.g, spec.mu(), spec.beta.essentialInfimum, "g", out.cert.q1, out.cert.Cq1,
                     out.reason))
        return out;
    out.accepted = true;
    return out;
}

double energy_sign(const DiscreteOperators& ops, const ProblemSpec& spec, const VecXd& u0,
                   const VecXd& v0) {
    return energy(ops, spec, u0, v0).E;
}

RegimeReport classify(const ProblemSpec& spec) {
    RegimeReport report;
    report.dimension = spec.dimension;
    std::tie(report.rOmega, report.rGamma) = critical_exponents(spec.dimension);
    std::tie(report.l, report.lambda) = exponents_l_lambda(spec.m(), spec.mu(), spec.dimension);
    report.subcritical = check_subcritical(spec.p(), spec.q(), spec.dimension);
    std::tie(report.regularityBasic, report.regularityOptimal) =
        check_regularity(spec.m(), spec.mu(), spec.dimension);
    report.supercriticalDamping = spec.m() > report.rOmega || spec.mu() > report.rGamma;
    report.blowup = check_blowup_hypotheses(spec);
    report.global = check_global_hypotheses(spec);
    return report;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("absent");
}

}  // namespace

std::string format_report_text(const RegimeReport& r) {
    std::ostringstream os;
    os << "regime report (N=" << r.dimension << ")\n"
       << "  critical exponents: r_omega=" << format_double(r.rOmega)
       << " r_gamma=" << format_double(r.rGamma) << "\n"
       << "  l=" << format_double(r.l) << " lambda=" << format_double(r.lambda) << "\n"
       << "  subcritical sources: " << (r.subcritical ? "yes" : "no") << "\n"
       << "  regularity: basic=" << (r.regularityBasic ? "yes" : "no")
       << " optimal=" << (r.regularityOptimal ? "yes" : "no") << "\n"
       << "  supercritical damping: " << (r.supercriticalDamping ? "yes" : "no") << "\n";
    if (r.blowup.accepted)
        os << "  blowup: accepted (p_bar=" << opt_str(r.blowup.pBar)
           << ", q_bar=" << opt_str(r.blowup.qBar) << ")\n";
    else os << "  blowup: rejected (" << r.blowup.reason << ")\n";
    if (r.global.accepted)
        os << "  global: accepted (p1=" << format_double(r.global.cert.p1)
           << ", q1=" << format_double(r.global.cert.q1)
           << ", C_p1=" << format_double(r.global.cert.Cp1)
           << ", C_q1=" << format_double(r.global.cert.Cq1) << ")\n";
    else os << "  global: rejected (" << r.global.reason << ")\n";
    if (r.energySign)
        os << "  initial energy E0=" << format_double(*r.energySign) << " (sign "
           << (*r.energySign > 0 ? "+" : (*r.energySign < 0 ? "-" : "0")) << ")\n";
    return os.str();
}

std::string format_report_keyvalues(const RegimeReport& r) {
    std::ostringstream os;
    os << "dimension=" << r.dimension << "\n"
       << "r_omega=" << format_double(r.rOmega) << "\n"
       << "r_gamma=" << format_double(r.rGamma) << "\n"
       << "l=" << format_double(r.l) << "\n"
       << "lambda=" << format_double(r.lambda) << "\n"
       << "subcritical=" << (r.subcritical ? 1 : 0) << "\n"
       << "regularity_basic=" << (r.regularityBasic ? 1 : 0) << "\n"
       << "regularity_optimal=" << (r.regularityOptimal ? 1 : 0) << "\n"
       << "supercritical_damping=" << (r.supercriticalDamping ? 1 : 0) << "\n"
       << "blowup.accepted=" << (r.blowup.accepted ? 1 : 0) << "\n"
       << "blowup.p_bar=" << opt_str(r.blowup.pBar) << "\n"
       << "blowup.q_bar=" << opt_str(r.blowup.qBar) << "\n"
       << "blowup.reason=" << r.blowup.reason << "\n"
       << "global.accepted=" << (r.global.accepted ? 1 : 0) << "\n"
       << "global.p1=" << format_double(r.global.cert.p1) << "\n"
       << "global.q1=" << format_double(r.global.cert.q1) << "\n"
       << "global.C_p1=" << format_double(r.global.cert.Cp1) << "\n"
       << "global.C_q1=" << format_double(r.global.cert.Cq1) << "\n"
       << "global.reason=" << r.global.reason << "\n";
    if (r.energySign) os << "energy_sign=" << format_double(*r.energySign) << "\n";
    return os.str();
}

}  // namespace dynbc
