#include "dynbc/io.hpp"

#include <ostream>

namespace dynbc {

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,E,kinetic,potential_quadratic,J,dissipation_cum,identity_residual,"
           "norm_H1,norm_v_H0,norm_Lp,norm_Lq_gamma1,upsilon,dt\n";
    for (const auto& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.E) << ',' << format_double(s.kinetic)
            << ',' << format_double(s.potentialQuadratic) << ',' << format_double(s.J) << ','
            << format_double(s.dissipationCum) << ',' << format_double(s.identityResidual) << ','
            << format_double(s.normH1) << ',' << format_double(s.normVH0) << ','
            << format_double(s.normLp) << ',' << format_double(s.normLqGamma1) << ','
            << format_double(s.upsilon) << ',' << format_double(s.dt) << '\n';
    }
}

void write_snapshot_csv(const DiscreteOperators& ops, const VecXd& u, const VecXd& v,
                        std::ostream& out) {
    out << "node,u,v\n";
    const int numNodes = static_cast<int>(ops.freeDofMap.size());
    for (int n = 0; n < numNodes; ++n) {
        const int fd = ops.freeDofMap[n];
        const double uu = fd >= 0 ? u[fd] : 0.0;
        const double vv = fd >= 0 ? v[fd] : 0.0;
        out << n << ',' << format_double(uu) << ',' << format_double(vv) << '\n';
    }
}

void write_sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows,
                     std::ostream& out) {
    for (const auto& ax : axes) out << "param." << ax.name << ',';
    out << "regime.subcritical,regime.blowup_accepted,regime.global_accepted,"
           "regime.p_bar,regime.q_bar,regime.p1,regime.q1,regime.energy_sign,"
           "verdict.kind,verdict.t_estimate,max_upsilon,note\n";
    for (const auto& row : rows) {
        for (double p : row.params) out << format_double(p) << ',';
        const auto& r = row.report;
        out << (r.subcritical ? 1 : 0) << ',' << (r.blowup.accepted ? 1 : 0) << ','
            << (r.global.accepted ? 1 : 0) << ','
            << (r.blowup.pBar ? format_double(*r.blowup.pBar) : "absent") << ','
            << (r.blowup.qBar ? format_double(*r.blowup.qBar) : "absent") << ','
            << format_double(r.global.cert.p1) << ',' << format_double(r.global.cert.q1) << ','
            << (r.energySign ? format_double(*r.energySign) : "") << ',' << row.verdictKind
            << ',' << format_double(row.tEstimate) << ',' << format_double(row.maxUpsilon) << ','
            << row.note << '\n';
    }
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const ManifestInfo& info, std::ostream& out) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(info.configHash));
    out << "version=" << kVersion << "\n"
        << "config=" << info.configPath << "\n"
        << "config_hash=" << hex << "\n"
        << "jobs=" << info.jobs << "\n"
        << "wall_seconds=" << format_double(info.wallSeconds) << "\n"
        << "status=" << info.status << "\n";
}

}  // namespace dynbc
