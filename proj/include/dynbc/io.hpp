#pragma once

#include "dynbc/energy.hpp"
#include "dynbc/harness.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dynbc {

inline constexpr const char* kVersion = "0.1.0";

/// Time-series CSV with the documented column set.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Full-node displacement/velocity snapshot (Dirichlet entries zero).
void write_snapshot_csv(const DiscreteOperators& ops, const VecXd& u, const VecXd& v,
                        std::ostream& out);

void write_sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows,
                     std::ostream& out);

std::uint64_t fnv1a_hash(const std::string& bytes);

struct ManifestInfo {
    std::string configPath;
    std::uint64_t configHash = 0;
    int jobs = 1;
    double wallSeconds = 0;
    std::string status;
};

void write_manifest(const ManifestInfo& info, std::ostream& out);

}  // namespace dynbc
