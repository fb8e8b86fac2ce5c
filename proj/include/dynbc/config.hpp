#pragma once

#include "dynbc/harness.hpp"
#include "dynbc/mesh.hpp"
#include "dynbc/nonlin.hpp"
#include "dynbc/stepper.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dynbc {

struct ConfigError {
    int line = 0;
    std::string message;
};

struct MeshSection {
    std::string geometry = "interval";  // interval | annulus | rectangle | file
    double length = 1.0;
    int n = 100;
    double r0 = 0.3, r1 = 1.0;
    int nr = 8, nt = 32;
    double lx = 1.0, ly = 1.0;
    int nx = 8, ny = 8;
    std::string gamma1Side = "top";
    std::string path;
    bool pureDirichlet = false;  // degenerate switch: retags Gamma1 to Gamma0
};

struct OutputSection {
    std::string directory = "out";
    int sampleEvery = 10;
    int snapshotEvery = 0;  // 0 disables snapshots
};

struct SweepSection {
    std::vector<SweepAxis> axes;
    bool runDynamics = true;
    double tEnd = 10.0;
};

struct RunConfig {
    MeshSection mesh;
    // damping / source specs with scalar coefficient fields
    std::vector<PowerTerm> pTerms, qTerms, fTerms, gTerms;
    double fConstant = 0, gConstant = 0;
    double alpha = 1.0, beta = 1.0;
    int dimension = 2;
    InitialProfile u0Profile, v0Profile;
    StepperConfig time;
    double tEnd = 1.0;
    OutputSection output;
    SweepSection sweepSection;
};

struct ParseResult {
    RunConfig config;
    std::vector<ConfigError> errors;  // empty on success
    bool ok() const { return errors.empty(); }
};

/// Parses the sectioned key=value format, collecting every error with its
/// line number instead of stopping at the first.
ParseResult parse_config(std::istream& in);
ParseResult parse_config_file(const std::string& path);

/// Instantiates the mesh named by the config (applying the pure-Dirichlet
/// switch when requested).
Mesh build_mesh(const MeshSection& section);

/// Builds the problem spec over `mesh` from the parsed nonlinearity terms.
ProblemSpec build_problem_spec(const RunConfig& config, const Mesh& mesh);

std::string format_errors(const std::vector<ConfigError>& errors);

}  // namespace dynbc
