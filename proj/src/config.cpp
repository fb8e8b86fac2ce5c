#include "dynbc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dynbc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    RunConfig cfg;
    std::vector<ConfigError> errors;

    void fail(int line, const std::string& msg) { errors.push_back({line, msg}); }

    bool number(int line, const std::string& v, double& out) {
        try {
            size_t pos = 0;
            out = std::stod(v, &pos);
            if (trim(v.substr(pos)).empty()) return true;
        } catch (const std::exception&) {
        }
        fail(line, "expected a number, got '" + v + "'");
        return false;
    }

    bool integer(int line, const std::string& v, int& out) {
        double d;
        if (!number(line, v, d)) return false;
        if (d != std::floor(d)) {
            fail(line, "expected an integer, got '" + v + "'");
            return false;
        }
        out = static_cast<int>(d);
        return true;
    }

    bool boolean(int line, const std::string& v, bool& out) {
        if (v == "true" || v == "1") {
            out = true;
            return true;
        }
        if (v == "false" || v == "0") {
            out = false;
            return true;
        }
        fail(line, "expected true/false, got '" + v + "'");
        return false;
    }

    // [[coef, exponent], ...]
    bool term_list(int line, const std::string& v, std::vector<PowerTerm>& out,
                   bool damping) {
        std::string s;
        for (char c : v)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
            fail(line, "term list must look like [[coef, exponent], ...]");
            return false;
        }
        s = s.substr(1, s.size() - 2);
        out.clear();
        size_t pos = 0;
        while (pos < s.size()) {
            if (s[pos] == ',') {
                ++pos;
                continue;
            }
            if (s[pos] != '[') {
                fail(line, "malformed term list near '" + s.substr(pos) + "'");
                return false;
            }
            const size_t close = s.find(']', pos);
            if (close == std::string::npos) {
                fail(line, "unterminated term in list");
                return false;
            }
            const std::string body = s.substr(pos + 1, close - pos - 1);
            const size_t comma = body.find(',');
            if (comma == std::string::npos) {
                fail(line, "term needs [coef, exponent]");
                return false;
            }
            PowerTerm t;
            if (!number(line, body.substr(0, comma), t.coef)) return false;
            if (!number(line, body.substr(comma + 1), t.exponent)) return false;
            if (damping) {
                if (t.exponent <= 1) {
                    fail(line, "exponent must be > 1");
                    return false;
                }
                if (t.coef < 0) {
                    fail(line, "damping coefficient must be >= 0");
                    return false;
                }
            } else if (t.exponent < 2) {
                fail(line, "source exponent must be >= 2");
                return false;
            }
            out.push_back(t);
            pos = close + 1;
        }
        return true;
    }

    bool profile(int line, const std::string& v, InitialProfile& out) {
        std::string name = v;
        std::vector<std::string> args;
        const size_t open = v.find('(');
        if (open != std::string::npos) {
            if (v.back() != ')') {
                fail(line, "profile arguments must end with ')'");
                return false;
            }
            name = trim(v.substr(0, open));
            std::string body = v.substr(open + 1, v.size() - open - 2);
            std::stringstream ss(body);
            std::string tok;
            while (std::getline(ss, tok, ',')) args.push_back(trim(tok));
        }
        auto num_args = [&](size_t lo, size_t hi) {
            if (args.size() < lo || args.size() > hi) {
                fail(line, "profile '" + name + "' takes " + std::to_string(lo) +
                               (hi != lo ? ".." + std::to_string(hi) : "") + " arguments");
                return false;
            }
            return true;
        };
        if (name == "zero") {
            out.kind = InitialProfile::Kind::Zero;
            return num_args(0, 0);
        }
        if (name == "eigenmode") {
            out.kind = InitialProfile::Kind::Eigenmode;
            if (!num_args(0, 1)) return false;
            if (!args.empty() && !number(line, args[0], out.k)) return false;
            return true;
        }
        if (name == "bump") {
            out.kind = InitialProfile::Kind::Bump;
            if (!num_args(3, 4)) return false;
            const int dim = static_cast<int>(args.size()) - 2;
            out.center = VecXd(dim);
            for (int d = 0; d < dim; ++d)
                if (!number(line, args[d], out.center[d])) return false;
            if (!number(line, args[dim], out.radius)) return false;
            if (!number(line, args[dim + 1], out.scale)) return false;
            if (!(out.radius > 0)) {
                fail(line, "bump radius must be > 0");
                return false;
            }
            return true;
        }
        if (name == "file") {
            out.kind = InitialProfile::Kind::File;
            if (!num_args(1, 1)) return false;
            out.path = args[0];
            if (!std::ifstream(out.path)) {
                fail(line, "initial data file '" + out.path + "' does not exist");
                return false;
            }
            return true;
        }
        if (name == "negative_energy") {
            out.kind = InitialProfile::Kind::NegativeEnergy;
            if (!num_args(0, 1)) return false;
            if (!args.empty()) {
                if (!number(line, args[0], out.sMax)) return false;
                if (!(out.sMax > 0)) {
                    fail(line, "negative_energy scale cap must be > 0");
                    return false;
                }
            }
            return true;
        }
        fail(line, "unknown profile '" + name + "'");
        return false;
    }

    void mesh_key(int line, const std::string& key, const std::string& v) {
        auto& m = cfg.mesh;
        if (key == "geometry") {
            if (v != "interval" && v != "annulus" && v != "rectangle" && v != "file")
                fail(line, "geometry must be interval|annulus|rectangle|file");
            else m.geometry = v;
        } else if (key == "length") {
            if (number(line, v, m.length) && !(m.length > 0)) fail(line, "length must be > 0");
        } else if (key == "n") {
            if (integer(line, v, m.n) && m.n < 2) fail(line, "n must be >= 2");
        } else if (key == "r0") {
            if (number(line, v, m.r0) && !(m.r0 > 0)) fail(line, "r0 must be > 0");
        } else if (key == "r1") {
            if (number(line, v, m.r1) && !(m.r1 > 0)) fail(line, "r1 must be > 0");
        } else if (key == "nr") {
            if (integer(line, v, m.nr) && m.nr < 2) fail(line, "nr must be >= 2");
        } else if (key == "nt") {
            if (integer(line, v, m.nt) && m.nt < 8) fail(line, "nt must be >= 8");
        } else if (key == "lx") {
            if (number(line, v, m.lx) && !(m.lx > 0)) fail(line, "lx must be > 0");
        } else if (key == "ly") {
            if (number(line, v, m.ly) && !(m.ly > 0)) fail(line, "ly must be > 0");
        } else if (key == "nx") {
            if (integer(line, v, m.nx) && m.nx < 2) fail(line, "nx must be >= 2");
        } else if (key == "ny") {
            if (integer(line, v, m.ny) && m.ny < 2) fail(line, "ny must be >= 2");
        } else if (key == "gamma1_side") {
            try {
                parse_rectangle_side(v);
                m.gamma1Side = v;
            } catch (const std::exception& e) {
                fail(line, e.what());
            }
        } else if (key == "path") {
            m.path = v;
            if (!std::ifstream(v)) fail(line, "mesh file '" + v + "' does not exist");
        } else if (key == "pure_dirichlet") {
            boolean(line, v, m.pureDirichlet);
        } else {
            fail(line, "unknown key '" + key + "' in [mesh]");
        }
    }

    void damping_key(int line, const std::string& key, const std::string& v) {
        if (key == "p_terms") term_list(line, v, cfg.pTerms, true);
        else if (key == "q_terms") term_list(line, v, cfg.qTerms, true);
        else if (key == "alpha") {
            if (number(line, v, cfg.alpha) && cfg.alpha < 0) fail(line, "alpha must be >= 0");
        } else if (key == "beta") {
            if (number(line, v, cfg.beta) && cfg.beta < 0) fail(line, "beta must be >= 0");
        } else fail(line, "unknown key '" + key + "' in [damping]");
    }

    void source_key(int line, const std::string& key, const std::string& v) {
        if (key == "f_terms") term_list(line, v, cfg.fTerms, false);
        else if (key == "g_terms") term_list(line, v, cfg.gTerms, false);
        else if (key == "f_constant") number(line, v, cfg.fConstant);
        else if (key == "g_constant") number(line, v, cfg.gConstant);
        else if (key == "dimension") {
            if (integer(line, v, cfg.dimension) && cfg.dimension < 2)
                fail(line, "dimension must be >= 2");
        } else fail(line, "unknown key '" + key + "' in [source]");
    }

    void initial_key(int line, const std::string& key, const std::string& v) {
        if (key == "u0") profile(line, v, cfg.u0Profile);
        else if (key == "v0") profile(line, v, cfg.v0Profile);
        else fail(line, "unknown key '" + key + "' in [initial]");
    }

    void time_key(int line, const std::string& key, const std::string& v) {
        auto& t = cfg.time;
        if (key == "dt_init") {
            if (number(line, v, t.dtInit) && !(t.dtInit > 0)) fail(line, "dt_init must be > 0");
        } else if (key == "dt_min") {
            if (number(line, v, t.dtMin) && !(t.dtMin > 0)) fail(line, "dt_min must be > 0");
        } else if (key == "dt_max") {
            if (number(line, v, t.dtMax) && !(t.dtMax > 0)) fail(line, "dt_max must be > 0");
        } else if (key == "t_end") {
            if (number(line, v, cfg.tEnd) && !(cfg.tEnd > 0)) fail(line, "t_end must be > 0");
        } else if (key == "newton_tol") {
            if (number(line, v, t.newtonTol) && !(t.newtonTol > 0))
                fail(line, "newton_tol must be > 0");
        } else if (key == "newton_max_iters") {
            if (integer(line, v, t.newtonMaxIters) && t.newtonMaxIters < 1)
                fail(line, "newton_max_iters must be >= 1");
        } else if (key == "growth_cap") {
            if (number(line, v, t.growthCap) && !(t.growthCap > 1))
                fail(line, "growth_cap must be > 1");
        } else if (key == "truncation_radius") {
            if (v == "inf") t.truncationRadius = kInf;
            else if (number(line, v, t.truncationRadius) && !(t.truncationRadius > 0))
                fail(line, "truncation_radius must be > 0");
        } else if (key == "scheme") {
            if (v == "midpoint") t.scheme = TimeScheme::Midpoint;
            else if (v == "backward_euler") t.scheme = TimeScheme::BackwardEuler;
            else fail(line, "scheme must be midpoint|backward_euler");
        } else {
            fail(line, "unknown key '" + key + "' in [time]");
        }
    }

    void output_key(int line, const std::string& key, const std::string& v) {
        if (key == "directory") cfg.output.directory = v;
        else if (key == "sample_every") {
            if (integer(line, v, cfg.output.sampleEvery) && cfg.output.sampleEvery < 1)
                fail(line, "sample_every must be >= 1");
        } else if (key == "snapshot_every") {
            if (integer(line, v, cfg.output.snapshotEvery) && cfg.output.snapshotEvery < 0)
                fail(line, "snapshot_every must be >= 0");
        } else fail(line, "unknown key '" + key + "' in [output]");
    }

    void sweep_key(int line, const std::string& key, const std::string& v) {
        if (key.rfind("axis.", 0) == 0) {
            SweepAxis axis;
            axis.name = key.substr(5);
            const std::set<std::string> known = {"f_coef", "f_exponent", "g_coef", "g_exponent",
                                                 "p_coef", "p_exponent", "q_coef", "q_exponent",
                                                 "alpha",  "beta"};
            if (!known.count(axis.name)) {
                fail(line, "unknown sweep axis '" + axis.name + "'");
                return;
            }
            std::stringstream ss(v);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                double d;
                if (!number(line, trim(tok), d)) return;
                axis.values.push_back(d);
            }
            if (axis.values.empty()) {
                fail(line, "sweep axis needs at least one value");
                return;
            }
            cfg.sweepSection.axes.push_back(axis);
        } else if (key == "run") {
            boolean(line, v, cfg.sweepSection.runDynamics);
        } else if (key == "t_end") {
            if (number(line, v, cfg.sweepSection.tEnd) && !(cfg.sweepSection.tEnd > 0))
                fail(line, "sweep t_end must be > 0");
        } else {
            fail(line, "unknown key '" + key + "' in [sweep]");
        }
    }
};

}  // namespace

ParseResult parse_config(std::istream& in) {
    Parser parser;
    std::string line;
    std::string section;
    std::set<std::string> seenSections;
    std::set<std::string> seenKeys;
    const std::set<std::string> knownSections = {"mesh",    "damping", "source", "initial",
                                                 "time",    "output",  "sweep"};
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                parser.fail(lineno, "unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!knownSections.count(section)) {
                parser.fail(lineno, "unknown section [" + section + "]");
                section.clear();
                continue;
            }
            if (!seenSections.insert(section).second)
                parser.fail(lineno, "duplicate section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            parser.fail(lineno, "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            parser.fail(lineno, "key '" + key + "' outside any section");
            continue;
        }
        if (section != "sweep" && !seenKeys.insert(section + "." + key).second) {
            parser.fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
            continue;
        }
        if (section == "mesh") parser.mesh_key(lineno, key, value);
        else if (section == "damping") parser.damping_key(lineno, key, value);
        else if (section == "source") parser.source_key(lineno, key, value);
        else if (section == "initial") parser.initial_key(lineno, key, value);
        else if (section == "time") parser.time_key(lineno, key, value);
        else if (section == "output") parser.output_key(lineno, key, value);
        else if (section == "sweep") parser.sweep_key(lineno, key, value);
    }
    if (!seenSections.count("mesh")) parser.fail(0, "missing required section [mesh]");
    if (!seenSections.count("time")) parser.fail(0, "missing required section [time]");

    // cross-field ranges
    auto& t = parser.cfg.time;
    if (parser.errors.empty() && !(t.dtMin <= t.dtInit && t.dtInit <= t.dtMax))
        parser.fail(0, "need dt_min <= dt_init <= dt_max");

    ParseResult result;
    result.config = std::move(parser.cfg);
    result.errors = std::move(parser.errors);
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back({0, "cannot open config file '" + path + "'"});
        return r;
    }
    return parse_config(in);
}

Mesh build_mesh(const MeshSection& m) {
    Mesh mesh;
    if (m.geometry == "interval") mesh = generate_interval(m.length, m.n);
    else if (m.geometry == "annulus") mesh = generate_annulus(m.r0, m.r1, m.nr, m.nt);
    else if (m.geometry == "rectangle")
        mesh = generate_rectangle(m.lx, m.ly, m.nx, m.ny, parse_rectangle_side(m.gamma1Side));
    else if (m.geometry == "file") mesh = read_mesh_csv_file(m.path);
    else throw InvalidParameterError("unknown geometry '" + m.geometry + "'");
    if (m.pureDirichlet) retag_pure_dirichlet(mesh);
    return mesh;
}

ProblemSpec build_problem_spec(const RunConfig& config, const Mesh& mesh) {
    ProblemSpec spec;
    spec.P = make_damping(config.pTerms);
    spec.Q = make_damping(config.qTerms);
    spec.f = make_source(config.fTerms, config.fConstant);
    spec.g = make_source(config.gTerms, config.gConstant);
    spec.alpha = uniform_field(mesh.numNodes(), config.alpha);
    spec.beta = boundary_field(mesh, config.beta);
    spec.dimension = config.dimension;
    return spec;
}

std::string format_errors(const std::vector<ConfigError>& errors) {
    std::ostringstream os;
    for (const auto& e : errors) {
        if (e.line > 0) os << "line " << e.line << ": ";
        os << e.message << "\n";
    }
    return os.str();
}

}  // namespace dynbc
