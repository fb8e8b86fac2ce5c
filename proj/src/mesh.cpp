#include "dynbc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace dynbc {

namespace {

double triangle_area(const MatXd& nodes, int a, int b, int c) {
    const double x1 = nodes(b, 0) - nodes(a, 0), y1 = nodes(b, 1) - nodes(a, 1);
    const double x2 = nodes(c, 0) - nodes(a, 0), y2 = nodes(c, 1) - nodes(a, 1);
    return 0.5 * (x1 * y2 - x2 * y1);
}

// Builds the ordered node walks of the Gamma1 facets. Chains are split at
// nodes of degree != 2; remaining cycles are emitted as closed chains.
std::vector<BoundaryChain> trace_gamma1_chains(const Mesh& mesh) {
    std::vector<BoundaryChain> chains;
    if (mesh.dim == 1) {
        for (const auto& f : mesh.boundaryFaces)
            if (f.tag == BoundaryTag::Gamma1) chains.push_back({{f.a}, false});
        return chains;
    }
    std::multimap<int, int> adj;  // node -> neighbor along a Gamma1 edge
    std::map<std::pair<int, int>, bool> used;
    for (const auto& f : mesh.boundaryFaces) {
        if (f.tag != BoundaryTag::Gamma1) continue;
        adj.insert({f.a, f.b});
        adj.insert({f.b, f.a});
        used[{std::min(f.a, f.b), std::max(f.a, f.b)}] = false;
    }
    auto degree = [&](int n) { return adj.count(n); };
    auto next_unused = [&](int n, int prev) -> int {
        auto [lo, hi] = adj.equal_range(n);
        for (auto it = lo; it != hi; ++it) {
            if (it->second == prev) continue;
            auto key = std::make_pair(std::min(n, it->second), std::max(n, it->second));
            if (!used[key]) return it->second;
        }
        return -1;
    };
    auto walk = [&](int start) {
        BoundaryChain chain;
        chain.nodes.push_back(start);
        int prev = -1, cur = start;
        while (true) {
            int nxt = next_unused(cur, prev);
            if (nxt < 0) break;
            used[{std::min(cur, nxt), std::max(cur, nxt)}] = true;
            chain.nodes.push_back(nxt);
            prev = cur;
            cur = nxt;
            if (cur == start) {
                chain.closed = true;
                chain.nodes.pop_back();  // closed chains list each node once
                break;
            }
        }
        return chain;
    };
    // open chains start at odd-degree endpoints
    std::vector<int> endpoints;
    for (auto it = adj.begin(); it != adj.end(); it = adj.upper_bound(it->first))
        if (degree(it->first) == 1) endpoints.push_back(it->first);
    std::sort(endpoints.begin(), endpoints.end());
    for (int e : endpoints) {
        bool fresh = false;
        auto [lo, hi] = adj.equal_range(e);
        for (auto it = lo; it != hi; ++it)
            fresh |= !used[{std::min(e, it->second), std::max(e, it->second)}];
        if (fresh) chains.push_back(walk(e));
    }
    // leftover cycles
    for (auto& [key, flag] : used)
        if (!flag) chains.push_back(walk(key.first));
    return chains;
}

}  // namespace

double Mesh::elementMeasure(int e) const {
    if (dim == 1) return std::abs(nodes(elements(e, 1), 0) - nodes(elements(e, 0), 0));
    return triangle_area(nodes, elements(e, 0), elements(e, 1), elements(e, 2));
}

double Mesh::totalMeasure() const {
    double s = 0;
    for (int e = 0; e < numElements(); ++e) s += elementMeasure(e);
    return s;
}

double Mesh::gamma1Measure() const {
    double s = 0;
    for (const auto& f : boundaryFaces) {
        if (f.tag != BoundaryTag::Gamma1) continue;
        s += (dim == 1) ? 1.0 : (nodes.row(f.a) - nodes.row(f.b)).norm();
    }
    return s;
}

std::vector<bool> Mesh::dirichletMask() const {
    std::vector<bool> mask(numNodes(), false);
    for (const auto& f : boundaryFaces) {
        if (f.tag != BoundaryTag::Gamma0) continue;
        mask[f.a] = true;
        if (f.b >= 0) mask[f.b] = true;
    }
    return mask;
}

std::vector<int> Mesh::gamma1Nodes() const {
    std::vector<bool> on(numNodes(), false);
    for (const auto& f : boundaryFaces) {
        if (f.tag != BoundaryTag::Gamma1) continue;
        on[f.a] = true;
        if (f.b >= 0) on[f.b] = true;
    }
    std::vector<int> out;
    for (int i = 0; i < numNodes(); ++i)
        if (on[i]) out.push_back(i);
    return out;
}

Mesh generate_interval(double length, int n) {
    if (!(length > 0)) throw InvalidParameterError("generate_interval: length must be > 0");
    if (n < 2) throw InvalidParameterError("generate_interval: need at least 2 elements");
    Mesh mesh;
    mesh.dim = 1;
    mesh.nodes.resize(n + 1, 1);
    for (int i = 0; i <= n; ++i) mesh.nodes(i, 0) = length * i / n;
    mesh.elements.resize(n, 2);
    for (int e = 0; e < n; ++e) {
        mesh.elements(e, 0) = e;
        mesh.elements(e, 1) = e + 1;
    }
    mesh.boundaryFaces.push_back({0, -1, BoundaryTag::Gamma0});
    mesh.boundaryFaces.push_back({n, -1, BoundaryTag::Gamma1});
    mesh.boundaryChains = trace_gamma1_chains(mesh);
    return mesh;
}

Mesh generate_annulus(double r0, double r1, int nr, int nt) {
    if (!(r0 > 0 && r0 < r1)) throw InvalidParameterError("generate_annulus: need 0 < r0 < r1");
    if (nr < 2) throw InvalidParameterError("generate_annulus: need nr >= 2");
    if (nt < 8) throw InvalidParameterError("generate_annulus: need nt >= 8");
    Mesh mesh;
    mesh.dim = 2;
    mesh.nodes.resize((nr + 1) * nt, 2);
    for (int i = 0; i <= nr; ++i) {
        const double r = r0 + (r1 - r0) * i / nr;
        for (int j = 0; j < nt; ++j) {
            const double th = 2.0 * M_PI * j / nt;
            mesh.nodes(i * nt + j, 0) = r * std::cos(th);
            mesh.nodes(i * nt + j, 1) = r * std::sin(th);
        }
    }
    mesh.elements.resize(2 * nr * nt, 3);
    int e = 0;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int jn = (j + 1) % nt;
            const int a = i * nt + j, b = i * nt + jn;
            const int c = (i + 1) * nt + j, d = (i + 1) * nt + jn;
            mesh.elements.row(e++) << a, b, d;
            mesh.elements.row(e++) << a, d, c;
        }
    }
    for (int j = 0; j < nt; ++j) {
        const int jn = (j + 1) % nt;
        mesh.boundaryFaces.push_back({j, jn, BoundaryTag::Gamma0});
        mesh.boundaryFaces.push_back({nr * nt + j, nr * nt + jn, BoundaryTag::Gamma1});
    }
    mesh.boundaryChains = trace_gamma1_chains(mesh);
    return mesh;
}

RectangleSide parse_rectangle_side(const std::string& name) {
    if (name == "top") return RectangleSide::Top;
    if (name == "bottom") return RectangleSide::Bottom;
    if (name == "left") return RectangleSide::Left;
    if (name == "right") return RectangleSide::Right;
    throw InvalidParameterError("unknown rectangle side '" + name + "'");
}

Mesh generate_rectangle(double lx, double ly, int nx, int ny, RectangleSide gamma1Side) {
    if (!(lx > 0 && ly > 0)) throw InvalidParameterError("generate_rectangle: sides must be > 0");
    if (nx < 2 || ny < 2) throw InvalidParameterError("generate_rectangle: need nx, ny >= 2");
    Mesh mesh;
    mesh.dim = 2;
    const int nxn = nx + 1, nyn = ny + 1;
    mesh.nodes.resize(nxn * nyn, 2);
    auto id = [nxn](int i, int j) { return j * nxn + i; };
    for (int j = 0; j < nyn; ++j)
        for (int i = 0; i < nxn; ++i) {
            mesh.nodes(id(i, j), 0) = lx * i / nx;
            mesh.nodes(id(i, j), 1) = ly * j / ny;
        }
    mesh.elements.resize(2 * nx * ny, 3);
    int e = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int bl = id(i, j), br = id(i + 1, j);
            const int tl = id(i, j + 1), tr = id(i + 1, j + 1);
            mesh.elements.row(e++) << bl, br, tr;
            mesh.elements.row(e++) << bl, tr, tl;
        }
    auto tag_of = [&](RectangleSide s) {
        return s == gamma1Side ? BoundaryTag::Gamma1 : BoundaryTag::Gamma0;
    };
    for (int i = 0; i < nx; ++i) {
        mesh.boundaryFaces.push_back({id(i, 0), id(i + 1, 0), tag_of(RectangleSide::Bottom)});
        mesh.boundaryFaces.push_back({id(i, ny), id(i + 1, ny), tag_of(RectangleSide::Top)});
    }
    for (int j = 0; j < ny; ++j) {
        mesh.boundaryFaces.push_back({id(0, j), id(0, j + 1), tag_of(RectangleSide::Left)});
        mesh.boundaryFaces.push_back({id(nx, j), id(nx, j + 1), tag_of(RectangleSide::Right)});
    }
    mesh.boundaryChains = trace_gamma1_chains(mesh);
    return mesh;
}

void retag_pure_dirichlet(Mesh& mesh) {
    for (auto& f : mesh.boundaryFaces) f.tag = BoundaryTag::Gamma0;
    mesh.boundaryChains.clear();
}

void validate_mesh(const Mesh& mesh) {
    if (mesh.dim != 1 && mesh.dim != 2)
        throw InvalidParameterError("mesh: dimension must be 1 or 2");
    if (mesh.elements.cols() != mesh.dim + 1)
        throw InvalidParameterError("mesh: element arity does not match dimension");
    const int nn = mesh.numNodes();
    for (int e = 0; e < mesh.numElements(); ++e) {
        for (int k = 0; k < mesh.elements.cols(); ++k) {
            const int v = mesh.elements(e, k);
            if (v < 0 || v >= nn) throw InvalidParameterError("mesh: element node out of range");
        }
        if (mesh.dim == 2 && triangle_area(mesh.nodes, mesh.elements(e, 0), mesh.elements(e, 1),
                                           mesh.elements(e, 2)) <= 0)
            throw InvalidParameterError("mesh: nonpositive triangle orientation");
        if (mesh.dim == 1 && mesh.elementMeasure(e) <= 0)
            throw InvalidParameterError("mesh: zero-length interval");
    }

    // Facet incidence: interior facets touch two elements, boundary facets one,
    // and tagged facets must be exactly the boundary ones.
    std::map<std::pair<int, int>, int> facetCount;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int e = 0; e < mesh.numElements(); ++e) {
        if (mesh.dim == 1) {
            facetCount[key(mesh.elements(e, 0), -1)]++;
            facetCount[key(mesh.elements(e, 1), -1)]++;
        } else {
            for (int k = 0; k < 3; ++k)
                facetCount[key(mesh.elements(e, k), mesh.elements(e, (k + 1) % 3))]++;
        }
    }
    std::map<std::pair<int, int>, int> tagged;
    for (const auto& f : mesh.boundaryFaces) tagged[key(f.a, f.b)]++;
    for (const auto& [k, cnt] : facetCount) {
        if (cnt > 2) throw InvalidParameterError("mesh: facet shared by more than two elements");
        const bool onBoundary = (cnt == 1);
        const int tags = tagged.count(k) ? tagged.at(k) : 0;
        if (onBoundary && tags != 1)
            throw InvalidParameterError("mesh: boundary facet must carry exactly one tag");
        if (!onBoundary && tags != 0)
            throw InvalidParameterError("mesh: interior facet carries a boundary tag");
    }
    for (const auto& [k, cnt] : tagged)
        if (!facetCount.count(k) || facetCount.at(k) != 1)
            throw InvalidParameterError("mesh: tagged facet is not a boundary facet");

    for (const auto& chain : mesh.boundaryChains) {
        if (chain.nodes.empty()) throw InvalidParameterError("mesh: empty boundary chain");
        std::vector<int> sorted = chain.nodes;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidParameterError("mesh: chain visits a node twice");
    }
}

void write_mesh_csv(const Mesh& mesh, std::ostream& out) {
    out << "# dynbc-mesh v1 dim=" << mesh.dim << "\n";
    for (int i = 0; i < mesh.numNodes(); ++i) {
        out << "node," << i << "," << format_double(mesh.nodes(i, 0));
        if (mesh.dim == 2) out << "," << format_double(mesh.nodes(i, 1));
        out << "\n";
    }
    for (int e = 0; e < mesh.numElements(); ++e) {
        out << "elem," << e << "," << mesh.elements(e, 0) << "," << mesh.elements(e, 1);
        if (mesh.dim == 2) out << "," << mesh.elements(e, 2);
        out << "\n";
    }
    for (size_t i = 0; i < mesh.boundaryFaces.size(); ++i) {
        const auto& f = mesh.boundaryFaces[i];
        out << "bface," << i << "," << f.a;
        if (f.b >= 0) out << "," << f.b;
        out << "," << static_cast<int>(f.tag) << "\n";
    }
}

Mesh read_mesh_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw InvalidParameterError("mesh csv: empty stream");
    int dim = 0;
    if (std::sscanf(line.c_str(), "# dynbc-mesh v1 dim=%d", &dim) != 1)
        throw InvalidParameterError("mesh csv: bad header '" + line + "'");
    if (dim != 1 && dim != 2) throw InvalidParameterError("mesh csv: bad dimension");

    struct Row {
        std::string kind;
        std::vector<double> vals;
    };
    std::vector<Row> nodes, elems, bfaces;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        Row row;
        std::getline(ss, row.kind, ',');
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                row.vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw InvalidParameterError("mesh csv line " + std::to_string(lineno) +
                                            ": bad number '" + tok + "'");
            }
        }
        if (row.kind == "node") nodes.push_back(row);
        else if (row.kind == "elem") elems.push_back(row);
        else if (row.kind == "bface") bfaces.push_back(row);
        else
            throw InvalidParameterError("mesh csv line " + std::to_string(lineno) +
                                        ": unknown record '" + row.kind + "'");
    }

    Mesh mesh;
    mesh.dim = dim;
    mesh.nodes.resize(static_cast<int>(nodes.size()), dim);
    for (const auto& r : nodes) {
        if (r.vals.size() != static_cast<size_t>(1 + dim))
            throw InvalidParameterError("mesh csv: node record arity");
        const int id = static_cast<int>(r.vals[0]);
        if (id < 0 || id >= mesh.numNodes()) throw InvalidParameterError("mesh csv: node id range");
        for (int d = 0; d < dim; ++d) mesh.nodes(id, d) = r.vals[1 + d];
    }
    mesh.elements.resize(static_cast<int>(elems.size()), dim + 1);
    for (const auto& r : elems) {
        if (r.vals.size() != static_cast<size_t>(2 + dim))
            throw InvalidParameterError("mesh csv: elem record arity");
        const int id = static_cast<int>(r.vals[0]);
        if (id < 0 || id >= mesh.numElements())
            throw InvalidParameterError("mesh csv: elem id range");
        for (int k = 0; k <= dim; ++k) mesh.elements(id, k) = static_cast<int>(r.vals[1 + k]);
    }
    for (const auto& r : bfaces) {
        const size_t arity = (dim == 1) ? 3 : 4;
        if (r.vals.size() != arity) throw InvalidParameterError("mesh csv: bface record arity");
        BoundaryFace f;
        f.a = static_cast<int>(r.vals[1]);
        f.b = (dim == 2) ? static_cast<int>(r.vals[2]) : -1;
        const int tag = static_cast<int>(r.vals.back());
        if (tag != 0 && tag != 1) throw InvalidParameterError("mesh csv: tag must be 0 or 1");
        f.tag = static_cast<BoundaryTag>(tag);
        mesh.boundaryFaces.push_back(f);
    }
    mesh.boundaryChains = trace_gamma1_chains(mesh);
    validate_mesh(mesh);
    return mesh;
}

void write_mesh_csv_file(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidParameterError("cannot open '" + path + "' for writing");
    write_mesh_csv(mesh, out);
}

Mesh read_mesh_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("cannot open mesh file '" + path + "'");
    return read_mesh_csv(in);
}

}  // namespace dynbc
