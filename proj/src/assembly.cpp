#include "dynbc/assembly.hpp"

#include <cmath>
#include <ostream>

namespace dynbc {

namespace {

void add_interval_bulk(const Mesh& mesh, int e, std::vector<Triplet>& mass,
                       std::vector<Triplet>& stiff) {
    const int a = mesh.elements(e, 0), b = mesh.elements(e, 1);
    const double h = std::abs(mesh.nodes(b, 0) - mesh.nodes(a, 0));
    const double m[2][2] = {{h / 3, h / 6}, {h / 6, h / 3}};
    const double k[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
    const int idx[2] = {a, b};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            mass.emplace_back(idx[i], idx[j], m[i][j]);
            stiff.emplace_back(idx[i], idx[j], k[i][j]);
        }
}

void add_triangle_bulk(const Mesh& mesh, int e, std::vector<Triplet>& mass,
                       std::vector<Triplet>& stiff) {
    const int idx[3] = {mesh.elements(e, 0), mesh.elements(e, 1), mesh.elements(e, 2)};
    const double x[3] = {mesh.nodes(idx[0], 0), mesh.nodes(idx[1], 0), mesh.nodes(idx[2], 0)};
    const double y[3] = {mesh.nodes(idx[0], 1), mesh.nodes(idx[1], 1), mesh.nodes(idx[2], 1)};
    const double area = 0.5 * ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]));
    // gradients of the barycentric basis
    double gx[3], gy[3];
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        gx[i] = (y[j] - y[k]) / (2 * area);
        gy[i] = (x[k] - x[j]) / (2 * area);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            mass.emplace_back(idx[i], idx[j], area / 12.0 * (i == j ? 2.0 : 1.0));
            stiff.emplace_back(idx[i], idx[j], area * (gx[i] * gx[j] + gy[i] * gy[j]));
        }
}

}  // namespace

NodeMatrices assemble_node_matrices(const Mesh& mesh) {
    const int nn = mesh.numNodes();
    std::vector<Triplet> mb, kb, mg, kg;
    for (int e = 0; e < mesh.numElements(); ++e) {
        if (mesh.dim == 1) add_interval_bulk(mesh, e, mb, kb);
        else add_triangle_bulk(mesh, e, mb, kb);
    }
    for (const auto& f : mesh.boundaryFaces) {
        if (f.tag != BoundaryTag::Gamma1) continue;
        if (mesh.dim == 1) {
            // point boundary: unit mass, no Laplace-Beltrami stiffness
            mg.emplace_back(f.a, f.a, 1.0);
        } else {
            const double len = (mesh.nodes.row(f.a) - mesh.nodes.row(f.b)).norm();
            const int idx[2] = {f.a, f.b};
            const double m[2][2] = {{len / 3, len / 6}, {len / 6, len / 3}};
            const double k[2][2] = {{1 / len, -1 / len}, {-1 / len, 1 / len}};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    mg.emplace_back(idx[i], idx[j], m[i][j]);
                    kg.emplace_back(idx[i], idx[j], k[i][j]);
                }
        }
    }
    NodeMatrices out;
    auto build = [nn](std::vector<Triplet>& trips) {
        SpMat m(nn, nn);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        return m;
    };
    out.massBulk = build(mb);
    out.massBoundary = build(mg);
    out.stiffBulk = build(kb);
    out.stiffBoundary = build(kg);
    return out;
}

namespace {

SpMat restrict_matrix(const SpMat& full, const std::vector<int>& freeDofMap, int numFree) {
    std::vector<Triplet> trips;
    trips.reserve(full.nonZeros());
    for (int col = 0; col < full.outerSize(); ++col) {
        const int fc = freeDofMap[col];
        if (fc < 0) continue;
        for (SpMat::InnerIterator it(full, col); it; ++it) {
            const int fr = freeDofMap[it.row()];
            if (fr < 0) continue;
            trips.emplace_back(fr, fc, it.value());
        }
    }
    SpMat out(numFree, numFree);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

}  // namespace

DiscreteOperators assemble(const Mesh& mesh) {
    validate_mesh(mesh);
    const NodeMatrices raw = assemble_node_matrices(mesh);
    const auto dirichlet = mesh.dirichletMask();

    DiscreteOperators ops;
    ops.dim = mesh.dim;
    ops.freeDofMap.assign(mesh.numNodes(), -1);
    int nd = 0;
    for (int i = 0; i < mesh.numNodes(); ++i) {
        if (dirichlet[i]) {
            ++nd;
            continue;
        }
        ops.freeDofMap[i] = static_cast<int>(ops.freeNodes.size());
        ops.freeNodes.push_back(i);
    }
    const int nf = ops.numFree();
    if (nf == 0) throw DegenerateSystemError("assemble: no free dofs after Dirichlet elimination");

    ops.massBulk = restrict_matrix(raw.massBulk, ops.freeDofMap, nf);
    ops.massBoundary = restrict_matrix(raw.massBoundary, ops.freeDofMap, nf);
    ops.stiffBulk = restrict_matrix(raw.stiffBulk, ops.freeDofMap, nf);
    ops.stiffBoundary = restrict_matrix(raw.stiffBoundary, ops.freeDofMap, nf);
    ops.mass = ops.massBulk + ops.massBoundary;
    ops.stiffness = ops.stiffBulk + ops.stiffBoundary;
    ops.mass.makeCompressed();
    ops.stiffness.makeCompressed();

    ops.lumpedBulkWeights = ops.massBulk * VecXd::Ones(nf);
    ops.lumpedBoundaryWeights = ops.massBoundary * VecXd::Ones(nf);

    for (int n : mesh.gamma1Nodes()) {
        const int fd = ops.freeDofMap[n];
        if (fd >= 0) ops.boundaryDofs.push_back(fd);
    }

    ops.freeCoords.resize(nf, mesh.dim);
    for (int i = 0; i < nf; ++i) ops.freeCoords.row(i) = mesh.nodes.row(ops.freeNodes[i]);
    ops.dirichletCoords.resize(nd, mesh.dim);
    int d = 0;
    for (int i = 0; i < mesh.numNodes(); ++i)
        if (dirichlet[i]) ops.dirichletCoords.row(d++) = mesh.nodes.row(i);
    return ops;
}

VecXd DiscreteOperators::restrict_to_free(const VecXd& nodal) const {
    if (nodal.size() != static_cast<Eigen::Index>(freeDofMap.size()))
        throw ShapeError("restrict_to_free: nodal vector length mismatch");
    VecXd out(numFree());
    for (int i = 0; i < numFree(); ++i) out[i] = nodal[freeNodes[i]];
    return out;
}

double h1_norm(const DiscreteOperators& ops, const VecXd& u) {
    if (u.size() != ops.numFree()) throw ShapeError("h1_norm: length mismatch");
    const double q = u.dot(ops.stiffness * u) + u.dot(ops.massBoundary * u);
    return std::sqrt(std::max(0.0, q));
}

double h0_norm(const DiscreteOperators& ops, const VecXd& v) {
    if (v.size() != ops.numFree()) throw ShapeError("h0_norm: length mismatch");
    return std::sqrt(std::max(0.0, v.dot(ops.mass * v)));
}

double weighted_lp_norm(const DiscreteOperators& ops, const VecXd& u, double rho,
                        const VecXd& field, WeightDomain domain) {
    if (rho < 1.0) throw InvalidParameterError("weighted_lp_norm: rho must be >= 1");
    if (u.size() != ops.numFree()) throw ShapeError("weighted_lp_norm: length mismatch");
    if (field.size() != 0 && field.size() != ops.numFree())
        throw ShapeError("weighted_lp_norm: field length mismatch");
    const VecXd& w =
        domain == WeightDomain::Bulk ? ops.lumpedBulkWeights : ops.lumpedBoundaryWeights;
    double s = 0;
    for (int i = 0; i < ops.numFree(); ++i) {
        const double fi = field.size() ? field[i] : 1.0;
        s += w[i] * fi * std::pow(std::abs(u[i]), rho);
    }
    return std::pow(s, 1.0 / rho);
}

void write_matrix_csv(const SpMat& m, std::ostream& out) {
    out << "row,col,value\n";
    for (int col = 0; col < m.outerSize(); ++col)
        for (SpMat::InnerIterator it(m, col); it; ++it)
            out << it.row() << "," << it.col() << "," << format_double(it.value()) << "\n";
}

}  // namespace dynbc
