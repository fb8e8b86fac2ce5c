#pragma once

#include "dynbc/mesh.hpp"
#include "dynbc/types.hpp"

#include <iosfwd>
#include <vector>

namespace dynbc {

/// Raw P1 operators over all mesh nodes, before Dirichlet elimination.
struct NodeMatrices {
    SpMat massBulk;
    SpMat massBoundary;
    SpMat stiffBulk;
    SpMat stiffBoundary;
};

NodeMatrices assemble_node_matrices(const Mesh& mesh);

/// Free-dof operators of the weak form: mass pairs with the H0 product,
/// stiffness with the gradient + Laplace-Beltrami form, and the boundary
/// mass block carries the trace term of the H1 product.
struct DiscreteOperators {
    SpMat massBulk;
    SpMat massBoundary;
    SpMat stiffBulk;
    SpMat stiffBoundary;
    SpMat mass;        // massBulk + massBoundary
    SpMat stiffness;   // stiffBulk + stiffBoundary

    std::vector<int> freeDofMap;   // node id -> free index, -1 for Dirichlet
    std::vector<int> freeNodes;    // free index -> node id
    std::vector<int> boundaryDofs; // free indices lying on Gamma1

    VecXd lumpedBulkWeights;       // row sums of massBulk
    VecXd lumpedBoundaryWeights;   // row sums of massBoundary

    int dim = 0;
    MatXd freeCoords;          // numFree x dim
    MatXd dirichletCoords;     // for bump placement diagnostics

    int numFree() const { return static_cast<int>(freeNodes.size()); }

    /// Restricts nodal values (all mesh nodes) to the free dofs.
    VecXd restrict_to_free(const VecXd& nodal) const;
};

DiscreteOperators assemble(const Mesh& mesh);

double h1_norm(const DiscreteOperators& ops, const VecXd& u);
double h0_norm(const DiscreteOperators& ops, const VecXd& v);

enum class WeightDomain { Bulk, Gamma1 };

/// Lumped weighted Lp norm (sum_i w_i field_i |u_i|^rho)^(1/rho).
/// An empty field means field == 1.
double weighted_lp_norm(const DiscreteOperators& ops, const VecXd& u, double rho,
                        const VecXd& field, WeightDomain domain);

/// Coordinate-triplet CSV (row,col,value) for external verification.
void write_matrix_csv(const SpMat& m, std::ostream& out);

}  // namespace dynbc
