#pragma once

#include "dynbc/types.hpp"

#include <iosfwd>
#include <vector>

namespace dynbc {

enum class BoundaryTag : int { Gamma0 = 0, Gamma1 = 1 };

/// One boundary facet: a single node in 1D (b == -1), an edge in 2D.
struct BoundaryFace {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::Gamma0;
};

/// Ordered node walk along one connected Gamma1 component.
struct BoundaryChain {
    std::vector<int> nodes;
    bool closed = false;
};

struct Mesh {
    int dim = 0;          // 1 or 2
    MatXd nodes;          // numNodes x dim
    MatXi elements;       // numElements x (dim+1); intervals or triangles
    std::vector<BoundaryFace> boundaryFaces;
    std::vector<BoundaryChain> boundaryChains;

    int numNodes() const { return static_cast<int>(nodes.rows()); }
    int numElements() const { return static_cast<int>(elements.rows()); }

    double elementMeasure(int e) const;  // length (1D) or area (2D)
    double totalMeasure() const;
    double gamma1Measure() const;        // Gamma1 length in 2D, facet count in 1D

    /// Nodes incident to any Gamma0 facet (includes nodes shared with Gamma1).
    std::vector<bool> dirichletMask() const;
    std::vector<int> gamma1Nodes() const;
};

Mesh generate_interval(double length, int n);
Mesh generate_annulus(double r0, double r1, int nr, int nt);

enum class RectangleSide { Top, Bottom, Left, Right };
RectangleSide parse_rectangle_side(const std::string& name);

Mesh generate_rectangle(double lx, double ly, int nx, int ny, RectangleSide gamma1Side);

/// Degenerate pure-Dirichlet configuration: retags every boundary facet Gamma0.
void retag_pure_dirichlet(Mesh& mesh);

/// Checks the structural mesh invariants, throws InvalidParameterError on violation.
void validate_mesh(const Mesh& mesh);

// CSV exchange format:
//   # dynbc-mesh v1 dim=<d>
//   node,<id>,<x>[,<y>]
//   elem,<id>,<n0>,<n1>[,<n2>]
//   bface,<id>,<n0>[,<n1>],<tag>
void write_mesh_csv(const Mesh& mesh, std::ostream& out);
Mesh read_mesh_csv(std::istream& in);
void write_mesh_csv_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_csv_file(const std::string& path);

}  // namespace dynbc
