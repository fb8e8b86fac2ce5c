#include "dynbc/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace dynbc;

namespace {

// every interior facet shared by two elements, every boundary facet by one
void check_facet_incidence(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int e = 0; e < mesh.numElements(); ++e) {
        if (mesh.dim == 1) {
            count[key(mesh.elements(e, 0), -1)]++;
            count[key(mesh.elements(e, 1), -1)]++;
        } else {
            for (int k = 0; k < 3; ++k)
                count[key(mesh.elements(e, k), mesh.elements(e, (k + 1) % 3))]++;
        }
    }
    std::set<std::pair<int, int>> tagged;
    for (const auto& f : mesh.boundaryFaces) tagged.insert(key(f.a, f.b));
    for (const auto& [k, c] : count) {
        CHECK(c <= 2);
        if (c == 1) CHECK(tagged.count(k) == 1);
        else CHECK(tagged.count(k) == 0);
    }
}

int count_dirichlet(const Mesh& mesh) {
    int n = 0;
    for (bool d : mesh.dirichletMask())
        if (d) ++n;
    return n;
}

}  // namespace

TEST_CASE("interval generator basics") {
    const Mesh mesh = generate_interval(1.0, 2);
    validate_mesh(mesh);
    CHECK(mesh.numNodes() == 3);
    CHECK(mesh.nodes(0, 0) == doctest::Approx(0.0));
    CHECK(mesh.nodes(1, 0) == doctest::Approx(0.5));
    CHECK(mesh.nodes(2, 0) == doctest::Approx(1.0));
    const auto mask = mesh.dirichletMask();
    CHECK(mask[0]);
    CHECK_FALSE(mask[1]);
    CHECK_FALSE(mask[2]);
    CHECK(mesh.boundaryChains.size() == 1);
    CHECK(mesh.boundaryChains[0].nodes == std::vector<int>{2});
    CHECK_FALSE(mesh.boundaryChains[0].closed);
}

TEST_CASE("interval generator counts and errors") {
    const Mesh mesh = generate_interval(1.0, 200);
    CHECK(mesh.numNodes() == 201);
    CHECK(mesh.gamma1Nodes().size() == 1);
    CHECK(mesh.totalMeasure() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(generate_interval(0.0, 10), InvalidParameterError);
    CHECK_THROWS_AS(generate_interval(-1.0, 10), InvalidParameterError);
    CHECK_THROWS_AS(generate_interval(1.0, 1), InvalidParameterError);
}

TEST_CASE("annulus generator structured counts") {
    const Mesh mesh = generate_annulus(0.3, 1.0, 2, 8);
    validate_mesh(mesh);
    CHECK(mesh.numNodes() == 24);
    CHECK(mesh.numElements() == 32);
    int inner = 0, outer = 0;
    for (const auto& f : mesh.boundaryFaces)
        (f.tag == BoundaryTag::Gamma0 ? inner : outer)++;
    CHECK(inner == 8);
    CHECK(outer == 8);
    check_facet_incidence(mesh);
}

TEST_CASE("annulus closed gamma1 chain") {
    const Mesh mesh = generate_annulus(0.3, 1.0, 16, 64);
    validate_mesh(mesh);
    REQUIRE(mesh.boundaryChains.size() == 1);
    CHECK(mesh.boundaryChains[0].closed);
    CHECK(mesh.boundaryChains[0].nodes.size() == 64);
}

TEST_CASE("annulus area converges to the analytic annulus area") {
    const double exact = M_PI * (1.0 - 0.09);
    const Mesh coarse = generate_annulus(0.3, 1.0, 4, 16);
    const Mesh fine = generate_annulus(0.3, 1.0, 16, 64);
    const double errCoarse = std::abs(coarse.totalMeasure() - exact) / exact;
    const double errFine = std::abs(fine.totalMeasure() - exact) / exact;
    CHECK(errFine < 0.01);
    CHECK(errFine < errCoarse);
    // inscribed polygon: deficit shrinks ~4x per angular refinement
    CHECK(errCoarse / errFine > 3.0);
}

TEST_CASE("annulus rejects bad parameters") {
    CHECK_THROWS_AS(generate_annulus(1.0, 0.3, 4, 16), InvalidParameterError);
    CHECK_THROWS_AS(generate_annulus(0.3, 1.0, 1, 16), InvalidParameterError);
    CHECK_THROWS_AS(generate_annulus(0.3, 1.0, 4, 7), InvalidParameterError);
}

TEST_CASE("rectangle generator corner rule") {
    const Mesh mesh = generate_rectangle(1.0, 1.0, 2, 2, RectangleSide::Top);
    validate_mesh(mesh);
    CHECK(mesh.numNodes() == 9);
    CHECK(mesh.numElements() == 8);
    int g1 = 0;
    for (const auto& f : mesh.boundaryFaces)
        if (f.tag == BoundaryTag::Gamma1) ++g1;
    CHECK(g1 == 2);
    // the two corners shared between tags are Dirichlet
    const auto mask = mesh.dirichletMask();
    int cornerTL = -1, cornerTR = -1;
    for (int i = 0; i < mesh.numNodes(); ++i) {
        if (mesh.nodes(i, 0) == 0.0 && mesh.nodes(i, 1) == 1.0) cornerTL = i;
        if (mesh.nodes(i, 0) == 1.0 && mesh.nodes(i, 1) == 1.0) cornerTR = i;
    }
    REQUIRE(cornerTL >= 0);
    REQUIRE(cornerTR >= 0);
    CHECK(mask[cornerTL]);
    CHECK(mask[cornerTR]);
    CHECK(count_dirichlet(mesh) == 7);  // three full sides of the 3x3 grid
    check_facet_incidence(mesh);
}

TEST_CASE("rectangle open chain with dirichlet endpoints") {
    const Mesh mesh = generate_rectangle(1.0, 1.0, 4, 4, RectangleSide::Top);
    REQUIRE(mesh.boundaryChains.size() == 1);
    const auto& chain = mesh.boundaryChains[0];
    CHECK_FALSE(chain.closed);
    CHECK(chain.nodes.size() == 5);
    const auto mask = mesh.dirichletMask();
    CHECK(mask[chain.nodes.front()]);
    CHECK(mask[chain.nodes.back()]);
    CHECK(mesh.totalMeasure() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rectangle rejects low resolution") {
    CHECK_THROWS_AS(generate_rectangle(1, 1, 1, 4, RectangleSide::Top), InvalidParameterError);
    CHECK_THROWS_AS(parse_rectangle_side("diagonal"), InvalidParameterError);
}

TEST_CASE("dirichlet set nonempty for all generators") {
    CHECK(count_dirichlet(generate_interval(1.0, 4)) > 0);
    CHECK(count_dirichlet(generate_annulus(0.3, 1.0, 2, 8)) > 0);
    CHECK(count_dirichlet(generate_rectangle(1, 1, 2, 2, RectangleSide::Left)) > 0);
}

TEST_CASE("pure dirichlet retag empties gamma1") {
    Mesh mesh = generate_interval(1.0, 8);
    retag_pure_dirichlet(mesh);
    validate_mesh(mesh);
    CHECK(mesh.gamma1Nodes().empty());
    CHECK(mesh.boundaryChains.empty());
    CHECK(count_dirichlet(mesh) == 2);
}

TEST_CASE("mesh csv round trip") {
    const Mesh original = generate_annulus(0.3, 1.0, 3, 12);
    std::stringstream buffer;
    write_mesh_csv(original, buffer);
    const Mesh copy = read_mesh_csv(buffer);
    REQUIRE(copy.numNodes() == original.numNodes());
    REQUIRE(copy.numElements() == original.numElements());
    CHECK((copy.nodes - original.nodes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((copy.elements - original.elements).cwiseAbs().maxCoeff() == 0);
    REQUIRE(copy.boundaryFaces.size() == original.boundaryFaces.size());
    for (size_t i = 0; i < copy.boundaryFaces.size(); ++i) {
        CHECK(copy.boundaryFaces[i].a == original.boundaryFaces[i].a);
        CHECK(copy.boundaryFaces[i].b == original.boundaryFaces[i].b);
        CHECK(copy.boundaryFaces[i].tag == original.boundaryFaces[i].tag);
    }
}

TEST_CASE("mesh csv rejects malformed input") {
    std::stringstream bad("garbage header\n");
    CHECK_THROWS_AS(read_mesh_csv(bad), InvalidParameterError);
    std::stringstream badTag("# dynbc-mesh v1 dim=1\nnode,0,0\nnode,1,1\nelem,0,0,1\nbface,0,0,7\n");
    CHECK_THROWS_AS(read_mesh_csv(badTag), InvalidParameterError);
}
