#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gpeps/circuit.hpp"
#include "gpeps/errors.hpp"
#include "gpeps/oracle.hpp"

#include <cmath>

using namespace gpeps;

TEST_CASE("capacity cap") {
    CHECK_THROWS_AS(StateVector(23), CapacityError);
    Graph big = build_heavy_hex(HeavyHexSize::Eagle127);
    CHECK_THROWS_AS(evolve_exact(big, 0.3, 1, Direction::Forward), CapacityError);
}

TEST_CASE("theta=0 evolution is diagonal: |0...0> keeps unit modulus") {
    Graph g = fixture("path8");
    for (int n : {1, 3, 7}) {
        StateVector sv = evolve_exact(g, 0.0, n, Direction::Forward);
        CHECK(std::abs(sv.amplitudes()[0]) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("one step on a 2-site graph gives <Z> = cos(theta)") {
    Graph g = make_graph(2, {{0, 1}});
    for (double theta : {0.0, 0.3, 0.7, 1.0, M_PI / 2.0}) {
        StateVector sv = evolve_exact(g, theta, 1, Direction::Forward);
        for (int site : {0, 1}) {
            PauliString z{{site, Pauli::Z}};
            CHECK(expect_pauli(sv, z) == doctest::Approx(std::cos(theta)).epsilon(1e-12));
        }
    }
}

TEST_CASE("norm is preserved and round trips are exact") {
    Graph g = fixture("tree10");
    StateVector sv = evolve_exact(g, 0.83, 4, Direction::Forward);
    CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-12));
    evolve_steps(sv, g, 0.83, 4, Direction::Adjoint);
    CHECK(std::abs(sv.amplitudes()[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expect_pauli basics on |0...0>") {
    StateVector sv(5);
    CHECK(expect_pauli(sv, {{0, Pauli::Z}, {3, Pauli::Z}}) == doctest::Approx(1.0));
    CHECK(expect_pauli(sv, {{1, Pauli::X}}) == doctest::Approx(0.0));
    CHECK(expect_pauli(sv, {{2, Pauli::Y}, {4, Pauli::Z}}) == doctest::Approx(0.0));
}

TEST_CASE("uniform superposition has <Z> = 0") {
    StateVector sv(4);
    Tensor h = x_rotation(M_PI / 2.0);
    for (int q = 0; q < 4; ++q) sv.apply_1q(q, h);
    for (int q = 0; q < 4; ++q) {
        PauliString z{{q, Pauli::Z}};
        CHECK(std::abs(expect_pauli(sv, z)) <= 1e-12);
    }
}

TEST_CASE("omega protocol") {
    Graph g = fixture("path8");
    SUBCASE("n=0 is just Z on the evolved state... the initial state") {
        CHECK(expect_omega_protocol(g, 0.42, 0, 3) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("Clifford circuit at theta=pi/2 gives stabilizer values") {
        for (int n : {1, 2, 3}) {
            const double v = expect_omega_protocol(g, M_PI / 2.0, n, 2);
            const double r = std::round(v);
            CHECK(std::abs(v - r) <= 1e-10);
            CHECK(std::abs(r) <= 1.0);
        }
    }
    SUBCASE("matches the hand-conjugated string on a 4-site path, n=1") {
        // U(pi/2) Z_1 U(pi/2)^dag on the path 0-1-2-3: the X layer sends
        // Z_1 to -Y_1, edge (0,1) sends -Y_1 to -X_1 Z_0, and edge (1,2)
        // sends -X_1 Z_0 to +Y_1 Z_0 Z_2.
        Graph p4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
        for (double theta : {0.3, 0.9}) {
            StateVector psi = evolve_exact(p4, theta, 1, Direction::Forward);
            PauliString hand{{0, Pauli::Z}, {1, Pauli::Y}, {2, Pauli::Z}};
            const double via_string = expect_pauli(psi, hand);
            CHECK(expect_omega_protocol(p4, theta, 1, 1) ==
                  doctest::Approx(via_string).epsilon(1e-10));
        }
    }
}

TEST_CASE("oracle commutes with qubit relabeling") {
    // Relabel tree10 by a fixed permutation and compare single-site
    // expectations through the permutation.
    Graph g = fixture("tree10");
    std::vector<int> perm{3, 0, 7, 9, 2, 5, 1, 8, 6, 4};
    std::vector<std::array<int, 2>> edges;
    for (const auto& [u, v] : g.edges) edges.push_back({perm[u], perm[v]});
    Graph h = make_graph(10, std::move(edges));

    StateVector sg = evolve_exact(g, 0.77, 3, Direction::Forward);
    StateVector sh = evolve_exact(h, 0.77, 3, Direction::Forward);
    for (int v = 0; v < g.n; ++v) {
        PauliString zg{{v, Pauli::Z}}, zh{{perm[v], Pauli::Z}};
        CHECK(expect_pauli(sg, zg) == doctest::Approx(expect_pauli(sh, zh)).epsilon(1e-12));
    }
}
