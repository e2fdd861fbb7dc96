#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gpeps/checkpoint.hpp"
#include "gpeps/errors.hpp"
#include "gpeps/oracle.hpp"
#include "gpeps/peps.hpp"

#include <cmath>
#include <sstream>

using namespace gpeps;

namespace {

PepsState evolved(const Graph& g, double theta, int n, std::size_t chi) {
    PepsState s(g.incidence(), {.chi_max = chi});
    for (int i = 0; i < n; ++i) s.trotter_step(theta, Direction::Forward);
    return s;
}

/// Max deviation of every <Z_i> from the statevector oracle.
double z_deviation(const PepsState& s, const StateVector& sv) {
    double dev = 0.0;
    for (int v = 0; v < s.num_sites(); ++v) {
        PauliString z{{v, Pauli::Z}};
        dev = std::max(dev, std::abs(s.measure_site(v, Pauli::Z) - expect_pauli(sv, z)));
    }
    return dev;
}

} // namespace

TEST_CASE("initial product state") {
    Graph g = build_heavy_hex(HeavyHexSize::Eagle127);
    PepsState s(g.incidence());
    CHECK(s.num_sites() == 127);
    CHECK(s.max_bond_dim() == 1);
    for (int v : {0, 13, 62, 126}) {
        CHECK(s.measure_site(v, Pauli::Z) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(s.measure_site(v, Pauli::X)) <= 1e-14);
    }
    CHECK(s.average_magnetization() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single-site gates") {
    Graph g = fixture("path8");
    PepsState s(g.incidence());
    SUBCASE("identity leaves the tensor bitwise unchanged") {
        Tensor before = s.site_tensor(3);
        s.apply_single_site(3, x_rotation(0.0));
        const Tensor& after = s.site_tensor(3);
        REQUIRE(after.size() == before.size());
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);
    }
    SUBCASE("two pi-rotations act as -I on expectations") {
        s.apply_single_site(2, x_rotation(M_PI));
        s.apply_single_site(2, x_rotation(M_PI));
        CHECK(s.measure_site(2, Pauli::Z) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("half rotation kills <Z> at the site") {
        s.apply_single_site(5, x_rotation(M_PI / 2.0));
        CHECK(std::abs(s.measure_site(5, Pauli::Z)) <= 1e-12);
        CHECK(s.measure_site(4, Pauli::Z) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("simple update on a single edge") {
    Graph g = make_graph(2, {{0, 1}});
    SUBCASE("identity two-site gate leaves expectations") {
        PepsState s(g.incidence(), {.chi_max = 64});
        s.trotter_step(0.7, Direction::Forward);
        const double z0 = s.measure_site(0, Pauli::Z);
        Tensor id({2, 2, 2, 2});
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) id.at({a, b, a, b}) = 1.0;
        const double err = s.apply_two_site(0, id);
        CHECK(err <= 1e-10);
        CHECK(s.measure_site(0, Pauli::Z) == doctest::Approx(z0).epsilon(1e-12));
    }
    SUBCASE("zz gate on |00> keeps bond dimension 1") {
        PepsState s(g.incidence(), {.chi_max = 64});
        s.apply_two_site(0, zz_gate());
        CHECK(s.max_bond_dim() == 1);
        CHECK(s.measure_site(1, Pauli::Z) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("one full step gives <Z> = cos(theta)") {
        for (double theta : {0.0, 0.3, 1.0, M_PI / 2.0}) {
            PepsState s(g.incidence(), {.chi_max = 64});
            s.trotter_step(theta, Direction::Forward);
            for (int v : {0, 1})
                CHECK(s.measure_site(v, Pauli::Z) == doctest::Approx(std::cos(theta)).epsilon(1e-10));
        }
    }
}

TEST_CASE("one step on Eagle127 at chi=4 gives cos(theta) everywhere") {
    Graph g = build_heavy_hex(HeavyHexSize::Eagle127);
    PepsState s(g.incidence(), {.chi_max = 4});
    s.trotter_step(0.7, Direction::Forward);
    double dev = 0.0;
    for (int v = 0; v < g.n; ++v)
        dev = std::max(dev, std::abs(s.measure_site(v, Pauli::Z) - std::cos(0.7)));
    CHECK(dev <= 1e-10);
    CHECK(s.average_magnetization() == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
}

TEST_CASE("theta=0 steps keep magnetization 1") {
    Graph g = fixture("ring12hex");
    PepsState s(g.incidence(), {.chi_max = 8});
    for (int i = 0; i < 4; ++i) s.trotter_step(0.0, Direction::Forward);
    CHECK(s.average_magnetization() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.max_truncation_error() <= 1e-10);
}

TEST_CASE("forward then adjoint steps recover the initial state") {
    Graph g = fixture("path8");
    PepsState s(g.incidence(), {.chi_max = 64});
    for (int i = 0; i < 2; ++i) s.trotter_step(0.9, Direction::Forward);
    for (int i = 0; i < 2; ++i) s.trotter_step(0.9, Direction::Adjoint);
    for (int v = 0; v < g.n; ++v)
        CHECK(s.measure_site(v, Pauli::Z) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tree exactness against the oracle") {
    Graph g = fixture("tree10");
    for (int n : {1, 2, 3, 4}) {
        PepsState s = evolved(g, 0.83, n, std::size_t(1) << n);
        StateVector sv = evolve_exact(g, 0.83, n, Direction::Forward);
        CHECK(z_deviation(s, sv) <= 1e-9);
    }
}

TEST_CASE("exact contraction matches the oracle amplitudes") {
    Graph g = fixture("tree10");
    PepsState s = evolved(g, 0.7, 2, 64);
    StateVector sv = evolve_exact(g, 0.7, 2, Direction::Forward);
    std::vector<cplx> amp = to_amplitudes(s);
    cplx dot = 0.0;
    double na = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        dot += std::conj(amp[i]) * sv.amplitudes()[i];
        na += std::norm(amp[i]);
    }
    CHECK(std::abs(dot) / std::sqrt(na) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("light-cone exactness on the 12-site ring for n <= 2") {
    Graph g = fixture("ring12hex");
    for (int n : {1, 2}) {
        PepsState s = evolved(g, 0.9, n, 16);
        StateVector sv = evolve_exact(g, 0.9, n, Direction::Forward);
        CHECK(z_deviation(s, sv) <= 1e-6);
    }
}

TEST_CASE("clifford weight measurement") {
    SUBCASE("n_back=0 on the initial state is 1") {
        Graph g = fixture("path8");
        PepsState s(g.incidence());
        CHECK(s.clifford_weight_measure(0, 3) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("matches the oracle omega protocol on a small tree") {
        Graph g = fixture("tree10");
        for (double theta : {0.55, 1.2}) {
            PepsState s = evolved(g, theta, 2, 64);
            const double direct = s.clifford_weight_measure(2, 4);
            CHECK(direct == doctest::Approx(expect_omega_protocol(g, theta, 2, 4)).epsilon(1e-8));
        }
    }
    SUBCASE("theta=pi/2 is self-verifying: value 1") {
        Graph g = fixture("ring12hex");
        PepsState s = evolved(g, M_PI / 2.0, 3, 16);
        CHECK(s.clifford_weight_measure(3, 0) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("original state is untouched") {
        Graph g = fixture("path8");
        PepsState s = evolved(g, 0.4, 1, 16);
        const double before = s.measure_site(2, Pauli::Z);
        (void)s.clifford_weight_measure(1, 2);
        CHECK(s.measure_site(2, Pauli::Z) == before);
        CHECK(s.history().size() == 1);
    }
}

TEST_CASE("gauge sanity: rescaling lambda with compensation leaves expectations") {
    Graph g = fixture("tree10");
    PepsState s = evolved(g, 0.83, 2, 16);
    std::vector<double> ref(g.n);
    for (int v = 0; v < g.n; ++v) ref[v] = s.measure_site(v, Pauli::Z);

    const int eid = 3;
    const double c = 2.3;
    auto& lam = s.bond_weights(eid);
    for (double& x : lam) x *= c;
    // compensate at one endpoint so the represented state is unchanged
    const int v = s.graph().ends[eid][0];
    Tensor& t = s.site_tensor(v);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] /= c;

    for (int w = 0; w < g.n; ++w)
        CHECK(s.measure_site(w, Pauli::Z) == doctest::Approx(ref[w]).epsilon(1e-10));
}

TEST_CASE("monotone chi refinement on a tree") {
    Graph g = fixture("tree10");
    StateVector sv = evolve_exact(g, 0.9, 3, Direction::Forward);
    double prev = 1e9;
    for (std::size_t chi : {2, 4, 8, 16}) {
        PepsState s = evolved(g, 0.9, 3, chi);
        const double err = z_deviation(s, sv);
        CHECK(err <= prev + 1e-6);
        prev = err;
    }
}

TEST_CASE("truncation error is reported only when chi binds") {
    Graph g = fixture("path8");
    PepsState big = evolved(g, 0.9, 2, 64); // dims <= 4, chi never binds
    CHECK(big.max_truncation_error() <= 1e-10);
    PepsState small = evolved(g, 0.9, 3, 2);
    CHECK(small.max_truncation_error() > 1e-6);
}

TEST_CASE("edge color classes partition the edges into disjoint rounds") {
    Graph g = build_heavy_hex(HeavyHexSize::Eagle127);
    const Incidence inc = g.incidence();
    auto classes = edge_color_classes(inc);
    std::vector<int> seen(inc.ends.size(), 0);
    for (const auto& cls : classes) {
        std::vector<bool> touched(g.n, false);
        int prev = -1;
        for (int e : cls) {
            CHECK(e > prev);
            prev = e;
            ++seen[e];
            for (int v : inc.ends[e]) {
                CHECK(!touched[v]);
                touched[v] = true;
            }
        }
    }
    for (int c : seen) CHECK(c == 1);
    CHECK(classes.size() <= 5); // max degree 3 greedy bound
}

TEST_CASE("threaded zz layer is bitwise deterministic") {
    Graph g = fixture("patch20");
    PepsState a(g.incidence(), {.chi_max = 16, .threads = 1});
    PepsState b(g.incidence(), {.chi_max = 16, .threads = 4});
    for (int i = 0; i < 3; ++i) {
        a.trotter_step(0.8, Direction::Forward);
        b.trotter_step(0.8, Direction::Forward);
    }
    for (int v = 0; v < g.n; ++v) {
        const Tensor &ta = a.site_tensor(v), &tb = b.site_tensor(v);
        REQUIRE(ta.size() == tb.size());
        for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i] == tb[i]);
    }
}

TEST_CASE("infinite unit cell evolution") {
    UnitCellGraph cell = build_unit_cell();
    SUBCASE("theta=0 keeps cell magnetization 1") {
        PepsState s(cell.incidence(), {.chi_max = 8});
        for (int i = 0; i < 3; ++i) s.trotter_step(0.0, Direction::Forward);
        CHECK(s.average_magnetization() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("one step gives cos(theta) per site") {
        PepsState s(cell.incidence(), {.chi_max = 8});
        s.trotter_step(0.7, Direction::Forward);
        CHECK(s.average_magnetization() == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
    }
    SUBCASE("several steps run within chi") {
        PepsState s(cell.incidence(), {.chi_max = 16});
        for (int i = 0; i < 4; ++i) s.trotter_step(1.0, Direction::Forward);
        const double m = s.average_magnetization();
        CHECK(std::abs(m) <= 1.0 + 1e-9);
        CHECK(s.max_bond_dim() <= 16);
    }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    Graph g = fixture("tree10");
    PepsState s(g.incidence(), {.chi_max = 16, .lambda_floor = 1e-12, .threads = 2});
    for (int i = 0; i < 3; ++i) s.trotter_step(0.83, Direction::Forward);
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_checkpoint(s, buf);
    PepsState r = load_checkpoint(buf);

    CHECK(r.options().chi_max == 16);
    CHECK(r.options().threads == 2);
    CHECK(r.max_truncation_error() == s.max_truncation_error());
    REQUIRE(r.history().size() == 3);
    CHECK(r.history()[1].theta_h == 0.83);
    CHECK(r.history()[1].direction == Direction::Forward);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        CHECK(r.bond_weights(int(e)) == s.bond_weights(int(e)));
    for (int v = 0; v < g.n; ++v) {
        const Tensor &a = s.site_tensor(v), &b = r.site_tensor(v);
        REQUIRE(a.shape() == b.shape());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    // evolving the restored state stays bitwise identical to the original
    s.trotter_step(0.4, Direction::Forward);
    r.trotter_step(0.4, Direction::Forward);
    for (int v = 0; v < g.n; ++v) {
        const Tensor &a = s.site_tensor(v), &b = r.site_tensor(v);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("checkpoint rejects corrupt input") {
    Graph g = fixture("path8");
    PepsState s(g.incidence());
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_checkpoint(s, buf);
    std::string bytes = buf.str();
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        std::stringstream bad(bytes, std::ios::in | std::ios::binary);
        CHECK_THROWS_AS(load_checkpoint(bad), InvalidArgument);
    }
    SUBCASE("truncated") {
        std::stringstream bad(bytes.substr(0, bytes.size() / 2), std::ios::in | std::ios::binary);
        CHECK_THROWS_AS(load_checkpoint(bad), InvalidArgument);
    }
}

TEST_CASE("bad inputs") {
    Graph g = fixture("path8");
    PepsState s(g.incidence());
    CHECK_THROWS_AS(s.measure_site(99, Pauli::Z), InvalidArgument);
    CHECK_THROWS_AS(s.apply_two_site(99, zz_gate()), InvalidArgument);
    CHECK_THROWS_AS(s.clifford_weight_measure(-1, 0), InvalidArgument);
    CHECK_THROWS_AS(PepsState(g.incidence(), {.chi_max = 0}), InvalidArgument);
}
