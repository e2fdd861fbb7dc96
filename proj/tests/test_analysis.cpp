#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gpeps/analysis.hpp"
#include "gpeps/errors.hpp"
#include "gpeps/oracle.hpp"
#include "gpeps/svgplot.hpp"

#include <cmath>

using namespace gpeps;

TEST_CASE("chi extrapolation") {
    SUBCASE("exact linear data is recovered") {
        ChiSeries s;
        for (std::size_t chi : {8, 16, 32, 64, 128}) s.points.push_back({chi, 0.4 + 1.7 / chi});
        ChiFit fit = extrapolate_chi(s, 5);
        CHECK(fit.intercept == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-10));
        CHECK(fit.residual <= 1e-12);
    }
    SUBCASE("constant series") {
        ChiSeries s;
        for (std::size_t chi : {4, 8, 16}) s.points.push_back({chi, 0.25});
        ChiFit fit = extrapolate_chi(s, 3);
        CHECK(fit.intercept == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(std::abs(fit.slope) <= 1e-10);
    }
    SUBCASE("only the k largest chi enter the fit") {
        ChiSeries s;
        for (std::size_t chi : {2, 3, 4, 5}) s.points.push_back({chi, 99.0}); // corrupted low end
        for (std::size_t chi : {8, 16, 32, 64, 128}) s.points.push_back({chi, 0.4 + 1.7 / chi});
        ChiFit fit = extrapolate_chi(s, 5);
        CHECK(fit.intercept == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("window invariance under appending smaller chi") {
        ChiSeries big, small;
        for (std::size_t chi : {4, 8, 16, 32}) small.points.push_back({chi, 1.0 / chi});
        big.points.push_back({2, -5.0});
        for (const auto& p : small.points) big.points.push_back(p);
        ChiFit a = extrapolate_chi(small, 4), b = extrapolate_chi(big, 4);
        CHECK(a.intercept == b.intercept);
        CHECK(a.slope == b.slope);
    }
    SUBCASE("errors") {
        ChiSeries s;
        s.points = {{4, 0.1}, {8, 0.2}};
        CHECK_THROWS_AS(extrapolate_chi(s, 3), InvalidArgument);
        CHECK_THROWS_AS(extrapolate_chi(s, 1), InvalidArgument);
        ChiSeries bad;
        bad.points = {{8, 0.1}, {4, 0.2}};
        CHECK_THROWS_AS(extrapolate_chi(bad, 2), InvalidArgument);
    }
}

TEST_CASE("absolute error curves") {
    Series a{{0.0, 1.0}, {0.5, 0.8}, {1.0, 0.2}};
    SUBCASE("identical series vanish") {
        for (const auto& [t, e] : abs_error_curve(a, a)) CHECK(e == 0.0);
    }
    SUBCASE("constant offset") {
        Series b = a;
        for (auto& [t, v] : b) v += 1e-3;
        for (const auto& [t, e] : abs_error_curve(b, a)) CHECK(e == doctest::Approx(1e-3));
    }
    SUBCASE("grid mismatch throws") {
        Series b{{0.0, 1.0}, {0.6, 0.8}, {1.0, 0.2}};
        CHECK_THROWS_AS(abs_error_curve(a, b), InvalidArgument);
        Series c{{0.0, 1.0}};
        CHECK_THROWS_AS(abs_error_curve(a, c), InvalidArgument);
    }
}

TEST_CASE("sweep against the oracle on a tree") {
    SweepPlan plan;
    plan.size = "fixture:tree10";
    plan.thetas = theta_grid(9);
    plan.steps = 3;
    plan.chis = {32};
    plan.observables = {"z@4"};
    auto records = run_sweep(plan);
    REQUIRE(records.size() == 9);
    Graph g = fixture("tree10");
    double worst = 0.0;
    for (const auto& r : records) {
        StateVector sv = evolve_exact(g, r.theta_h, 3, Direction::Forward);
        PauliString z{{4, Pauli::Z}};
        worst = std::max(worst, std::abs(r.value - expect_pauli(sv, z)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("sweep structure and determinism") {
    SweepPlan plan;
    plan.size = "fixture:path8";
    plan.thetas = {0.7, 0.3};
    plan.steps = 2;
    plan.chis = {8, 4};
    plan.observables = {"z@0", "avg_z"};
    auto records = run_sweep(plan);
    REQUIRE(records.size() == 8);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto &a = records[i - 1], &b = records[i];
        CHECK(std::tie(a.theta_h, a.chi, a.observable) <= std::tie(b.theta_h, b.chi, b.observable));
    }
    auto again = run_sweep(plan);
    SweepPlan parallel = plan;
    parallel.threads = 4;
    auto par = run_sweep(parallel);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].value == again[i].value);
        CHECK(records[i].value == par[i].value);
        CHECK(records[i].observable == par[i].observable);
    }
    CHECK(config_hash(plan) == config_hash(parallel)); // threads excluded
}

TEST_CASE("single-point plan and failure markers") {
    SweepPlan plan;
    plan.size = "fixture:path8";
    plan.thetas = {0.7};
    plan.steps = 1;
    plan.chis = {4};
    plan.observables = {"avg_z"};
    auto one = run_sweep(plan);
    REQUIRE(one.size() == 1);
    CHECK(one[0].value == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
    CHECK(!one[0].failed);

    plan.observables = {"z@999", "avg_z", "w10@n1"};
    auto mixed = run_sweep(plan);
    REQUIRE(mixed.size() == 3);
    int failed = 0, ok = 0;
    for (const auto& r : mixed) {
        if (r.failed) {
            CHECK(std::isnan(r.value));
            CHECK(!r.error.empty());
            ++failed;
        } else {
            ++ok;
        }
    }
    CHECK(failed == 2); // bad site, and no weight-N anchor on fixtures
    CHECK(ok == 1);
}

TEST_CASE("csv and json round trip") {
    SweepPlan plan;
    plan.size = "fixture:path8";
    plan.thetas = {0.0, 0.7};
    plan.steps = 1;
    plan.chis = {4};
    plan.observables = {"avg_z"};
    auto records = run_sweep(plan);
    const std::uint64_t hash = config_hash(plan);
    const std::string csv = to_csv(records, hash);
    CHECK(csv.find("# config_hash=") == 0);
    CHECK(csv.find("version=0.1.0") != std::string::npos);
    CHECK(csv.find("size,theta_h,steps,chi,observable,site,value,max_trunc_err,wall_time_s") !=
          std::string::npos);

    auto parsed = parse_result_csv(csv);
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].value == records[i].value); // %.17g round trips doubles
        CHECK(parsed[i].chi == records[i].chi);
        CHECK(parsed[i].observable == records[i].observable);
    }

    const std::string json = to_json(records, hash);
    CHECK(json.find("\"config_hash\"") != std::string::npos);
    CHECK(json.find("\"version\": \"0.1.0\"") != std::string::npos);

    CHECK_THROWS_AS(parse_result_csv("a,b\n1,2\n"), InvalidArgument);

    // observables containing commas are quoted
    ResultRecord q;
    q.size = "fixture:path8";
    q.observable = "pauli:Z0,Z1";
    q.value = 0.5;
    auto rt = parse_result_csv(to_csv({q}, 0));
    REQUIRE(rt.size() == 1);
    CHECK(rt[0].observable == "pauli:Z0,Z1");
    CHECK(rt[0].value == 0.5);
}

TEST_CASE("reference xy csv") {
    Series s = parse_xy_csv("theta_h,value\n0,1\n0.5,0.8\n");
    REQUIRE(s.size() == 2);
    CHECK(s[1].first == 0.5);
    CHECK_THROWS_AS(parse_xy_csv("theta_h,value\n"), InvalidArgument);
}

TEST_CASE("theta grid") {
    auto g = theta_grid(17);
    REQUIRE(g.size() == 17);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(M_PI / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(theta_grid(0), InvalidArgument);
}

TEST_CASE("svg rendering") {
    PlotSeries s{"avg_z", {{0.0, 1.0}, {1.0, 0.5}}, true};
    const std::string svg = render_svg({s}, "t", "theta_h", "value");
    std::size_t count = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    CHECK(count == 1);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(render_svg({s}, "t", "theta_h", "value") == svg); // byte-deterministic
    CHECK_THROWS_AS(render_svg({}, "t", "x", "y"), InvalidArgument);
}
