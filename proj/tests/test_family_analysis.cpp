#include "gmfkit/errors.hpp"
#include "gmfkit/family_analysis.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace gmfkit;
using namespace gmfkit::family;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// f(t, x, y) = t x^2 y + x^3 - 2 y^2 + t^2
PolyFamily sample_family() {
    return PolyFamily(1, 2, {{{1, 2, 1}, 1.0}, {{0, 3, 0}, 1.0}, {{0, 0, 2}, -2.0}, {{2, 0, 0}, 1.0}});
}

double sample_value(double t, double x, double y) {
    return t * x * x * y + x * x * x - 2 * y * y + t * t;
}

TraceOptions fast_options(int d) {
    TraceOptions o;
    o.grid_per_axis = d <= 2 ? 9 : (d == 3 ? 6 : 4);
    return o;
}

}  // namespace

TEST_CASE("family values and derivatives match direct formulas") {
    const PolyFamily f = sample_family();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = u(rng), x = u(rng), y = u(rng);
        const Vector tv = vec({t}), xv = vec({x, y});
        CHECK(f.value(tv, xv) == Catch::Approx(sample_value(t, x, y)).margin(1e-12));
        const Vector g = f.gradient(tv, xv);
        CHECK(g(0) == Catch::Approx(2 * t * x * y + 3 * x * x).margin(1e-12));
        CHECK(g(1) == Catch::Approx(t * x * x - 4 * y).margin(1e-12));
        const Matrix h = f.hessian(tv, xv);
        CHECK(h(0, 0) == Catch::Approx(2 * t * y + 6 * x).margin(1e-12));
        CHECK(h(0, 1) == Catch::Approx(2 * t * x).margin(1e-12));
        CHECK(h(1, 0) == h(0, 1));
        CHECK(h(1, 1) == Catch::Approx(-4.0).margin(1e-12));
        CHECK(f.derivative({1, 2, 1}, tv, xv) == Catch::Approx(2.0));
        CHECK(f.derivative({0, 3, 0}, tv, xv) == Catch::Approx(6.0));
    }
    CHECK_THROWS_AS(f.value(vec({0.0}), vec({1.0})), DimensionError);
}

TEST_CASE("fiber 3-jet reproduces the function to third order") {
    const PolyFamily f = sample_family();
    const Vector t = vec({0.7}), x0 = vec({0.3, -0.4});
    const jet::Jet3 j = fiber_jet3(f, t, x0);
    // The sample is cubic in x, so the jet is exact.
    for (double h : {1e-1, 5e-2, 0.8}) {
        const Vector dx = vec({h, -0.5 * h});
        CHECK(f.value(t, x0 + dx) == Catch::Approx(jet::evaluate(j, dx)).margin(1e-12));
    }
    // For x^4 the remainder is exactly h^4.
    const PolyFamily quartic(1, 1, {{{0, 4}, 1.0}});
    const jet::Jet3 q = fiber_jet3(quartic, t, vec({0.5}));
    for (double h : {1e-1, 5e-2, -0.3})
        CHECK(quartic.value(t, vec({0.5 + h})) - jet::evaluate(q, vec({h})) == Catch::Approx(std::pow(h, 4)).margin(1e-14));
    // Polynomials of degree <= 3 in x are reproduced exactly.
    const PolyFamily cusp = preset("cusp");
    const jet::Jet3 c = fiber_jet3(cusp, vec({0.5}), vec({0.2}));
    for (double h : {-0.7, 0.1, 1.3})
        CHECK(jet::evaluate(c, vec({h})) == Catch::Approx(cusp.value(vec({0.5}), vec({0.2 + h}))).margin(1e-12));
}

TEST_CASE("Newton converges to a fixed point of the gradient flow") {
    const PolyFamily cusp = preset("cusp");
    NewtonOptions opts;
    const auto x = newton_critical_point(cusp, vec({0.75}), vec({1.0}), opts);
    REQUIRE(x);
    CHECK((*x)(0) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(cusp.gradient(vec({0.75}), *x).norm() <= opts.newton_tol);
    // Restarting at the answer does not move it.
    const auto again = newton_critical_point(cusp, vec({0.75}), *x, opts);
    REQUIRE(again);
    CHECK((*again - *x).norm() == 0.0);
    // No critical point for t < 0.
    CHECK_FALSE(newton_critical_point(cusp, vec({-1.0}), vec({1.0}), opts));
}

TEST_CASE("fiber critical points of the cusp are classified by index") {
    const PolyFamily cusp = preset("cusp");
    const auto s = fiber_critical_points(cusp, vec({0.75}), Box{}, 9, NewtonOptions{});
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].x(0) == Catch::Approx(-0.5));
    CHECK(s.points[0].gmf_class == jet::GmfClass{jet::NondegenerateCritical{1}});
    CHECK(s.points[1].gmf_class == jet::GmfClass{jet::NondegenerateCritical{0}});
    CHECK(fiber_critical_points(cusp, vec({-0.5}), Box{}, 9, NewtonOptions{}).points.empty());
}

TEST_CASE("presets have the documented shapes") {
    CHECK(preset("cusp").fiber_dim() == 1);
    CHECK(preset("swallowtail").fiber_dim() == 1);
    for (int i = 0; i <= 3; ++i) {
        const PolyFamily f = preset("suspended-cusp-" + std::to_string(i));
        CHECK(f.param_dim() == 1);
        CHECK(f.fiber_dim() == i + 2);
        // Hessian at the origin, t = 0: diag(0, -2 x i, +2).
        const Matrix h = f.hessian(vec({0.0}), Vector::Zero(i + 2));
        CHECK(h(0, 0) == 0.0);
        for (int j = 1; j <= i; ++j) CHECK(h(j, j) == -2.0);
        CHECK(h(i + 1, i + 1) == 2.0);
    }
    CHECK_THROWS_AS(preset("cusp-2"), SchemaError);
    CHECK_THROWS_AS(preset("suspended-cusp-x"), SchemaError);
    CHECK_THROWS_AS(preset("suspended-cusp-1a"), SchemaError);
}

TEST_CASE("family JSON round trip and schema errors") {
    const PolyFamily f = sample_family();
    const PolyFamily g = family_from_json(to_json(f));
    CHECK(g.param_dim() == 1);
    CHECK(g.fiber_dim() == 2);
    CHECK(g.value(vec({0.3}), vec({0.1, 0.2})) == f.value(vec({0.3}), vec({0.1, 0.2})));
    CHECK_THROWS_AS(family_from_json({{"param_dim", 1}}), SchemaError);
    CHECK_THROWS_AS(family_from_json(nlohmann::json::parse(R"({"param_dim":1,"fiber_dim":1,"terms":[{"powers":[1],"coeff":1}]})")),
                    DimensionError);
}

TEST_CASE("cusp trace finds one index-0 event at the origin") {
    const TraceResult r = trace_birth_death(preset("cusp"), -1.0, 1.0, 40, fast_options(1));
    REQUIRE(r.events.size() == 1);
    CHECK(std::abs(r.events[0].t_star) <= 1e-8);
    CHECK(std::abs(r.events[0].x_star(0)) <= 1e-6);
    CHECK(r.events[0].index == 0);
    CHECK(r.degenerate.empty());
    // Two critical points after the birth, none before.
    CHECK(r.samples.front().empty());
    CHECK(r.samples.back().size() == 2);
}

TEST_CASE("an off-grid window still brackets the event") {
    const TraceResult r = trace_birth_death(preset("cusp"), -0.37, 0.91, 7, fast_options(1));
    REQUIRE(r.events.size() == 1);
    CHECK(std::abs(r.events[0].t_star) <= 1e-8);
}

TEST_CASE("reversed cusp records a death with the same location") {
    // f = x^3 + t x: critical pair for t < 0 dies at t = 0.
    const PolyFamily f(1, 1, {{{0, 3}, 1.0}, {{1, 1}, 1.0}});
    const TraceResult r = trace_birth_death(f, -1.0, 1.0, 16, fast_options(1));
    REQUIRE(r.events.size() == 1);
    CHECK(std::abs(r.events[0].t_star) <= 1e-8);
}

TEST_CASE("suspended cusps carry the index of the negative block") {
    for (int i = 0; i <= 2; ++i) {
        const PolyFamily f = preset("suspended-cusp-" + std::to_string(i));
        const TraceResult r = trace_birth_death(f, -1.0, 1.0, 20, fast_options(f.fiber_dim()));
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0].index == i);
        CHECK(std::abs(r.events[0].t_star) <= 1e-8);
        // Index bookkeeping: the born pair has indices i and i + 1.
        std::vector<int> idx;
        for (const auto& p : r.samples.back()) idx.push_back(*jet::class_index(p.gmf_class));
        std::sort(idx.begin(), idx.end());
        CHECK(idx == std::vector<int>{i, i + 1});
    }
}

TEST_CASE("swallowtail fails the generalized Morse axiom near t = 0") {
    const AxiomReport rep = check_family_axioms(preset("swallowtail"), -1.0, 1.0, 40, fast_options(1));
    REQUIRE_FALSE(rep.degenerate.empty());
    CHECK(std::abs(rep.degenerate[0].t) <= 1e-6);
    CHECK(rep.degenerate[0].reason == jet::DegenerateReason::KernelCubicVanishes);
    CHECK(rep.axioms.size() == 4);
    CHECK(rep.axioms[3].verdict == Verdict::Fail);
    CHECK(rep.events.empty());
}

TEST_CASE("cusp passes the axioms it can check") {
    const AxiomReport rep = check_family_axioms(preset("cusp"), -1.0, 1.0, 20, fast_options(1));
    CHECK(rep.axioms[0].verdict == Verdict::Pass);
    CHECK(rep.axioms[1].verdict == Verdict::NotChecked);
    CHECK(rep.axioms[2].verdict == Verdict::Pass);
    CHECK(rep.axioms[3].verdict == Verdict::Pass);
}

TEST_CASE("events CSV prints full precision") {
    BirthDeathEvent e;
    e.t_star = 0.1;
    e.x_star = vec({-0.0, 1.0 / 3.0});
    e.index = 1;
    e.det_hessian = 2.5;
    const std::string csv = events_csv({e}, 2);
    CHECK(csv == "t_star,x_star_1,x_star_2,index,det_hessian\n"
                 "0.10000000000000001,0,0.33333333333333331,1,2.5\n");
}
