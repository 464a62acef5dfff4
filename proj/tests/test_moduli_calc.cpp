#include "gmfkit/moduli_calc.hpp"

#include <catch_amalgamated.hpp>

using namespace gmfkit;
using namespace gmfkit::moduli;
using f2::Coeff;

namespace {

PoincareSeries constant_series(int value, int truncation, int min_degree = 0) {
    return PoincareSeries(min_degree, truncation, std::vector<Coeff>(truncation - min_degree + 1, value));
}

}  // namespace

TEST_CASE("the zigzag diagram has consistent shapes") {
    for (int d = 1; d <= 4; ++d) {
        const ZigzagDiagram z = gmf_zigzag(d, 10);
        CHECK(z.bottom.size() == static_cast<std::size_t>(d + 1));
        CHECK(z.top.size() == static_cast<std::size_t>(d));
        CHECK_NOTHROW(z.validate());
        CHECK(zigzag_legs_surjective(z));
    }
    ZigzagDiagram broken = gmf_zigzag(2, 4);
    broken.left.pop_back();
    CHECK_THROWS(broken.validate());
}

TEST_CASE("hocolim of a zigzag of points is a point") {
    for (int d = 1; d <= 5; ++d) {
        const HocolimResult h = hocolim_series(point_zigzag(d, 6));
        CHECK(h.series == PoincareSeries::one(6));
        // Collapsing d + 1 points inside a contractible space leaves a wedge of d circles.
        const PoincareSeries cof = cofiber_series(h);
        CHECK(cof.at(0) == 0);
        CHECK(cof.at(1) == d);
        for (int n = 2; n <= 6; ++n) CHECK(cof.at(n) == 0);
    }
}

TEST_CASE("d = 1 hocolim is BO(1) and its cofiber is t P(BO(1))") {
    const HocolimResult h = hocolim_series(gmf_zigzag(1, 32));
    CHECK(h.series == f2::series_BO(1, 32));
    const PoincareSeries cof = cofiber_series(h);
    CHECK(cof == shift(f2::series_BO(1, 31), 1).truncated(32) + PoincareSeries::zero(32));
}

TEST_CASE("Mayer-Vietoris dimensions: coker Phi_n plus ker Phi_{n-1}") {
    const HocolimResult h = hocolim_series(gmf_zigzag(3, 12));
    for (int n = 0; n <= 12; ++n) {
        const auto k = static_cast<std::size_t>(n);
        const std::size_t coker = h.phi_rows[k] - h.phi_rank[k];
        const std::size_t ker_prev = n == 0 ? 0 : h.phi_cols[k - 1] - h.phi_rank[k - 1];
        CHECK(h.series.at(n) == coker + ker_prev);
        CHECK(h.inclusion[k].rows() == coker + ker_prev);
        CHECK(h.inclusion[k].cols() == h.phi_rows[k]);
    }
    // Rows of Phi_n are the disjoint union, columns the overlaps.
    const PoincareSeries mf = sigma_mf_series(3, 12);
    for (int n = 0; n <= 12; ++n) CHECK(h.phi_rows[static_cast<std::size_t>(n)] == mf.at(n));
}

TEST_CASE("cofiber matches the wedge formula") {
    for (int d = 1; d <= 4; ++d) CHECK(cofiber_series(d, 14) == wedge_target_series(d, 14));
}

TEST_CASE("Euler characteristic shadow: sigma-mf minus cofiber equals hocolim minus kernels") {
    // Degreewise alternating sums of the pair sequence vanish.
    const int d = 3, N = 12;
    const HocolimResult h = hocolim_series(gmf_zigzag(d, N));
    const PoincareSeries a = sigma_mf_series(d, N);
    const PoincareSeries c = cofiber_series(h);
    Coeff alt = 0;
    for (int n = 0; n <= N; ++n) {
        const Coeff term = a.at(n) - h.series.at(n) + c.at(n);
        alt += (n % 2 == 0) ? term : Coeff(-term);
    }
    // The truncated sequence ends at H_N(X, A) -> H_{N-1}(A); the leftover is
    // the kernel of iota_N with sign (-1)^N.
    const auto& iota = h.inclusion[N];
    const Coeff kN = Coeff(iota.cols() - f2::rank_f2(iota));
    CHECK(alt == ((N % 2 == 0) ? kN : Coeff(-kN)));
}

TEST_CASE("Thom spectrum series are shifted classifying series") {
    for (int d = 1; d <= 6; ++d) {
        const SpectrumSeries mo = mt_series(d, 20, Structure::O);
        const SpectrumSeries mso = mt_series(d, 20, Structure::SO);
        CHECK(mo.series.min_degree() == -d);
        CHECK(mo.series.at(-d) == 1);
        CHECK(mo.provenance == Provenance::Exact);
        for (int n = -d; n <= 20; ++n) CHECK(mo.series.at(n) >= mso.series.at(n));
        CHECK(mo.series.at(20) == f2::series_BO(d, 20 + d).at(20 + d));
    }
    CHECK(classifying_series(Structure::SO, 0, 5) == PoincareSeries::one(5));
}

TEST_CASE("mtgmf split value sits between its bounds") {
    for (int d = 1; d <= 3; ++d) {
        const SpectrumSeries s = mtgmf_series(d, 12);
        REQUIRE(s.lower);
        REQUIRE(s.upper);
        CHECK(s.provenance == Provenance::SplitAssumption);
        CHECK(s.series.min_degree() == -d);
        for (int n = -d; n <= 12; ++n) {
            CHECK(s.lower->at(n) <= s.series.at(n));
            CHECK(s.series.at(n) <= s.upper->at(n));
        }
    }
    const SpectrumSeries one = mtgmf_series(1, 6);
    CHECK(one.series == constant_series(1, 6, -1));
}

TEST_CASE("Gysin check passes for O and fails for SO at d = 1") {
    for (int d = 1; d <= 8; ++d) {
        const CheckRecord r = gysin_check(d, 32, Structure::O);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.assumptions.at(0).verified);
    }
    for (int d = 2; d <= 8; ++d) CHECK(gysin_check(d, 32, Structure::SO).verdict == Verdict::Pass);
    const CheckRecord so1 = gysin_check(1, 32, Structure::SO);
    CHECK(so1.verdict == Verdict::Fail);
    CHECK(so1.first_mismatch_degree == 1);
    CHECK_FALSE(so1.assumptions.at(0).verified);
}

TEST_CASE("unverified assumptions never yield a pass") {
    const CheckRecord r = mtgmf_bounds_check(2, 10);
    CHECK(r.verdict == Verdict::Interval);
    bool any_unverified = false;
    for (const auto& a : r.assumptions) any_unverified = any_unverified || !a.verified;
    CHECK(any_unverified);
}

TEST_CASE("structural checks pass for small d") {
    for (int d = 1; d <= 3; ++d) {
        const HocolimResult h = hocolim_series(gmf_zigzag(d, 13));
        CHECK(hocolim_cofiber_check(d, 12, h).verdict == Verdict::Pass);
        CHECK(connectivity_check(d, 12, h).verdict == Verdict::Pass);
        CHECK(sigma_mf_cofibration_check(d, 12, h).verdict == Verdict::Pass);
        CHECK(mtgmf_bounds_check(d, 12, h).verdict == Verdict::Interval);
    }
    CHECK(d1_oracle_check(32).verdict == Verdict::Pass);
}

TEST_CASE("check records serialize every field") {
    const auto j = to_json(gysin_check(3, 10, Structure::SO));
    CHECK(j["check"] == "gysin");
    CHECK(j["d"] == 3);
    CHECK(j["N"] == 10);
    CHECK(j["structure"] == "SO");
    CHECK(j["verdict"] == "pass");
    CHECK(j["first_mismatch_degree"].is_null());
    CHECK(j["assumptions"].size() == 1);
    CHECK(j.contains("wall_time_ms"));
    CHECK(j.contains("tolerance"));
}
