#include "gmfkit/char_class_maps.hpp"

#include <catch_amalgamated.hpp>

#include <map>
#include <random>

using namespace gmfkit;
using namespace gmfkit::charclass;
using Exponents = f2::MonomialBasis::Exponents;

namespace {

// Product of polynomials over F2 with a map as the accumulator.
Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    std::map<Exponents, int> acc;
    for (const auto& x : a)
        for (const auto& y : b) {
            Exponents e(x.size());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = x[k] + y[k];
            acc[e] ^= 1;
        }
    Polynomial out;
    for (const auto& [e, c] : acc)
        if (c) out.push_back(e);
    return out;
}

// Image of a monomial expanded from the generator images directly.
Polynomial expand(const RingMap& m, const Exponents& e) {
    Polynomial acc = {Exponents(m.target().num_generators(), 0)};
    for (std::size_t g = 0; g < e.size(); ++g)
        for (int p = 0; p < e[g]; ++p) acc = poly_mul(acc, m.generator_images()[g]);
    return acc;
}

}  // namespace

TEST_CASE("product rings have the product Poincare series") {
    for (int d = 1; d <= 5; ++d) {
        for (int i = 0; i <= d; ++i)
            CHECK(build_Y(i, d, 20).series() == f2::series_BO(i, 20) * f2::series_BO(d - i, 20));
        for (int i = 0; i < d; ++i)
            CHECK(build_Y1(i, d, 20).series() ==
                  f2::series_BO(i, 20) * f2::series_BO(1, 20) * f2::series_BO(d - i - 1, 20));
    }
    const ProductSWRing so({{Structure::SO, 4, "w"}}, 20);
    CHECK(so.series() == f2::series_BSO(4, 20));
}

TEST_CASE("generator lookup follows Stiefel-Whitney conventions") {
    const ProductSWRing r({{Structure::O, 2, "u"}, {Structure::O, 1, "a"}, {Structure::SO, 3, "v"}}, 10);
    CHECK(r.num_generators() == 5);
    CHECK(r.generator(0, 0) == -1);
    CHECK(r.generator(0, 1) == 0);
    CHECK(r.generator(0, 3) == -1);
    CHECK(r.generator(1, 1) == 2);
    CHECK(r.basis().generators()[2].label == "a");
    CHECK(r.generator(2, 1) == -1);
    CHECK(r.generator(2, 2) == 3);
    CHECK(r.basis().generators()[4].label == "v3");
    CHECK(structure_from_string("so") == Structure::SO);
    CHECK_THROWS(structure_from_string("spin"));
}

TEST_CASE("map_f sends v_j to v_j + a v_{j-1}") {
    const RingMap f = map_f(1, 3, 8);
    // Source Y(1): u1, v1, v2.  Target Y1(1): u1, a, v1.
    REQUIRE(f.generator_images().size() == 3);
    const Polynomial v1 = f.image({0, 1, 0});
    CHECK(v1 == Polynomial{{0, 0, 1}, {0, 1, 0}});
    const Polynomial v2 = f.image({0, 0, 1});
    CHECK(v2 == Polynomial{{0, 1, 1}});
    CHECK(f.image({1, 0, 0}) == Polynomial{{1, 0, 0}});
}

TEST_CASE("map_g sends u_j to u_j + a u_{j-1}") {
    const RingMap g = map_g(0, 2, 8);
    // Source Y(1): u1, v1.  Target Y1(0): a, v1.
    CHECK(g.image({1, 0}) == Polynomial{{1, 0}});
    CHECK(g.image({0, 1}) == Polynomial{{0, 1}});
    const RingMap g2 = map_g(1, 2, 8);
    // Source Y(2): u1, u2.  Target Y1(1): u1, a.
    CHECK(g2.image({0, 1}) == Polynomial{{1, 1}});
    CHECK(g2.image({1, 0}) == (Polynomial{{0, 1}, {1, 0}}));
}

TEST_CASE("ring maps are multiplicative") {
    std::mt19937_64 rng(17);
    for (int d = 1; d <= 4; ++d)
        for (int i = 0; i < d; ++i)
            for (const RingMap& m : {map_f(i, d, 12), map_g(i, d, 12)}) {
                for (int n = 0; n <= 12; ++n)
                    for (const auto& e : m.source().basis().basis(n)) CHECK(m.image(e) == expand(m, e));
                // image(xy) = image(x) image(y)
                for (int trial = 0; trial < 20; ++trial) {
                    const int n1 = static_cast<int>(rng() % 7), n2 = static_cast<int>(rng() % 6);
                    const auto& b1 = m.source().basis().basis(n1);
                    const auto& b2 = m.source().basis().basis(n2);
                    if (b1.empty() || b2.empty()) continue;
                    const auto& x = b1[rng() % b1.size()];
                    const auto& y = b2[rng() % b2.size()];
                    Exponents xy(x.size());
                    for (std::size_t k = 0; k < xy.size(); ++k) xy[k] = x[k] + y[k];
                    CHECK(m.image(xy) == poly_mul(m.image(x), m.image(y)));
                }
            }
}

TEST_CASE("cohomology maps are injective in every degree") {
    for (int d = 1; d <= 4; ++d)
        for (int i = 0; i < d; ++i)
            for (const RingMap& m : {map_f(i, d, 14), map_g(i, d, 14)})
                for (const auto& r : m.cohomology().ranks()) CHECK(r.kernel == 0);
}

TEST_CASE("d = 1 maps are the identity of BO(1)") {
    const RingMap f = map_f(0, 1, 6);
    const RingMap g = map_g(0, 1, 6);
    for (int n = 0; n <= 6; ++n) {
        CHECK(f.cohomology().at(n) == f2::F2Matrix::identity(1));
        CHECK(g.cohomology().at(n) == f2::F2Matrix::identity(1));
    }
}

TEST_CASE("homology maps are transposes and truncate") {
    const RingMap f = map_f(1, 3, 10);
    const auto h = homology_map(f, 6);
    CHECK(h.truncation() == 6);
    for (int n = 0; n <= 6; ++n) CHECK(h.at(n) == f.cohomology().at(n).transpose());
    CHECK_THROWS(homology_map(f, 11));
}

TEST_CASE("dump labels rows and columns") {
    const std::string s = dump(map_f(0, 1, 2));
    CHECK(s.find("degree 1") != std::string::npos);
    CHECK(s.find("v1") != std::string::npos);
    CHECK(s.find("a") != std::string::npos);
}

TEST_CASE("ring maps reject inhomogeneous images") {
    const ProductSWRing src({{Structure::O, 2, "w"}}, 4);
    const ProductSWRing tgt({{Structure::O, 2, "w"}}, 4);
    CHECK_THROWS(RingMap(src, tgt, {{{0, 1}}, {{0, 1}}}));
    CHECK_NOTHROW(RingMap(src, tgt, {{{1, 0}}, {{0, 1}, {2, 0}}}));
}
