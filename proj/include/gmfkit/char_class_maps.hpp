#pragma once

// Mod-2 cohomology rings of products of BO(m)/BSO(m) and the maps between
// them induced by block inclusions of orthogonal groups.

#include "gmfkit/graded_f2.hpp"

#include <string>
#include <vector>

namespace gmfkit::charclass {

enum class Structure { O, SO };

std::string to_string(Structure s);
Structure structure_from_string(const std::string& s);

struct Factor {
    Structure kind = Structure::O;
    int rank = 0;
    // Generator prefix. A rank-one factor named "a" has the single generator "a".
    std::string name;
};

// H^*(prod_p B(factor_p); F2) as a polynomial ring on Stiefel-Whitney classes.
class ProductSWRing {
public:
    ProductSWRing(std::vector<Factor> factors, int truncation);

    const std::vector<Factor>& factors() const { return factors_; }
    const f2::MonomialBasis& basis() const { return basis_; }
    int truncation() const { return basis_.truncation(); }
    std::size_t num_generators() const { return basis_.generators().size(); }

    // Generator index of w_j in factor `factor`, or -1 when w_j is zero or 1
    // (j == 0, j > rank, or j == 1 on an oriented factor).
    int generator(std::size_t factor, int j) const;

    f2::PoincareSeries series() const { return basis_.series(); }

private:
    std::vector<Factor> factors_;
    // Filled while basis_ is constructed, so declared before it.
    std::vector<std::vector<int>> slots_;
    f2::MonomialBasis basis_;
};

// Y(i) = BO(i) x BO(d-i), generators u_1..u_i, v_1..v_{d-i}.
ProductSWRing build_Y(int i, int d, int truncation);
// Y1(i) = BO(i) x BO(1) x BO(d-i-1), generators u_1..u_i, a, v_1..v_{d-i-1}.
ProductSWRing build_Y1(int i, int d, int truncation);

// Homogeneous polynomial over F2: the monomials with coefficient one.
using Polynomial = std::vector<f2::MonomialBasis::Exponents>;

// Product of two polynomials in `ring`, reduced mod 2 and sorted.
Polynomial multiply(const ProductSWRing& ring, const Polynomial& a, const Polynomial& b);

// A ring map H^*(source) -> H^*(target), determined by generator images.
class RingMap {
public:
    RingMap(ProductSWRing source, ProductSWRing target, std::vector<Polynomial> generator_images);

    const ProductSWRing& source() const { return source_; }
    const ProductSWRing& target() const { return target_; }
    const std::vector<Polynomial>& generator_images() const { return images_; }

    // Per-degree matrices: rows index target monomials, columns source monomials.
    const f2::GradedMap& cohomology() const { return cohomology_; }
    // Degreewise dual, H_*(target) -> H_*(source).
    f2::GradedMap homology() const { return cohomology_.transpose(); }

    // Image of an arbitrary source monomial, read from the cohomology matrices.
    Polynomial image(const f2::MonomialBasis::Exponents& monomial) const;

private:
    ProductSWRing source_;
    ProductSWRing target_;
    std::vector<Polynomial> images_;
    f2::GradedMap cohomology_;
};

// H^*(Y(i)) -> H^*(Y1(i)): identity on u, v_j -> v_j + a v_{j-1}.
RingMap map_f(int i, int d, int truncation);
// H^*(Y(i+1)) -> H^*(Y1(i)): u_j -> u_j + a u_{j-1}, identity on v.
RingMap map_g(int i, int d, int truncation);

// Homology map of `m` up to degree `truncation`.
f2::GradedMap homology_map(const RingMap& m, int truncation);

// 0/1 grids per degree with labeled rows (target) and columns (source).
std::string dump(const RingMap& m);

}  // namespace gmfkit::charclass
