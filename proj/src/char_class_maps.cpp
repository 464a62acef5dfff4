#include "gmfkit/char_class_maps.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gmfkit::charclass {

using f2::F2Matrix;
using f2::MonomialBasis;
using Exponents = MonomialBasis::Exponents;

std::string to_string(Structure s) {
    return s == Structure::O ? "O" : "SO";
}

Structure structure_from_string(const std::string& s) {
    if (s == "O" || s == "o") return Structure::O;
    if (s == "SO" || s == "so") return Structure::SO;
    throw std::invalid_argument("unknown structure: " + s);
}

namespace {

std::vector<MonomialBasis::Generator> generators_for(const std::vector<Factor>& factors,
                                                     std::vector<std::vector<int>>& slots) {
    std::vector<MonomialBasis::Generator> gens;
    slots.clear();
    for (const auto& f : factors) {
        if (f.rank < 0) throw std::invalid_argument("ProductSWRing: negative rank");
        std::vector<int> slot(static_cast<std::size_t>(f.rank + 1), -1);
        const int first = f.kind == Structure::SO ? 2 : 1;
        for (int j = first; j <= f.rank; ++j) {
            slot[static_cast<std::size_t>(j)] = static_cast<int>(gens.size());
            const bool bare = f.name == "a" && f.rank == 1;
            gens.push_back({bare ? f.name : f.name + std::to_string(j), j});
        }
        slots.push_back(std::move(slot));
    }
    return gens;
}

}  // namespace

ProductSWRing::ProductSWRing(std::vector<Factor> factors, int truncation)
    : factors_(std::move(factors)), basis_(generators_for(factors_, slots_), truncation) {}

int ProductSWRing::generator(std::size_t factor, int j) const {
    const auto& slot = slots_.at(factor);
    if (j <= 0 || j >= static_cast<int>(slot.size())) return -1;
    return slot[static_cast<std::size_t>(j)];
}

ProductSWRing build_Y(int i, int d, int truncation) {
    if (d < 1 || i < 0 || i > d) throw std::out_of_range("build_Y: need 0 <= i <= d");
    return ProductSWRing({{Structure::O, i, "u"}, {Structure::O, d - i, "v"}}, truncation);
}

ProductSWRing build_Y1(int i, int d, int truncation) {
    if (d < 1 || i < 0 || i > d - 1) throw std::out_of_range("build_Y1: need 0 <= i <= d-1");
    return ProductSWRing({{Structure::O, i, "u"}, {Structure::O, 1, "a"}, {Structure::O, d - i - 1, "v"}},
                         truncation);
}

Polynomial multiply(const ProductSWRing& ring, const Polynomial& a, const Polynomial& b) {
    std::vector<Exponents> terms;
    for (const auto& x : a)
        for (const auto& y : b) {
            Exponents e(ring.num_generators());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = x[k] + y[k];
            terms.push_back(std::move(e));
        }
    std::sort(terms.begin(), terms.end());
    Polynomial out;
    for (std::size_t k = 0; k < terms.size();) {
        std::size_t run = k;
        while (run < terms.size() && terms[run] == terms[k]) ++run;
        if ((run - k) % 2 == 1) out.push_back(terms[k]);
        k = run;
    }
    return out;
}

RingMap::RingMap(ProductSWRing source, ProductSWRing target, std::vector<Polynomial> generator_images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(generator_images)) {
    const auto& sbasis = source_.basis();
    const auto& tbasis = target_.basis();
    const auto& sgens = sbasis.generators();
    if (images_.size() != sgens.size()) throw std::invalid_argument("RingMap: one image per source generator");
    for (std::size_t g = 0; g < sgens.size(); ++g)
        for (const auto& term : images_[g])
            if (term.size() != target_.num_generators() || tbasis.degree_of(term) != sgens[g].degree)
                throw std::invalid_argument("RingMap: image of " + sgens[g].label + " is not homogeneous");

    const int top = std::min(source_.truncation(), target_.truncation());
    // columns[n][s] = image of source monomial s of degree n, as a bit row
    // over the target basis of degree n.
    std::vector<std::vector<F2Matrix>> columns(static_cast<std::size_t>(top + 1));
    std::vector<F2Matrix> per_degree;
    for (int n = 0; n <= top; ++n) {
        const auto& src = sbasis.basis(n);
        const std::size_t tdim = tbasis.dim(n);
        F2Matrix m(tdim, src.size());
        auto& cols = columns[static_cast<std::size_t>(n)];
        cols.reserve(src.size());
        for (std::size_t s = 0; s < src.size(); ++s) {
            F2Matrix col(1, tdim);
            const Exponents& e = src[s];
            auto first = std::find_if(e.begin(), e.end(), [](int k) { return k > 0; });
            if (first == e.end()) {
                col.set(0, *tbasis.index_of(Exponents(target_.num_generators(), 0)), true);
            } else {
                // image(e) = image(e / x_g) * image(x_g)
                const auto g = static_cast<std::size_t>(first - e.begin());
                Exponents rest = e;
                --rest[g];
                const int lower = n - sgens[g].degree;
                const auto& lower_basis = tbasis.basis(lower);
                const F2Matrix& prev = columns[static_cast<std::size_t>(lower)][*sbasis.index_of(rest)];
                for (std::size_t b = 0; b < lower_basis.size(); ++b) {
                    if (!prev.get(0, b)) continue;
                    for (const auto& term : images_[g]) {
                        Exponents prod = lower_basis[b];
                        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] += term[k];
                        col.flip(0, *tbasis.index_of(prod));
                    }
                }
            }
            for (std::size_t t = 0; t < tdim; ++t)
                if (col.get(0, t)) m.set(t, s, true);
            cols.push_back(std::move(col));
        }
        per_degree.push_back(std::move(m));
    }
    cohomology_ = f2::GradedMap(std::move(per_degree));
}

Polynomial RingMap::image(const Exponents& monomial) const {
    const auto idx = source_.basis().index_of(monomial);
    if (!idx) throw std::out_of_range("RingMap::image: monomial outside the computed range");
    const int n = source_.basis().degree_of(monomial);
    const F2Matrix& m = cohomology_.at(n);
    Polynomial out;
    for (std::size_t t = 0; t < m.rows(); ++t)
        if (m.get(t, *idx)) out.push_back(target_.basis().basis(n)[t]);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

Exponents unit(const ProductSWRing& ring, int gen) {
    Exponents e(ring.num_generators(), 0);
    if (gen >= 0) e[static_cast<std::size_t>(gen)] = 1;
    return e;
}

// Image of w_j(xi + L) = w_j(xi) + a w_{j-1}(xi), where xi's classes live in
// factor `block` of `target` and a is the line class.
Polynomial whitney_with_line(const ProductSWRing& target, std::size_t block, int line_gen, int j) {
    Polynomial p;
    const int wj = target.generator(block, j);
    if (wj >= 0) p.push_back(unit(target, wj));
    if (j == 1) {
        p.push_back(unit(target, line_gen));
    } else {
        const int wprev = target.generator(block, j - 1);
        if (wprev >= 0) {
            Exponents e = unit(target, wprev);
            ++e[static_cast<std::size_t>(line_gen)];
            p.push_back(std::move(e));
        }
    }
    std::sort(p.begin(), p.end());
    return p;
}

}  // namespace

RingMap map_f(int i, int d, int truncation) {
    if (i < 0 || i > d - 1) throw std::out_of_range("map_f: need 0 <= i <= d-1");
    ProductSWRing source = build_Y(i, d, truncation);
    ProductSWRing target = build_Y1(i, d, truncation);
    const int a = target.generator(1, 1);
    std::vector<Polynomial> images;
    for (int j = 1; j <= i; ++j) images.push_back({unit(target, target.generator(0, j))});
    for (int j = 1; j <= d - i; ++j) images.push_back(whitney_with_line(target, 2, a, j));
    return RingMap(std::move(source), std::move(target), std::move(images));
}

RingMap map_g(int i, int d, int truncation) {
    if (i < 0 || i > d - 1) throw std::out_of_range("map_g: need 0 <= i <= d-1");
    ProductSWRing source = build_Y(i + 1, d, truncation);
    ProductSWRing target = build_Y1(i, d, truncation);
    const int a = target.generator(1, 1);
    std::vector<Polynomial> images;
    for (int j = 1; j <= i + 1; ++j) images.push_back(whitney_with_line(target, 0, a, j));
    for (int j = 1; j <= d - i - 1; ++j) images.push_back({unit(target, target.generator(2, j))});
    return RingMap(std::move(source), std::move(target), std::move(images));
}

f2::GradedMap homology_map(const RingMap& m, int truncation) {
    if (truncation > m.cohomology().truncation())
        throw std::out_of_range("homology_map: rings built to a lower degree");
    std::vector<F2Matrix> mats;
    for (int n = 0; n <= truncation; ++n) mats.push_back(m.cohomology().at(n).transpose());
    return f2::GradedMap(std::move(mats));
}

std::string dump(const RingMap& m) {
    std::ostringstream os;
    const auto& sb = m.source().basis();
    const auto& tb = m.target().basis();
    for (int n = 0; n <= m.cohomology().truncation(); ++n) {
        const F2Matrix& mat = m.cohomology().at(n);
        os << "degree " << n << " (" << mat.rows() << "x" << mat.cols() << ")\n";
        os << "cols:";
        for (const auto& e : sb.basis(n)) os << ' ' << sb.label_of(e);
        os << '\n';
        for (std::size_t r = 0; r < mat.rows(); ++r) {
            os << tb.label_of(tb.basis(n)[r]) << ':';
            for (std::size_t c = 0; c < mat.cols(); ++c) os << ' ' << (mat.get(r, c) ? '1' : '0');
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace gmfkit::charclass
