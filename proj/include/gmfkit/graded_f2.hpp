#pragma once

// Truncated Laurent Poincare series with exact coefficients, monomial bases of
// graded polynomial rings, and dense linear algebra over F2.

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gmfkit::f2 {

using Coeff = boost::multiprecision::cpp_int;

inline constexpr int kDefaultTruncation = 32;

// Graded dimensions sum_n c_n t^n for min_degree <= n <= truncation. Degrees
// below min_degree are zero; degrees above truncation are unknown.
class PoincareSeries {
public:
    PoincareSeries() = default;
    PoincareSeries(int min_degree, int truncation, std::vector<Coeff> coeffs);

    static PoincareSeries zero(int truncation);
    static PoincareSeries one(int truncation);
    // t^k, known up to `truncation`.
    static PoincareSeries monomial(int k, int truncation);

    int min_degree() const { return min_degree_; }
    int truncation() const { return truncation_; }

    // Coefficient at `degree`; zero below min_degree. Throws std::out_of_range
    // above the truncation.
    const Coeff& at(int degree) const;
    Coeff& mutable_at(int degree);
    const Coeff& operator[](int degree) const { return at(degree); }

    // Lowest degree with a nonzero coefficient, or nullopt for the zero series.
    std::optional<int> valuation() const;

    // Drops coefficients above `truncation`.
    PoincareSeries truncated(int truncation) const;

    // Coefficients for min_degree..truncation.
    const std::vector<Coeff>& coefficients() const { return coeffs_; }

    // "deg:coeff" pairs separated by spaces, zero coefficients included.
    std::string to_string() const;

    friend bool operator==(const PoincareSeries& a, const PoincareSeries& b);

private:
    int min_degree_ = 0;
    int truncation_ = 0;
    std::vector<Coeff> coeffs_;
};

PoincareSeries operator+(const PoincareSeries& a, const PoincareSeries& b);
PoincareSeries operator*(const PoincareSeries& a, const PoincareSeries& b);
PoincareSeries shift(const PoincareSeries& a, int k);

inline PoincareSeries series_add(const PoincareSeries& a, const PoincareSeries& b) { return a + b; }
inline PoincareSeries series_mul(const PoincareSeries& a, const PoincareSeries& b) { return a * b; }
inline PoincareSeries series_shift(const PoincareSeries& a, int k) { return shift(a, k); }

struct SeriesMismatch {
    int degree;
    Coeff lhs;
    Coeff rhs;
};

// {"min_degree", "max_degree", "coefficients": [...], "pairs": "deg:coeff ..."}.
// Coefficients beyond 64 bits are emitted as decimal strings.
nlohmann::json to_json(const PoincareSeries& s);

// First degree (ascending, up to the common truncation) where a and b differ.
std::optional<SeriesMismatch> first_mismatch(const PoincareSeries& a, const PoincareSeries& b);

// prod_{i=1}^{m} 1/(1 - t^i): H^*(BO(m); F2).
PoincareSeries series_BO(int m, int truncation);
// prod_{i=2}^{m} 1/(1 - t^i): H^*(BSO(m); F2).
PoincareSeries series_BSO(int m, int truncation);
// Gaussian binomial [d+n choose d]_t, the Schubert-cell count of G(d, n).
PoincareSeries series_grassmannian(int d, int n, int truncation);

// Polynomial ring over F2 on homogeneous generators, enumerated degreewise.
class MonomialBasis {
public:
    struct Generator {
        std::string label;
        int degree;
    };
    using Exponents = std::vector<int>;

    MonomialBasis(std::vector<Generator> generators, int truncation);

    const std::vector<Generator>& generators() const { return generators_; }
    int truncation() const { return truncation_; }
    std::size_t dim(int degree) const;
    const std::vector<Exponents>& basis(int degree) const;
    // Position of `e` in basis(degree of e), or nullopt if out of range.
    std::optional<std::size_t> index_of(const Exponents& e) const;
    int degree_of(const Exponents& e) const;
    std::string label_of(const Exponents& e) const;

    PoincareSeries series() const;

private:
    std::vector<Generator> generators_;
    int truncation_;
    std::vector<std::vector<Exponents>> by_degree_;
    std::vector<std::map<Exponents, std::size_t>> index_;
};

// Dense bit-packed matrix over F2.
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols);

    static F2Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v);
    void flip(std::size_t r, std::size_t c) { data_[r * words_ + c / 64] ^= std::uint64_t{1} << (c % 64); }

    F2Matrix transpose() const;
    F2Matrix operator*(const F2Matrix& rhs) const;
    bool is_zero() const;

    // Copies `block` into this matrix with its top-left corner at (r0, c0).
    void place(const F2Matrix& block, std::size_t r0, std::size_t c0);

    friend bool operator==(const F2Matrix& a, const F2Matrix& b);

    // Row access for elimination kernels.
    std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
    const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }
    std::size_t words_per_row() const { return words_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

std::size_t rank_f2(const F2Matrix& m);
inline std::size_t kernel_dim(const F2Matrix& m) { return m.cols() - rank_f2(m); }
inline std::size_t cokernel_dim(const F2Matrix& m) { return m.rows() - rank_f2(m); }

// A matrix P of full row rank rows(m) - rank(m) with P * m = 0: the quotient
// map from the target of m onto coker(m).
F2Matrix cokernel_projection(const F2Matrix& m);

// Linear map of graded F2 vector spaces, one matrix per degree 0..N
// (rows index the target basis, columns the source basis).
class GradedMap {
public:
    GradedMap() = default;
    explicit GradedMap(std::vector<F2Matrix> per_degree);

    int truncation() const { return static_cast<int>(per_degree_.size()) - 1; }
    const F2Matrix& at(int degree) const { return per_degree_.at(static_cast<std::size_t>(degree)); }
    const std::vector<F2Matrix>& matrices() const { return per_degree_; }

    GradedMap transpose() const;

    struct DegreeRanks {
        std::size_t rank;
        std::size_t kernel;
        std::size_t cokernel;
    };
    std::vector<DegreeRanks> ranks() const;

private:
    std::vector<F2Matrix> per_degree_;
};

}  // namespace gmfkit::f2
