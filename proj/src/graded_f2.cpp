#include "gmfkit/graded_f2.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmfkit::f2 {

// ---------------------------------------------------------------------------
// PoincareSeries
// ---------------------------------------------------------------------------

PoincareSeries::PoincareSeries(int min_degree, int truncation, std::vector<Coeff> coeffs)
    : min_degree_(min_degree), truncation_(truncation), coeffs_(std::move(coeffs)) {
    if (truncation_ < min_degree_ - 1)
        throw std::invalid_argument("PoincareSeries: truncation below min_degree");
    coeffs_.resize(static_cast<std::size_t>(truncation_ - min_degree_ + 1));
    for (const auto& c : coeffs_)
        if (c < 0) throw std::invalid_argument("PoincareSeries: negative coefficient");
}

PoincareSeries PoincareSeries::zero(int truncation) {
    return PoincareSeries(0, truncation, {});
}

PoincareSeries PoincareSeries::one(int truncation) {
    return monomial(0, truncation);
}

PoincareSeries PoincareSeries::monomial(int k, int truncation) {
    PoincareSeries s(k, std::max(truncation, k - 1), {});
    if (k <= truncation) s.coeffs_[0] = 1;
    return s;
}

const Coeff& PoincareSeries::at(int degree) const {
    static const Coeff kZero = 0;
    if (degree > truncation_)
        throw std::out_of_range("PoincareSeries: degree " + std::to_string(degree) +
                                " above truncation " + std::to_string(truncation_));
    if (degree < min_degree_) return kZero;
    return coeffs_[static_cast<std::size_t>(degree - min_degree_)];
}

Coeff& PoincareSeries::mutable_at(int degree) {
    if (degree > truncation_ || degree < min_degree_)
        throw std::out_of_range("PoincareSeries: degree outside stored range");
    return coeffs_[static_cast<std::size_t>(degree - min_degree_)];
}

std::optional<int> PoincareSeries::valuation() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return min_degree_ + static_cast<int>(i);
    return std::nullopt;
}

PoincareSeries PoincareSeries::truncated(int truncation) const {
    const int top = std::min(truncation, truncation_);
    std::vector<Coeff> c;
    for (int n = min_degree_; n <= top; ++n) c.push_back(at(n));
    return PoincareSeries(min_degree_, std::max(top, min_degree_ - 1), std::move(c));
}

std::string PoincareSeries::to_string() const {
    std::ostringstream os;
    for (int n = min_degree_; n <= truncation_; ++n) {
        if (n != min_degree_) os << ' ';
        os << n << ':' << at(n);
    }
    return os.str();
}

bool operator==(const PoincareSeries& a, const PoincareSeries& b) {
    if (a.truncation_ != b.truncation_) return false;
    const int lo = std::min(a.min_degree_, b.min_degree_);
    for (int n = lo; n <= a.truncation_; ++n)
        if (a.at(n) != b.at(n)) return false;
    return true;
}

PoincareSeries operator+(const PoincareSeries& a, const PoincareSeries& b) {
    const int lo = std::min(a.min_degree(), b.min_degree());
    const int top = std::min(a.truncation(), b.truncation());
    std::vector<Coeff> c;
    for (int n = lo; n <= top; ++n) c.push_back(a.at(n) + b.at(n));
    return PoincareSeries(lo, std::max(top, lo - 1), std::move(c));
}

PoincareSeries operator*(const PoincareSeries& a, const PoincareSeries& b) {
    const int lo = a.min_degree() + b.min_degree();
    // c_n needs a_i for i <= n - min(b) and b_j for j <= n - min(a).
    const int top = std::min(a.truncation() + b.min_degree(), b.truncation() + a.min_degree());
    std::vector<Coeff> c(static_cast<std::size_t>(std::max(0, top - lo + 1)));
    for (int i = a.min_degree(); i <= a.truncation(); ++i) {
        const Coeff& ai = a.at(i);
        if (ai == 0) continue;
        for (int j = b.min_degree(); j <= b.truncation() && i + j <= top; ++j) {
            const Coeff& bj = b.at(j);
            if (bj != 0) c[static_cast<std::size_t>(i + j - lo)] += ai * bj;
        }
    }
    return PoincareSeries(lo, std::max(top, lo - 1), std::move(c));
}

PoincareSeries shift(const PoincareSeries& a, int k) {
    return PoincareSeries(a.min_degree() + k, a.truncation() + k, a.coefficients());
}

nlohmann::json to_json(const PoincareSeries& s) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : s.coefficients()) {
        if (c <= std::numeric_limits<std::uint64_t>::max())
            coeffs.push_back(static_cast<std::uint64_t>(c));
        else
            coeffs.push_back(c.str());
    }
    return {{"min_degree", s.min_degree()}, {"max_degree", s.truncation()}, {"coefficients", coeffs},
            {"pairs", s.to_string()}};
}

std::optional<SeriesMismatch> first_mismatch(const PoincareSeries& a, const PoincareSeries& b) {
    const int lo = std::min(a.min_degree(), b.min_degree());
    const int top = std::min(a.truncation(), b.truncation());
    for (int n = lo; n <= top; ++n)
        if (a.at(n) != b.at(n)) return SeriesMismatch{n, a.at(n), b.at(n)};
    return std::nullopt;
}

namespace {

// prod over parts of 1/(1 - t^part), truncated.
PoincareSeries partition_series(int first_part, int last_part, int truncation) {
    if (truncation < 0) return PoincareSeries(0, -1, {});
    std::vector<Coeff> c(static_cast<std::size_t>(truncation + 1));
    c[0] = 1;
    for (int part = first_part; part <= last_part; ++part)
        for (int n = part; n <= truncation; ++n)
            c[static_cast<std::size_t>(n)] += c[static_cast<std::size_t>(n - part)];
    return PoincareSeries(0, truncation, std::move(c));
}

}  // namespace

PoincareSeries series_BO(int m, int truncation) {
    if (m < 0) throw std::invalid_argument("series_BO: negative rank");
    return partition_series(1, m, truncation);
}

PoincareSeries series_BSO(int m, int truncation) {
    if (m < 1) throw std::invalid_argument("series_BSO: rank must be at least 1");
    return partition_series(2, m, truncation);
}

PoincareSeries series_grassmannian(int d, int n, int truncation) {
    if (d < 0 || n < 0) throw std::invalid_argument("series_grassmannian: negative dimension");
    if (truncation < 0) return PoincareSeries(0, -1, {});
    using Poly = std::vector<Coeff>;
    const auto len = static_cast<std::size_t>(truncation + 1);
    const int total = d + n;
    // row[k] = [m choose k]_t; Pascal: [m k] = [m-1 k-1] + t^k [m-1 k].
    std::vector<Poly> row(static_cast<std::size_t>(d + 1), Poly(len));
    row[0][0] = 1;
    for (int m = 1; m <= total; ++m) {
        for (int k = std::min(m, d); k >= 1; --k) {
            Poly next(len);
            const Poly& lower = row[static_cast<std::size_t>(k - 1)];
            const Poly& same = row[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < len; ++i) {
                next[i] = lower[i];
                if (i >= static_cast<std::size_t>(k)) next[i] += same[i - static_cast<std::size_t>(k)];
            }
            row[static_cast<std::size_t>(k)] = std::move(next);
        }
    }
    return PoincareSeries(0, truncation, row[static_cast<std::size_t>(d)]);
}

// ---------------------------------------------------------------------------
// MonomialBasis
// ---------------------------------------------------------------------------

MonomialBasis::MonomialBasis(std::vector<Generator> generators, int truncation)
    : generators_(std::move(generators)), truncation_(truncation) {
    for (const auto& g : generators_)
        if (g.degree <= 0) throw std::invalid_argument("MonomialBasis: generator degree must be positive");
    by_degree_.resize(static_cast<std::size_t>(std::max(truncation_ + 1, 0)));
    index_.resize(by_degree_.size());
    const std::size_t ngen = generators_.size();
    Exponents e(ngen, 0);
    // Depth-first enumeration over generators in order; yields each degree's
    // monomials in lexicographic order of the exponent vector.
    auto recurse = [&](auto&& self, std::size_t g, int degree) -> void {
        if (g == ngen) {
            auto& bucket = by_degree_[static_cast<std::size_t>(degree)];
            index_[static_cast<std::size_t>(degree)].emplace(e, bucket.size());
            bucket.push_back(e);
            return;
        }
        const int step = generators_[g].degree;
        for (int k = 0; degree + k * step <= truncation_; ++k) {
            e[g] = k;
            self(self, g + 1, degree + k * step);
        }
        e[g] = 0;
    };
    if (truncation_ >= 0) recurse(recurse, 0, 0);
}

std::size_t MonomialBasis::dim(int degree) const {
    if (degree < 0 || degree > truncation_) return 0;
    return by_degree_[static_cast<std::size_t>(degree)].size();
}

const std::vector<MonomialBasis::Exponents>& MonomialBasis::basis(int degree) const {
    return by_degree_.at(static_cast<std::size_t>(degree));
}

int MonomialBasis::degree_of(const Exponents& e) const {
    int deg = 0;
    for (std::size_t g = 0; g < generators_.size(); ++g) deg += e[g] * generators_[g].degree;
    return deg;
}

std::optional<std::size_t> MonomialBasis::index_of(const Exponents& e) const {
    if (e.size() != generators_.size()) return std::nullopt;
    const int deg = degree_of(e);
    if (deg < 0 || deg > truncation_) return std::nullopt;
    const auto& idx = index_[static_cast<std::size_t>(deg)];
    auto it = idx.find(e);
    if (it == idx.end()) return std::nullopt;
    return it->second;
}

std::string MonomialBasis::label_of(const Exponents& e) const {
    std::ostringstream os;
    bool any = false;
    for (std::size_t g = 0; g < generators_.size(); ++g) {
        if (e[g] == 0) continue;
        if (any) os << '*';
        os << generators_[g].label;
        if (e[g] > 1) os << '^' << e[g];
        any = true;
    }
    if (!any) os << '1';
    return os.str();
}

PoincareSeries MonomialBasis::series() const {
    std::vector<Coeff> c;
    for (const auto& bucket : by_degree_) c.emplace_back(bucket.size());
    return PoincareSeries(0, truncation_, std::move(c));
}

// ---------------------------------------------------------------------------
// F2Matrix
// ---------------------------------------------------------------------------

F2Matrix::F2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

F2Matrix F2Matrix::identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

void F2Matrix::set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    auto& w = data_[r * words_ + c / 64];
    w = v ? (w | bit) : (w & ~bit);
}

F2Matrix F2Matrix::transpose() const {
    F2Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r, true);
    return t;
}

F2Matrix F2Matrix::operator*(const F2Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("F2Matrix: product dimension mismatch");
    F2Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t* dst = out.row(r);
        for (std::size_t k = 0; k < cols_; ++k) {
            if (!get(r, k)) continue;
            const std::uint64_t* src = rhs.row(k);
            for (std::size_t w = 0; w < out.words_; ++w) dst[w] ^= src[w];
        }
    }
    return out;
}

bool F2Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
}

void F2Matrix::place(const F2Matrix& block, std::size_t r0, std::size_t c0) {
    if (r0 + block.rows_ > rows_ || c0 + block.cols_ > cols_)
        throw std::out_of_range("F2Matrix::place: block does not fit");
    for (std::size_t r = 0; r < block.rows_; ++r)
        for (std::size_t c = 0; c < block.cols_; ++c)
            if (block.get(r, c)) set(r0 + r, c0 + c, true);
}

bool operator==(const F2Matrix& a, const F2Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

namespace {

// Forward elimination on the first `pivot_cols` columns; returns the rank.
std::size_t eliminate(F2Matrix& m, std::size_t pivot_cols) {
    const std::size_t words = m.words_per_row();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < pivot_cols && rank < m.rows(); ++c) {
        std::size_t pivot = rank;
        while (pivot < m.rows() && !m.get(pivot, c)) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != rank) std::swap_ranges(m.row(pivot), m.row(pivot) + words, m.row(rank));
        const std::uint64_t* prow = m.row(rank);
        const std::size_t w0 = c / 64;
        for (std::size_t r = rank + 1; r < m.rows(); ++r) {
            if (!m.get(r, c)) continue;
            std::uint64_t* dst = m.row(r);
            for (std::size_t w = w0; w < words; ++w) dst[w] ^= prow[w];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

std::size_t rank_f2(const F2Matrix& m) {
    F2Matrix work = m;
    return eliminate(work, work.cols());
}

F2Matrix cokernel_projection(const F2Matrix& m) {
    // Row-reduce [m | I]; the identity half of every row whose m-half vanished
    // is a left annihilator of m, and those rows are independent.
    F2Matrix aug(m.rows(), m.cols() + m.rows());
    aug.place(m, 0, 0);
    for (std::size_t r = 0; r < m.rows(); ++r) aug.set(r, m.cols() + r, true);
    const std::size_t rank = eliminate(aug, m.cols());
    F2Matrix p(m.rows() - rank, m.rows());
    for (std::size_t r = rank; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.rows(); ++c)
            if (aug.get(r, m.cols() + c)) p.set(r - rank, c, true);
    return p;
}

// ---------------------------------------------------------------------------
// GradedMap
// ---------------------------------------------------------------------------

GradedMap::GradedMap(std::vector<F2Matrix> per_degree) : per_degree_(std::move(per_degree)) {}

GradedMap GradedMap::transpose() const {
    std::vector<F2Matrix> t;
    t.reserve(per_degree_.size());
    for (const auto& m : per_degree_) t.push_back(m.transpose());
    return GradedMap(std::move(t));
}

std::vector<GradedMap::DegreeRanks> GradedMap::ranks() const {
    std::vector<DegreeRanks> out;
    for (const auto& m : per_degree_) {
        const std::size_t r = rank_f2(m);
        out.push_back({r, m.cols() - r, m.rows() - r});
    }
    return out;
}

}  // namespace gmfkit::f2
