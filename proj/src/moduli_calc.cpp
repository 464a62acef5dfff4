#include "gmfkit/moduli_calc.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace gmfkit::moduli {

using f2::Coeff;
using f2::F2Matrix;
using f2::GradedMap;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::size_t dim_at(const PoincareSeries& s, int n) {
    return static_cast<std::size_t>(s.at(n));
}

PoincareSeries from_dims(const std::vector<std::size_t>& dims, int min_degree = 0) {
    std::vector<Coeff> c(dims.begin(), dims.end());
    return PoincareSeries(min_degree, min_degree + static_cast<int>(dims.size()) - 1, std::move(c));
}

void require_d(int d) {
    if (d < 1) throw std::invalid_argument("fiber dimension d must be at least 1");
}

void require_truncation(int n) {
    if (n < 0) throw std::invalid_argument("truncation must be nonnegative");
}

Verdict verdict_from(bool ok, const std::vector<Assumption>& assumptions) {
    if (!ok) return Verdict::Fail;
    for (const auto& a : assumptions)
        if (!a.verified) return Verdict::Interval;
    return Verdict::Pass;
}

nlohmann::json mismatch_json(const std::optional<f2::SeriesMismatch>& m) {
    if (!m) return nullptr;
    return {{"degree", m->degree}, {"lhs", m->lhs.str()}, {"rhs", m->rhs.str()}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Diagrams
// ---------------------------------------------------------------------------

void ZigzagDiagram::validate() const {
    const auto nd = static_cast<std::size_t>(d);
    if (bottom.size() != nd + 1 || top.size() != nd || left.size() != nd || right.size() != nd)
        throw std::invalid_argument("ZigzagDiagram: wrong number of spaces or maps");
    for (std::size_t i = 0; i < nd; ++i) {
        for (int n = 0; n <= truncation; ++n) {
            const F2Matrix& l = left[i].at(n);
            const F2Matrix& r = right[i].at(n);
            if (l.rows() != dim_at(bottom[i], n) || l.cols() != dim_at(top[i], n) ||
                r.rows() != dim_at(bottom[i + 1], n) || r.cols() != dim_at(top[i], n))
                throw std::invalid_argument("ZigzagDiagram: map " + std::to_string(i) + " has wrong shape in degree " +
                                            std::to_string(n));
        }
    }
}

ZigzagDiagram gmf_zigzag(int d, int truncation) {
    require_d(d);
    require_truncation(truncation);
    ZigzagDiagram z;
    z.d = d;
    z.truncation = truncation;
    for (int i = 0; i <= d; ++i) z.bottom.push_back(charclass::build_Y(i, d, truncation).series());
    for (int i = 0; i < d; ++i) {
        z.top.push_back(charclass::build_Y1(i, d, truncation).series());
        z.left.push_back(charclass::homology_map(charclass::map_f(i, d, truncation), truncation));
        z.right.push_back(charclass::homology_map(charclass::map_g(i, d, truncation), truncation));
    }
    z.validate();
    return z;
}

ZigzagDiagram point_zigzag(int d, int truncation) {
    require_d(d);
    require_truncation(truncation);
    ZigzagDiagram z;
    z.d = d;
    z.truncation = truncation;
    std::vector<F2Matrix> mats;
    mats.push_back(F2Matrix::identity(1));
    for (int n = 1; n <= truncation; ++n) mats.emplace_back(0, 0);
    const GradedMap id(mats);
    for (int i = 0; i <= d; ++i) z.bottom.push_back(PoincareSeries::one(truncation));
    for (int i = 0; i < d; ++i) {
        z.top.push_back(PoincareSeries::one(truncation));
        z.left.push_back(id);
        z.right.push_back(id);
    }
    z.validate();
    return z;
}

bool zigzag_legs_surjective(const ZigzagDiagram& z) {
    for (std::size_t i = 0; i < z.left.size(); ++i)
        for (int n = 0; n <= z.truncation; ++n) {
            if (f2::cokernel_dim(z.left[i].at(n)) != 0) return false;
            if (f2::cokernel_dim(z.right[i].at(n)) != 0) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Homotopy colimit
// ---------------------------------------------------------------------------

HocolimResult hocolim_series(const ZigzagDiagram& z) {
    z.validate();
    const int N = z.truncation;
    const auto nd = static_cast<std::size_t>(z.d);
    HocolimResult h;
    std::vector<std::size_t> dims;
    std::size_t prev_kernel = 0;
    for (int n = 0; n <= N; ++n) {
        std::vector<std::size_t> row_off(nd + 2, 0), col_off(nd + 1, 0);
        for (std::size_t j = 0; j <= nd; ++j) row_off[j + 1] = row_off[j] + dim_at(z.bottom[j], n);
        for (std::size_t i = 0; i < nd; ++i) col_off[i + 1] = col_off[i] + dim_at(z.top[i], n);
        const std::size_t rows = row_off[nd + 1];
        const std::size_t cols = col_off[nd];

        F2Matrix phi(rows, cols);
        for (std::size_t i = 0; i < nd; ++i) {
            phi.place(z.left[i].at(n), row_off[i], col_off[i]);
            phi.place(z.right[i].at(n), row_off[i + 1], col_off[i]);
        }
        const std::size_t rank = f2::rank_f2(phi);
        const std::size_t coker = rows - rank;
        const std::size_t total = coker + prev_kernel;

        // Mayer-Vietoris: 0 -> coker Phi_n -> H_n -> ker Phi_{n-1} -> 0, and the
        // map from the bottom row factors through the quotient onto coker Phi_n.
        F2Matrix inclusion(total, rows);
        if (coker > 0) inclusion.place(f2::cokernel_projection(phi), 0, 0);

        h.phi_rank.push_back(rank);
        h.phi_rows.push_back(rows);
        h.phi_cols.push_back(cols);
        h.inclusion.push_back(std::move(inclusion));
        dims.push_back(total);
        prev_kernel = cols - rank;
    }
    h.series = from_dims(dims);
    h.legs_surjective = zigzag_legs_surjective(z);
    return h;
}

PoincareSeries cofiber_series(const HocolimResult& h) {
    // Pair sequence H_n(A) -> H_n(X) -> H_n(X, A) -> H_{n-1}(A) -> H_{n-1}(X):
    // dim H_n(X, A) = coker iota_n + ker iota_{n-1}. With A nonempty this is
    // also the reduced homology of X / A.
    std::vector<std::size_t> dims;
    std::size_t prev_kernel = 0;
    for (const auto& iota : h.inclusion) {
        const std::size_t rank = f2::rank_f2(iota);
        dims.push_back(iota.rows() - rank + prev_kernel);
        prev_kernel = iota.cols() - rank;
    }
    return from_dims(dims);
}

PoincareSeries cofiber_series(int d, int truncation) {
    return cofiber_series(hocolim_series(gmf_zigzag(d, truncation)));
}

PoincareSeries sigma_mf_series(int d, int truncation) {
    require_d(d);
    PoincareSeries sum = PoincareSeries::zero(truncation);
    for (int i = 0; i <= d; ++i) sum = sum + f2::series_BO(i, truncation) * f2::series_BO(d - i, truncation);
    return sum.truncated(truncation);
}

PoincareSeries wedge_target_series(int d, int truncation) {
    require_d(d);
    PoincareSeries sum = PoincareSeries::zero(truncation);
    for (int i = 0; i < d; ++i) {
        const auto prod =
            f2::series_BO(i, truncation) * f2::series_BO(1, truncation) * f2::series_BO(d - i - 1, truncation);
        sum = sum + shift(prod, 1);
    }
    return sum.truncated(truncation);
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Exact: return "exact";
        case Provenance::SplitAssumption: return "split-assumption";
        case Provenance::Interval: return "interval";
    }
    return "unknown";
}

PoincareSeries classifying_series(Structure s, int m, int truncation) {
    if (m < 0) throw std::invalid_argument("classifying_series: negative rank");
    if (s == Structure::O) return f2::series_BO(m, truncation);
    if (m == 0) return PoincareSeries::one(truncation);
    return f2::series_BSO(m, truncation);
}

SpectrumSeries mt_series(int d, int truncation, Structure s) {
    if (d < 0) throw std::invalid_argument("mt_series: negative dimension");
    SpectrumSeries out;
    out.series = shift(classifying_series(s, d, truncation + d), -d);
    out.provenance = Provenance::Exact;
    out.derivation = {"Thom isomorphism H_{n+d}(B" + charclass::to_string(s) + "(d)) = H_n(MT" +
                      charclass::to_string(s) + "(d)) with d = " + std::to_string(d)};
    return out;
}

SpectrumSeries mtgmf_series(int d, int truncation) {
    return mtgmf_series(d, truncation, hocolim_series(gmf_zigzag(d, truncation + 1)));
}

SpectrumSeries mtgmf_series(int d, int truncation, const HocolimResult& h) {
    require_d(d);
    const int N = truncation;
    const PoincareSeries a = shift(f2::series_BO(d - 1, N + d), -d);  // Sigma^{-1} MT(d-1), valid to N
    const PoincareSeries& b = h.series;                              // Sigma^gmf(d)_+
    if (b.truncation() < N) throw std::invalid_argument("mtgmf_series: hocolim truncated below requested degree");

    // Exactness of ... -> B_{n+1} -> A_n -> M_n -> B_n -> A_{n-1} -> ... gives
    // m_n = a_n + b_n - rk(B_{n+1} -> A_n) - rk(B_n -> A_{n-1}).
    const int lo = a.min_degree();
    std::vector<Coeff> split, lower, upper;
    for (int n = lo; n <= N; ++n) {
        const Coeff an = a.at(n);
        const Coeff bn = b.at(n);
        const Coeff an1 = a.at(n - 1);
        // Unknown b_{N+1} is bounded only by a_N itself.
        const Coeff bnext = (n + 1 <= b.truncation()) ? b.at(n + 1) : an;
        Coeff lost = std::min(an, bnext) + std::min(bn, an1);
        Coeff lb = an + bn - lost;
        if (lb < 0) lb = 0;
        split.push_back(an + bn);
        lower.push_back(lb);
        upper.push_back(an + bn);
    }
    SpectrumSeries out;
    out.series = PoincareSeries(lo, N, split);
    out.lower = PoincareSeries(lo, N, lower);
    out.upper = PoincareSeries(lo, N, upper);
    out.provenance = Provenance::SplitAssumption;
    out.derivation = {
        "cofibration Sigma^{-1}MT(d-1) -> MT^gmf(d) -> Sigma^inf Sigma^gmf(d)_+",
        "split value assumes the connecting map is zero in F2 homology",
        "lower bound: every connecting map of maximal rank allowed by the dimensions",
        "d = " + std::to_string(d)};
    return out;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Interval: return "interval";
    }
    return "unknown";
}

nlohmann::json to_json(const CheckRecord& r) {
    nlohmann::json assumptions = nlohmann::json::array();
    for (const auto& a : r.assumptions)
        assumptions.push_back({{"name", a.name}, {"statement", a.statement}, {"verified", a.verified}});
    nlohmann::json j = {{"check", r.check},
                        {"d", r.d},
                        {"N", r.truncation},
                        {"verdict", to_string(r.verdict)},
                        {"assumptions", assumptions},
                        {"tolerance", r.tolerance},
                        {"details", r.details},
                        {"wall_time_ms", r.wall_time_ms}};
    j["structure"] = r.structure ? nlohmann::json(charclass::to_string(*r.structure)) : nlohmann::json(nullptr);
    j["first_mismatch_degree"] = r.first_mismatch_degree ? nlohmann::json(*r.first_mismatch_degree) : nlohmann::json(nullptr);
    return j;
}

CheckRecord gysin_check(int d, int truncation, Structure s) {
    const auto start = Clock::now();
    require_d(d);
    require_truncation(truncation);
    CheckRecord rec;
    rec.check = "gysin";
    rec.d = d;
    rec.truncation = truncation;
    rec.structure = s;

    const PoincareSeries lhs = classifying_series(s, d, truncation);
    const PoincareSeries rhs = (shift(lhs, d) + classifying_series(s, d - 1, truncation)).truncated(truncation);
    const auto mismatch = f2::first_mismatch(lhs, rhs);

    // Multiplication by the top class w_d on H^*(B(d)), degree by degree.
    const charclass::ProductSWRing ring({{s, d, "w"}}, truncation);
    const int top = ring.generator(0, d);
    bool injective = top >= 0;
    nlohmann::json failed_degree = nullptr;
    if (injective) {
        for (int n = 0; n + d <= truncation && injective; ++n) {
            const auto& src = ring.basis().basis(n);
            F2Matrix mult(ring.basis().dim(n + d), src.size());
            for (std::size_t c = 0; c < src.size(); ++c) {
                auto e = src[c];
                e[static_cast<std::size_t>(top)] += 1;
                mult.set(*ring.basis().index_of(e), c, true);
            }
            if (f2::rank_f2(mult) != src.size()) {
                injective = false;
                failed_degree = n;
            }
        }
    }
    rec.assumptions.push_back({"G", "multiplication by the top class w_d is injective on H^*(B(d); F2)", injective});
    if (mismatch) rec.first_mismatch_degree = mismatch->degree;
    rec.verdict = verdict_from(!mismatch, rec.assumptions);
    rec.details = {{"lhs", f2::to_json(lhs)},
                   {"rhs", f2::to_json(rhs)},
                   {"mismatch", mismatch_json(mismatch)},
                   {"top_class_zero", top < 0},
                   {"injectivity_failure_degree", failed_degree}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord hocolim_cofiber_check(int d, int truncation) {
    const auto start = Clock::now();
    auto rec = hocolim_cofiber_check(d, truncation, hocolim_series(gmf_zigzag(d, truncation)));
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord hocolim_cofiber_check(int d, int truncation, const HocolimResult& h) {
    const auto start = Clock::now();
    CheckRecord rec;
    rec.check = "hocolim-cofiber";
    rec.d = d;
    rec.truncation = truncation;
    const PoincareSeries cof = cofiber_series(h).truncated(truncation);
    const PoincareSeries target = wedge_target_series(d, truncation);
    const auto mismatch = f2::first_mismatch(cof, target);

    rec.assumptions.push_back({"S", "each leg of the zigzag is surjective in F2 homology", h.legs_surjective});

    if (mismatch) rec.first_mismatch_degree = mismatch->degree;
    rec.verdict = verdict_from(!mismatch, rec.assumptions);
    rec.details = {{"cofiber", f2::to_json(cof)},
                   {"wedge_target", f2::to_json(target)},
                   {"mismatch", mismatch_json(mismatch)},
                   {"collapsed", "the whole disjoint union of the Y(i) to one point"}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord connectivity_check(int d, int truncation) {
    const auto start = Clock::now();
    auto rec = connectivity_check(d, truncation, hocolim_series(gmf_zigzag(d, truncation)));
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord connectivity_check(int d, int truncation, const HocolimResult& h) {
    const auto start = Clock::now();
    CheckRecord rec;
    rec.check = "connectivity";
    rec.d = d;
    rec.truncation = truncation;

    const PoincareSeries& x = h.series;
    const PoincareSeries bo = f2::series_BO(d, truncation);
    const bool a_ok = x.valuation() == 0 && bo.valuation() == 0;
    const bool b_ok = x.at(0) == 1 && bo.at(0) == 1;

    const SpectrumSeries mt = mt_series(d, truncation, Structure::O);
    const SpectrumSeries gmf = mtgmf_series(d, truncation, h);
    bool c_ok = true;
    nlohmann::json negative = nlohmann::json::array();
    for (int n = -d; n < 0; ++n) {
        const bool eq = mt.series.at(n) == gmf.series.at(n);
        c_ok = c_ok && eq;
        negative.push_back({{"degree", n}, {"mt", mt.series.at(n).str()}, {"mtgmf", gmf.series.at(n).str()}});
    }

    // The connecting map of the gmf cofibration is the Gysin connecting map
    // precomposed with Sigma^gmf(d) -> BO(d); the Gysin one vanishes exactly
    // when the Gysin series identity holds.
    const CheckRecord gysin = gysin_check(d, truncation, Structure::O);
    rec.assumptions.push_back({"D",
                               "the connecting map Sigma^inf Sigma^gmf(d)_+ -> MT(d-1) is zero in F2 homology "
                               "in degrees <= 0; it factors through the Gysin connecting map of BO(d)",
                               gysin.verdict == Verdict::Pass});

    const bool ok = a_ok && b_ok && c_ok;
    if (!ok) {
        if (!a_ok || !b_ok) rec.first_mismatch_degree = 0;
        else rec.first_mismatch_degree = -1;
    }
    rec.verdict = verdict_from(ok, rec.assumptions);
    rec.details = {{"a_connected_components", a_ok},
                   {"b_degree_zero_one", b_ok},
                   {"c_negative_degrees_agree", c_ok},
                   {"negative_degrees", negative},
                   {"hocolim_degree0", x.at(0).str()}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord d1_oracle_check(int truncation) {
    const auto start = Clock::now();
    require_truncation(truncation);
    CheckRecord rec;
    rec.check = "d1-oracle";
    rec.d = 1;
    rec.truncation = truncation;

    // d = 1: Y(0) = Y(1) = Y1(0) = BO(1) and both legs are the identity, so the
    // hocolim is BO(1) and the cofiber is the suspension of BO(1)_+ / pt.
    const HocolimResult h = hocolim_series(gmf_zigzag(1, truncation));
    const PoincareSeries cof = cofiber_series(h);
    std::vector<Coeff> ones(static_cast<std::size_t>(truncation + 1), 1);
    std::vector<Coeff> shifted(static_cast<std::size_t>(truncation + 1), 1);
    shifted[0] = 0;
    const PoincareSeries want_h(0, truncation, ones);
    const PoincareSeries want_c(0, truncation, shifted);
    const auto mh = f2::first_mismatch(h.series, want_h);
    const auto mc = f2::first_mismatch(cof, want_c);
    std::optional<int> first;
    if (mh) first = mh->degree;
    if (mc && (!first || mc->degree < *first)) first = mc->degree;
    rec.first_mismatch_degree = first;
    rec.verdict = verdict_from(!mh && !mc, rec.assumptions);
    rec.details = {{"hocolim", f2::to_json(h.series)},
                   {"cofiber", f2::to_json(cof)},
                   {"hocolim_mismatch", mismatch_json(mh)},
                   {"cofiber_mismatch", mismatch_json(mc)}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord sigma_mf_cofibration_check(int d, int truncation) {
    const auto start = Clock::now();
    auto rec = sigma_mf_cofibration_check(d, truncation, hocolim_series(gmf_zigzag(d, truncation)));
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord sigma_mf_cofibration_check(int d, int truncation, const HocolimResult& h) {
    const auto start = Clock::now();
    CheckRecord rec;
    rec.check = "sigma-mf-cofibration";
    rec.d = d;
    rec.truncation = truncation;

    const PoincareSeries a = sigma_mf_series(d, truncation);
    const PoincareSeries c = wedge_target_series(d, truncation);
    const PoincareSeries& x = h.series;
    const PoincareSeries cof = cofiber_series(h);

    // With k_n = dim ker iota_n, exactness of the pair sequence gives
    // a_n + c_n = x_n + k_n + k_{n-1}.
    bool ok = a.at(0) - x.at(0) == d;
    std::optional<int> first;
    if (!ok) first = 0;
    Coeff prev_kernel = 0;
    nlohmann::json rows = nlohmann::json::array();
    for (int n = 0; n <= truncation; ++n) {
        const F2Matrix& iota = h.inclusion[static_cast<std::size_t>(n)];
        const Coeff kn = Coeff(iota.cols() - f2::rank_f2(iota));
        const bool shape = Coeff(iota.cols()) == a.at(n);
        const bool balance = a.at(n) + c.at(n) == x.at(n) + kn + prev_kernel;
        const bool les = cof.at(n) == c.at(n);
        if (!(shape && balance && les)) {
            ok = false;
            if (!first) first = n;
        }
        rows.push_back({{"degree", n},
                        {"a", a.at(n).str()},
                        {"c", c.at(n).str()},
                        {"x", x.at(n).str()},
                        {"ker_iota", kn.str()}});
        prev_kernel = kn;
    }
    rec.first_mismatch_degree = first;
    rec.verdict = verdict_from(ok, rec.assumptions);
    rec.details = {{"degree0_gap", Coeff(a.at(0) - x.at(0)).str()}, {"rows", rows}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord mtgmf_bounds_check(int d, int truncation) {
    const auto start = Clock::now();
    auto rec = mtgmf_bounds_check(d, truncation, hocolim_series(gmf_zigzag(d, truncation + 1)));
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

CheckRecord mtgmf_bounds_check(int d, int truncation, const HocolimResult& h) {
    const auto start = Clock::now();
    CheckRecord rec;
    rec.check = "mtgmf-bounds";
    rec.d = d;
    rec.truncation = truncation;
    const SpectrumSeries s = mtgmf_series(d, truncation, h);
    bool ok = true;
    for (int n = s.series.min_degree(); n <= truncation; ++n) {
        if (!(s.lower->at(n) <= s.series.at(n) && s.series.at(n) <= s.upper->at(n))) {
            ok = false;
            if (!rec.first_mismatch_degree) rec.first_mismatch_degree = n;
        }
    }
    rec.assumptions.push_back(
        {"C", "the connecting map of Sigma^{-1}MT(d-1) -> MT^gmf(d) -> Sigma^inf Sigma^gmf(d)_+ is zero", false});
    rec.verdict = verdict_from(ok, rec.assumptions);
    rec.details = {{"split", f2::to_json(s.series)},
                   {"lower", f2::to_json(*s.lower)},
                   {"upper", f2::to_json(*s.upper)},
                   {"provenance", to_string(s.provenance)}};
    rec.wall_time_ms = elapsed_ms(start);
    return rec;
}

}  // namespace gmfkit::moduli
