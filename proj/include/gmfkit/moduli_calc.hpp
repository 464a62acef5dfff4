#pragma once

// Mod-2 homology series of the singular sets and Thom spectra attached to
// moduli of generalized Morse functions:
//
//   Y(i)  = BO(i) x BO(d-i),            0 <= i <= d
//   Y1(i) = BO(i) x BO(1) x BO(d-i-1),  0 <= i <= d-1
//   Sigma^gmf(d) = hocolim( Y(0) <- Y1(0) -> Y(1) <- ... -> Y(d) )
//   Sigma^mf(d)  = disjoint union of the Y(i)
//
// Homotopy colimits are computed with the Mayer-Vietoris sequence of the
// iterated double mapping cylinder, using explicit F2 matrices.

#include "gmfkit/char_class_maps.hpp"
#include "gmfkit/graded_f2.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gmfkit::moduli {

using charclass::Structure;
using f2::PoincareSeries;

struct ZigzagDiagram {
    int d = 0;
    int truncation = 0;
    // Y(0..d) and Y1(0..d-1) as graded dimensions.
    std::vector<PoincareSeries> bottom;
    std::vector<PoincareSeries> top;
    // Homology maps H(Y1(i)) -> H(Y(i)) and H(Y1(i)) -> H(Y(i+1)).
    std::vector<f2::GradedMap> left;
    std::vector<f2::GradedMap> right;

    // Throws std::invalid_argument when a matrix disagrees with the spaces.
    void validate() const;
};

// The diagram of Y(i), Y1(i) with the maps induced by block inclusions.
ZigzagDiagram gmf_zigzag(int d, int truncation);
// Every space a point, every map the identity.
ZigzagDiagram point_zigzag(int d, int truncation);

struct HocolimResult {
    PoincareSeries series;
    // Phi_n : (+)_i H_n(Y1(i)) -> (+)_j H_n(Y(j)), the sum of both legs.
    std::vector<std::size_t> phi_rank;
    std::vector<std::size_t> phi_rows;
    std::vector<std::size_t> phi_cols;
    // iota_n : (+)_j H_n(Y(j)) -> H_n(hocolim) in the basis coker(Phi_n) (+) ker(Phi_{n-1}).
    std::vector<f2::F2Matrix> inclusion;
    // Every leg of the diagram is onto in homology through the truncation.
    bool legs_surjective = false;
};

HocolimResult hocolim_series(const ZigzagDiagram& z);

// Reduced series of hocolim / (disjoint union of the Y(j)), all of which is
// collapsed to one point, from the long exact sequence of the pair.
PoincareSeries cofiber_series(const HocolimResult& h);
PoincareSeries cofiber_series(int d, int truncation);

// sum_{i=0}^{d} P(BO(i)) P(BO(d-i)).
PoincareSeries sigma_mf_series(int d, int truncation);
// sum_{i=0}^{d-1} t P(BO(i)) P(BO(1)) P(BO(d-i-1)).
PoincareSeries wedge_target_series(int d, int truncation);

enum class Provenance { Exact, SplitAssumption, Interval };
std::string to_string(Provenance p);

struct SpectrumSeries {
    PoincareSeries series;
    Provenance provenance = Provenance::Exact;
    std::vector<std::string> derivation;
    // Degreewise bounds, present when the value rests on an assumption.
    std::optional<PoincareSeries> lower;
    std::optional<PoincareSeries> upper;
};

// H^*(BO(m)) or H^*(BSO(m)); BSO(0) is a point.
PoincareSeries classifying_series(Structure s, int m, int truncation);

// Thom isomorphism: shift of the base series by -d, valid through degree `truncation`.
SpectrumSeries mt_series(int d, int truncation, Structure s);

// Sigma^{-1} MT(d-1) -> MT^gmf(d) -> Sigma^inf(Sigma^gmf(d)_+): split value
// (connecting map zero) plus the bounds every connecting map allows.
SpectrumSeries mtgmf_series(int d, int truncation);
SpectrumSeries mtgmf_series(int d, int truncation, const HocolimResult& h);

enum class Verdict { Pass, Fail, Interval };
std::string to_string(Verdict v);

struct Assumption {
    std::string name;
    std::string statement;
    bool verified = false;
};

struct CheckRecord {
    std::string check;
    int d = 0;
    int truncation = 0;
    std::optional<Structure> structure;
    Verdict verdict = Verdict::Fail;
    std::optional<int> first_mismatch_degree;
    std::vector<Assumption> assumptions;
    double tolerance = 0.0;
    nlohmann::json details = nlohmann::json::object();
    double wall_time_ms = 0.0;
};

nlohmann::json to_json(const CheckRecord& r);

// P_B(d) = t^d P_B(d) + P_B(d-1) through degree N.
CheckRecord gysin_check(int d, int truncation, Structure s);
// cofiber_series(d) against wedge_target_series(d).
CheckRecord hocolim_cofiber_check(int d, int truncation);
CheckRecord hocolim_cofiber_check(int d, int truncation, const HocolimResult& h);
// Degree-0 and negative-degree shadows.
CheckRecord connectivity_check(int d, int truncation);
CheckRecord connectivity_check(int d, int truncation, const HocolimResult& h);
// d = 1 values against the hand-derived ones.
CheckRecord d1_oracle_check(int truncation);
// Rank bookkeeping of the pair sequence for Sigma^mf -> Sigma^gmf.
CheckRecord sigma_mf_cofibration_check(int d, int truncation);
CheckRecord sigma_mf_cofibration_check(int d, int truncation, const HocolimResult& h);
// Split value of MT^gmf(d) inside its bounds; verdict Interval.
CheckRecord mtgmf_bounds_check(int d, int truncation);
CheckRecord mtgmf_bounds_check(int d, int truncation, const HocolimResult& h);

// Homology surjectivity of every leg: rank == target dimension in each degree.
bool zigzag_legs_surjective(const ZigzagDiagram& z);

}  // namespace gmfkit::moduli
