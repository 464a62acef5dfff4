#pragma once

// Polynomial families f : R^k x R^d -> R, (t, x) -> f_t(x), over a parameter
// space R^k with the coordinate projection as submersion. Critical points of
// the fibers are found by Newton's method, classified through their 3-jets,
// and followed in t to locate birth-death singularities.

#include "gmfkit/jet_core.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gmfkit::family {

using jet::Matrix;
using jet::Vector;

struct Term {
    // Exponents of (t_1..t_k, x_1..x_d).
    std::vector<int> powers;
    double coeff;
};

class PolyFamily {
public:
    PolyFamily(int param_dim, int fiber_dim, std::vector<Term> terms);

    int param_dim() const { return param_dim_; }
    int fiber_dim() const { return fiber_dim_; }
    const std::vector<Term>& terms() const { return terms_; }

    // Mixed partial derivative of order `orders` (length k + d) at (t, x).
    double derivative(const std::vector<int>& orders, const Vector& t, const Vector& x) const;

    double value(const Vector& t, const Vector& x) const;
    Vector gradient(const Vector& t, const Vector& x) const;
    Matrix hessian(const Vector& t, const Vector& x) const;

private:
    void check_point(const Vector& t, const Vector& x) const;

    int param_dim_;
    int fiber_dim_;
    std::vector<Term> terms_;
};

// "cusp": x^3 - t x.  "swallowtail": x^4 - t x.
// "suspended-cusp-<i>": x^3 - t x - y_1^2 - ... - y_i^2 + y_{i+1}^2 on R^{i+2}.
PolyFamily preset(const std::string& name);
std::vector<std::string> preset_names();

// {"param_dim", "fiber_dim", "terms": [{"powers": [...], "coeff"}]}
PolyFamily family_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolyFamily& f);

// Exact Taylor 3-jet of f_t at x.
jet::Jet3 fiber_jet3(const PolyFamily& f, const Vector& t, const Vector& x);

// The same closed interval on every fiber axis.
struct Box {
    double lo = -2.0;
    double hi = 2.0;
    bool contains(const Vector& x) const;
};

struct NewtonOptions {
    double newton_tol = 1e-10;
    int max_iter = 200;
};

// Newton iteration on grad f_t = 0. Returns the accepted point, with
// ||grad|| <= newton_tol and a vanishing Newton step, or nullopt.
std::optional<Vector> newton_critical_point(const PolyFamily& f, const Vector& t, const Vector& x0,
                                            const NewtonOptions& opts);

struct CriticalPoint {
    double t = 0.0;
    Vector x;
    double value = 0.0;
    jet::GmfClass gmf_class = jet::Regular{};
    double grad_norm = 0.0;
};

struct CriticalPointSearch {
    std::vector<CriticalPoint> points;
    // Seeds whose Newton run did not converge inside the box.
    int dropped_seeds = 0;
};

// Newton from every point of a grid_per_axis^d grid in the box; converged
// points are deduplicated at radius 10 * newton_tol and classified.
CriticalPointSearch fiber_critical_points(const PolyFamily& f, const Vector& t, const Box& box, int grid_per_axis,
                                          const NewtonOptions& newton, double classify_tol = jet::kDefaultTol);

struct TraceOptions {
    Box box;
    int grid_per_axis = 9;
    NewtonOptions newton;
    double classify_tol = jet::kDefaultTol;
    // Classification tolerance at a located event.
    double event_tol = 1e-6;
};

struct BirthDeathEvent {
    double t_star = 0.0;
    Vector x_star;
    int index = 0;
    double det_hessian = 0.0;
};

// A point where the fiber function fails to be generalized Morse.
struct DegenerateFlag {
    double t = 0.0;
    Vector x;
    jet::DegenerateReason reason = jet::DegenerateReason::KernelCubicVanishes;
};

struct TraceWarning {
    double t = 0.0;
    std::string message;
    std::vector<Vector> candidates;
};

struct TraceResult {
    std::vector<double> t_grid;
    std::vector<std::vector<CriticalPoint>> samples;
    std::vector<BirthDeathEvent> events;
    std::vector<DegenerateFlag> degenerate;
    std::vector<TraceWarning> warnings;
    int dropped_seeds = 0;
};

// Follows critical points over t0 + (t1 - t0) * k / steps, k = 0..steps, and
// locates birth-death events (pairs appearing or vanishing, sign changes of
// the Hessian eigenvalue nearest zero) and degenerate points.
TraceResult trace_birth_death(const PolyFamily& f, double t0, double t1, int steps, const TraceOptions& opts);

enum class Verdict { Pass, Fail, NotChecked };
std::string to_string(Verdict v);

struct AxiomVerdict {
    std::string axiom;
    Verdict verdict = Verdict::NotChecked;
    std::string note;
};

struct AxiomReport {
    std::vector<AxiomVerdict> axioms;  // (i) proper, (ii) embedding, (iii) submersion, (iv) gmf fibers
    std::vector<DegenerateFlag> degenerate;
    std::vector<BirthDeathEvent> events;
};

// For k = 1 the window t0..t1 is sampled with `steps` intervals; for k = 0
// the single fiber is checked and the window is ignored.
AxiomReport check_family_axioms(const PolyFamily& f, double t0, double t1, int steps, const TraceOptions& opts);

// t_star, x_star_1..x_star_d, index, det_hessian with 17 significant digits.
std::string events_csv(const std::vector<BirthDeathEvent>& events, int fiber_dim);

}  // namespace gmfkit::family
