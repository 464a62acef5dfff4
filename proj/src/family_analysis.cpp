#include "gmfkit/family_analysis.hpp"

#include "gmfkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gmfkit::family {

using jet::Jet3;

// ---------------------------------------------------------------------------
// PolyFamily
// ---------------------------------------------------------------------------

PolyFamily::PolyFamily(int param_dim, int fiber_dim, std::vector<Term> terms)
    : param_dim_(param_dim), fiber_dim_(fiber_dim), terms_(std::move(terms)) {
    if (param_dim_ < 0) throw DimensionError("PolyFamily: negative parameter dimension");
    if (fiber_dim_ < 1) throw DimensionError("PolyFamily: fiber dimension must be positive");
    if (terms_.empty()) throw std::invalid_argument("PolyFamily: at least one term required");
    const auto nvars = static_cast<std::size_t>(param_dim_ + fiber_dim_);
    for (const auto& term : terms_) {
        if (term.powers.size() != nvars) throw DimensionError("PolyFamily: term powers must have k + d entries");
        for (int p : term.powers)
            if (p < 0) throw std::invalid_argument("PolyFamily: negative exponent");
        if (!std::isfinite(term.coeff)) throw std::invalid_argument("PolyFamily: non-finite coefficient");
    }
}

void PolyFamily::check_point(const Vector& t, const Vector& x) const {
    if (t.size() != param_dim_ || x.size() != fiber_dim_) throw DimensionError("PolyFamily: point has wrong dimension");
}

double PolyFamily::derivative(const std::vector<int>& orders, const Vector& t, const Vector& x) const {
    check_point(t, x);
    const std::size_t nvars = static_cast<std::size_t>(param_dim_ + fiber_dim_);
    if (orders.size() != nvars) throw DimensionError("PolyFamily::derivative: wrong order vector length");
    auto coord = [&](std::size_t v) { return v < static_cast<std::size_t>(param_dim_) ? t(static_cast<Eigen::Index>(v)) : x(static_cast<Eigen::Index>(v) - param_dim_); };
    double sum = 0.0;
    for (const auto& term : terms_) {
        double c = term.coeff;
        for (std::size_t v = 0; v < nvars && c != 0.0; ++v) {
            const int p = term.powers[v];
            const int o = orders[v];
            if (o > p) {
                c = 0.0;
                break;
            }
            for (int k = 0; k < o; ++k) c *= p - k;
            const double z = coord(v);
            for (int k = 0; k < p - o; ++k) c *= z;
        }
        sum += c;
    }
    return sum;
}

double PolyFamily::value(const Vector& t, const Vector& x) const {
    return derivative(std::vector<int>(static_cast<std::size_t>(param_dim_ + fiber_dim_), 0), t, x);
}

namespace {

// z^(p - o) * p! / (p - o)!, zero when o > p.
double falling_power(double z, int p, int o) {
    if (o > p) return 0.0;
    double c = 1.0;
    for (int k = 0; k < o; ++k) c *= p - k;
    for (int k = 0; k < p - o; ++k) c *= z;
    return c;
}

}  // namespace

Vector PolyFamily::gradient(const Vector& t, const Vector& x) const {
    check_point(t, x);
    const int k = param_dim_;
    const int d = fiber_dim_;
    Vector g = Vector::Zero(d);
    std::vector<double> plain(static_cast<std::size_t>(d)), once(static_cast<std::size_t>(d));
    for (const auto& term : terms_) {
        double base = term.coeff;
        for (int a = 0; a < k; ++a) base *= falling_power(t(a), term.powers[static_cast<std::size_t>(a)], 0);
        if (base == 0.0) continue;
        for (int i = 0; i < d; ++i) {
            const int p = term.powers[static_cast<std::size_t>(k + i)];
            plain[static_cast<std::size_t>(i)] = falling_power(x(i), p, 0);
            once[static_cast<std::size_t>(i)] = falling_power(x(i), p, 1);
        }
        for (int i = 0; i < d; ++i) {
            double v = base * once[static_cast<std::size_t>(i)];
            for (int j = 0; j < d && v != 0.0; ++j)
                if (j != i) v *= plain[static_cast<std::size_t>(j)];
            g(i) += v;
        }
    }
    return g;
}

Matrix PolyFamily::hessian(const Vector& t, const Vector& x) const {
    check_point(t, x);
    const int k = param_dim_;
    const int d = fiber_dim_;
    Matrix h = Matrix::Zero(d, d);
    std::vector<double> plain(static_cast<std::size_t>(d)), once(static_cast<std::size_t>(d)),
        twice(static_cast<std::size_t>(d));
    for (const auto& term : terms_) {
        double base = term.coeff;
        for (int a = 0; a < k; ++a) base *= falling_power(t(a), term.powers[static_cast<std::size_t>(a)], 0);
        if (base == 0.0) continue;
        for (int i = 0; i < d; ++i) {
            const int p = term.powers[static_cast<std::size_t>(k + i)];
            plain[static_cast<std::size_t>(i)] = falling_power(x(i), p, 0);
            once[static_cast<std::size_t>(i)] = falling_power(x(i), p, 1);
            twice[static_cast<std::size_t>(i)] = falling_power(x(i), p, 2);
        }
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double v = base;
                for (int m = 0; m < d && v != 0.0; ++m) {
                    const auto mm = static_cast<std::size_t>(m);
                    if (i == j && m == i) v *= twice[mm];
                    else if (m == i || m == j) v *= once[mm];
                    else v *= plain[mm];
                }
                h(i, j) += v;
                if (i != j) h(j, i) += v;
            }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Presets and JSON
// ---------------------------------------------------------------------------

PolyFamily preset(const std::string& name) {
    if (name == "cusp") return PolyFamily(1, 1, {{{0, 3}, 1.0}, {{1, 1}, -1.0}});
    if (name == "swallowtail") return PolyFamily(1, 1, {{{0, 4}, 1.0}, {{1, 1}, -1.0}});
    const std::string prefix = "suspended-cusp-";
    if (name.rfind(prefix, 0) == 0) {
        int i = -1;
        try {
            std::size_t used = 0;
            i = std::stoi(name.substr(prefix.size()), &used);
            if (used != name.size() - prefix.size()) i = -1;
        } catch (const std::exception&) {
            i = -1;
        }
        if (i < 0) throw SchemaError("unknown preset: " + name);
        const int d = i + 2;
        const auto nvars = static_cast<std::size_t>(d + 1);
        std::vector<Term> terms;
        auto term = [&](std::initializer_list<std::pair<std::size_t, int>> factors, double c) {
            std::vector<int> powers(nvars, 0);
            for (const auto& [var, p] : factors) powers[var] = p;
            terms.push_back({std::move(powers), c});
        };
        term({{1, 3}}, 1.0);
        term({{0, 1}, {1, 1}}, -1.0);
        for (int j = 0; j < i; ++j) term({{static_cast<std::size_t>(2 + j), 2}}, -1.0);
        term({{static_cast<std::size_t>(2 + i), 2}}, 1.0);
        return PolyFamily(1, d, std::move(terms));
    }
    throw SchemaError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"cusp", "swallowtail", "suspended-cusp-<i>"};
}

PolyFamily family_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw SchemaError("family: expected a JSON object");
        const int k = j.at("param_dim").get<int>();
        const int d = j.at("fiber_dim").get<int>();
        std::vector<Term> terms;
        for (const auto& t : j.at("terms")) terms.push_back({t.at("powers").get<std::vector<int>>(), t.at("coeff").get<double>()});
        return PolyFamily(k, d, std::move(terms));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("family: ") + e.what());
    }
}

nlohmann::json to_json(const PolyFamily& f) {
    nlohmann::json j;
    j["param_dim"] = f.param_dim();
    j["fiber_dim"] = f.fiber_dim();
    j["terms"] = nlohmann::json::array();
    for (const auto& t : f.terms()) j["terms"].push_back({{"powers", t.powers}, {"coeff", t.coeff}});
    return j;
}

Jet3 fiber_jet3(const PolyFamily& f, const Vector& t, const Vector& x) {
    const int k = f.param_dim();
    const int d = f.fiber_dim();
    if (t.size() != k || x.size() != d) throw DimensionError("fiber_jet3: point has wrong dimension");
    std::vector<int> o(static_cast<std::size_t>(k + d), 0);
    auto slot = [&](int i) -> int& { return o[static_cast<std::size_t>(k + i)]; };
    Jet3 jet(d);
    jet.set_constant(f.derivative(o, t, x));
    for (int i = 0; i < d; ++i) {
        ++slot(i);
        jet.set_linear(i, f.derivative(o, t, x));
        for (int j = i; j < d; ++j) {
            ++slot(j);
            jet.set_quadratic(i, j, 0.5 * f.derivative(o, t, x));
            for (int l = j; l < d; ++l) {
                ++slot(l);
                jet.set_cubic(i, j, l, f.derivative(o, t, x) / 6.0);
                --slot(l);
            }
            --slot(j);
        }
        --slot(i);
    }
    return jet;
}

// ---------------------------------------------------------------------------
// Critical points
// ---------------------------------------------------------------------------

bool Box::contains(const Vector& x) const {
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    return (x.array() >= lo - slack).all() && (x.array() <= hi + slack).all();
}

namespace {

Vector solve_step(const Matrix& a, const Vector& rhs) {
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.isInvertible()) return lu.solve(rhs);
    return a.completeOrthogonalDecomposition().solve(rhs);
}

// Signed Hessian eigenvalue of smallest magnitude, and its eigenvector.
std::pair<double, Vector> nearest_zero_eigen(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
    return {es.eigenvalues()(best), es.eigenvectors().col(best)};
}

Vector param(double t) {
    return Vector::Constant(1, t);
}

}  // namespace

std::optional<Vector> newton_critical_point(const PolyFamily& f, const Vector& t, const Vector& x0,
                                            const NewtonOptions& opts) {
    Vector x = x0;
    for (int it = 0; it < opts.max_iter; ++it) {
        const Vector g = f.gradient(t, x);
        if (!g.allFinite()) return std::nullopt;
        const Vector step = solve_step(f.hessian(t, x), -g);
        if (!step.allFinite()) return std::nullopt;
        if (g.norm() <= opts.newton_tol && step.norm() <= 1e-12 * (1.0 + x.norm())) return x;
        x += step;
        if (!x.allFinite() || x.norm() > 1e8) return std::nullopt;
    }
    return std::nullopt;
}

CriticalPointSearch fiber_critical_points(const PolyFamily& f, const Vector& t, const Box& box, int grid_per_axis,
                                          const NewtonOptions& newton, double classify_tol) {
    if (!(box.hi > box.lo)) throw std::invalid_argument("fiber_critical_points: degenerate box");
    if (grid_per_axis < 2) throw std::invalid_argument("fiber_critical_points: grid_per_axis must be at least 2");
    const int d = f.fiber_dim();
    const double radius = 10.0 * newton.newton_tol;
    CriticalPointSearch out;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Vector seed(d);
    for (;;) {
        for (int a = 0; a < d; ++a)
            seed(a) = box.lo + (box.hi - box.lo) * idx[static_cast<std::size_t>(a)] / (grid_per_axis - 1);
        if (auto x = newton_critical_point(f, t, seed, newton)) {
            if (box.contains(*x)) {
                const bool seen = std::any_of(out.points.begin(), out.points.end(),
                                              [&](const CriticalPoint& p) { return (p.x - *x).norm() <= radius; });
                if (!seen) {
                    CriticalPoint p;
                    p.t = t.size() ? t(0) : 0.0;
                    p.x = *x;
                    p.value = f.value(t, *x);
                    p.grad_norm = f.gradient(t, *x).norm();
                    p.gmf_class = jet::classify(fiber_jet3(f, t, *x), classify_tol);
                    out.points.push_back(std::move(p));
                }
            }
        } else {
            ++out.dropped_seeds;
        }
        int a = 0;
        while (a < d && ++idx[static_cast<std::size_t>(a)] == grid_per_axis) idx[static_cast<std::size_t>(a++)] = 0;
        if (a == d) break;
    }
    std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
    });
    return out;
}

// ---------------------------------------------------------------------------
// Birth-death tracing
// ---------------------------------------------------------------------------

namespace {

struct Sample {
    double t;
    std::vector<CriticalPoint> points;
    std::vector<double> lambda;  // Hessian eigenvalue nearest zero, per point
};

struct Candidate {
    double t_lo;
    double t_hi;
    double t;
    Vector x;
};

struct Polished {
    double t;
    Vector x;
};

class Tracer {
public:
    Tracer(const PolyFamily& f, double t0, double t1, const TraceOptions& opts)
        : f_(f), t0_(t0), t1_(t1), opts_(opts), radius_(10.0 * opts.newton.newton_tol) {}

    Sample sample(double t, int& dropped) const {
        auto search = fiber_critical_points(f_, param(t), opts_.box, opts_.grid_per_axis, opts_.newton,
                                            opts_.classify_tol);
        dropped += search.dropped_seeds;
        Sample s{t, std::move(search.points), {}};
        for (const auto& p : s.points) s.lambda.push_back(nearest_zero_eigen(f_.hessian(param(t), p.x)).first);
        return s;
    }

    // Continues each point of `from` to `to.t` and returns the index it lands
    // on in `to`, or -1.
    std::vector<int> continue_points(const Sample& from, const Sample& to, TraceResult& result) const {
        std::vector<int> out;
        for (const auto& p : from.points) {
            int hit = -1;
            if (auto q = newton_critical_point(f_, param(to.t), p.x, opts_.newton)) {
                std::vector<int> near;
                for (std::size_t k = 0; k < to.points.size(); ++k)
                    if ((to.points[k].x - *q).norm() <= radius_) near.push_back(static_cast<int>(k));
                if (near.size() > 1) {
                    TraceWarning w{to.t, "track matching ambiguity: several points within the dedup radius", {}};
                    for (int k : near) w.candidates.push_back(to.points[static_cast<std::size_t>(k)].x);
                    result.warnings.push_back(std::move(w));
                }
                if (!near.empty()) hit = near.front();
            }
            out.push_back(hit);
        }
        return out;
    }

    // Does a pair of critical points near (s1, s2) exist at t? Updates the seeds.
    bool pair_exists(double t, Vector& s1, Vector& s2) const {
        const double sep = (s1 - s2).norm();
        auto q1 = newton_critical_point(f_, param(t), s1, opts_.newton);
        auto q2 = newton_critical_point(f_, param(t), s2, opts_.newton);
        if (!q1 || !q2) return false;
        if ((*q1 - *q2).norm() <= radius_) return false;
        if ((*q1 - s1).norm() > 2.0 * sep || (*q2 - s2).norm() > 2.0 * sep) return false;
        s1 = *q1;
        s2 = *q2;
        return true;
    }

    double t_resolution() const { return 1e-10 * (t1_ - t0_); }

    // Bisection between a t where the pair is absent and one where it exists.
    Candidate refine_pair(double t_absent, double t_exists, Vector s1, Vector s2) const {
        const double lo = std::min(t_absent, t_exists);
        const double hi = std::max(t_absent, t_exists);
        while (std::abs(t_exists - t_absent) > t_resolution()) {
            const double mid = 0.5 * (t_absent + t_exists);
            if (pair_exists(mid, s1, s2))
                t_exists = mid;
            else
                t_absent = mid;
        }
        return {lo, hi, t_exists, 0.5 * (s1 + s2)};
    }

    // Bisection on the sign of the eigenvalue nearest zero along a track.
    Candidate refine_sign_change(double ta, Vector xa, double lambda_a, double tb, Vector xb) const {
        const double lo = std::min(ta, tb);
        const double hi = std::max(ta, tb);
        while (std::abs(tb - ta) > t_resolution()) {
            const double mid = 0.5 * (ta + tb);
            auto q = newton_critical_point(f_, param(mid), xa, opts_.newton);
            if (!q) break;
            const double lm = nearest_zero_eigen(f_.hessian(param(mid), *q)).first;
            if ((lm < 0.0) == (lambda_a < 0.0)) {
                ta = mid;
                xa = *q;
            } else {
                tb = mid;
                xb = *q;
            }
        }
        return {lo, hi, 0.5 * (ta + tb), 0.5 * (xa + xb)};
    }

    // Golden-section minimization of |eigenvalue nearest zero| along a track.
    Candidate refine_minimum(double lo, double hi, Vector x) const {
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        auto eval = [&](double t, Vector& seed) {
            auto q = newton_critical_point(f_, param(t), seed, opts_.newton);
            if (!q) return std::numeric_limits<double>::infinity();
            seed = *q;
            return std::abs(nearest_zero_eigen(f_.hessian(param(t), *q)).first);
        };
        double a = lo, b = hi;
        double c = b - invphi * (b - a), dd = a + invphi * (b - a);
        Vector xc = x, xd = x;
        double fc = eval(c, xc), fd = eval(dd, xd);
        while (b - a > t_resolution()) {
            if (fc < fd) {
                b = dd;
                dd = c;
                fd = fc;
                xd = xc;
                c = b - invphi * (b - a);
                fc = eval(c, xc);
            } else {
                a = c;
                c = dd;
                fc = fd;
                xc = xd;
                dd = a + invphi * (b - a);
                fd = eval(dd, xd);
            }
        }
        return {lo, hi, fc < fd ? c : dd, fc < fd ? xc : xd};
    }

    // Newton on the extended system grad_x f = 0, H v = 0, c.v = 1 in (t, x, v).
    std::optional<Polished> polish(const Candidate& cand) const {
        const int d = f_.fiber_dim();
        const int n = 2 * d + 1;
        Vector t = param(cand.t);
        Vector x = cand.x;
        const Vector c = nearest_zero_eigen(f_.hessian(t, x)).second;
        Vector v = c;
        std::vector<int> o(static_cast<std::size_t>(d + 1), 0);
        auto partial = [&](std::initializer_list<int> vars) {
            std::fill(o.begin(), o.end(), 0);
            for (int var : vars) ++o[static_cast<std::size_t>(var)];
            return f_.derivative(o, t, x);
        };
        auto residual = [&]() {
            Vector r(n);
            r.head(d) = f_.gradient(t, x);
            r.segment(d, d) = f_.hessian(t, x) * v;
            r(2 * d) = c.dot(v) - 1.0;
            return r;
        };
        for (int it = 0; it < 500; ++it) {
            const Matrix h = f_.hessian(t, x);
            Matrix jac = Matrix::Zero(n, n);
            for (int i = 0; i < d; ++i) {
                jac(i, 0) = partial({0, 1 + i});
                for (int m = 0; m < d; ++m) {
                    jac(i, 1 + m) = h(i, m);
                    double dt = 0.0, dx = 0.0;
                    for (int j = 0; j < d; ++j) {
                        dx += partial({1 + i, 1 + j, 1 + m}) * v(j);
                        if (m == 0) dt += partial({0, 1 + i, 1 + j}) * v(j);
                    }
                    jac(d + i, 1 + m) = dx;
                    if (m == 0) jac(d + i, 0) = dt;
                    jac(d + i, 1 + d + m) = h(i, m);
                }
            }
            for (int m = 0; m < d; ++m) jac(2 * d, 1 + d + m) = c(m);
            const Vector step = jac.completeOrthogonalDecomposition().solve(-residual());
            if (!step.allFinite()) return std::nullopt;
            t(0) += step(0);
            x += step.segment(1, d);
            v += step.segment(1 + d, d);
            if (!x.allFinite() || x.norm() > 1e8) return std::nullopt;
            const double size = 1.0 + std::abs(t(0)) + x.norm() + v.norm();
            if (step.norm() <= 1e-15 * size) break;
        }
        if (residual().norm() > 1e-9) return std::nullopt;
        return Polished{t(0), x};
    }

private:
    const PolyFamily& f_;
    double t0_;
    double t1_;
    const TraceOptions& opts_;
    double radius_;
};

bool same_place(double ta, const Vector& xa, double tb, const Vector& xb, double range) {
    return std::abs(ta - tb) <= 1e-8 * std::max(1.0, range) && (xa - xb).norm() <= 1e-5;
}

}  // namespace

TraceResult trace_birth_death(const PolyFamily& f, double t0, double t1, int steps, const TraceOptions& opts) {
    if (f.param_dim() != 1) throw DimensionError("trace_birth_death: one-parameter family required");
    if (!(t0 < t1)) throw std::invalid_argument("trace_birth_death: need t0 < t1");
    if (steps < 2) throw std::invalid_argument("trace_birth_death: need at least two steps");

    Tracer tracer(f, t0, t1, opts);
    TraceResult result;
    std::vector<Sample> samples;
    for (int k = 0; k <= steps; ++k) {
        const double t = k == steps ? t1 : t0 + (t1 - t0) * k / steps;
        result.t_grid.push_back(t);
        samples.push_back(tracer.sample(t, result.dropped_seeds));
    }
    const double h = (t1 - t0) / steps;

    std::vector<Candidate> candidates;
    // next_of[k][p] = index at k+1 of the mutually matched continuation of point p at k.
    std::vector<std::vector<int>> next_of(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const Sample& a = samples[static_cast<std::size_t>(k)];
        const Sample& b = samples[static_cast<std::size_t>(k + 1)];
        const auto fwd = tracer.continue_points(a, b, result);
        const auto bwd = tracer.continue_points(b, a, result);
        std::vector<int>& link = next_of[static_cast<std::size_t>(k)];
        link.assign(a.points.size(), -1);
        std::vector<bool> a_matched(a.points.size(), false), b_matched(b.points.size(), false);
        for (std::size_t p = 0; p < a.points.size(); ++p) {
            const int q = fwd[p];
            if (q >= 0 && bwd[static_cast<std::size_t>(q)] == static_cast<int>(p)) {
                link[p] = q;
                a_matched[p] = true;
                b_matched[static_cast<std::size_t>(q)] = true;
            }
        }

        // Unmatched points on one side: pairs born or annihilated in (t_k, t_k+1).
        auto collect = [&](const Sample& exists, const std::vector<bool>& matched, double t_absent) {
            std::vector<std::size_t> loose;
            for (std::size_t p = 0; p < matched.size(); ++p)
                if (!matched[p]) loose.push_back(p);
            while (loose.size() >= 2) {
                std::size_t bi = 0, bj = 1;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < loose.size(); ++i)
                    for (std::size_t j = i + 1; j < loose.size(); ++j) {
                        const double dist = (exists.points[loose[i]].x - exists.points[loose[j]].x).norm();
                        if (dist < best) {
                            best = dist;
                            bi = i;
                            bj = j;
                        }
                    }
                candidates.push_back(tracer.refine_pair(t_absent, exists.t, exists.points[loose[bi]].x,
                                                        exists.points[loose[bj]].x));
                loose.erase(loose.begin() + static_cast<std::ptrdiff_t>(bj));
                loose.erase(loose.begin() + static_cast<std::ptrdiff_t>(bi));
            }
            for (std::size_t p : loose)
                candidates.push_back({std::min(t_absent, exists.t), std::max(t_absent, exists.t), exists.t,
                                      exists.points[p].x});
        };
        collect(b, b_matched, a.t);
        collect(a, a_matched, b.t);

        for (std::size_t p = 0; p < a.points.size(); ++p) {
            const int q = link[p];
            if (q < 0) continue;
            const double la = a.lambda[p];
            const double lb = b.lambda[static_cast<std::size_t>(q)];
            if (la != 0.0 && lb != 0.0 && (la < 0.0) != (lb < 0.0))
                candidates.push_back(tracer.refine_sign_change(a.t, a.points[p].x, la, b.t,
                                                               b.points[static_cast<std::size_t>(q)].x));
        }
    }

    // Interior local minima of |eigenvalue nearest zero| along three-sample tracks.
    for (int k = 1; k < steps; ++k) {
        const Sample& prev = samples[static_cast<std::size_t>(k - 1)];
        const Sample& cur = samples[static_cast<std::size_t>(k)];
        const Sample& next = samples[static_cast<std::size_t>(k + 1)];
        for (std::size_t q = 0; q < cur.points.size(); ++q) {
            const int r = next_of[static_cast<std::size_t>(k)][q];
            if (r < 0) continue;
            const auto& back = next_of[static_cast<std::size_t>(k - 1)];
            auto it = std::find(back.begin(), back.end(), static_cast<int>(q));
            if (it == back.end()) continue;
            const double lp = std::abs(prev.lambda[static_cast<std::size_t>(it - back.begin())]);
            const double lc = std::abs(cur.lambda[q]);
            const double ln = std::abs(next.lambda[static_cast<std::size_t>(r)]);
            if (lc <= lp && lc <= ln && (lc < lp || lc < ln))
                candidates.push_back(tracer.refine_minimum(prev.t, next.t, cur.points[q].x));
        }
    }

    const double range = t1 - t0;
    auto add_flag = [&](double t, const Vector& x, jet::DegenerateReason reason) {
        for (const auto& fl : result.degenerate)
            if (same_place(fl.t, fl.x, t, x, range)) return;
        result.degenerate.push_back({t, x, reason});
    };

    for (const auto& cand : candidates) {
        auto p = tracer.polish(cand);
        if (!p || !opts.box.contains(p->x) || p->t < cand.t_lo - h || p->t > cand.t_hi + h) continue;
        if (p->t < t0 - h || p->t > t1 + h) continue;
        const Jet3 jet = fiber_jet3(f, param(p->t), p->x);
        const jet::GmfClass cls = jet::classify(jet, opts.event_tol);
        if (const auto* bd = std::get_if<jet::BirthDeath>(&cls)) {
            const bool dup = std::any_of(result.events.begin(), result.events.end(), [&](const BirthDeathEvent& e) {
                return same_place(e.t_star, e.x_star, p->t, p->x, range);
            });
            if (!dup) result.events.push_back({p->t, p->x, bd->index, f.hessian(param(p->t), p->x).determinant()});
        } else if (const auto* dg = std::get_if<jet::Degenerate>(&cls)) {
            add_flag(p->t, p->x, dg->reason);
        }
    }

    for (const auto& s : samples)
        for (const auto& pt : s.points)
            if (const auto* dg = std::get_if<jet::Degenerate>(&pt.gmf_class)) add_flag(s.t, pt.x, dg->reason);

    std::sort(result.events.begin(), result.events.end(),
              [](const BirthDeathEvent& a, const BirthDeathEvent& b) { return a.t_star < b.t_star; });
    std::sort(result.degenerate.begin(), result.degenerate.end(),
              [](const DegenerateFlag& a, const DegenerateFlag& b) { return a.t < b.t; });
    for (auto& s : samples) result.samples.push_back(std::move(s.points));
    return result;
}

// ---------------------------------------------------------------------------
// Family axioms
// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        case Verdict::NotChecked: return "NotChecked";
    }
    return "NotChecked";
}

namespace {

// Smallest |f_t| over a grid on the faces of the box.
double boundary_min_abs(const PolyFamily& f, const Vector& t, const Box& box) {
    const int d = f.fiber_dim();
    const int g = d <= 2 ? 41 : (d == 3 ? 11 : 5);
    double best = std::numeric_limits<double>::infinity();
    Vector x(d);
    for (int axis = 0; axis < d; ++axis)
        for (double side : {box.lo, box.hi}) {
            std::vector<int> idx(static_cast<std::size_t>(d), 0);
            for (;;) {
                for (int a = 0; a < d; ++a)
                    x(a) = a == axis ? side : box.lo + (box.hi - box.lo) * idx[static_cast<std::size_t>(a)] / (g - 1);
                best = std::min(best, std::abs(f.value(t, x)));
                int a = 0;
                for (; a < d; ++a) {
                    if (a == axis) continue;
                    if (++idx[static_cast<std::size_t>(a)] < g) break;
                    idx[static_cast<std::size_t>(a)] = 0;
                }
                if (a >= d) break;
            }
        }
    return best;
}

}  // namespace

AxiomReport check_family_axioms(const PolyFamily& f, double t0, double t1, int steps, const TraceOptions& opts) {
    if (f.param_dim() > 1) throw DimensionError("check_family_axioms: at most one parameter supported");
    AxiomReport report;
    std::vector<std::pair<Vector, std::vector<CriticalPoint>>> fibers;
    if (f.param_dim() == 1) {
        TraceResult trace = trace_birth_death(f, t0, t1, steps, opts);
        for (std::size_t k = 0; k < trace.t_grid.size(); ++k) fibers.emplace_back(param(trace.t_grid[k]), trace.samples[k]);
        report.degenerate = std::move(trace.degenerate);
        report.events = std::move(trace.events);
    } else {
        const Vector t(0);
        auto search = fiber_critical_points(f, t, opts.box, opts.grid_per_axis, opts.newton, opts.classify_tol);
        for (const auto& p : search.points)
            if (const auto* dg = std::get_if<jet::Degenerate>(&p.gmf_class)) report.degenerate.push_back({0.0, p.x, dg->reason});
        fibers.emplace_back(t, std::move(search.points));
    }

    AxiomVerdict proper{"(i) proper", Verdict::Pass, "boundary |f_t| exceeds every interior |critical value| on all sampled fibers"};
    for (const auto& [t, points] : fibers) {
        double crit = 0.0;
        for (const auto& p : points) crit = std::max(crit, std::abs(p.value));
        const double boundary = boundary_min_abs(f, t, opts.box);
        if (!points.empty() && !(boundary > crit)) {
            proper.verdict = Verdict::Fail;
            std::ostringstream os;
            os << "boundary |f| " << boundary << " does not dominate critical |value| " << crit;
            if (t.size()) os << " at t=" << t(0);
            proper.note = os.str();
            break;
        }
    }
    report.axioms.push_back(std::move(proper));
    report.axioms.push_back({"(ii) embedding", Verdict::NotChecked,
                             "graph embedding x -> (f(x), x) through the identity chart; not independently verified"});
    report.axioms.push_back({"(iii) submersion", Verdict::Pass, "coordinate projection onto the parameter space"});
    AxiomVerdict gmf{"(iv) generalized Morse fibers", Verdict::Pass, "no degenerate critical point found"};
    if (!report.degenerate.empty()) {
        gmf.verdict = Verdict::Fail;
        std::ostringstream os;
        const auto& fl = report.degenerate.front();
        os << "Degenerate(" << jet::reason_name(fl.reason) << ") at t=" << fl.t;
        gmf.note = os.str();
    }
    report.axioms.push_back(std::move(gmf));
    return report;
}

std::string events_csv(const std::vector<BirthDeathEvent>& events, int fiber_dim) {
    std::ostringstream os;
    os << "t_star";
    for (int i = 1; i <= fiber_dim; ++i) os << ",x_star_" << i;
    os << ",index,det_hessian\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
        return std::string(buf);
    };
    for (const auto& e : events) {
        os << num(e.t_star);
        for (int i = 0; i < e.x_star.size(); ++i) os << ',' << num(e.x_star(i));
        os << ',' << e.index << ',' << num(e.det_hessian) << '\n';
    }
    return os.str();
}

}  // namespace gmfkit::family
