#include "gmfkit/jet_core.hpp"

#include "gmfkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gmfkit::jet {

namespace {

CubicKey sorted_key(int i, int j, int k) {
    CubicKey key{i, j, k};
    std::sort(key.begin(), key.end());
    return key;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("Jet3: non-finite ") + what);
}

}  // namespace

Jet3::Jet3(int dim) : dim_(dim) {
    if (dim < 1) throw DimensionError("Jet3: dimension must be positive");
    linear_ = Vector::Zero(dim);
    quadratic_ = Matrix::Zero(dim, dim);
}

Jet3::Jet3(double constant, Vector linear, Matrix quadratic, std::map<CubicKey, double> cubic)
    : dim_(static_cast<int>(linear.size())), constant_(constant), linear_(std::move(linear)),
      quadratic_(std::move(quadratic)) {
    if (dim_ < 1) throw DimensionError("Jet3: dimension must be positive");
    if (quadratic_.rows() != dim_ || quadratic_.cols() != dim_)
        throw DimensionError("Jet3: quadratic part must be d x d");
    if (quadratic_ != quadratic_.transpose()) throw std::invalid_argument("Jet3: quadratic part is not symmetric");
    require_finite(constant_, "constant");
    if (!linear_.allFinite() || !quadratic_.allFinite()) throw std::invalid_argument("Jet3: non-finite coefficient");
    for (const auto& [key, v] : cubic) {
        for (int idx : key)
            if (idx < 0 || idx >= dim_) throw DimensionError("Jet3: cubic index out of range");
        set_cubic(key[0], key[1], key[2], v);
    }
}

double Jet3::cubic(int i, int j, int k) const {
    auto it = cubic_.find(sorted_key(i, j, k));
    return it == cubic_.end() ? 0.0 : it->second;
}

void Jet3::set_constant(double c) {
    require_finite(c, "constant");
    constant_ = c;
}

void Jet3::set_linear(int i, double v) {
    require_finite(v, "linear coefficient");
    linear_(i) = v;
}

void Jet3::set_quadratic(int i, int j, double v) {
    require_finite(v, "quadratic coefficient");
    quadratic_(i, j) = v;
    quadratic_(j, i) = v;
}

void Jet3::set_cubic(int i, int j, int k, double v) {
    require_finite(v, "cubic coefficient");
    for (int idx : {i, j, k})
        if (idx < 0 || idx >= dim_) throw DimensionError("Jet3: cubic index out of range");
    const CubicKey key = sorted_key(i, j, k);
    if (v == 0.0)
        cubic_.erase(key);
    else
        cubic_[key] = v;
}

double Jet3::scale() const {
    double m = std::max(1.0, std::abs(constant_));
    if (dim_ > 0) {
        m = std::max(m, linear_.cwiseAbs().maxCoeff());
        m = std::max(m, quadratic_.cwiseAbs().maxCoeff());
    }
    for (const auto& [key, v] : cubic_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> Jet3::cubic_tensor() const {
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<double> t(d * d * d, 0.0);
    for (const auto& [key, v] : cubic_) {
        std::array<int, 3> p = key;
        do {
            t[(static_cast<std::size_t>(p[0]) * d + static_cast<std::size_t>(p[1])) * d +
              static_cast<std::size_t>(p[2])] = v;
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return t;
}

bool operator==(const Jet3& a, const Jet3& b) {
    return a.dim_ == b.dim_ && a.constant_ == b.constant_ && a.linear_ == b.linear_ &&
           a.quadratic_ == b.quadratic_ && a.cubic_ == b.cubic_;
}

int multiplicity(const CubicKey& key) {
    if (key[0] == key[1] && key[1] == key[2]) return 1;
    if (key[0] == key[1] || key[1] == key[2] || key[0] == key[2]) return 3;
    return 6;
}

double evaluate_cubic(const Jet3& jet, const Vector& x) {
    if (x.size() != jet.dim()) throw DimensionError("evaluate: point has wrong dimension");
    double r = 0.0;
    for (const auto& [key, v] : jet.cubic()) r += multiplicity(key) * v * x(key[0]) * x(key[1]) * x(key[2]);
    return r;
}

double evaluate(const Jet3& jet, const Vector& x) {
    if (x.size() != jet.dim()) throw DimensionError("evaluate: point has wrong dimension");
    return jet.constant() + jet.linear().dot(x) + x.dot(jet.quadratic() * x) + evaluate_cubic(jet, x);
}

Jet3 compose_linear(const Jet3& jet, const Matrix& m) {
    const int d = jet.dim();
    if (m.rows() != d || m.cols() != d) throw DimensionError("compose_linear: matrix must be d x d");
    Matrix q = m.transpose() * jet.quadratic() * m;
    q = (0.5 * (q + q.transpose())).eval();

    const auto n = static_cast<std::size_t>(d);
    auto at = [n](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * n + k; };
    std::vector<double> t = jet.cubic_tensor();
    // Contract one tensor slot at a time with m.
    for (int mode = 0; mode < 3; ++mode) {
        std::vector<double> next(t.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    double acc = 0.0;
                    for (std::size_t s = 0; s < n; ++s) {
                        const double src = mode == 0   ? t[at(s, j, k)]
                                           : mode == 1 ? t[at(i, s, k)]
                                                       : t[at(i, j, s)];
                        const std::size_t free = mode == 0 ? i : mode == 1 ? j : k;
                        acc += src * m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(free));
                    }
                    next[at(i, j, k)] = acc;
                }
        t = std::move(next);
    }
    std::map<CubicKey, double> cubic;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            for (int k = j; k < d; ++k) {
                const double v = t[at(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                      static_cast<std::size_t>(k))];
                if (v != 0.0) cubic[{i, j, k}] = v;
            }
    return Jet3(jet.constant(), m.transpose() * jet.linear(), std::move(q), std::move(cubic));
}

SpectralSplit spectral_split(const Matrix& q, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("spectral_split: tolerance must be positive");
    if (q.rows() != q.cols()) throw DimensionError("spectral_split: matrix is not square");
    if (q != q.transpose()) throw std::invalid_argument("spectral_split: matrix is not symmetric");
    if (!q.allFinite()) throw std::invalid_argument("spectral_split: non-finite entry");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(q);
    if (solver.info() != Eigen::Success) throw NumericalError("spectral_split: eigensolver did not converge");

    SpectralSplit split;
    // Eigenvalues come back ascending, so the three blocks are already contiguous.
    split.eigenvalues = solver.eigenvalues();
    split.basis = solver.eigenvectors();
    const double norm = split.eigenvalues.size() ? split.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    split.threshold = tol * std::max(1.0, norm);
    for (Eigen::Index k = 0; k < split.eigenvalues.size(); ++k) {
        const double lambda = split.eigenvalues(k);
        if (std::abs(lambda) <= split.threshold)
            ++split.zero_dim;
        else if (lambda < 0.0)
            ++split.neg_dim;
        else
            ++split.pos_dim;
    }
    return split;
}

std::string class_name(const GmfClass& c) {
    static const char* names[] = {"Regular", "NondegenerateCritical", "BirthDeath", "Degenerate"};
    return names[c.index()];
}

std::string reason_name(DegenerateReason r) {
    return r == DegenerateReason::KernelDimAtLeast2 ? "KernelDimAtLeast2" : "KernelCubicVanishes";
}

std::optional<int> class_index(const GmfClass& c) {
    if (auto* n = std::get_if<NondegenerateCritical>(&c)) return n->index;
    if (auto* b = std::get_if<BirthDeath>(&c)) return b->index;
    return std::nullopt;
}

bool is_degenerate(const GmfClass& c) {
    return std::holds_alternative<Degenerate>(c);
}

double restrict_cubic(const Jet3& jet, const Vector& v) {
    if (v.size() != jet.dim()) throw DimensionError("restrict_cubic: vector has wrong dimension");
    if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("restrict_cubic: vector is not a unit vector");
    return evaluate_cubic(jet, v);
}

Classification analyze(const Jet3& jet, double tol) {
    const double scale = jet.scale();
    Classification out{Regular{}, spectral_split(jet.quadratic(), tol)};
    const SpectralSplit& s = out.split;
    if (jet.linear().norm() > tol * scale) return out;
    if (s.zero_dim == 0) {
        out.gmf_class = NondegenerateCritical{s.neg_dim};
    } else if (s.zero_dim == 1) {
        const Vector v = s.basis.col(s.neg_dim);
        if (std::abs(restrict_cubic(jet, v)) > tol * scale)
            out.gmf_class = BirthDeath{s.neg_dim};
        else
            out.gmf_class = Degenerate{DegenerateReason::KernelCubicVanishes};
    } else {
        out.gmf_class = Degenerate{DegenerateReason::KernelDimAtLeast2};
    }
    return out;
}

GmfClass classify(const Jet3& jet, double tol) {
    return analyze(jet, tol).gmf_class;
}

NormalForm birth_death_linear_normal_form(const Jet3& jet, double tol) {
    const Classification c = analyze(jet, tol);
    const auto* bd = std::get_if<BirthDeath>(&c.gmf_class);
    if (bd == nullptr)
        throw std::invalid_argument("birth_death_linear_normal_form: jet is " + class_name(c.gmf_class) +
                                    ", not BirthDeath");
    const SpectralSplit& s = c.split;
    const int d = jet.dim();

    // New axis order: kernel, negative block, positive block.
    Matrix rotation(d, d);
    Vector scaling(d);
    Vector kernel = s.basis.col(s.neg_dim);
    double cubic = restrict_cubic(jet, kernel);
    if (cubic < 0.0) {
        kernel = -kernel;
        cubic = -cubic;
    }
    rotation.col(0) = kernel;
    scaling(0) = std::cbrt(1.0 / cubic);
    int axis = 1;
    for (int k = 0; k < d; ++k) {
        if (k == s.neg_dim) continue;
        rotation.col(axis) = s.basis.col(k);
        scaling(axis) = 1.0 / std::sqrt(std::abs(s.eigenvalues(k)));
        ++axis;
    }

    Jet3 reduced = compose_linear(jet, rotation * scaling.asDiagonal());

    // Residual covers everything outside the normalized entries, which are then
    // pinned to their exact values.
    double residual = reduced.linear().cwiseAbs().maxCoeff();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double target = i != j ? 0.0 : (i == 0 ? 0.0 : (i <= s.neg_dim ? -1.0 : 1.0));
            residual = std::max(residual, std::abs(reduced.quadratic(i, j) - target));
        }
    for (const auto& [key, v] : reduced.cubic())
        residual = std::max(residual, key == CubicKey{0, 0, 0} ? std::abs(v - 1.0) : std::abs(v));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double target = i != j ? 0.0 : (i == 0 ? 0.0 : (i <= s.neg_dim ? -1.0 : 1.0));
            if (i <= j) reduced.set_quadratic(i, j, target);
        }
    reduced.set_cubic(0, 0, 0, 1.0);
    return NormalForm{std::move(rotation), std::move(scaling), std::move(reduced), residual};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

Jet3 jet_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw SchemaError("jet: expected a JSON object");
        const int d = j.at("dim").get<int>();
        if (d < 1) throw DimensionError("jet: dim must be positive");
        const auto linear = j.at("linear").get<std::vector<double>>();
        const auto quad = j.at("quadratic").get<std::vector<double>>();
        if (static_cast<int>(linear.size()) != d) throw DimensionError("jet: linear part must have dim entries");
        if (static_cast<int>(quad.size()) != d * d) throw DimensionError("jet: quadratic part must have dim*dim entries");
        Vector l = Eigen::Map<const Vector>(linear.data(), d);
        Matrix q(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) q(r, c) = quad[static_cast<std::size_t>(r * d + c)];
        if (q != q.transpose()) throw SchemaError("jet: quadratic part is not symmetric");
        std::map<CubicKey, double> cubic;
        if (j.contains("cubic")) {
            for (const auto& term : j.at("cubic")) {
                const auto idx = term.at("idx").get<std::vector<int>>();
                if (idx.size() != 3) throw SchemaError("jet: cubic idx must have three entries");
                if (!std::is_sorted(idx.begin(), idx.end())) throw SchemaError("jet: cubic idx must be sorted");
                for (int i : idx)
                    if (i < 1 || i > d) throw DimensionError("jet: cubic idx outside [1, dim]");
                const CubicKey key{idx[0] - 1, idx[1] - 1, idx[2] - 1};
                if (cubic.contains(key)) throw SchemaError("jet: duplicate cubic idx");
                cubic[key] = term.at("coeff").get<double>();
            }
        }
        return Jet3(j.value("constant", 0.0), std::move(l), std::move(q), std::move(cubic));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("jet: ") + e.what());
    }
}

nlohmann::json to_json(const Jet3& jet) {
    const int d = jet.dim();
    nlohmann::json j;
    j["dim"] = d;
    j["constant"] = jet.constant();
    j["linear"] = std::vector<double>(jet.linear().data(), jet.linear().data() + d);
    std::vector<double> q;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) q.push_back(jet.quadratic(r, c));
    j["quadratic"] = q;
    j["cubic"] = nlohmann::json::array();
    for (const auto& [key, v] : jet.cubic())
        j["cubic"].push_back({{"idx", {key[0] + 1, key[1] + 1, key[2] + 1}}, {"coeff", v}});
    return j;
}

nlohmann::json to_json(const Classification& c) {
    nlohmann::json j;
    j["class"] = class_name(c.gmf_class);
    const auto idx = class_index(c.gmf_class);
    j["index"] = idx ? nlohmann::json(*idx) : nlohmann::json(nullptr);
    if (const auto* dg = std::get_if<Degenerate>(&c.gmf_class))
        j["reason"] = reason_name(dg->reason);
    else
        j["reason"] = nullptr;
    j["split"] = {{"neg", c.split.neg_dim}, {"zero", c.split.zero_dim}, {"pos", c.split.pos_dim}};
    return j;
}

}  // namespace gmfkit::jet
