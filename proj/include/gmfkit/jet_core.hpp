#pragma once

// 3-jets of functions on R^d and their generalized-Morse classification.
//
// A jet is p(x) = c + l(x) + q(x) + r(x) with
//   l(x) = sum_i a_i x_i,  q(x) = sum_{ij} a_ij x_i x_j,  r(x) = sum_{ijk} a_ijk x_i x_j x_k
// where a_ij and a_ijk are symmetric. The cubic part is stored sparsely by
// sorted (0-based) index triples; a triple with m distinct permutations
// contributes m * a_ijk * x_i x_j x_k.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace gmfkit::jet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CubicKey = std::array<int, 3>;

inline constexpr double kDefaultTol = 1e-9;

class Jet3 {
public:
    explicit Jet3(int dim);
    Jet3(double constant, Vector linear, Matrix quadratic, std::map<CubicKey, double> cubic = {});

    int dim() const { return dim_; }
    double constant() const { return constant_; }
    const Vector& linear() const { return linear_; }
    const Matrix& quadratic() const { return quadratic_; }
    double quadratic(int i, int j) const { return quadratic_(i, j); }
    const std::map<CubicKey, double>& cubic() const { return cubic_; }
    // Symmetric tensor entry a_ijk for any index order.
    double cubic(int i, int j, int k) const;

    void set_constant(double c);
    void set_linear(int i, double v);
    // Writes both a_ij and a_ji.
    void set_quadratic(int i, int j, double v);
    // Sets a_ijk for every permutation of (i, j, k); zero erases the entry.
    void set_cubic(int i, int j, int k, double v);

    // max(1, largest absolute coefficient).
    double scale() const;

    // Dense symmetric tensor T[(i*d + j)*d + k] = a_ijk.
    std::vector<double> cubic_tensor() const;

    friend bool operator==(const Jet3& a, const Jet3& b);

private:
    int dim_;
    double constant_ = 0.0;
    Vector linear_;
    Matrix quadratic_;
    std::map<CubicKey, double> cubic_;
};

// Number of distinct orderings of a sorted triple: 1, 3 or 6.
int multiplicity(const CubicKey& key);

double evaluate(const Jet3& jet, const Vector& x);
double evaluate_cubic(const Jet3& jet, const Vector& x);

// The jet of y -> p(M y) for a square matrix M.
Jet3 compose_linear(const Jet3& jet, const Matrix& m);

struct SpectralSplit {
    int neg_dim = 0;
    int zero_dim = 0;
    int pos_dim = 0;
    // Orthonormal eigenvectors as columns: negative block, kernel block,
    // positive block, each ascending in eigenvalue.
    Matrix basis;
    Vector eigenvalues;
    // Eigenvalues with |lambda| <= threshold count as zero.
    double threshold = 0.0;
};

// Eigenvalues with |lambda| <= tol * max(1, ||q||_2) are treated as zero.
SpectralSplit spectral_split(const Matrix& q, double tol = kDefaultTol);

enum class DegenerateReason { KernelDimAtLeast2, KernelCubicVanishes };

struct Regular {
    friend bool operator==(const Regular&, const Regular&) = default;
};
struct NondegenerateCritical {
    int index;
    friend bool operator==(const NondegenerateCritical&, const NondegenerateCritical&) = default;
};
struct BirthDeath {
    int index;
    friend bool operator==(const BirthDeath&, const BirthDeath&) = default;
};
struct Degenerate {
    DegenerateReason reason;
    friend bool operator==(const Degenerate&, const Degenerate&) = default;
};

using GmfClass = std::variant<Regular, NondegenerateCritical, BirthDeath, Degenerate>;

std::string class_name(const GmfClass& c);
std::string reason_name(DegenerateReason r);
std::optional<int> class_index(const GmfClass& c);
bool is_degenerate(const GmfClass& c);

struct Classification {
    GmfClass gmf_class;
    SpectralSplit split;
};

Classification analyze(const Jet3& jet, double tol = kDefaultTol);
GmfClass classify(const Jet3& jet, double tol = kDefaultTol);

// r(v, v, v) for a unit vector v.
double restrict_cubic(const Jet3& jet, const Vector& v);

struct NormalForm {
    // Original coordinates x = rotation * diag(scaling) * y.
    Matrix rotation;
    Vector scaling;
    Jet3 reduced;
    // Largest coefficient outside the y_1^3 term and the diagonal quadratic,
    // i.e. what a linear change of coordinates cannot remove.
    double residual;
};

// Orthogonal rotation plus positive axis scaling bringing a birth-death jet to
// y_1^3 - (negative squares) + (positive squares) + residual cubic terms.
NormalForm birth_death_linear_normal_form(const Jet3& jet, double tol = kDefaultTol);

// JSON: {"dim", "constant", "linear", "quadratic" (row-major d*d), "cubic": [{"idx":[i,j,k], "coeff"}]}
// with 1-based sorted idx. Throws SchemaError / DimensionError.
Jet3 jet_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Jet3& jet);
// {"class", "index", "reason", "split": {"neg", "zero", "pos"}}
nlohmann::json to_json(const Classification& c);

}  // namespace gmfkit::jet
