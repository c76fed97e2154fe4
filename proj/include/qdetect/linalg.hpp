#pragma once

// Dense complex linear algebra for the small Hilbert spaces used throughout
// the project (dimension <= 80). Everything is a value type; operations are
// free functions that never mutate their inputs.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdetect {

using Complex = std::complex<double>;

/// Which factor of H = H_I (x) H_II an object lives on. `auxiliary` tags
/// small bookkeeping matrices such as Gram matrices.
enum class Space { spatial, spin, composite, auxiliary };

std::string to_string(Space space);

struct Tolerances {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double audit_warn_tol = 1e-6;

    /// Throws ContractError unless all are positive and abs_tol <= audit_warn_tol.
    void validate() const;
};

class ContractError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class NotHermitianError : public ContractError {
  public:
    explicit NotHermitianError(double asymmetry);
    double asymmetry() const noexcept { return asymmetry_; }

  private:
    double asymmetry_;
};

class RankDeficientError : public ContractError {
  public:
    explicit RankDeficientError(std::size_t dependent_index);
    std::size_t dependent_index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

class StateVector {
  public:
    StateVector(std::size_t dim, Space space);
    StateVector(std::vector<Complex> entries, Space space);

    static StateVector basis(std::size_t dim, std::size_t index, Space space);
    static StateVector from_real(std::span<const double> values, Space space);

    std::size_t dim() const noexcept { return entries_.size(); }
    Space space() const noexcept { return space_; }

    const Complex &operator[](std::size_t i) const { return entries_[i]; }
    Complex &operator[](std::size_t i) { return entries_[i]; }
    std::span<const Complex> entries() const noexcept { return entries_; }

    double norm() const;
    double norm_squared() const;
    bool is_unit(double tol) const;

    StateVector &operator+=(const StateVector &other);
    StateVector &operator-=(const StateVector &other);
    StateVector &operator*=(Complex scale);

  private:
    std::vector<Complex> entries_;
    Space space_;
};

StateVector operator+(StateVector a, const StateVector &b);
StateVector operator-(StateVector a, const StateVector &b);
StateVector operator*(Complex scale, StateVector v);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(const StateVector &a, const StateVector &b);
double distance(const StateVector &a, const StateVector &b);

/// Square dense matrix, row-major.
class Operator {
  public:
    Operator(std::size_t dim, Space space);

    static Operator identity(std::size_t dim, Space space);
    static Operator zero(std::size_t dim, Space space) { return Operator(dim, space); }
    static Operator diagonal(std::span<const double> diag, Space space);
    /// |u><v|
    static Operator outer(const StateVector &u, const StateVector &v);

    std::size_t dim() const noexcept { return dim_; }
    Space space() const noexcept { return space_; }

    const Complex &operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
    Complex &operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
    std::span<const Complex> entries() const noexcept { return entries_; }

    Complex trace() const;
    double frobenius_norm() const;

    StateVector apply(const StateVector &v) const;

    Operator &operator+=(const Operator &other);
    Operator &operator-=(const Operator &other);
    Operator &operator*=(Complex scale);

    bool operator==(const Operator &other) const = default;

  private:
    std::size_t dim_;
    Space space_;
    std::vector<Complex> entries_;
};

Operator operator+(Operator a, const Operator &b);
Operator operator-(Operator a, const Operator &b);
Operator operator*(Complex scale, Operator a);
Operator operator*(const Operator &a, const Operator &b);
StateVector operator*(const Operator &a, const StateVector &v);

Operator matmul(const Operator &a, const Operator &b);
Operator adjoint(const Operator &a);
Operator commutator(const Operator &a, const Operator &b);

/// Kronecker product, spatial factor outer: (a (x) b)[i*nb + m, j*nb + n] = a[i,j] b[m,n].
Operator tensor(const Operator &spatial, const Operator &spin);
StateVector tensor_vec(const StateVector &spatial, const StateVector &spin);

/// Factorisation of the composite space; composite index = spatial * spin_dim + spin.
struct CompositeSpace {
    std::size_t spatial_dim = 0;
    std::size_t spin_dim = 0;

    std::size_t dim() const noexcept { return spatial_dim * spin_dim; }
    std::size_t index(std::size_t spatial, std::size_t spin) const noexcept { return spatial * spin_dim + spin; }
    bool operator==(const CompositeSpace &) const = default;
};

Operator lift_spatial(const Operator &spatial, const CompositeSpace &space);
Operator lift_spin(const Operator &spin, const CompositeSpace &space);

/// Splits a composite vector as sum_m phi_m (x) |m>; returns phi_m for each spin slot.
std::vector<StateVector> spin_components(const StateVector &psi, const CompositeSpace &space);

/// If a = 1 (x) X within tol, returns X; otherwise nothing.
std::optional<Operator> extract_spin_factor(const Operator &a, const CompositeSpace &space, double tol);

struct OperatorClass {
    double hermitian_defect = 0.0;   // ||A - A^dagger||_F
    double idempotency_defect = 0.0; // ||A^2 - A||_F
    bool hermitian = false;
    bool projector = false;
};

OperatorClass classify(const Operator &a, double tol);
inline bool is_projector(const Operator &a, double tol) { return classify(a, tol).projector; }

/// Gram matrix G[i][j] = <v_i|v_j>, tagged auxiliary.
Operator gram_matrix(std::span<const StateVector> vs);

struct GramDefect {
    enum class Kind { norm, overlap, dependent };
    Kind kind;
    std::size_t first;
    std::size_t second;
    double deviation; // |G_ij - delta_ij|, or the residual norm ratio for `dependent`
};

std::string to_string(GramDefect::Kind kind);

struct GramSchmidtResult {
    std::vector<StateVector> basis;
    std::size_t rank = 0;
    std::vector<std::size_t> kept; // input index behind each basis vector
    std::vector<GramDefect> defects;
};

/// Modified Gram-Schmidt with one re-orthogonalisation pass. An input is
/// dropped as dependent when its residual is <= rel_tol * its norm.
GramSchmidtResult gram_schmidt(std::span<const StateVector> vs, const Tolerances &tol = {});

/// Symmetric orthonormalisation V (V^dagger V)^(-1/2).
std::vector<StateVector> lowdin_orthonormalize(std::span<const StateVector> vs, const Tolerances &tol = {});

class GramDefectError : public ContractError {
  public:
    explicit GramDefectError(GramDefect worst);
    const GramDefect &defect() const noexcept { return defect_; }

  private:
    GramDefect defect_;
};

/// sum_i |v_i><v_i| for an orthonormal list; throws GramDefectError otherwise.
Operator projector_from_orthonormal(std::span<const StateVector> vs, const Tolerances &tol = {});

/// Projector onto the span of arbitrary vectors (orthonormalised first).
Operator span_projector(std::span<const StateVector> vs, std::size_t dim, Space space, const Tolerances &tol = {});

/// Cosine of the smallest principal angle between span(a) and span(b); 0 if either is empty.
double max_principal_cosine(std::span<const StateVector> a, std::span<const StateVector> b,
                            const Tolerances &tol = {});

struct EigenDecomposition {
    std::vector<double> values;        // ascending
    std::vector<StateVector> vectors;  // orthonormal, vectors[k] pairs with values[k]
};

/// Cyclic Jacobi for complex Hermitian matrices.
EigenDecomposition hermitian_eig(const Operator &a, const Tolerances &tol = {});

}  // namespace qdetect
