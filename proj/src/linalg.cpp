#include "qdetect/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qdetect {

namespace {

void require_same_shape(const Operator &a, const Operator &b, const char *what) {
    if (a.dim() != b.dim() || a.space() != b.space()) {
        std::ostringstream msg;
        msg << what << ": operand mismatch (" << a.dim() << "/" << to_string(a.space()) << " vs " << b.dim() << "/"
            << to_string(b.space()) << ")";
        throw ContractError(msg.str());
    }
}

void require_same_shape(const StateVector &a, const StateVector &b, const char *what) {
    if (a.dim() != b.dim() || a.space() != b.space()) {
        std::ostringstream msg;
        msg << what << ": vector mismatch (" << a.dim() << "/" << to_string(a.space()) << " vs " << b.dim() << "/"
            << to_string(b.space()) << ")";
        throw ContractError(msg.str());
    }
}

}  // namespace

std::string to_string(Space space) {
    switch (space) {
        case Space::spatial:
            return "spatial";
        case Space::spin:
            return "spin";
        case Space::composite:
            return "composite";
        case Space::auxiliary:
            return "auxiliary";
    }
    return "unknown";
}

void Tolerances::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(audit_warn_tol > 0.0)) {
        throw ContractError("tolerances must be strictly positive");
    }
    if (abs_tol > audit_warn_tol) {
        throw ContractError("abs_tol must not exceed audit_warn_tol");
    }
}

NotHermitianError::NotHermitianError(double asymmetry)
    : ContractError("operator is not Hermitian: ||A - A^dagger||_F = " + std::to_string(asymmetry)),
      asymmetry_(asymmetry) {
}

RankDeficientError::RankDeficientError(std::size_t dependent_index)
    : ContractError("input vectors are linearly dependent at index " + std::to_string(dependent_index)),
      index_(dependent_index) {
}

std::string to_string(GramDefect::Kind kind) {
    switch (kind) {
        case GramDefect::Kind::norm:
            return "norm";
        case GramDefect::Kind::overlap:
            return "overlap";
        case GramDefect::Kind::dependent:
            return "dependent";
    }
    return "unknown";
}

GramDefectError::GramDefectError(GramDefect worst)
    : ContractError("vectors are not orthonormal: " + to_string(worst.kind) + " defect " +
                    std::to_string(worst.deviation) + " at (" + std::to_string(worst.first) + "," +
                    std::to_string(worst.second) + ")"),
      defect_(worst) {
}

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(std::size_t dim, Space space) : entries_(dim), space_(space) {
    if (dim == 0) {
        throw ContractError("state vector dimension must be positive");
    }
}

StateVector::StateVector(std::vector<Complex> entries, Space space) : entries_(std::move(entries)), space_(space) {
    if (entries_.empty()) {
        throw ContractError("state vector dimension must be positive");
    }
}

StateVector StateVector::basis(std::size_t dim, std::size_t index, Space space) {
    if (index >= dim) {
        throw ContractError("basis index out of range");
    }
    StateVector v(dim, space);
    v[index] = 1.0;
    return v;
}

StateVector StateVector::from_real(std::span<const double> values, Space space) {
    std::vector<Complex> entries(values.begin(), values.end());
    return StateVector(std::move(entries), space);
}

double StateVector::norm_squared() const {
    double total = 0.0;
    for (const auto &z : entries_) {
        total += std::norm(z);
    }
    return total;
}

double StateVector::norm() const {
    return std::sqrt(norm_squared());
}

bool StateVector::is_unit(double tol) const {
    return std::abs(norm() - 1.0) <= tol;
}

StateVector &StateVector::operator+=(const StateVector &other) {
    require_same_shape(*this, other, "vector +");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

StateVector &StateVector::operator-=(const StateVector &other) {
    require_same_shape(*this, other, "vector -");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

StateVector &StateVector::operator*=(Complex scale) {
    for (auto &z : entries_) {
        z *= scale;
    }
    return *this;
}

StateVector operator+(StateVector a, const StateVector &b) {
    a += b;
    return a;
}

StateVector operator-(StateVector a, const StateVector &b) {
    a -= b;
    return a;
}

StateVector operator*(Complex scale, StateVector v) {
    v *= scale;
    return v;
}

Complex inner(const StateVector &a, const StateVector &b) {
    require_same_shape(a, b, "inner");
    Complex total = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        total += std::conj(a[i]) * b[i];
    }
    return total;
}

double distance(const StateVector &a, const StateVector &b) {
    return (a - b).norm();
}

// ------------------------------------------------------------------- Operator

Operator::Operator(std::size_t dim, Space space) : dim_(dim), space_(space), entries_(dim * dim) {
    if (dim == 0) {
        throw ContractError("operator dimension must be positive");
    }
}

Operator Operator::identity(std::size_t dim, Space space) {
    Operator out(dim, space);
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

Operator Operator::diagonal(std::span<const double> diag, Space space) {
    Operator out(diag.size(), space);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        out(i, i) = diag[i];
    }
    return out;
}

Operator Operator::outer(const StateVector &u, const StateVector &v) {
    require_same_shape(u, v, "outer");
    Operator out(u.dim(), u.space());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        for (std::size_t j = 0; j < v.dim(); ++j) {
            out(i, j) = u[i] * std::conj(v[j]);
        }
    }
    return out;
}

Complex Operator::trace() const {
    Complex total = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        total += (*this)(i, i);
    }
    return total;
}

double Operator::frobenius_norm() const {
    double total = 0.0;
    for (const auto &z : entries_) {
        total += std::norm(z);
    }
    return std::sqrt(total);
}

StateVector Operator::apply(const StateVector &v) const {
    if (v.dim() != dim_ || v.space() != space_) {
        throw ContractError("apply: operator/vector mismatch");
    }
    StateVector out(dim_, space_);
    for (std::size_t i = 0; i < dim_; ++i) {
        Complex acc = 0.0;
        const Complex *row = &entries_[i * dim_];
        for (std::size_t j = 0; j < dim_; ++j) {
            acc += row[j] * v[j];
        }
        out[i] = acc;
    }
    return out;
}

Operator &Operator::operator+=(const Operator &other) {
    require_same_shape(*this, other, "operator +");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

Operator &Operator::operator-=(const Operator &other) {
    require_same_shape(*this, other, "operator -");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

Operator &Operator::operator*=(Complex scale) {
    for (auto &z : entries_) {
        z *= scale;
    }
    return *this;
}

Operator operator+(Operator a, const Operator &b) {
    a += b;
    return a;
}

Operator operator-(Operator a, const Operator &b) {
    a -= b;
    return a;
}

Operator operator*(Complex scale, Operator a) {
    a *= scale;
    return a;
}

Operator operator*(const Operator &a, const Operator &b) {
    return matmul(a, b);
}

StateVector operator*(const Operator &a, const StateVector &v) {
    return a.apply(v);
}

Operator matmul(const Operator &a, const Operator &b) {
    require_same_shape(a, b, "matmul");
    const std::size_t n = a.dim();
    Operator out(n, a.space());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Operator adjoint(const Operator &a) {
    Operator out(a.dim(), a.space());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            out(j, i) = std::conj(a(i, j));
        }
    }
    return out;
}

Operator commutator(const Operator &a, const Operator &b) {
    require_same_shape(a, b, "commutator");
    return matmul(a, b) - matmul(b, a);
}

Operator tensor(const Operator &spatial, const Operator &spin) {
    if (spatial.space() != Space::spatial || spin.space() != Space::spin) {
        throw ContractError("tensor: expected spatial (x) spin operands, got " + to_string(spatial.space()) + " (x) " +
                            to_string(spin.space()));
    }
    const std::size_t na = spatial.dim();
    const std::size_t nb = spin.dim();
    Operator out(na * nb, Space::composite);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            const Complex aij = spatial(i, j);
            if (aij == Complex{}) {
                continue;
            }
            for (std::size_t m = 0; m < nb; ++m) {
                for (std::size_t n = 0; n < nb; ++n) {
                    out(i * nb + m, j * nb + n) = aij * spin(m, n);
                }
            }
        }
    }
    return out;
}

StateVector tensor_vec(const StateVector &spatial, const StateVector &spin) {
    if (spatial.space() != Space::spatial || spin.space() != Space::spin) {
        throw ContractError("tensor_vec: expected spatial (x) spin operands");
    }
    StateVector out(spatial.dim() * spin.dim(), Space::composite);
    for (std::size_t i = 0; i < spatial.dim(); ++i) {
        for (std::size_t m = 0; m < spin.dim(); ++m) {
            out[i * spin.dim() + m] = spatial[i] * spin[m];
        }
    }
    return out;
}

Operator lift_spatial(const Operator &spatial, const CompositeSpace &space) {
    if (spatial.dim() != space.spatial_dim) {
        throw ContractError("lift_spatial: dimension mismatch");
    }
    return tensor(spatial, Operator::identity(space.spin_dim, Space::spin));
}

Operator lift_spin(const Operator &spin, const CompositeSpace &space) {
    if (spin.dim() != space.spin_dim) {
        throw ContractError("lift_spin: dimension mismatch");
    }
    return tensor(Operator::identity(space.spatial_dim, Space::spatial), spin);
}

std::vector<StateVector> spin_components(const StateVector &psi, const CompositeSpace &space) {
    if (psi.space() != Space::composite || psi.dim() != space.dim()) {
        throw ContractError("spin_components: expected a composite vector of matching dimension");
    }
    std::vector<StateVector> out(space.spin_dim, StateVector(space.spatial_dim, Space::spatial));
    for (std::size_t i = 0; i < space.spatial_dim; ++i) {
        for (std::size_t m = 0; m < space.spin_dim; ++m) {
            out[m][i] = psi[space.index(i, m)];
        }
    }
    return out;
}

std::optional<Operator> extract_spin_factor(const Operator &a, const CompositeSpace &space, double tol) {
    if (a.space() != Space::composite || a.dim() != space.dim()) {
        throw ContractError("extract_spin_factor: expected a composite operator of matching dimension");
    }
    Operator block(space.spin_dim, Space::spin);
    for (std::size_t m = 0; m < space.spin_dim; ++m) {
        for (std::size_t n = 0; n < space.spin_dim; ++n) {
            block(m, n) = a(m, n);
        }
    }
    if ((a - lift_spin(block, space)).frobenius_norm() > tol) {
        return std::nullopt;
    }
    return block;
}

OperatorClass classify(const Operator &a, double tol) {
    OperatorClass out;
    out.hermitian_defect = (a - adjoint(a)).frobenius_norm();
    out.idempotency_defect = (matmul(a, a) - a).frobenius_norm();
    out.hermitian = out.hermitian_defect <= tol;
    out.projector = out.hermitian && out.idempotency_defect <= tol;
    return out;
}

Operator gram_matrix(std::span<const StateVector> vs) {
    if (vs.empty()) {
        throw ContractError("gram_matrix: empty input");
    }
    Operator g(vs.size(), Space::auxiliary);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = 0; j < vs.size(); ++j) {
            g(i, j) = inner(vs[i], vs[j]);
        }
    }
    return g;
}

namespace {

std::vector<GramDefect> gram_defects(std::span<const StateVector> vs, double threshold) {
    std::vector<GramDefect> out;
    if (vs.empty()) {
        return out;
    }
    const Operator g = gram_matrix(vs);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i; j < vs.size(); ++j) {
            const double dev = std::abs(g(i, j) - (i == j ? Complex{1.0} : Complex{}));
            if (dev > threshold) {
                out.push_back({i == j ? GramDefect::Kind::norm : GramDefect::Kind::overlap, i, j, dev});
            }
        }
    }
    return out;
}

void orthogonalize_against(StateVector &w, const std::vector<StateVector> &basis) {
    for (const auto &b : basis) {
        const Complex c = inner(b, w);
        for (std::size_t k = 0; k < w.dim(); ++k) {
            w[k] -= c * b[k];
        }
    }
}

}  // namespace

GramSchmidtResult gram_schmidt(std::span<const StateVector> vs, const Tolerances &tol) {
    GramSchmidtResult out;
    if (vs.empty()) {
        return out;
    }
    for (const auto &v : vs) {
        require_same_shape(vs.front(), v, "gram_schmidt");
    }
    out.defects = gram_defects(vs, tol.audit_warn_tol);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const double original = vs[i].norm();
        StateVector w = vs[i];
        orthogonalize_against(w, out.basis);
        orthogonalize_against(w, out.basis);
        const double residual = w.norm();
        if (original == 0.0 || residual <= tol.rel_tol * original) {
            out.defects.push_back({GramDefect::Kind::dependent, i, i, original == 0.0 ? 0.0 : residual / original});
            continue;
        }
        w *= 1.0 / residual;
        out.basis.push_back(std::move(w));
        out.kept.push_back(i);
    }
    out.rank = out.basis.size();
    return out;
}

std::vector<StateVector> lowdin_orthonormalize(std::span<const StateVector> vs, const Tolerances &tol) {
    if (vs.empty()) {
        return {};
    }
    const auto gs = gram_schmidt(vs, tol);
    if (gs.rank < vs.size()) {
        for (const auto &d : gs.defects) {
            if (d.kind == GramDefect::Kind::dependent) {
                throw RankDeficientError(d.first);
            }
        }
    }
    const Operator g = gram_matrix(vs);
    const auto eig = hermitian_eig(g, tol);
    const std::size_t k = vs.size();
    // S^(-1/2) = U diag(lambda^(-1/2)) U^dagger
    Operator inv_sqrt(k, Space::auxiliary);
    for (std::size_t e = 0; e < k; ++e) {
        const double scale = 1.0 / std::sqrt(eig.values[e]);
        const auto &u = eig.vectors[e];
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                inv_sqrt(i, j) += scale * u[i] * std::conj(u[j]);
            }
        }
    }
    std::vector<StateVector> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        StateVector w(vs[0].dim(), vs[0].space());
        for (std::size_t i = 0; i < k; ++i) {
            const Complex c = inv_sqrt(i, j);
            for (std::size_t d = 0; d < w.dim(); ++d) {
                w[d] += c * vs[i][d];
            }
        }
        out.push_back(std::move(w));
    }
    return out;
}

Operator projector_from_orthonormal(std::span<const StateVector> vs, const Tolerances &tol) {
    if (vs.empty()) {
        throw ContractError("projector_from_orthonormal: empty input");
    }
    const auto defects = gram_defects(vs, tol.abs_tol);
    if (!defects.empty()) {
        throw GramDefectError(*std::max_element(defects.begin(), defects.end(), [](const auto &a, const auto &b) {
            return a.deviation < b.deviation;
        }));
    }
    Operator out(vs[0].dim(), vs[0].space());
    for (const auto &v : vs) {
        out += Operator::outer(v, v);
    }
    return out;
}

Operator span_projector(std::span<const StateVector> vs, std::size_t dim, Space space, const Tolerances &tol) {
    Operator out(dim, space);
    for (const auto &b : gram_schmidt(vs, tol).basis) {
        out += Operator::outer(b, b);
    }
    return out;
}

double max_principal_cosine(std::span<const StateVector> a, std::span<const StateVector> b, const Tolerances &tol) {
    const auto qa = gram_schmidt(a, tol).basis;
    const auto qb = gram_schmidt(b, tol).basis;
    if (qa.empty() || qb.empty()) {
        return 0.0;
    }
    // Largest singular value of M = Qa^dagger Qb, via the eigenvalues of M M^dagger.
    Operator mm(qa.size(), Space::auxiliary);
    for (std::size_t i = 0; i < qa.size(); ++i) {
        for (std::size_t j = 0; j < qa.size(); ++j) {
            Complex acc = 0.0;
            for (const auto &v : qb) {
                acc += inner(qa[i], v) * std::conj(inner(qa[j], v));
            }
            mm(i, j) = acc;
        }
    }
    const auto eig = hermitian_eig(mm, tol);
    return std::sqrt(std::clamp(eig.values.back(), 0.0, 1.0));
}

// ------------------------------------------------------------ Jacobi solver

EigenDecomposition hermitian_eig(const Operator &a, const Tolerances &tol) {
    const std::size_t n = a.dim();
    const double asymmetry = (a - adjoint(a)).frobenius_norm();
    if (asymmetry > tol.abs_tol * static_cast<double>(n)) {
        throw NotHermitianError(asymmetry);
    }
    // Work on the exactly Hermitian part.
    Operator m = 0.5 * (a + adjoint(a));
    Operator v = Operator::identity(n, a.space());
    const double scale = std::max(m.frobenius_norm(), 1e-300);

    auto off_norm = [&] {
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                total += 2.0 * std::norm(m(p, q));
            }
        }
        return std::sqrt(total);
    };

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > 1e-15 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = m(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300 || r < 1e-18 * scale) {
                    continue;
                }
                // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on rows/cols (p, q) zeroes m(p, q).
                const Complex phase = apq / r;  // e^{i phi}
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * std::conj(phase);
                const Complex gqq = c * std::conj(phase);
                // m <- m G (columns p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex mkp = m(k, p);
                    const Complex mkq = m(k, q);
                    m(k, p) = mkp * gpp + mkq * gqp;
                    m(k, q) = mkp * gpq + mkq * gqq;
                }
                // m <- G^dagger m (rows p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex mpk = m(p, k);
                    const Complex mqk = m(q, k);
                    m(p, k) = std::conj(gpp) * mpk + std::conj(gqp) * mqk;
                    m(q, k) = std::conj(gpq) * mpk + std::conj(gqq) * mqk;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                m(p, p) = m(p, p).real();
                m(q, q) = m(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return m(x, x).real() < m(y, y).real(); });
    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t k : order) {
        out.values.push_back(m(k, k).real());
        StateVector col(n, a.space());
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = v(i, k);
        }
        out.vectors.push_back(std::move(col));
    }
    return out;
}

}  // namespace qdetect
