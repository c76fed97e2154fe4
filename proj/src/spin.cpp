#include "qdetect/spin.hpp"

#include <bit>
#include <cmath>

namespace qdetect {

SpinSystem::SpinSystem(int twice_j) : twice_j_(twice_j) {
    if (twice_j < 0 || twice_j > 31) {
        throw ContractError("spin: 2j must lie in [0, 31]");
    }
}

SpinSystem SpinSystem::with_dim(std::size_t dim) {
    if (dim == 0) {
        throw ContractError("spin: dimension must be positive");
    }
    return SpinSystem(static_cast<int>(dim) - 1);
}

double SpinSystem::m(std::size_t slot) const {
    if (slot >= dim()) {
        throw ContractError("spin: slot out of range");
    }
    return j() - static_cast<double>(slot);
}

std::size_t SpinSystem::slot_of(double m) const {
    const double slot = j() - m;
    const double rounded = std::round(slot);
    if (std::abs(slot - rounded) > 1e-9 || rounded < 0.0 || rounded >= static_cast<double>(dim())) {
        throw ContractError("spin: " + std::to_string(m) + " is not an m value of this system");
    }
    return static_cast<std::size_t>(rounded);
}

std::string SpinSystem::label(std::size_t slot) const {
    const int twice_m = twice_j_ - 2 * static_cast<int>(slot);
    if (slot >= dim()) {
        throw ContractError("spin: slot out of range");
    }
    if (twice_m % 2 == 0) {
        return std::to_string(twice_m / 2);
    }
    return std::to_string(twice_m) + "/2";
}

SpinSubset::SpinSubset(std::uint32_t mask, std::size_t dim) : mask_(mask), dim_(dim) {
    if (dim == 0 || dim > 32) {
        throw ContractError("spin subset: dimension must lie in [1, 32]");
    }
    if (dim < 32 && (mask >> dim) != 0) {
        throw ContractError("spin subset: mask has bits beyond the spin dimension");
    }
}

SpinSubset SpinSubset::from_slots(std::initializer_list<std::size_t> slots, std::size_t dim) {
    std::uint32_t mask = 0;
    for (std::size_t s : slots) {
        if (s >= dim) {
            throw ContractError("spin subset: slot out of range");
        }
        mask |= 1u << s;
    }
    return SpinSubset(mask, dim);
}

SpinSubset SpinSubset::from_m_values(const SpinSystem &sys, std::initializer_list<double> ms) {
    std::uint32_t mask = 0;
    for (double m : ms) {
        mask |= 1u << sys.slot_of(m);
    }
    return SpinSubset(mask, sys.dim());
}

std::size_t SpinSubset::size() const noexcept {
    return static_cast<std::size_t>(std::popcount(mask_));
}

std::vector<std::size_t> SpinSubset::slots() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dim_; ++k) {
        if (contains(k)) {
            out.push_back(k);
        }
    }
    return out;
}

SpinSubset SpinSubset::complement() const {
    const std::uint32_t full = dim_ == 32 ? ~0u : ((1u << dim_) - 1u);
    return SpinSubset(full & ~mask_, dim_);
}

std::string SpinSubset::to_string(const SpinSystem &sys) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t k : slots()) {
        if (!first) {
            out += ",";
        }
        out += sys.label(k);
        first = false;
    }
    return out + "}";
}

Operator s_z(const SpinSystem &sys) {
    std::vector<double> diag(sys.dim());
    for (std::size_t k = 0; k < sys.dim(); ++k) {
        diag[k] = sys.m(k);
    }
    return Operator::diagonal(diag, Space::spin);
}

LadderOperators s_ladder(const SpinSystem &sys) {
    Operator raise(sys.dim(), Space::spin);
    const double j = sys.j();
    // <m+1|S+|m> = sqrt(j(j+1) - m(m+1)); slot k holds m = j - k, so m + 1 sits at slot k - 1.
    for (std::size_t k = 1; k < sys.dim(); ++k) {
        const double m = sys.m(k);
        raise(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    Operator lower = adjoint(raise);
    return {std::move(raise), std::move(lower)};
}

Operator s_x(const SpinSystem &sys) {
    auto [raise, lower] = s_ladder(sys);
    return 0.5 * (raise + lower);
}

StateVector sx_top_eigenvector(const SpinSystem &sys, const Tolerances &tol) {
    auto eig = hermitian_eig(s_x(sys), tol);
    StateVector v = eig.vectors.back();
    const Complex top = v[0];
    if (std::abs(top) == 0.0) {
        throw ContractError("sx_top_eigenvector: |+j> amplitude vanished");
    }
    v *= std::conj(top) / std::abs(top);
    v[0] = v[0].real();
    v *= 1.0 / v.norm();
    return v;
}

Operator eigenprojector(const SpinSystem &sys, std::size_t index) {
    if (index < 1 || index > sys.dim()) {
        throw ContractError("eigenprojector: index must lie in [1, " + std::to_string(sys.dim()) + "]");
    }
    Operator out(sys.dim(), Space::spin);
    out(index - 1, index - 1) = 1.0;
    return out;
}

Operator subset_projector(const SpinSystem &sys, const SpinSubset &subset) {
    if (subset.dim() != sys.dim()) {
        throw ContractError("subset_projector: subset dimension does not match the spin system");
    }
    Operator out(sys.dim(), Space::spin);
    for (std::size_t k : subset.slots()) {
        out(k, k) = 1.0;
    }
    return out;
}

}  // namespace qdetect
