#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "qdetect/linalg.hpp"

namespace qdetect {

/// Spin-j system with basis slots ordered m = +j, j-1, ..., -j.
class SpinSystem {
  public:
    explicit SpinSystem(int twice_j);

    static SpinSystem seven_halves() { return SpinSystem(7); }
    /// Spin system whose multiplicity is `dim` (j = (dim - 1) / 2).
    static SpinSystem with_dim(std::size_t dim);

    int twice_j() const noexcept { return twice_j_; }
    double j() const noexcept { return 0.5 * twice_j_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(twice_j_) + 1; }

    /// m value of a 0-based slot.
    double m(std::size_t slot) const;
    /// 0-based slot of an m value; throws ContractError if m is not a label.
    std::size_t slot_of(double m) const;
    /// "7/2", "-1/2", "1", "0"
    std::string label(std::size_t slot) const;

    bool operator==(const SpinSystem &) const = default;

  private:
    int twice_j_;
};

/// A set of spin basis slots, stored as a bitmask (bit k = slot k).
class SpinSubset {
  public:
    SpinSubset(std::uint32_t mask, std::size_t dim);

    static SpinSubset from_slots(std::initializer_list<std::size_t> slots, std::size_t dim);
    static SpinSubset from_m_values(const SpinSystem &sys, std::initializer_list<double> ms);

    std::uint32_t mask() const noexcept { return mask_; }
    std::size_t dim() const noexcept { return dim_; }
    bool contains(std::size_t slot) const { return slot < dim_ && ((mask_ >> slot) & 1u) != 0; }
    std::size_t size() const noexcept;
    std::vector<std::size_t> slots() const;
    SpinSubset complement() const;

    /// "{7/2,5/2,3/2,-1/2}"
    std::string to_string(const SpinSystem &sys) const;

    bool operator==(const SpinSubset &) const = default;
    auto operator<=>(const SpinSubset &other) const { return mask_ <=> other.mask_; }

  private:
    std::uint32_t mask_;
    std::size_t dim_;
};

Operator s_z(const SpinSystem &sys);

struct LadderOperators {
    Operator raise;
    Operator lower;
};

LadderOperators s_ladder(const SpinSystem &sys);
Operator s_x(const SpinSystem &sys);

/// Unit eigenvector of S_x for eigenvalue +j, phase chosen so the |+j> amplitude is real positive.
StateVector sx_top_eigenvector(const SpinSystem &sys, const Tolerances &tol = {});

/// |j_i><j_i| for the 1-based index i (j_i = j - (i - 1)).
Operator eigenprojector(const SpinSystem &sys, std::size_t index);

Operator subset_projector(const SpinSystem &sys, const SpinSubset &subset);

}  // namespace qdetect
