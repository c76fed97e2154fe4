#pragma once

// Derives spatial properties detected by spin-subset detectors on a given
// state, solves and enumerates detector triples, and repairs the printed
// scenario.
//
// For psi = sum_m phi_m (x) |m>, a spatial projector R satisfies
// (1 (x) P_S) psi = (R (x) 1) psi iff R phi_m = phi_m for m in S and
// R phi_m = 0 otherwise. Channels with phi_m = 0 impose nothing. R is the
// projector onto span{phi_m : m in S} plus optional completion vectors taken
// from K, the orthogonal complement of span{all phi_m}.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdetect/audit.hpp"
#include "qdetect/linalg.hpp"
#include "qdetect/problem.hpp"
#include "qdetect/scenario.hpp"
#include "qdetect/spin.hpp"

namespace qdetect {

/// Fixed and annihilated spans count as orthogonal when the cosine of their
/// smallest principal angle is at most this.
inline constexpr double kFeasibilityCosine = 1e-8;

struct CompletionPolicy {
    enum class Kind { none, index_order, mixing, reference };

    Kind kind = Kind::mixing;
    std::size_t target_rank = 0;       // index_order
    std::size_t slot = 0;              // mixing: angle pi/4 + slot*pi/3
    std::optional<Operator> reference; // reference

    static CompletionPolicy none() { return {Kind::none, 0, 0, std::nullopt}; }
    /// Gram-Schmidt against the spatial basis in index order, up to a total rank.
    static CompletionPolicy index_order(std::size_t target_rank) { return {Kind::index_order, target_rank, 0, std::nullopt}; }
    /// One vector cos(a) k1 + sin(a) kbar with kbar the normalised sum of k2..kf.
    static CompletionPolicy mixing(std::size_t slot) { return {Kind::mixing, 0, slot, std::nullopt}; }
    /// Top eigenvectors of K^dagger R_ref K, as many as round(tr R_ref) - rank still needs.
    static CompletionPolicy reference_projector(Operator r) { return {Kind::reference, 0, 0, std::move(r)}; }

    std::string describe() const;
};

struct DetectionConstraint {
    StateVector psi;
    CompositeSpace space;
    SpinSubset subset;
    CompletionPolicy completion = CompletionPolicy::none();
};

struct SolverSolution {
    Operator property;  // spatial projector
    std::size_t fixed_rank = 0;
    std::size_t freedom_dim = 0;  // dim of K
    std::vector<StateVector> completion;
    Certificate certificate;
};

class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(std::uint32_t mask, std::size_t fixed_slot, std::size_t annihilated_slot, double overlap,
                    const std::string &message);

    std::uint32_t subset_mask() const noexcept { return mask_; }
    std::size_t fixed_slot() const noexcept { return fixed_; }
    std::size_t annihilated_slot() const noexcept { return annihilated_; }
    double overlap() const noexcept { return overlap_; }

  private:
    std::uint32_t mask_;
    std::size_t fixed_;
    std::size_t annihilated_;
    double overlap_;
};

/// Throws InfeasibleError, or ContractError on bad shapes, zero state or an
/// unattainable target rank.
SolverSolution derive_property(const DetectionConstraint &c, const Tolerances &tol = {});

struct TripleOptions {
    std::array<std::string, 3> property_names{"R1", "R2", "R3"};
    std::array<std::string, 3> detector_names{"S1", "S2", "S3"};
    /// Per slot; nullopt means mixing(slot).
    std::array<std::optional<CompletionPolicy>, 3> completion{};
    /// Extra operator every certificate reports its commutator with (e.g. the which-slit projector).
    std::optional<std::pair<std::string, Operator>> reference_property;
};

struct TripleSolution {
    std::array<SolverSolution, 3> solutions;
    ProblemInstance problem;
    ConditionReport report;
};

TripleSolution solve_triple(const StateVector &psi, const CompositeSpace &space,
                            const std::array<SpinSubset, 3> &subsets, const TripleOptions &options = {},
                            const Tolerances &tol = {});

struct EnumerationOptions {
    /// Canonical subsets contain the lowest present channel.
    bool complement_pruning = true;
    /// Subsets with members on absent channels are skipped (they derive the same property).
    bool absent_channel_pruning = true;
    /// Require C.1-C.3; when false, triples need only C.4-C.10.
    bool require_incompatibility = true;
};

struct EnumeratedTriple {
    std::array<std::uint32_t, 3> masks{};
    std::array<double, 10> measured{};  // C.1 .. C.10
};

struct EnumerationStats {
    std::size_t candidate_subsets = 0;  // per slot, after pruning
    std::array<std::size_t, 3> usable_subsets{};  // feasible and passing C.10
    std::size_t triples_tested = 0;
    std::size_t solutions = 0;
};

using TripleVisitor = std::function<void(const EnumeratedTriple &)>;

/// Visits every passing triple in lexicographic mask order. Spin dim must be <= 16.
EnumerationStats enumerate_solutions(const StateVector &psi, const CompositeSpace &space,
                                     const EnumerationOptions &options, const TripleVisitor &visit,
                                     const Tolerances &tol = {});

std::vector<EnumeratedTriple> enumerate_solutions(const StateVector &psi, const CompositeSpace &space,
                                                  const EnumerationOptions &options = {}, const Tolerances &tol = {});

/// The representative of a subset triple under the enabled prunings: absent channels
/// cleared, and each subset replaced by its complement when it misses the lowest present channel.
std::array<std::uint32_t, 3> canonical_masks(const std::array<std::uint32_t, 3> &masks, const StateVector &psi,
                                             const CompositeSpace &space, const EnumerationOptions &options = {},
                                             const Tolerances &tol = {});

/// Full condition report for one enumerated triple (re-solved with the default policy).
ConditionReport report_for(const EnumeratedTriple &triple, const StateVector &psi, const CompositeSpace &space,
                           const Tolerances &tol = {});

/// The prepared state with orthonormalised channels (norm^2 100/128).
StateVector repaired_state(const Tolerances &tol = {});

/// Repaired scenario on repaired_state(): E and the detectors unchanged, G derived
/// from Y with the printed G as reference, L kept if it still detects, else derived
/// from W with the printed L as reference. Certificates for G and L are attached.
PaperScenario repair_scenario(const PaperScenario &literal, const Tolerances &tol = {});

}  // namespace qdetect
