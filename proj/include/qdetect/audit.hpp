#pragma once

// Numerical evaluation of the detector definition and the ten conditions of
// the three-property detection problem, plus a structural audit of every
// printed vector. Findings are data: nothing here throws on a bad scenario.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdetect/linalg.hpp"
#include "qdetect/problem.hpp"
#include "qdetect/scenario.hpp"

namespace qdetect {

enum class Verdict { pass, fail, informational };
enum class Relation { at_most, greater_than };

std::string to_string(Verdict verdict);
std::string to_string(Relation relation);

struct ConditionEntry {
    std::string id;
    std::string description;
    double measured = 0.0;
    double threshold = 0.0;
    Relation relation = Relation::at_most;
    Verdict verdict = Verdict::pass;
    std::map<std::string, double> components;
};

struct ConditionReport {
    std::string variant;
    Tolerances tolerances;
    std::vector<ConditionEntry> entries;
    std::vector<std::string> notes;

    const ConditionEntry *find(const std::string &id) const;
    const ConditionEntry &at(const std::string &id) const;  // throws std::out_of_range
    /// True iff no entry whose id starts with `prefix` has verdict fail.
    bool passes(const std::string &prefix = "") const;
    std::vector<std::string> failing_ids() const;
};

struct DetectorCheck {
    double commutator_norm = 0.0;
    double residual = 0.0;  // ||S psi - R psi|| / ||psi||
    Verdict verdict = Verdict::pass;
};

/// Composite S, R and psi. Throws ContractError on shape mismatch or ||psi|| <= abs_tol.
DetectorCheck check_detector(const Operator &s, const Operator &r, const StateVector &psi, const Tolerances &tol = {});

inline constexpr std::uint64_t kFSampleSeed = 0x51D7E3A1C0FFEE42ULL;
inline constexpr std::size_t kFSampleCount = 20;

struct FCommutationCheck {
    Verdict verdict = Verdict::pass;
    bool structural = false;         // S = 1 (x) X within abs_tol
    double max_commutator_norm = 0.0;  // over the random samples (0 when structural)
    std::size_t samples = 0;
};

/// Random Hermitian spatial operator number `index` of the documented sample family.
Operator random_spatial_hermitian(std::size_t dim, std::uint64_t seed, std::size_t index);

/// Commutation of S with every F (x) 1: exact when S = 1 (x) X, otherwise tested on
/// `samples` seeded random Hermitian F.
FCommutationCheck check_F_commutation(const Operator &s, const CompositeSpace &space, const Tolerances &tol = {},
                                      std::uint64_t seed = kFSampleSeed, std::size_t samples = kFSampleCount);

/// PROJ.*, C.1-C.10, then D1.i / D1.ii per pair, in that fixed order.
ConditionReport evaluate_conditions(const ProblemInstance &problem, const Tolerances &tol = {},
                                    const std::string &variant = "");

inline ConditionReport evaluate_conditions(const PaperScenario &s, const Tolerances &tol = {}) {
    return evaluate_conditions(s.problem, tol, to_string(s.variant));
}

/// STRUCT.* findings on the printed data, the channel set and pipeline of the
/// scenario's variant, and the scenario's state.
ConditionReport structural_audit(const PaperScenario &s, const Tolerances &tol = {});

}  // namespace qdetect
