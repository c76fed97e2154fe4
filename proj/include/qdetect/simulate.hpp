#pragma once

// Joint outcome statistics of commuting detectors on a prepared state, exact
// and sampled. Outcomes are ordered lexicographically over the detector bits
// with 1 before 0, e.g. (1,1,1), (1,1,0), (1,0,1), ... for three detectors.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdetect/linalg.hpp"
#include "qdetect/problem.hpp"

namespace qdetect {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct Outcome {
    std::vector<int> bits;
    double probability = 0.0;
    std::uint64_t count = 0;  // sampled only
};

struct OutcomeDistribution {
    enum class Provenance { exact, sampled };

    Provenance provenance = Provenance::exact;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    std::string generator_id;
    std::vector<Outcome> outcomes;

    double total_probability() const;
    const Outcome &at(const std::vector<int> &bits) const;  // throws std::out_of_range
};

std::string to_string(OutcomeDistribution::Provenance p);

/// Bits of outcome number `index` among 2^k in the documented order.
std::vector<int> outcome_bits(std::size_t index, std::size_t k);

/// Probabilities ||Pi psi||^2 / ||psi||^2 of the joint spectral projectors. Throws
/// ContractError when a detector is not a projector or two do not commute.
OutcomeDistribution exact_joint_distribution(const StateVector &psi, std::span<const Operator> detectors,
                                             const Tolerances &tol = {});

struct SamplerConfig {
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t n_trials = 0;
    std::size_t shards = 1;  // worker threads; counts never depend on it
};

/// Inverse-CDF draws; draw t uses the counter generator at index t.
OutcomeDistribution sample(const OutcomeDistribution &exact, const SamplerConfig &cfg);

OutcomeDistribution sample(const StateVector &psi, std::span<const Operator> detectors, const SamplerConfig &cfg,
                           const Tolerances &tol = {});

/// 1/2 sum |p - q| with sampled probabilities count / n.
double total_variation(const OutcomeDistribution &a, const OutcomeDistribution &b);

struct InferenceRow {
    std::string detector;
    std::string property;
    double p_detector = 0.0;
    double p_property = 0.0;
    double residual = 0.0;  // ||S psi - R psi|| / ||psi||
    bool inference = false; // residual <= abs_tol
};

std::vector<InferenceRow> detection_inference_table(const StateVector &psi, const ProblemInstance &problem,
                                                    const Tolerances &tol = {});

}  // namespace qdetect
