#include "qdetect/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qdetect/counter_rng.hpp"
#include "qdetect/scenario.hpp"

namespace qdetect {

double OutcomeDistribution::total_probability() const {
    double total = 0.0;
    for (const auto &o : outcomes) {
        total += o.probability;
    }
    return total;
}

const Outcome &OutcomeDistribution::at(const std::vector<int> &bits) const {
    for (const auto &o : outcomes) {
        if (o.bits == bits) {
            return o;
        }
    }
    throw std::out_of_range("no such outcome");
}

std::string to_string(OutcomeDistribution::Provenance p) {
    return p == OutcomeDistribution::Provenance::exact ? "exact" : "sampled";
}

std::vector<int> outcome_bits(std::size_t index, std::size_t k) {
    std::vector<int> bits(k);
    for (std::size_t i = 0; i < k; ++i) {
        bits[i] = 1 - static_cast<int>((index >> (k - 1 - i)) & 1u);
    }
    return bits;
}

OutcomeDistribution exact_joint_distribution(const StateVector &psi, std::span<const Operator> detectors,
                                             const Tolerances &tol) {
    if (detectors.empty() || detectors.size() > 16) {
        throw ContractError("exact_joint_distribution: need between 1 and 16 detectors");
    }
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (detectors[i].dim() != psi.dim()) {
            throw ContractError("exact_joint_distribution: detector " + std::to_string(i) +
                                " does not match the state dimension");
        }
        if (!is_projector(detectors[i], tol.abs_tol)) {
            throw ContractError("exact_joint_distribution: detector " + std::to_string(i) + " is not a projector");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double c = commutator(detectors[j], detectors[i]).frobenius_norm();
            if (c > tol.abs_tol) {
                throw ContractError("exact_joint_distribution: detectors " + std::to_string(j) + " and " +
                                    std::to_string(i) + " do not commute (" + std::to_string(c) + ")");
            }
        }
    }
    const auto unit = normalize_for_probability(psi, tol);
    const std::size_t k = detectors.size();
    OutcomeDistribution out;
    for (std::size_t o = 0; o < (std::size_t{1} << k); ++o) {
        const auto bits = outcome_bits(o, k);
        StateVector v = unit;
        for (std::size_t i = 0; i < k; ++i) {
            const auto pv = detectors[i] * v;
            v = bits[i] == 1 ? pv : v - pv;
        }
        out.outcomes.push_back({bits, v.norm_squared(), 0});
    }
    return out;
}

OutcomeDistribution sample(const OutcomeDistribution &exact, const SamplerConfig &cfg) {
    std::vector<double> cdf;
    double acc = 0.0;
    std::size_t last_live = 0;
    for (std::size_t i = 0; i < exact.outcomes.size(); ++i) {
        acc += exact.outcomes[i].probability;
        cdf.push_back(acc);
        if (exact.outcomes[i].probability > 0.0) {
            last_live = i;
        }
    }
    const rng::CounterRng gen(cfg.seed);
    const std::size_t shards = std::max<std::size_t>(1, cfg.shards);
    std::vector<std::vector<std::uint64_t>> partial(shards, std::vector<std::uint64_t>(cdf.size(), 0));
    auto run = [&](std::size_t shard) {
        const std::uint64_t begin = cfg.n_trials * shard / shards;
        const std::uint64_t end = cfg.n_trials * (shard + 1) / shards;
        auto &counts = partial[shard];
        for (std::uint64_t t = begin; t < end; ++t) {
            const double u = gen.uniform_at(t) * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const std::size_t idx = it == cdf.end() ? last_live : static_cast<std::size_t>(it - cdf.begin());
            ++counts[idx];
        }
    };
    if (shards == 1) {
        run(0);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t s = 0; s < shards; ++s) {
            workers.emplace_back(run, s);
        }
        for (auto &w : workers) {
            w.join();
        }
    }
    OutcomeDistribution out;
    out.provenance = OutcomeDistribution::Provenance::sampled;
    out.n_trials = cfg.n_trials;
    out.seed = cfg.seed;
    out.generator_id = rng::kGeneratorId;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        std::uint64_t c = 0;
        for (const auto &p : partial) {
            c += p[i];
        }
        const double prob = cfg.n_trials == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(cfg.n_trials);
        out.outcomes.push_back({exact.outcomes[i].bits, prob, c});
    }
    return out;
}

OutcomeDistribution sample(const StateVector &psi, std::span<const Operator> detectors, const SamplerConfig &cfg,
                           const Tolerances &tol) {
    return sample(exact_joint_distribution(psi, detectors, tol), cfg);
}

double total_variation(const OutcomeDistribution &a, const OutcomeDistribution &b) {
    if (a.outcomes.size() != b.outcomes.size()) {
        throw ContractError("total_variation: distributions have different outcome sets");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        total += std::abs(a.outcomes[i].probability - b.outcomes[i].probability);
    }
    return 0.5 * total;
}

std::vector<InferenceRow> detection_inference_table(const StateVector &psi, const ProblemInstance &problem,
                                                    const Tolerances &tol) {
    const double norm = psi.norm();
    if (norm <= tol.abs_tol) {
        throw ContractError("detection_inference_table: state norm is not above abs_tol");
    }
    const double n2 = norm * norm;
    std::vector<InferenceRow> rows;
    for (const auto &p : problem.pairs) {
        const auto s = p.lifted_detector(problem.space) * psi;
        const auto r = p.lifted_property(problem.space) * psi;
        InferenceRow row;
        row.detector = p.detector_name;
        row.property = p.property_name;
        row.p_detector = s.norm_squared() / n2;
        row.p_property = r.norm_squared() / n2;
        row.residual = (s - r).norm() / norm;
        row.inference = row.residual <= tol.abs_tol;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qdetect
