#include "qdetect/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

namespace qdetect {

namespace {

struct ChannelAnalysis {
    std::vector<StateVector> phi;  // per spin slot
    std::vector<bool> present;
    double scale = 0.0;            // ||psi||
    std::vector<StateVector> k_basis;
};

ChannelAnalysis analyse(const StateVector &psi, const CompositeSpace &space, const Tolerances &tol) {
    if (psi.dim() != space.dim() || space.dim() == 0) {
        throw ContractError("solver: state dimension does not match the composite space");
    }
    ChannelAnalysis a;
    a.scale = psi.norm();
    if (a.scale <= tol.abs_tol) {
        throw ContractError("solver: state norm is not above abs_tol");
    }
    a.phi = spin_components(psi, space);
    std::vector<StateVector> span;
    for (const auto &p : a.phi) {
        const bool here = p.norm() > tol.abs_tol * a.scale;
        a.present.push_back(here);
        if (here) {
            span.push_back(p);
        }
    }
    auto all = gram_schmidt(span, tol).basis;
    const std::size_t base = all.size();
    for (std::size_t i = 0; i < space.spatial_dim; ++i) {
        all.push_back(StateVector::basis(space.spatial_dim, i, Space::spatial));
    }
    auto gs = gram_schmidt(all, tol);
    for (std::size_t k = 0; k < gs.basis.size(); ++k) {
        if (gs.kept[k] >= base) {
            a.k_basis.push_back(gs.basis[k]);
        }
    }
    return a;
}

struct Infeasibility {
    std::size_t fixed_slot;
    std::size_t annihilated_slot;
    double overlap;
};

struct Derived {
    Operator property;
    std::size_t fixed_rank;
    std::vector<StateVector> completion;
    double overlap;
};

std::vector<StateVector> completion_vectors(const ChannelAnalysis &a, std::size_t fixed_rank,
                                            const CompletionPolicy &policy, const Tolerances &tol) {
    const auto &k = a.k_basis;
    const std::size_t f = k.size();
    std::vector<StateVector> out;
    switch (policy.kind) {
        case CompletionPolicy::Kind::none:
            break;
        case CompletionPolicy::Kind::index_order: {
            if (policy.target_rank < fixed_rank || policy.target_rank > fixed_rank + f) {
                throw ContractError("derive_property: target rank " + std::to_string(policy.target_rank) +
                                    " outside the attainable range [" + std::to_string(fixed_rank) + ", " +
                                    std::to_string(fixed_rank + f) + "]");
            }
            out.assign(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(policy.target_rank - fixed_rank));
            break;
        }
        case CompletionPolicy::Kind::mixing: {
            if (f == 0) {
                break;
            }
            if (f == 1) {
                out.push_back(k[0]);
                break;
            }
            StateVector rest = k[1];
            for (std::size_t j = 2; j < f; ++j) {
                rest += k[j];
            }
            rest *= 1.0 / rest.norm();
            const double angle = std::numbers::pi / 4.0 + static_cast<double>(policy.slot) * std::numbers::pi / 3.0;
            out.push_back(Complex(std::cos(angle)) * k[0] + Complex(std::sin(angle)) * rest);
            break;
        }
        case CompletionPolicy::Kind::reference: {
            if (!policy.reference || f == 0) {
                if (!policy.reference) {
                    throw ContractError("derive_property: reference completion without a reference operator");
                }
                break;
            }
            const auto &r = *policy.reference;
            if (r.dim() != k[0].dim()) {
                throw ContractError("derive_property: reference operator has the wrong dimension");
            }
            const long want = std::lround(r.trace().real()) - static_cast<long>(fixed_rank);
            const std::size_t take = static_cast<std::size_t>(std::clamp<long>(want, 0, static_cast<long>(f)));
            if (take == 0) {
                break;
            }
            Operator m(f, Space::auxiliary);
            std::vector<StateVector> rk;
            for (const auto &kj : k) {
                rk.push_back(r * kj);
            }
            for (std::size_t i = 0; i < f; ++i) {
                for (std::size_t j = 0; j < f; ++j) {
                    m(i, j) = inner(k[i], rk[j]);
                }
            }
            // Hermitian part guards against a slightly non-Hermitian reference.
            m = 0.5 * (m + adjoint(m));
            const auto eig = hermitian_eig(m, tol);
            for (std::size_t t = 0; t < take; ++t) {
                const auto &v = eig.vectors[f - 1 - t];
                StateVector u(k[0].dim(), Space::spatial);
                for (std::size_t j = 0; j < f; ++j) {
                    u += v[j] * k[j];
                }
                out.push_back(std::move(u));
            }
            break;
        }
    }
    return out;
}

std::variant<Derived, Infeasibility> derive(const ChannelAnalysis &a, const SpinSubset &subset,
                                            const CompletionPolicy &policy, const Tolerances &tol) {
    std::vector<StateVector> fixed;
    std::vector<StateVector> annihilated;
    std::vector<std::size_t> fixed_slots;
    std::vector<std::size_t> annihilated_slots;
    for (std::size_t m = 0; m < a.phi.size(); ++m) {
        if (!a.present[m]) {
            continue;
        }
        if (subset.contains(m)) {
            fixed.push_back(a.phi[m]);
            fixed_slots.push_back(m);
        } else {
            annihilated.push_back(a.phi[m]);
            annihilated_slots.push_back(m);
        }
    }
    const double overlap = max_principal_cosine(fixed, annihilated, tol);
    if (overlap > kFeasibilityCosine) {
        Infeasibility bad{fixed_slots.front(), annihilated_slots.front(), overlap};
        double worst = -1.0;
        for (std::size_t i = 0; i < fixed.size(); ++i) {
            for (std::size_t j = 0; j < annihilated.size(); ++j) {
                const double c = std::abs(inner(fixed[i], annihilated[j])) / (fixed[i].norm() * annihilated[j].norm());
                if (c > worst) {
                    worst = c;
                    bad.fixed_slot = fixed_slots[i];
                    bad.annihilated_slot = annihilated_slots[j];
                }
            }
        }
        return bad;
    }
    auto basis = gram_schmidt(fixed, tol).basis;
    const std::size_t fixed_rank = basis.size();
    auto completion = completion_vectors(a, fixed_rank, policy, tol);
    basis.insert(basis.end(), completion.begin(), completion.end());
    const std::size_t n = a.phi.front().dim();
    Operator r(n, Space::spatial);
    for (const auto &v : basis) {
        r += Operator::outer(v, v);
    }
    return Derived{std::move(r), fixed_rank, std::move(completion), overlap};
}

double detection_residual(const ChannelAnalysis &a, const SpinSubset &subset, const Operator &r) {
    double total = 0.0;
    for (std::size_t m = 0; m < a.phi.size(); ++m) {
        StateVector diff = r * a.phi[m];
        if (subset.contains(m)) {
            diff -= a.phi[m];
        }
        total += diff.norm_squared();
    }
    return std::sqrt(total) / a.scale;
}

double completion_orthogonality(const ChannelAnalysis &a, const std::vector<StateVector> &completion) {
    double worst = 0.0;
    for (const auto &c : completion) {
        for (std::size_t m = 0; m < a.phi.size(); ++m) {
            if (a.present[m]) {
                worst = std::max(worst, std::abs(inner(c, a.phi[m])) / a.phi[m].norm());
            }
        }
    }
    return worst;
}

std::string describe_slots(const SpinSystem &sys, std::size_t slot) {
    return "m=" + sys.label(slot);
}

[[noreturn]] void throw_infeasible(const SpinSubset &subset, const Infeasibility &bad) {
    const auto sys = SpinSystem::with_dim(subset.dim());
    std::ostringstream msg;
    msg << "subset " << subset.to_string(sys) << " is infeasible: channel " << describe_slots(sys, bad.fixed_slot)
        << " must be kept and channel " << describe_slots(sys, bad.annihilated_slot)
        << " removed, but their spans overlap (cos = " << bad.overlap << ")";
    throw InfeasibleError(subset.mask(), bad.fixed_slot, bad.annihilated_slot, bad.overlap, msg.str());
}

SolverSolution package(const ChannelAnalysis &a, const SpinSubset &subset, const CompletionPolicy &policy,
                       Derived d, const Tolerances &tol) {
    SolverSolution s{std::move(d.property), d.fixed_rank, a.k_basis.size(), std::move(d.completion), {}};
    auto &cert = s.certificate;
    cert.completion = policy.describe();
    cert.rank = s.fixed_rank + s.completion.size();
    cert.freedom_dim = s.freedom_dim;
    cert.detection_residual = detection_residual(a, subset, s.property);
    const auto cls = classify(s.property, tol.abs_tol);
    cert.projector_defect = std::max(cls.hermitian_defect, cls.idempotency_defect);
    cert.completion_orthogonality = completion_orthogonality(a, s.completion);
    cert.feasibility_overlap = d.overlap;
    if (cert.detection_residual > tol.abs_tol || cert.projector_defect > tol.abs_tol ||
        cert.completion_orthogonality > tol.abs_tol) {
        throw std::runtime_error("derive_property: certificate check failed (residual " +
                                 std::to_string(cert.detection_residual) + ")");
    }
    return s;
}

std::uint32_t full_mask(std::size_t dim) {
    return dim == 32 ? ~0u : ((1u << dim) - 1u);
}

}  // namespace

std::string CompletionPolicy::describe() const {
    switch (kind) {
        case Kind::none:
            return "none";
        case Kind::index_order:
            return "index-order(rank=" + std::to_string(target_rank) + ")";
        case Kind::mixing:
            return "mixing(slot=" + std::to_string(slot) + ")";
        case Kind::reference:
            return "reference";
    }
    return "unknown";
}

InfeasibleError::InfeasibleError(std::uint32_t mask, std::size_t fixed_slot, std::size_t annihilated_slot,
                                 double overlap, const std::string &message)
    : std::runtime_error(message), mask_(mask), fixed_(fixed_slot), annihilated_(annihilated_slot), overlap_(overlap) {
}

SolverSolution derive_property(const DetectionConstraint &c, const Tolerances &tol) {
    tol.validate();
    if (c.subset.dim() != c.space.spin_dim) {
        throw ContractError("derive_property: subset dimension does not match the spin factor");
    }
    const auto a = analyse(c.psi, c.space, tol);
    auto result = derive(a, c.subset, c.completion, tol);
    if (const auto *bad = std::get_if<Infeasibility>(&result)) {
        throw_infeasible(c.subset, *bad);
    }
    return package(a, c.subset, c.completion, std::get<Derived>(std::move(result)), tol);
}

TripleSolution solve_triple(const StateVector &psi, const CompositeSpace &space,
                            const std::array<SpinSubset, 3> &subsets, const TripleOptions &options,
                            const Tolerances &tol) {
    tol.validate();
    const auto a = analyse(psi, space, tol);
    const auto sys = SpinSystem::with_dim(space.spin_dim);
    std::vector<SolverSolution> sols;
    for (std::size_t k = 0; k < 3; ++k) {
        if (subsets[k].dim() != space.spin_dim) {
            throw ContractError("solve_triple: subset dimension does not match the spin factor");
        }
        const auto policy = options.completion[k].value_or(CompletionPolicy::mixing(k));
        auto result = derive(a, subsets[k], policy, tol);
        if (const auto *bad = std::get_if<Infeasibility>(&result)) {
            throw_infeasible(subsets[k], *bad);
        }
        sols.push_back(package(a, subsets[k], policy, std::get<Derived>(std::move(result)), tol));
        sols.back().certificate.subject = options.property_names[k];
    }
    for (std::size_t k = 0; k < 3; ++k) {
        auto &norms = sols[k].certificate.commutator_norms;
        for (std::size_t o = 0; o < 3; ++o) {
            if (o != k) {
                norms[options.property_names[o]] = commutator(sols[k].property, sols[o].property).frobenius_norm();
            }
        }
        if (options.reference_property) {
            norms[options.reference_property->first] =
                commutator(sols[k].property, options.reference_property->second).frobenius_norm();
        }
    }
    ProblemInstance problem{
        "solver",
        space,
        sys,
        psi,
        {PropertyDetectorPair{options.property_names[0], options.detector_names[0], sols[0].property, subsets[0],
                              subset_projector(sys, subsets[0])},
         PropertyDetectorPair{options.property_names[1], options.detector_names[1], sols[1].property, subsets[1],
                              subset_projector(sys, subsets[1])},
         PropertyDetectorPair{options.property_names[2], options.detector_names[2], sols[2].property, subsets[2],
                              subset_projector(sys, subsets[2])}},
    };
    auto report = evaluate_conditions(problem, tol, "solver");
    return {{std::move(sols[0]), std::move(sols[1]), std::move(sols[2])}, std::move(problem), std::move(report)};
}

EnumerationStats enumerate_solutions(const StateVector &psi, const CompositeSpace &space,
                                     const EnumerationOptions &options, const TripleVisitor &visit,
                                     const Tolerances &tol) {
    tol.validate();
    if (space.spin_dim > 16) {
        throw ContractError("enumerate_solutions: spin dimension must be at most 16");
    }
    const auto a = analyse(psi, space, tol);
    const std::size_t n = space.spin_dim;
    const std::uint32_t full = full_mask(n);
    std::uint32_t present = 0;
    for (std::size_t m = 0; m < n; ++m) {
        if (a.present[m]) {
            present |= 1u << m;
        }
    }
    const std::uint32_t lowest = present & (~present + 1u);

    std::vector<std::uint32_t> candidates;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const std::uint32_t live = mask & present;
        if (live == 0 || live == present) {
            continue;  // fixes nothing or everything: C.10 fails
        }
        if (options.absent_channel_pruning && live != mask) {
            continue;
        }
        if (options.complement_pruning && (mask & lowest) == 0) {
            continue;
        }
        candidates.push_back(mask);
    }

    EnumerationStats stats;
    stats.candidate_subsets = candidates.size();

    struct Usable {
        std::uint32_t mask;
        Operator property;
        Operator detector;
        double residual;
        double c10;
    };
    const auto sys = SpinSystem::with_dim(n);
    std::array<std::vector<Usable>, 3> usable;
    for (std::size_t slot = 0; slot < 3; ++slot) {
        for (std::uint32_t mask : candidates) {
            const SpinSubset subset(mask, n);
            auto result = derive(a, subset, CompletionPolicy::mixing(slot), tol);
            auto *d = std::get_if<Derived>(&result);
            if (d == nullptr) {
                continue;
            }
            double in = 0.0;
            double out = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const auto rphi = d->property * a.phi[m];
                in += rphi.norm_squared();
                out += (a.phi[m] - rphi).norm_squared();
            }
            const double c10 = std::min(std::sqrt(in), std::sqrt(out)) / a.scale;
            if (!(c10 > tol.audit_warn_tol)) {
                continue;
            }
            const double residual = detection_residual(a, subset, d->property);
            if (residual > tol.abs_tol) {
                continue;
            }
            usable[slot].push_back({mask, std::move(d->property), subset_projector(sys, subset), residual, c10});
        }
        stats.usable_subsets[slot] = usable[slot].size();
    }

    // Pairwise commutator norms: property (C.1-C.3) and detector (C.7-C.9).
    const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    std::array<std::vector<double>, 3> prop_comm;
    std::array<std::vector<double>, 3> det_comm;
    for (std::size_t p = 0; p < 3; ++p) {
        const auto [x, y] = pairs[p];
        prop_comm[p].resize(usable[x].size() * usable[y].size());
        det_comm[p].resize(prop_comm[p].size());
        for (std::size_t i = 0; i < usable[x].size(); ++i) {
            for (std::size_t j = 0; j < usable[y].size(); ++j) {
                const std::size_t at = i * usable[y].size() + j;
                prop_comm[p][at] = commutator(usable[x][i].property, usable[y][j].property).frobenius_norm();
                det_comm[p][at] = commutator(usable[x][i].detector, usable[y][j].detector).frobenius_norm() *
                                  std::sqrt(static_cast<double>(space.spatial_dim));
            }
        }
    }

    const auto &u0 = usable[0];
    const auto &u1 = usable[1];
    const auto &u2 = usable[2];
    for (std::size_t i = 0; i < u0.size(); ++i) {
        for (std::size_t j = 0; j < u1.size(); ++j) {
            const std::size_t ij = i * u1.size() + j;
            for (std::size_t k = 0; k < u2.size(); ++k) {
                ++stats.triples_tested;
                const std::size_t ik = i * u2.size() + k;
                const std::size_t jk = j * u2.size() + k;
                EnumeratedTriple t;
                t.masks = {u0[i].mask, u1[j].mask, u2[k].mask};
                t.measured = {prop_comm[0][ij], prop_comm[1][ik], prop_comm[2][jk],
                              u0[i].residual,    u1[j].residual,    u2[k].residual,
                              det_comm[0][ij],   det_comm[1][ik],   det_comm[2][jk],
                              std::min({u0[i].c10, u1[j].c10, u2[k].c10})};
                if (options.require_incompatibility &&
                    !(t.measured[0] > tol.audit_warn_tol && t.measured[1] > tol.audit_warn_tol &&
                      t.measured[2] > tol.audit_warn_tol)) {
                    continue;
                }
                if (t.measured[6] > tol.abs_tol || t.measured[7] > tol.abs_tol || t.measured[8] > tol.abs_tol) {
                    continue;
                }
                ++stats.solutions;
                visit(t);
            }
        }
    }
    return stats;
}

std::vector<EnumeratedTriple> enumerate_solutions(const StateVector &psi, const CompositeSpace &space,
                                                  const EnumerationOptions &options, const Tolerances &tol) {
    std::vector<EnumeratedTriple> out;
    enumerate_solutions(psi, space, options, [&](const EnumeratedTriple &t) { out.push_back(t); }, tol);
    return out;
}

std::array<std::uint32_t, 3> canonical_masks(const std::array<std::uint32_t, 3> &masks, const StateVector &psi,
                                             const CompositeSpace &space, const EnumerationOptions &options,
                                             const Tolerances &tol) {
    const auto a = analyse(psi, space, tol);
    std::uint32_t present = 0;
    for (std::size_t m = 0; m < space.spin_dim; ++m) {
        if (a.present[m]) {
            present |= 1u << m;
        }
    }
    const std::uint32_t lowest = present & (~present + 1u);
    const std::uint32_t universe = options.absent_channel_pruning ? present : full_mask(space.spin_dim);
    std::array<std::uint32_t, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) {
        std::uint32_t m = masks[k] & universe;
        if (options.complement_pruning && (m & lowest) == 0) {
            m = universe & ~m;
        }
        out[k] = m;
    }
    return out;
}

ConditionReport report_for(const EnumeratedTriple &triple, const StateVector &psi, const CompositeSpace &space,
                           const Tolerances &tol) {
    const std::array<SpinSubset, 3> subsets{SpinSubset(triple.masks[0], space.spin_dim),
                                            SpinSubset(triple.masks[1], space.spin_dim),
                                            SpinSubset(triple.masks[2], space.spin_dim)};
    return solve_triple(psi, space, subsets, {}, tol).report;
}

StateVector repaired_state(const Tolerances &tol) {
    return run_pipeline(Variant::repaired, {}, tol).final_state().vector;
}

PaperScenario repair_scenario(const PaperScenario &literal, const Tolerances &tol) {
    tol.validate();
    const auto psi = repaired_state(tol);
    const auto space = literal.problem.space;
    const auto &pairs = literal.problem.pairs;
    const auto g_ref = build_G_literal(tol).lowdin_projector;
    const auto &printed_l = pairs[2].property;

    std::vector<std::string> notes = literal.notes;
    notes.push_back("state: prepared state with Lowdin-orthonormalised channels (norm^2 100/128)");

    auto g = derive_property({psi, space, pairs[1].subset, CompletionPolicy::reference_projector(g_ref)}, tol);
    g.certificate.subject = pairs[1].property_name;

    SolverSolution l{printed_l, 0, 0, {}, {}};
    const auto kept = check_detector(pairs[2].lifted_detector(space), lift_spatial(printed_l, space), psi, tol);
    if (kept.verdict == Verdict::pass) {
        l.certificate.completion = "printed";
        l.certificate.detection_residual = kept.residual;
        const auto cls = classify(printed_l, tol.abs_tol);
        l.certificate.projector_defect = std::max(cls.hermitian_defect, cls.idempotency_defect);
        l.certificate.rank = static_cast<std::size_t>(std::lround(printed_l.trace().real()));
        notes.push_back("L_I: printed projector kept (detects on the repaired state)");
    } else {
        l = derive_property({psi, space, pairs[2].subset, CompletionPolicy::reference_projector(printed_l)}, tol);
        std::ostringstream note;
        note << "L_I: printed projector fails detection on the repaired state (residual " << kept.residual
             << "); derived from W with the printed L_I as reference, Frobenius distance "
             << (l.property - printed_l).frobenius_norm();
        notes.push_back(note.str());
    }
    l.certificate.subject = pairs[2].property_name;

    const auto &e = pairs[0].property;
    for (auto *sol : {&g, &l}) {
        auto &norms = sol->certificate.commutator_norms;
        norms[pairs[0].property_name] = commutator(sol->property, e).frobenius_norm();
    }
    g.certificate.commutator_norms[pairs[2].property_name] = commutator(g.property, l.property).frobenius_norm();
    l.certificate.commutator_norms[pairs[1].property_name] = commutator(l.property, g.property).frobenius_norm();

    ProblemInstance problem{
        "repaired",
        space,
        literal.problem.spin,
        psi,
        {pairs[0],
         PropertyDetectorPair{pairs[1].property_name, pairs[1].detector_name, g.property, pairs[1].subset,
                              pairs[1].detector},
         PropertyDetectorPair{pairs[2].property_name, pairs[2].detector_name, l.property, pairs[2].subset,
                              pairs[2].detector}},
    };
    return PaperScenario{Variant::repaired, std::move(problem), {g.certificate, l.certificate}, std::move(notes)};
}

}  // namespace qdetect
