#include "qdetect/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdetect/counter_rng.hpp"

namespace qdetect {

namespace {

Verdict judge(double measured, double threshold, Relation relation) {
    const bool ok = relation == Relation::at_most ? measured <= threshold : measured > threshold;
    return ok ? Verdict::pass : Verdict::fail;
}

ConditionEntry make_entry(std::string id, std::string description, double measured, double threshold,
                          Relation relation) {
    ConditionEntry e;
    e.id = std::move(id);
    e.description = std::move(description);
    e.measured = measured;
    e.threshold = threshold;
    e.relation = relation;
    e.verdict = judge(measured, threshold, relation);
    return e;
}

// Structural findings never fail; a deviation is informational.
ConditionEntry finding(std::string id, std::string description, double measured, double threshold) {
    auto e = make_entry(std::move(id), std::move(description), measured, threshold, Relation::at_most);
    if (e.verdict == Verdict::fail) {
        e.verdict = Verdict::informational;
    }
    return e;
}

double projector_defect(const Operator &a, double tol) {
    const auto c = classify(a, tol);
    return std::max(c.hermitian_defect, c.idempotency_defect);
}

void require_composite(const Operator &a, const CompositeSpace &space, const char *what) {
    if (a.dim() != space.dim()) {
        throw ContractError(std::string(what) + ": operator dimension does not match the composite space");
    }
}

double gram_deviation(std::span<const StateVector> vs) {
    const auto g = gram_matrix(vs);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = 0; j < g.dim(); ++j) {
            worst = std::max(worst, std::abs(g(i, j) - Complex(i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double cosine(const StateVector &a, const StateVector &b) {
    return std::abs(inner(a, b)) / (a.norm() * b.norm());
}

template <std::size_t N>
std::vector<StateVector> vectors_of(const std::array<PrintedVector, N> &printed) {
    std::vector<StateVector> out;
    for (const auto &p : printed) {
        out.push_back(p.vector());
    }
    return out;
}

}  // namespace

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        case Verdict::informational:
            return "informational";
    }
    return "unknown";
}

std::string to_string(Relation relation) {
    return relation == Relation::at_most ? "<=" : ">";
}

const ConditionEntry *ConditionReport::find(const std::string &id) const {
    for (const auto &e : entries) {
        if (e.id == id) {
            return &e;
        }
    }
    return nullptr;
}

const ConditionEntry &ConditionReport::at(const std::string &id) const {
    if (const auto *e = find(id)) {
        return *e;
    }
    throw std::out_of_range("no report entry '" + id + "'");
}

bool ConditionReport::passes(const std::string &prefix) const {
    return std::none_of(entries.begin(), entries.end(), [&](const ConditionEntry &e) {
        return e.id.starts_with(prefix) && e.verdict == Verdict::fail;
    });
}

std::vector<std::string> ConditionReport::failing_ids() const {
    std::vector<std::string> out;
    for (const auto &e : entries) {
        if (e.verdict == Verdict::fail) {
            out.push_back(e.id);
        }
    }
    return out;
}

DetectorCheck check_detector(const Operator &s, const Operator &r, const StateVector &psi, const Tolerances &tol) {
    if (s.dim() != r.dim() || s.dim() != psi.dim()) {
        throw ContractError("check_detector: dimension mismatch");
    }
    const double norm = psi.norm();
    if (norm <= tol.abs_tol) {
        throw ContractError("check_detector: state norm is not above abs_tol");
    }
    DetectorCheck out;
    out.commutator_norm = commutator(s, r).frobenius_norm();
    out.residual = (s * psi - r * psi).norm() / norm;
    out.verdict =
        out.commutator_norm <= tol.abs_tol && out.residual <= tol.abs_tol ? Verdict::pass : Verdict::fail;
    return out;
}

Operator random_spatial_hermitian(std::size_t dim, std::uint64_t seed, std::size_t index) {
    rng::CounterRng gen(seed, index);
    Operator f(dim, Space::spatial);
    for (std::size_t i = 0; i < dim; ++i) {
        f(i, i) = 2.0 * gen.next_uniform() - 1.0;
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double re = 2.0 * gen.next_uniform() - 1.0;
            const double im = 2.0 * gen.next_uniform() - 1.0;
            f(i, j) = Complex(re, im);
            f(j, i) = Complex(re, -im);
        }
    }
    return f;
}

FCommutationCheck check_F_commutation(const Operator &s, const CompositeSpace &space, const Tolerances &tol,
                                      std::uint64_t seed, std::size_t samples) {
    require_composite(s, space, "check_F_commutation");
    FCommutationCheck out;
    if (extract_spin_factor(s, space, tol.abs_tol)) {
        out.structural = true;
        return out;
    }
    out.samples = samples;
    for (std::size_t k = 0; k < samples; ++k) {
        const auto f = lift_spatial(random_spatial_hermitian(space.spatial_dim, seed, k), space);
        out.max_commutator_norm = std::max(out.max_commutator_norm, commutator(s, f).frobenius_norm());
    }
    out.verdict = out.max_commutator_norm <= tol.abs_tol ? Verdict::pass : Verdict::fail;
    return out;
}

ConditionReport evaluate_conditions(const ProblemInstance &problem, const Tolerances &tol,
                                    const std::string &variant) {
    tol.validate();
    const auto &space = problem.space;
    const auto &psi = problem.state;
    if (psi.dim() != space.dim()) {
        throw ContractError("evaluate_conditions: state dimension does not match the composite space");
    }
    for (const auto &p : problem.pairs) {
        if (p.property.dim() != space.spatial_dim || p.detector.dim() != space.spin_dim) {
            throw ContractError("evaluate_conditions: pair " + p.property_name + "/" + p.detector_name +
                                " does not match the composite space");
        }
    }
    const double norm = psi.norm();
    if (norm <= tol.abs_tol) {
        throw ContractError("evaluate_conditions: state norm is not above abs_tol");
    }

    ConditionReport report;
    report.variant = variant.empty() ? problem.label : variant;
    report.tolerances = tol;

    const auto &[p0, p1, p2] = problem.pairs;
    std::array<Operator, 3> props{p0.lifted_property(space), p1.lifted_property(space), p2.lifted_property(space)};
    std::array<Operator, 3> dets{p0.lifted_detector(space), p1.lifted_detector(space), p2.lifted_detector(space)};

    for (const auto &p : problem.pairs) {
        report.entries.push_back(make_entry("PROJ." + p.property_name, p.property_name + "_I is an orthogonal projector",
                                            projector_defect(p.property, tol.abs_tol), tol.abs_tol,
                                            Relation::at_most));
    }
    for (const auto &p : problem.pairs) {
        report.entries.push_back(make_entry("PROJ." + p.detector_name, p.detector_name + "_II is an orthogonal projector",
                                            projector_defect(p.detector, tol.abs_tol), tol.abs_tol,
                                            Relation::at_most));
    }

    // C.1-C.3: pairwise incompatibility of the properties.
    const std::array<std::pair<int, int>, 3> pairs_idx{{{0, 1}, {0, 2}, {1, 2}}};
    for (std::size_t c = 0; c < 3; ++c) {
        const auto [a, b] = pairs_idx[c];
        const auto &pa = problem.pairs[a];
        const auto &pb = problem.pairs[b];
        const double n = commutator(pa.property, pb.property).frobenius_norm();
        report.entries.push_back(make_entry("C." + std::to_string(c + 1),
                                            "[" + pa.property_name + "," + pb.property_name + "] != 0", n,
                                            tol.audit_warn_tol, Relation::greater_than));
    }
    // C.4-C.6: each detector detects its property on the state.
    std::array<DetectorCheck, 3> checks;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto &p = problem.pairs[k];
        checks[k] = check_detector(dets[k], props[k], psi, tol);
        auto e = make_entry("C." + std::to_string(k + 4),
                            "[" + p.detector_name + "," + p.property_name + "] = 0 and " + p.detector_name +
                                " psi = " + p.property_name + " psi",
                            std::max(checks[k].commutator_norm, checks[k].residual), tol.abs_tol, Relation::at_most);
        e.components["commutator_norm"] = checks[k].commutator_norm;
        e.components["detection_residual"] = checks[k].residual;
        report.entries.push_back(std::move(e));
    }
    // C.7-C.9: detectors commute.
    for (std::size_t c = 0; c < 3; ++c) {
        const auto [a, b] = pairs_idx[c];
        const auto &pa = problem.pairs[a];
        const auto &pb = problem.pairs[b];
        const double n = commutator(dets[a], dets[b]).frobenius_norm();
        report.entries.push_back(make_entry("C." + std::to_string(c + 7),
                                            "[" + pa.detector_name + "," + pb.detector_name + "] = 0", n,
                                            tol.abs_tol, Relation::at_most));
    }
    // C.10: the state is neither inside nor orthogonal to any property.
    {
        double worst = std::numeric_limits<double>::infinity();
        std::map<std::string, double> parts;
        for (std::size_t k = 0; k < 3; ++k) {
            const auto rpsi = props[k] * psi;
            const double in = rpsi.norm() / norm;
            const double out = (psi - rpsi).norm() / norm;
            const auto &name = problem.pairs[k].property_name;
            parts["||" + name + " psi||/||psi||"] = in;
            parts["||psi - " + name + " psi||/||psi||"] = out;
            worst = std::min({worst, in, out});
        }
        auto e = make_entry("C.10", "psi != R psi != 0 for every property", worst, tol.audit_warn_tol,
                            Relation::greater_than);
        e.components = std::move(parts);
        report.entries.push_back(std::move(e));
    }
    // Per pair: (i) commutes with every F (x) 1, (ii) detects the property.
    for (std::size_t k = 0; k < 3; ++k) {
        const auto &p = problem.pairs[k];
        const auto f = check_F_commutation(dets[k], space, tol);
        auto ei = make_entry("D1.i[" + p.detector_name + "]", p.detector_name + " commutes with every F (x) 1",
                             f.max_commutator_norm, tol.abs_tol, Relation::at_most);
        ei.verdict = f.verdict;
        ei.components["structural"] = f.structural ? 1.0 : 0.0;
        ei.components["samples"] = static_cast<double>(f.samples);
        report.entries.push_back(std::move(ei));

        auto eii = make_entry("D1.ii[" + p.detector_name + ";" + p.property_name + "]",
                              p.detector_name + " detects " + p.property_name + " on psi",
                              std::max(checks[k].commutator_norm, checks[k].residual), tol.abs_tol,
                              Relation::at_most);
        eii.verdict = checks[k].verdict;
        eii.components["commutator_norm"] = checks[k].commutator_norm;
        eii.components["detection_residual"] = checks[k].residual;
        report.entries.push_back(std::move(eii));
    }
    return report;
}

ConditionReport structural_audit(const PaperScenario &s, const Tolerances &tol) {
    tol.validate();
    const double warn = tol.audit_warn_tol;
    const auto sys = SpinSystem::seven_halves();
    ConditionReport report;
    report.variant = to_string(s.variant);
    report.tolerances = tol;
    report.notes = s.notes;
    auto &out = report.entries;

    {
        std::vector<StateVector> basis;
        for (std::size_t i = 1; i <= kSpatialDim; ++i) {
            basis.push_back(spatial_basis(i));
        }
        out.push_back(finding("STRUCT.basis.gram", "psi1..psi10 are orthonormal", gram_deviation(basis), warn));
    }

    // Three printed vectors of G, verbatim and with psi3 in the third slot of psi^(1).
    const auto g = build_G_literal(tol);
    const auto g_verbatim = vectors_of(g.printed);
    const auto g_reading = vectors_of(g.psi3_reading);
    for (std::size_t n = 0; n < 3; ++n) {
        const auto id = "STRUCT.G.psi(" + std::to_string(n + 1) + ").norm";
        auto e = finding(id, "|norm^2 - 1| of printed " + g.printed[n].name,
                         std::abs(g_verbatim[n].norm_squared() - 1.0), warn);
        e.components["norm_squared"] = g_verbatim[n].norm_squared();
        out.push_back(std::move(e));
    }
    {
        auto e = finding("STRUCT.G.psi(1)[psi3].norm", "|norm^2 - 1| of psi^(1) with its third term read as psi3",
                         std::abs(g_reading[0].norm_squared() - 1.0), warn);
        e.components["norm_squared"] = g_reading[0].norm_squared();
        out.push_back(std::move(e));
    }
    for (const auto &[id, vs] : {std::pair{std::string("STRUCT.G.gram"), &g_verbatim},
                                 std::pair{std::string("STRUCT.G.gram[psi3]"), &g_reading}}) {
        auto e = finding(id, "max |Gram - I| of the three G vectors", gram_deviation(*vs), warn);
        const auto gm = gram_matrix(*vs);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                e.components["<" + std::to_string(i + 1) + "|" + std::to_string(j + 1) + ">"] = gm(i, j).real();
            }
        }
        out.push_back(std::move(e));
    }
    out.push_back(finding("STRUCT.G.projector", "dyad sum of the printed G vectors is a projector",
                          projector_defect(g.dyad_sum, tol.abs_tol), warn));

    const auto l = build_L(tol);
    out.push_back(finding("STRUCT.L.gram", "max |Gram - I| of the five L vectors", gram_deviation(vectors_of(l.printed)),
                          warn));
    out.push_back(finding("STRUCT.L.projector", "L_I is a projector", projector_defect(l.spatial, tol.abs_tol), warn));

    const auto e_proj = build_E();
    out.push_back(finding("STRUCT.E.projector", "E_I is a projector", projector_defect(e_proj.spatial, tol.abs_tol),
                          warn));
    const auto det = build_detectors();
    for (std::size_t k = 0; k < 3; ++k) {
        static const char *names[] = {"T", "Y", "W"};
        out.push_back(finding(std::string("STRUCT.") + names[k] + ".projector",
                              std::string(names[k]) + "_II is a projector",
                              projector_defect(det.spin[k], tol.abs_tol), warn));
    }

    // The two sub-vectors summed inside the |-1/2> and |-7/2> terms of the state.
    {
        const auto sub = minus_half_subvectors();
        const auto a = sub[0].vector();
        const auto b = sub[1].vector();
        auto e = finding("STRUCT.Psi.minus_half.overlap", "cosine between the two printed sub-vectors of the |-1/2> term",
                         cosine(a, b), warn);
        e.components["raw_inner_product"] = inner(a, b).real();
        out.push_back(std::move(e));
    }

    // Channels of this variant: norms and overlaps within each slit.
    const auto channels = channel_vectors(s.variant, 0, tol);
    std::vector<std::size_t> live;
    for (const auto &c : channels.channels) {
        if (!c.blocked) {
            live.push_back(c.spin_slot);
            out.push_back(finding("STRUCT.channel.norm[" + sys.label(c.spin_slot) + "]",
                                  "|norm - 1| of the slit-" + std::to_string(c.slit) + " channel for m = " +
                                      sys.label(c.spin_slot),
                                  std::abs(c.vector.norm() - 1.0), warn));
        }
    }
    double worst_channel = 0.0;
    for (std::size_t x = 0; x < live.size(); ++x) {
        for (std::size_t y = x + 1; y < live.size(); ++y) {
            const auto &ca = channels.channels[live[x]];
            const auto &cb = channels.channels[live[y]];
            const double ov = std::abs(inner(ca.vector, cb.vector));
            worst_channel = std::max(worst_channel, ov);
            if (ca.slit == cb.slit) {
                out.push_back(finding("STRUCT.channel.overlap[" + sys.label(ca.spin_slot) + "," +
                                          sys.label(cb.spin_slot) + "]",
                                      "|<channel " + sys.label(ca.spin_slot) + "|channel " + sys.label(cb.spin_slot) +
                                          ">|",
                                      ov, warn));
            }
        }
    }
    out.push_back(finding("STRUCT.channel.gram", "largest overlap between distinct channels", worst_channel, warn));

    // Norm bookkeeping of the printed state against the |s> amplitudes.
    {
        const auto psi = build_Psi_literal().vector();
        const auto s_amp = printed_s_state().vector();
        double expected = 0.0;
        for (std::size_t m = 0; m < kSpinDim; ++m) {
            if (!(m == 1 || m == 5)) {
                expected += std::norm(s_amp[m]);
            }
        }
        auto e = finding("STRUCT.Psi.norm", "|norm^2 of the printed state - sum of unblocked |s> weights|",
                         std::abs(psi.norm_squared() - expected), warn);
        e.components["norm_squared"] = psi.norm_squared();
        e.components["expected"] = expected;
        out.push_back(std::move(e));
    }

    // Pipeline consistency.
    {
        const auto literal = run_pipeline(Variant::literal, {}, tol);
        out.push_back(finding("STRUCT.pipeline.reconstruction", "||literal pipeline output - printed state||",
                              literal.reconstruction_residual, warn));
        const auto mine = run_pipeline(s.variant, {}, tol);
        out.push_back(finding("STRUCT.pipeline.rank_one_filter",
                              "||(|Psi1><Psi1|) routed - Psi1|| for the printed rank-one filter",
                              mine.rank_one_filter_discrepancy, warn));

        StateVector mixed = spatial_basis(2) + spatial_basis(9);
        mixed *= 1.0 / std::sqrt(2.0);
        double seed_dev = 0.0;
        for (const auto &seed : {spatial_basis(7), mixed}) {
            const auto other = run_pipeline(s.variant, PipelineOptions{seed, 0}, tol);
            seed_dev = std::max(seed_dev, distance(other.final_state().vector, mine.final_state().vector));
        }
        out.push_back(finding("STRUCT.pipeline.seed_independence", "output change under a different spatial seed",
                              seed_dev, warn));
        const auto alt = run_pipeline(s.variant, PipelineOptions{spatial_basis(1), 1}, tol);
        out.push_back(finding("STRUCT.pipeline.blocked_choice", "output change under another blocked-channel choice",
                              distance(alt.final_state().vector, mine.final_state().vector), warn));

        double iso = 0.0;
        const auto seed = spatial_basis(1);
        for (std::size_t m = 0; m < kSpinDim; ++m) {
            PipelineState in{PipelineStage::selected, tensor_vec(seed, StateVector::basis(kSpinDim, m, Space::spin)),
                             1.0};
            const auto routed = route_channels(in, seed, channels);
            iso = std::max(iso, std::abs(routed.vector.norm() - 1.0));
        }
        out.push_back(finding("STRUCT.pipeline.isometry", "max |norm - 1| of the routed seed (x) |m>", iso, warn));

        double norm_dev = std::abs(mine.final_state().norm_squared - 100.0 / 128.0);
        out.push_back(finding("STRUCT.pipeline.norm", "|norm^2 after the filter - 100/128|", norm_dev, warn));
    }

    {
        const auto printed = printed_s_state().vector();
        const auto sx = s_x(sys);
        auto e = finding("STRUCT.s.eigen", "||S_x s - 7/2 s|| for the printed |s>",
                         (sx * printed - Complex(3.5) * printed).norm(), warn);
        e.components["distance_to_computed"] = distance(printed, sx_top_eigenvector(sys, tol));
        out.push_back(std::move(e));
    }

    // Feasibility of each printed detector on the scenario's state.
    {
        const auto phi = spin_components(s.problem.state, s.problem.space);
        const double scale = s.problem.state.norm();
        for (const auto &pair : s.problem.pairs) {
            std::vector<StateVector> fixed;
            std::vector<StateVector> annihilated;
            for (std::size_t m = 0; m < phi.size(); ++m) {
                if (phi[m].norm() <= tol.abs_tol * scale) {
                    continue;
                }
                (pair.subset.contains(m) ? fixed : annihilated).push_back(phi[m]);
            }
            out.push_back(finding("STRUCT.feasibility[" + pair.detector_name + "]",
                                  "cosine between the spans " + pair.detector_name +
                                      " must fix and must annihilate on psi",
                                  max_principal_cosine(fixed, annihilated, tol), warn));
        }
    }
    return report;
}

}  // namespace qdetect
