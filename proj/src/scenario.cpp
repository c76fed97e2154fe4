#include "qdetect/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace qdetect {

namespace {

/// A printed number: its value and the exact expression it was typeset as.
struct Coef {
    double value;
    std::string text;
};

Coef integer(int k) {
    return {static_cast<double>(k), std::to_string(k)};
}

/// k * p rendered so that left-to-right evaluation reproduces the value.
std::string render_product(const Coef &k, const Coef &p) {
    if (p.text == "1") {
        return k.text;
    }
    if (k.text == "1") {
        return p.text;
    }
    if (k.text == "-1") {
        return "-" + p.text;
    }
    if (p.text.starts_with("1/")) {
        return k.text + p.text.substr(1);
    }
    return k.text + "*" + p.text;
}

class PrintedBuilder {
  public:
    PrintedBuilder(std::string name, Space space, std::size_t dim) : name_(std::move(name)), space_(space), dim_(dim) {
    }

    /// Adds prefactor * sum_i k_i |index_i>; composite indices come pre-flattened.
    PrintedBuilder &add(const Coef &prefactor, std::initializer_list<std::pair<std::size_t, Coef>> terms) {
        for (const auto &[index, k] : terms) {
            auto &slot = slots_[index];
            slot.value += k.value * prefactor.value;
            slot.pieces.push_back(render_product(k, prefactor));
        }
        return *this;
    }

    PrintedBuilder &add(std::initializer_list<std::pair<std::size_t, Coef>> terms) {
        return add(Coef{1.0, "1"}, terms);
    }

    PrintedVector build(const std::function<std::string(std::size_t)> &labeler) const {
        PrintedVector out{name_, space_, dim_, {}};
        for (const auto &[index, slot] : slots_) {
            std::string text;
            for (const auto &piece : slot.pieces) {
                if (text.empty()) {
                    text = piece;
                } else if (piece.starts_with("-")) {
                    text += " - " + piece.substr(1);
                } else {
                    text += " + " + piece;
                }
            }
            out.entries.push_back({index, labeler(index), text, Complex{slot.value}});
        }
        return out;
    }

  private:
    struct Slot {
        double value = 0.0;
        std::vector<std::string> pieces;
    };
    std::string name_;
    Space space_;
    std::size_t dim_;
    std::map<std::size_t, Slot> slots_;
};

// Spin slots: 0:+7/2 1:+5/2 2:+3/2 3:+1/2 4:-1/2 5:-3/2 6:-5/2 7:-7/2.
constexpr std::size_t kSlot7_2 = 0;
constexpr std::size_t kSlot5_2 = 1;
constexpr std::size_t kSlot3_2 = 2;
constexpr std::size_t kSlot1_2 = 3;
constexpr std::size_t kSlotM1_2 = 4;
constexpr std::size_t kSlotM3_2 = 5;
constexpr std::size_t kSlotM5_2 = 6;
constexpr std::size_t kSlotM7_2 = 7;

/// Flattened composite index for the 1-based spatial index i and spin slot m.
std::size_t cidx(std::size_t i, std::size_t m) {
    return (i - 1) * kSpinDim + m;
}

/// 0-based spatial index for psi_i.
std::size_t sidx(std::size_t i) {
    return i - 1;
}

std::string spatial_labeler(std::size_t index) {
    return spatial_label(index);
}

std::string composite_labeler(std::size_t index) {
    return composite_label(index / kSpinDim, index % kSpinDim);
}

std::string spin_labeler(std::size_t index) {
    return spin_label(index);
}

const double s2 = std::sqrt(2.0);
const double s3 = std::sqrt(3.0);
const double s6 = std::sqrt(6.0);
const double s11 = std::sqrt(11.0);

PrintedVector channel_7_2() {
    return PrintedBuilder("psi_1^[7/2]", Space::spatial, kSpatialDim)
        .add({1.0 / (2 * s2), "1/(2*sqrt(2))"},
             {{sidx(1), integer(-1)}, {sidx(2), integer(-2)}, {sidx(3), integer(1)}, {sidx(4), integer(1)},
              {sidx(5), integer(1)}})
        .build(spatial_labeler);
}

PrintedVector channel_3_2() {
    return PrintedBuilder("psi_1^[3/2]", Space::spatial, kSpatialDim)
        .add({1.0 / std::sqrt(15.0), "1/sqrt(15)"},
             {{sidx(1), integer(-1)}, {sidx(2), integer(1)}, {sidx(3), integer(-2)}, {sidx(5), integer(3)}})
        .build(spatial_labeler);
}

PrintedVector channel_1_2() {
    return PrintedBuilder("psi_2^[1/2]", Space::spatial, kSpatialDim)
        .add({1.0 / (2 * s2), "1/(2*sqrt(2))"},
             {{sidx(6), integer(-1)}, {sidx(7), integer(-2)}, {sidx(8), integer(1)}, {sidx(9), integer(1)},
              {sidx(10), integer(1)}})
        .build(spatial_labeler);
}

PrintedVector channel_m1_2() {
    return PrintedBuilder("psi_1^[-1/2]", Space::spatial, kSpatialDim)
        .add({1.0 / std::sqrt(22.0), "1/sqrt(22)"}, {{sidx(1), integer(1)}, {sidx(2), integer(1)}, {sidx(4), integer(3)}})
        .add({1.0 / std::sqrt(70.0), "1/sqrt(70)"},
             {{sidx(1), integer(4)}, {sidx(2), integer(1)}, {sidx(3), integer(3)}, {sidx(5), integer(3)}})
        .build(spatial_labeler);
}

PrintedVector channel_m5_2() {
    return PrintedBuilder("psi_2^[-5/2]", Space::spatial, kSpatialDim)
        .add({1.0 / std::sqrt(15.0), "1/sqrt(15)"},
             {{sidx(6), integer(-1)}, {sidx(7), integer(1)}, {sidx(8), integer(-2)}, {sidx(9), integer(3)}})
        .build(spatial_labeler);
}

PrintedVector channel_m7_2() {
    return PrintedBuilder("psi_2^[-7/2]", Space::spatial, kSpatialDim)
        .add({1.0 / std::sqrt(22.0), "1/sqrt(22)"}, {{sidx(6), integer(1)}, {sidx(7), integer(1)}, {sidx(9), integer(3)}})
        .add({1.0 / std::sqrt(70.0), "1/sqrt(70)"},
             {{sidx(6), integer(4)}, {sidx(7), integer(1)}, {sidx(8), integer(3)}, {sidx(10), integer(3)}})
        .build(spatial_labeler);
}

std::optional<PrintedVector> printed_channel(std::size_t slot) {
    switch (slot) {
        case kSlot7_2:
            return channel_7_2();
        case kSlot3_2:
            return channel_3_2();
        case kSlot1_2:
            return channel_1_2();
        case kSlotM1_2:
            return channel_m1_2();
        case kSlotM5_2:
            return channel_m5_2();
        case kSlotM7_2:
            return channel_m7_2();
        default:
            return std::nullopt;
    }
}

bool is_blocked(std::size_t slot) {
    return slot == kSlot5_2 || slot == kSlotM3_2;
}

}  // namespace

CompositeSpace scenario_space() {
    return {kSpatialDim, kSpinDim};
}

StateVector spatial_basis(std::size_t i) {
    if (i < 1 || i > kSpatialDim) {
        throw ContractError("spatial_basis: index must lie in [1, 10]");
    }
    return StateVector::basis(kSpatialDim, i - 1, Space::spatial);
}

std::string spatial_label(std::size_t index) {
    return "psi" + std::to_string(index + 1);
}

std::string spin_label(std::size_t slot) {
    return "|" + SpinSystem::seven_halves().label(slot) + ">";
}

std::string composite_label(std::size_t spatial, std::size_t slot) {
    return spatial_label(spatial) + "⊗" + spin_label(slot);
}

StateVector PrintedVector::vector() const {
    StateVector v(dim, space);
    for (const auto &e : entries) {
        v[e.index] = e.value;
    }
    return v;
}

const PrintedEntry *PrintedVector::find(std::size_t index) const {
    for (const auto &e : entries) {
        if (e.index == index) {
            return &e;
        }
    }
    return nullptr;
}

WhichSlitProjector build_E() {
    std::vector<StateVector> slit1;
    for (std::size_t i = 1; i <= 5; ++i) {
        slit1.push_back(spatial_basis(i));
    }
    Operator spatial = projector_from_orthonormal(slit1);
    Operator lifted = lift_spatial(spatial, scenario_space());
    return {std::move(spatial), std::move(lifted)};
}

PrintedVector build_Psi_literal() {
    const Coef p_7_2{1.0 / 32.0, "1/32"};
    const Coef p_3_2{std::sqrt(0.7) / 8.0, "(1/8)*sqrt(7/10)"};
    const Coef p_1_2{std::sqrt(35.0) / 32.0, "sqrt(35)/32"};
    const Coef p_m1_2a{std::sqrt(35.0 / 11.0) / 16.0, "(1/16)*sqrt(35/11)"};
    const Coef p_m1_2b{1.0 / 16.0, "1/16"};
    const Coef p_m5_2{std::sqrt(7.0 / 30.0) / 8.0, "(1/8)*sqrt(7/30)"};
    const Coef p_m7_2a{1.0 / (16.0 * s11), "(1/16)*(1/sqrt(11))"};
    const Coef p_m7_2b{1.0 / (16.0 * std::sqrt(35.0)), "(1/16)*(1/sqrt(35))"};
    const std::size_t a = kSlot7_2, c = kSlot3_2, d = kSlot1_2, e = kSlotM1_2, g = kSlotM5_2, h = kSlotM7_2;
    return PrintedBuilder("Psi", Space::composite, kSpatialDim * kSpinDim)
        .add(p_7_2, {{cidx(1, a), integer(-1)},
                     {cidx(2, a), integer(-2)},
                     {cidx(3, a), integer(1)},
                     {cidx(4, a), integer(1)},
                     {cidx(5, a), integer(1)}})
        .add(p_3_2, {{cidx(1, c), integer(-1)}, {cidx(2, c), integer(1)}, {cidx(3, c), integer(-2)}, {cidx(5, c), integer(3)}})
        .add(p_1_2, {{cidx(6, d), integer(-1)},
                     {cidx(7, d), integer(-2)},
                     {cidx(8, d), integer(1)},
                     {cidx(9, d), integer(1)},
                     {cidx(10, d), integer(1)}})
        .add(p_m1_2a, {{cidx(1, e), integer(1)}, {cidx(2, e), integer(1)}, {cidx(4, e), integer(3)}})
        .add(p_m1_2b, {{cidx(1, e), integer(4)}, {cidx(2, e), integer(1)}, {cidx(3, e), integer(3)}, {cidx(5, e), integer(3)}})
        .add(p_m5_2, {{cidx(6, g), integer(-1)}, {cidx(7, g), integer(1)}, {cidx(8, g), integer(-2)}, {cidx(9, g), integer(3)}})
        .add(p_m7_2a, {{cidx(6, h), integer(1)}, {cidx(7, h), integer(1)}, {cidx(9, h), integer(3)}})
        .add(p_m7_2b,
             {{cidx(6, h), integer(4)}, {cidx(7, h), integer(1)}, {cidx(8, h), integer(3)}, {cidx(10, h), integer(3)}})
        .build(composite_labeler);
}

std::array<PrintedVector, 2> minus_half_subvectors() {
    return {
        PrintedBuilder("Psi|-1/2>.a", Space::spatial, kSpatialDim)
            .add({std::sqrt(35.0 / 11.0) / 16.0, "(1/16)*sqrt(35/11)"},
                 {{sidx(1), integer(1)}, {sidx(2), integer(1)}, {sidx(4), integer(3)}})
            .build(spatial_labeler),
        PrintedBuilder("Psi|-1/2>.b", Space::spatial, kSpatialDim)
            .add({1.0 / 16.0, "1/16"}, {{sidx(1), integer(4)}, {sidx(2), integer(1)}, {sidx(3), integer(3)}, {sidx(5), integer(3)}})
            .build(spatial_labeler),
    };
}

GConstruction build_G_literal(const Tolerances &tol) {
    const Coef sixth{1.0 / 6.0, "1/6"};
    const Coef minus_sixth{-1.0 / 6.0, "-1/6"};
    const Coef minus_s3_2{-s3 / 2.0, "-sqrt(3)/2"};
    const Coef inv_2s3{1.0 / (2.0 * s3), "1/(2*sqrt(3))"};

    auto first = [&](std::size_t third_slot, const char *name) {
        return PrintedBuilder(name, Space::spatial, kSpatialDim)
            .add({{sidx(1), sixth},
                  {sidx(2), minus_sixth},
                  {sidx(third_slot), minus_sixth},
                  {sidx(7), minus_s3_2},
                  {sidx(9), inv_2s3},
                  {sidx(10), inv_2s3}})
            .build(spatial_labeler);
    };
    const PrintedVector second =
        PrintedBuilder("psi^(2)", Space::spatial, kSpatialDim)
            .add({{sidx(1), minus_s3_2},
                  {sidx(2), inv_2s3},
                  {sidx(3), inv_2s3},
                  {sidx(6), {-s6 / 4.0, "-sqrt(6)/4"}},
                  {sidx(8), {s6 / 4.0, "sqrt(6)/4"}},
                  {sidx(9), {1.0 / (2.0 * s6), "1/(2*sqrt(6))"}},
                  {sidx(10), {1.0 / (2.0 * s6), "1/(2*sqrt(6))"}}})
            .build(spatial_labeler);
    const PrintedVector third =
        PrintedBuilder("psi^(3)", Space::spatial, kSpatialDim)
            .add({{sidx(1), {-s2 / 4.0, "-sqrt(2)/4"}},
                  {sidx(2), {-s2 / 2.0, "-sqrt(2)/2"}},
                  {sidx(3), {s2 / 4.0, "sqrt(2)/4"}},
                  {sidx(4), {s2 / 4.0, "sqrt(2)/4"}},
                  {sidx(5), {s2 / 4.0, "sqrt(2)/4"}}})
            .build(spatial_labeler);

    GConstruction out{
        {first(1, "psi^(1)"), second, third},
        {first(3, "psi^(1)[psi3 reading]"), second, third},
        Operator(kSpatialDim, Space::spatial),
        std::nullopt,
        std::nullopt,
        Operator(kSpatialDim, Space::spatial),
    };
    std::vector<StateVector> verbatim;
    std::vector<StateVector> reading;
    for (std::size_t n = 0; n < 3; ++n) {
        verbatim.push_back(out.printed[n].vector());
        reading.push_back(out.psi3_reading[n].vector());
        out.dyad_sum += Operator::outer(verbatim.back(), verbatim.back());
    }
    try {
        out.projector = projector_from_orthonormal(verbatim, tol);
    } catch (const GramDefectError &e) {
        out.defect = e.defect();
    }
    const auto repaired = lowdin_orthonormalize(reading, tol);
    out.lowdin_projector = projector_from_orthonormal(repaired, tol);
    return out;
}

LConstruction build_L(const Tolerances &tol) {
    auto over_s11 = [](int k) { return Coef{k / s11, std::to_string(k) + "/sqrt(11)"}; };
    auto over_k_s11 = [](int num, int den) {
        return Coef{num / (den * s11), std::to_string(num) + "/(" + std::to_string(den) + "*sqrt(11))"};
    };
    std::array<PrintedVector, 5> printed{
        PrintedBuilder("psi^[1]", Space::spatial, kSpatialDim)
            .add({std::sqrt(11.0 / 15.0) / 5.0, "(1/5)*sqrt(11/15)"},
                 {{sidx(1), integer(-2)},
                  {sidx(2), integer(2)},
                  {sidx(3), integer(2)},
                  {sidx(6), over_s11(-9)},
                  {sidx(7), over_s11(9)},
                  {sidx(10), over_s11(9)}})
            .build(spatial_labeler),
        PrintedBuilder("psi^[2]", Space::spatial, kSpatialDim)
            .add({std::sqrt(11.0 / 65.0) / 10.0, "(1/10)*sqrt(11/65)"},
                 {{sidx(1), integer(3)},
                  {sidx(2), integer(-3)},
                  {sidx(3), integer(-3)},
                  {sidx(6), over_s11(-24)},
                  {sidx(7), over_s11(-51)},
                  {sidx(9), over_s11(25)},
                  {sidx(10), over_s11(49)}})
            .build(spatial_labeler),
        PrintedBuilder("psi^[3]", Space::spatial, kSpatialDim)
            .add({std::sqrt(33.0 / 26.0) / 5.0, "(1/5)*sqrt(33/26)"},
                 {{sidx(1), integer(-1)},
                  {sidx(2), integer(1)},
                  {sidx(3), integer(1)},
                  {sidx(6), over_k_s11(-17, 6)},
                  {sidx(7), over_k_s11(-14, 3)},
                  {sidx(8), over_k_s11(65, 6)},
                  {sidx(9), over_k_s11(5, 2)},
                  {sidx(10), over_k_s11(-11, 2)}})
            .build(spatial_labeler),
        PrintedBuilder("psi^[4]", Space::spatial, kSpatialDim)
            .add({1.0 / std::sqrt(15.0), "1/sqrt(15)"},
                 {{sidx(1), integer(-1)}, {sidx(2), integer(1)}, {sidx(3), integer(-2)}, {sidx(5), integer(3)}})
            .build(spatial_labeler),
        PrintedBuilder("psi^[5]", Space::spatial, kSpatialDim)
            .add({1.0 / (2.0 * s2), "1/(2*sqrt(2))"},
                 {{sidx(1), integer(-1)},
                  {sidx(2), integer(-2)},
                  {sidx(3), integer(1)},
                  {sidx(4), integer(1)},
                  {sidx(5), integer(1)}})
            .build(spatial_labeler),
    };
    std::vector<StateVector> vs;
    for (const auto &p : printed) {
        vs.push_back(p.vector());
    }
    Operator spatial = projector_from_orthonormal(vs, tol);
    return {std::move(printed), std::move(spatial)};
}

DetectorSet build_detectors() {
    const auto sys = SpinSystem::seven_halves();
    const std::array<SpinSubset, 3> subsets{
        SpinSubset::from_slots({kSlot7_2, kSlot5_2, kSlot3_2, kSlotM1_2}, kSpinDim),
        SpinSubset::from_slots({kSlot7_2, kSlot5_2, kSlot1_2, kSlotM3_2}, kSpinDim),
        SpinSubset::from_slots({kSlot7_2, kSlot3_2, kSlot1_2, kSlotM5_2}, kSpinDim),
    };
    DetectorSet out{subsets,
                    {Operator(kSpinDim, Space::spin), Operator(kSpinDim, Space::spin), Operator(kSpinDim, Space::spin)},
                    {Operator(1, Space::composite), Operator(1, Space::composite), Operator(1, Space::composite)}};
    for (std::size_t k = 0; k < 3; ++k) {
        out.spin[k] = subset_projector(sys, subsets[k]);
        out.lifted[k] = lift_spin(out.spin[k], scenario_space());
    }
    return out;
}

// ------------------------------------------------------------ pipeline

PrintedVector printed_s_state() {
    const Coef p{1.0 / (8.0 * s2), "1/(8*sqrt(2))"};
    const Coef r7{std::sqrt(7.0), "sqrt(7)"};
    const Coef r21{std::sqrt(21.0), "sqrt(21)"};
    const Coef r35{std::sqrt(35.0), "sqrt(35)"};
    return PrintedBuilder("|s>", Space::spin, kSpinDim)
        .add(p, {{0, integer(1)}, {1, r7}, {2, r21}, {3, r35}, {4, r35}, {5, r21}, {6, r7}, {7, integer(1)}})
        .build(spin_labeler);
}

int routed_slit(std::size_t spin_slot) {
    switch (spin_slot) {
        case kSlot7_2:
        case kSlot5_2:
        case kSlot3_2:
        case kSlotM1_2:
            return 1;
        default:
            return 2;
    }
}

ChannelSet channel_vectors(Variant variant, std::size_t blocked_choice, const Tolerances &tol) {
    ChannelSet out;
    out.variant = variant;
    std::vector<std::size_t> printed_slots;
    std::vector<StateVector> printed_vectors;
    for (std::size_t slot = 0; slot < kSpinDim; ++slot) {
        auto &ch = out.channels[slot];
        ch.spin_slot = slot;
        ch.slit = routed_slit(slot);
        ch.blocked = is_blocked(slot);
        ch.printed = printed_channel(slot);
        if (ch.printed) {
            ch.vector = ch.printed->vector();
            printed_slots.push_back(slot);
            printed_vectors.push_back(ch.vector);
        }
    }
    if (variant == Variant::repaired) {
        const auto repaired = lowdin_orthonormalize(printed_vectors, tol);
        for (std::size_t k = 0; k < printed_slots.size(); ++k) {
            out.channels[printed_slots[k]].vector = repaired[k];
        }
    }
    // Blocked channels: Gram-Schmidt completion inside their slit, against the routed channels there.
    for (std::size_t slot = 0; slot < kSpinDim; ++slot) {
        auto &ch = out.channels[slot];
        if (!ch.blocked) {
            continue;
        }
        std::vector<StateVector> candidates;
        for (std::size_t other : printed_slots) {
            if (out.channels[other].slit == ch.slit) {
                candidates.push_back(out.channels[other].vector);
            }
        }
        const std::size_t taken = candidates.size();
        const std::size_t first = ch.slit == 1 ? 1 : 6;
        for (std::size_t i = first; i < first + 5; ++i) {
            candidates.push_back(spatial_basis(i));
        }
        const auto gs = gram_schmidt(candidates, tol);
        std::vector<StateVector> completions;
        for (std::size_t k = 0; k < gs.rank; ++k) {
            if (gs.kept[k] >= taken) {
                completions.push_back(gs.basis[k]);
            }
        }
        if (completions.empty()) {
            throw ContractError("channel_vectors: no room to complete a blocked channel");
        }
        ch.vector = completions[blocked_choice % completions.size()];
    }
    return out;
}

std::string to_string(PipelineStage stage) {
    switch (stage) {
        case PipelineStage::selected:
            return "t0_selected";
        case PipelineStage::routed:
            return "t_half_routed";
        case PipelineStage::filtered:
            return "t1_filtered";
    }
    return "unknown";
}

PipelineState select_sx_top(const StateVector &seed, const Tolerances &tol) {
    if (seed.space() != Space::spatial || seed.dim() != kSpatialDim || !seed.is_unit(tol.abs_tol)) {
        throw ContractError("pipeline: the spatial seed must be a unit vector of the 10-dim spatial space");
    }
    StateVector v = tensor_vec(seed, printed_s_state().vector());
    const double n2 = v.norm_squared();
    return {PipelineStage::selected, std::move(v), n2};
}

PipelineState route_channels(const PipelineState &selected, const StateVector &seed, const ChannelSet &channels) {
    if (selected.stage != PipelineStage::selected) {
        throw ContractError("pipeline: routing expects the selected stage");
    }
    const auto space = scenario_space();
    const auto components = spin_components(selected.vector, space);
    StateVector out(space.dim(), Space::composite);
    for (std::size_t m = 0; m < kSpinDim; ++m) {
        const Complex amplitude = inner(seed, components[m]);
        out += amplitude * tensor_vec(channels.channels[m].vector, StateVector::basis(kSpinDim, m, Space::spin));
    }
    const double n2 = out.norm_squared();
    return {PipelineStage::routed, std::move(out), n2};
}

Operator beam_filter() {
    std::vector<double> diag(kSpinDim, 1.0);
    diag[kSlot5_2] = 0.0;
    diag[kSlotM3_2] = 0.0;
    return lift_spin(Operator::diagonal(diag, Space::spin), scenario_space());
}

PipelineState block_beams(const PipelineState &routed) {
    if (routed.stage != PipelineStage::routed) {
        throw ContractError("pipeline: filtering expects the routed stage");
    }
    StateVector out = routed.vector;
    for (std::size_t i = 0; i < kSpatialDim; ++i) {
        out[i * kSpinDim + kSlot5_2] = 0.0;
        out[i * kSpinDim + kSlotM3_2] = 0.0;
    }
    const double n2 = out.norm_squared();
    return {PipelineStage::filtered, std::move(out), n2};
}

PipelineResult run_pipeline(Variant variant, const PipelineOptions &options, const Tolerances &tol) {
    const auto channels = channel_vectors(variant, options.blocked_choice, tol);
    PipelineResult out;
    out.variant = variant;
    out.stages.push_back(select_sx_top(options.seed, tol));
    out.stages.push_back(route_channels(out.stages[0], options.seed, channels));
    out.stages.push_back(block_beams(out.stages[1]));
    const StateVector &routed = out.stages[1].vector;
    const StateVector &kept = out.stages[2].vector;
    out.reconstruction_residual = distance(kept, build_Psi_literal().vector());
    // The rank-one reading P = |Psi1><Psi1| of the filter, with Psi1 the unblocked part of Psi_hat.
    const StateVector rank_one = inner(kept, routed) * kept;
    out.rank_one_filter_discrepancy = distance(rank_one, kept);
    return out;
}

StateVector normalize_for_probability(const StateVector &v, const Tolerances &tol) {
    const double n = v.norm();
    if (n <= tol.abs_tol) {
        throw ContractError("normalize_for_probability: vector norm is below abs_tol");
    }
    return (1.0 / n) * v;
}

PaperScenario build_literal_scenario(const Tolerances &tol) {
    const auto sys = SpinSystem::seven_halves();
    const auto e = build_E();
    const auto g = build_G_literal(tol);
    const auto l = build_L(tol);
    const auto detectors = build_detectors();
    PaperScenario out{
        Variant::literal,
        ProblemInstance{
            "literal",
            scenario_space(),
            sys,
            build_Psi_literal().vector(),
            {PropertyDetectorPair{"E", "T", e.spatial, detectors.subsets[0], detectors.spin[0]},
             PropertyDetectorPair{"G", "Y", g.dyad_sum, detectors.subsets[1], detectors.spin[1]},
             PropertyDetectorPair{"L", "W", l.spatial, detectors.subsets[2], detectors.spin[2]}},
        },
        {},
        {"T is read as A1+A2+A3+A5; the printed ket-bra token |3/2><\"/2\"| is taken as |3/2><3/2|",
         "G_I is the dyad sum of the verbatim psi^(1..3); psi^(1) prints -1/6 psi1 twice"},
    };
    return out;
}

}  // namespace qdetect
