#pragma once

// The double-slit construction for a spin-7/2 particle: the which-slit
// projector, the entangled state, the two further properties and their spin
// detectors, and the three-stage preparation pipeline (S_x selection,
// Stern-Gerlach routing, beam filter).
//
// Every printed vector is kept verbatim, with a provenance string per
// coefficient, so audits can report exactly where printed data are
// inconsistent. Spatial basis vectors psi_1..psi_10 are the computational
// basis of a 10-dimensional space; psi_1..psi_5 are localised at slit 1.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qdetect/linalg.hpp"
#include "qdetect/problem.hpp"
#include "qdetect/spin.hpp"

namespace qdetect {

inline constexpr std::size_t kSpatialDim = 10;
inline constexpr std::size_t kSpinDim = 8;

CompositeSpace scenario_space();

/// psi_i for 1-based i.
StateVector spatial_basis(std::size_t i);

std::string spatial_label(std::size_t index);                       // "psi3"
std::string spin_label(std::size_t slot);                           // "|-1/2>"
std::string composite_label(std::size_t spatial, std::size_t slot); // "psi1⊗|7/2>"

struct PrintedEntry {
    std::size_t index = 0;
    std::string label;
    std::string provenance;  // exact expression, e.g. "sqrt(35)/32"
    Complex value;
};

/// A vector exactly as printed: nonzero (or printed-but-cancelling) entries only.
struct PrintedVector {
    std::string name;
    Space space = Space::spatial;
    std::size_t dim = 0;
    std::vector<PrintedEntry> entries;

    StateVector vector() const;
    const PrintedEntry *find(std::size_t index) const;
};

struct WhichSlitProjector {
    Operator spatial;
    Operator lifted;
};

WhichSlitProjector build_E();

/// The prepared entangled state exactly as printed (not normalised).
PrintedVector build_Psi_literal();

/// The two sub-vectors a, b printed inside the |-1/2> component: sqrt(35/11)(psi1+psi2+3psi4) and
/// (4psi1+psi2+3psi3+3psi5), each with the shared 1/16 prefactor.
std::array<PrintedVector, 2> minus_half_subvectors();

struct GConstruction {
    std::array<PrintedVector, 3> printed;       // verbatim, psi^(1) carries "-1/6 psi1" twice
    std::array<PrintedVector, 3> psi3_reading;  // third slot of psi^(1) read as psi3
    Operator dyad_sum;                          // sum_n |psi^(n)><psi^(n)| of the verbatim vectors
    std::optional<Operator> projector;          // present iff the verbatim vectors are orthonormal
    std::optional<GramDefect> defect;
    Operator lowdin_projector;                  // projector onto Lowdin(psi3_reading)
};

GConstruction build_G_literal(const Tolerances &tol = {});

struct LConstruction {
    std::array<PrintedVector, 5> printed;
    Operator spatial;
};

LConstruction build_L(const Tolerances &tol = {});

struct DetectorSet {
    std::array<SpinSubset, 3> subsets;  // T, Y, W
    std::array<Operator, 3> spin;
    std::array<Operator, 3> lifted;
};

/// T = A1+A2+A3+A5, Y = A1+A2+A4+A6, W = A1+A3+A4+A7.
DetectorSet build_detectors();

// ------------------------------------------------------------ pipeline

/// S_x = +7/2 eigenstate with the printed amplitudes (1, sqrt7, sqrt21, sqrt35, ...)/(8 sqrt2).
PrintedVector printed_s_state();

struct Channel {
    std::size_t spin_slot = 0;
    int slit = 1;
    bool blocked = false;  // removed by the filter; never printed
    std::optional<PrintedVector> printed;
    StateVector vector{kSpatialDim, Space::spatial};
};

struct ChannelSet {
    Variant variant = Variant::literal;
    std::array<Channel, kSpinDim> channels;  // indexed by spin slot
};

/// Slits routed by S_z: +7/2, +5/2, +3/2, -1/2 go to slit 1, the others to slit 2.
int routed_slit(std::size_t spin_slot);

/// Channel vectors for the variant. Literal channels are the printed ones;
/// repaired channels are their Lowdin orthonormalisation. The two blocked
/// channels are Gram-Schmidt completions inside their slit, taking the
/// `blocked_choice`-th completion vector.
ChannelSet channel_vectors(Variant variant, std::size_t blocked_choice = 0, const Tolerances &tol = {});

enum class PipelineStage { selected, routed, filtered };

std::string to_string(PipelineStage stage);

struct PipelineState {
    PipelineStage stage;
    StateVector vector;
    double norm_squared;
};

struct PipelineOptions {
    StateVector seed = spatial_basis(1);  // the unconstrained spatial state psi in psi|s>
    std::size_t blocked_choice = 0;
};

struct PipelineResult {
    Variant variant = Variant::literal;
    std::vector<PipelineState> stages;  // selected, routed, filtered
    double reconstruction_residual = 0.0;  // ||filtered - Psi_literal||
    double rank_one_filter_discrepancy = 0.0;  // ||(|Psi1><Psi1|) Psi_hat - Psi1||

    const PipelineState &final_state() const { return stages.back(); }
};

/// Stage 1: seed (x) |s>.
PipelineState select_sx_top(const StateVector &seed, const Tolerances &tol = {});
/// Stage 2: U(phi (x) |m>) = <seed|phi> psi_k^[m] (x) |m> on the modelled domain.
PipelineState route_channels(const PipelineState &selected, const StateVector &seed, const ChannelSet &channels);
/// Stage 3: removes the S_z = 5/2 and -3/2 beams.
PipelineState block_beams(const PipelineState &routed);
/// The filter as a composite projector (identity except the blocked spin channels).
Operator beam_filter();

PipelineResult run_pipeline(Variant variant, const PipelineOptions &options = {}, const Tolerances &tol = {});

/// v / ||v||; throws ContractError when ||v|| <= abs_tol.
StateVector normalize_for_probability(const StateVector &v, const Tolerances &tol = {});

// ------------------------------------------------------------ scenarios

struct PaperScenario {
    Variant variant = Variant::literal;
    ProblemInstance problem;
    std::vector<Certificate> certificates;  // filled for the repaired variant
    std::vector<std::string> notes;
};

/// Every object exactly as printed: Psi of the printed state, G as the dyad sum of the
/// verbatim psi^(n), L from the printed psi^[n].
PaperScenario build_literal_scenario(const Tolerances &tol = {});

}  // namespace qdetect
