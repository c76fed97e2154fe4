#pragma once

// Types shared by the scenario, audit, solver and simulate modules: an
// instance of the three-property detection problem and the certificates that
// accompany derived properties.

#include <array>
#include <map>
#include <string>

#include "qdetect/linalg.hpp"
#include "qdetect/spin.hpp"

namespace qdetect {

enum class Variant { literal, repaired };

std::string to_string(Variant variant);
Variant parse_variant(const std::string &text);

/// A spatial property R_I together with the spin-subset detector meant to reveal it.
struct PropertyDetectorPair {
    std::string property_name;  // "E", "G", "L"
    std::string detector_name;  // "T", "Y", "W"
    Operator property;          // spatial factor R_I
    SpinSubset subset;
    Operator detector;          // spin factor, diagonal 0/1

    Operator lifted_property(const CompositeSpace &space) const { return lift_spatial(property, space); }
    Operator lifted_detector(const CompositeSpace &space) const { return lift_spin(detector, space); }
};

struct ProblemInstance {
    std::string label;  // e.g. "literal", "repaired", "solver"
    CompositeSpace space;
    SpinSystem spin;
    StateVector state;
    std::array<PropertyDetectorPair, 3> pairs;
};

/// Residuals certifying a derived property.
struct Certificate {
    std::string subject;
    std::string completion;
    std::size_t rank = 0;
    std::size_t freedom_dim = 0;
    double detection_residual = 0.0;       // ||(1 (x) P_S) psi - (R (x) 1) psi|| / ||psi||
    double projector_defect = 0.0;         // max(||R - R^dagger||, ||R^2 - R||)
    double completion_orthogonality = 0.0; // max |<c|phi_m>| / ||phi_m|| over completion vectors
    double feasibility_overlap = 0.0;      // cos of smallest principal angle, fixed vs annihilated span
    std::map<std::string, double> commutator_norms;
};

}  // namespace qdetect
