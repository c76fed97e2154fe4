#pragma once

// Structured output. Every CLI run produces one versioned JSON document; the
// text format is rendered from that document. The scenario dump has typed
// parse/serialise functions so a dump survives a parse and re-dump unchanged.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdetect/audit.hpp"
#include "qdetect/simulate.hpp"
#include "qdetect/solver.hpp"

namespace qdetect {

using Json = nlohmann::ordered_json;

inline constexpr const char *kReportSchema = "qdetect.report/v1";
inline constexpr const char *kDumpSchema = "qdetect.dump/v1";

Json to_json(const Tolerances &tol);
Json to_json(const ConditionEntry &entry);
Json to_json(const ConditionReport &report);
Json to_json(const Certificate &cert);
Json to_json(const Operator &op);  // sparse: nonzero [row, col, re, im]
Json to_json(const OutcomeDistribution &dist);
Json to_json(const InferenceRow &row);
Json to_json(const SolverSolution &sol);
Json to_json(const EnumeratedTriple &triple, const SpinSystem &sys);

Tolerances tolerances_from_json(const Json &j);
Certificate certificate_from_json(const Json &j);

// ------------------------------------------------------------ scenario dump

struct DumpEntry {
    std::size_t index = 0;
    std::string label;
    std::string provenance;
    double re = 0.0;
    double im = 0.0;
};

struct DumpVector {
    std::string name;
    std::string space;
    std::size_t dim = 0;
    std::string provenance;  // "printed" or how the vector was computed
    std::vector<DumpEntry> entries;
};

struct DumpOperatorEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double re = 0.0;
    double im = 0.0;
};

struct DumpOperator {
    std::string name;
    std::string space;
    std::size_t dim = 0;
    std::string provenance;
    std::vector<DumpOperatorEntry> entries;  // nonzero only
    std::optional<Certificate> certificate;
};

struct DumpVariant {
    std::string variant;
    std::vector<DumpVector> vectors;
    std::vector<DumpOperator> operators;
    std::vector<std::string> notes;
};

struct ScenarioDump {
    std::string schema = kDumpSchema;
    Tolerances tolerances;
    std::vector<DumpVariant> variants;
};

ScenarioDump build_dump(const std::vector<Variant> &variants, const Tolerances &tol = {});

Json to_json(const ScenarioDump &dump);
/// Throws ContractError on a malformed document or unknown schema.
ScenarioDump dump_from_json(const Json &j);

/// One line per vector entry, "Psi[psi1⊗|7/2>] = -1/32 (-0.03125)", then operators.
std::string render_dump_text(const ScenarioDump &dump);

/// Shortest round-trip decimal form of a double.
std::string format_number(double x);

}  // namespace qdetect
