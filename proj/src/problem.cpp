#include "qdetect/problem.hpp"

namespace qdetect {

std::string to_string(Variant variant) {
    return variant == Variant::literal ? "literal" : "repaired";
}

Variant parse_variant(const std::string &text) {
    if (text == "literal") {
        return Variant::literal;
    }
    if (text == "repaired") {
        return Variant::repaired;
    }
    throw ContractError("unknown variant '" + text + "'");
}

}  // namespace qdetect
