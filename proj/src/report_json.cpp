#include "qdetect/report_json.hpp"

#include <cstdio>
#include <sstream>

namespace qdetect {

std::string format_number(double x) {
    return Json(x).dump();
}

Json to_json(const Tolerances &tol) {
    return Json{{"abs_tol", tol.abs_tol}, {"rel_tol", tol.rel_tol}, {"audit_warn_tol", tol.audit_warn_tol}};
}

Tolerances tolerances_from_json(const Json &j) {
    return {j.at("abs_tol").get<double>(), j.at("rel_tol").get<double>(), j.at("audit_warn_tol").get<double>()};
}

Json to_json(const ConditionEntry &e) {
    Json j{{"id", e.id},
           {"description", e.description},
           {"measured", e.measured},
           {"relation", to_string(e.relation)},
           {"threshold", e.threshold},
           {"verdict", to_string(e.verdict)}};
    if (!e.components.empty()) {
        Json parts = Json::object();
        for (const auto &[k, v] : e.components) {
            parts[k] = v;
        }
        j["components"] = std::move(parts);
    }
    return j;
}

Json to_json(const ConditionReport &r) {
    Json entries = Json::array();
    for (const auto &e : r.entries) {
        entries.push_back(to_json(e));
    }
    return Json{{"variant", r.variant},
                {"tolerances", to_json(r.tolerances)},
                {"passed", r.passes()},
                {"failing", r.failing_ids()},
                {"entries", std::move(entries)},
                {"notes", r.notes}};
}

Json to_json(const Certificate &c) {
    Json norms = Json::object();
    for (const auto &[k, v] : c.commutator_norms) {
        norms[k] = v;
    }
    return Json{{"subject", c.subject},
                {"completion", c.completion},
                {"rank", c.rank},
                {"freedom_dim", c.freedom_dim},
                {"detection_residual", c.detection_residual},
                {"projector_defect", c.projector_defect},
                {"completion_orthogonality", c.completion_orthogonality},
                {"feasibility_overlap", c.feasibility_overlap},
                {"commutator_norms", std::move(norms)}};
}

Certificate certificate_from_json(const Json &j) {
    Certificate c;
    c.subject = j.at("subject").get<std::string>();
    c.completion = j.at("completion").get<std::string>();
    c.rank = j.at("rank").get<std::size_t>();
    c.freedom_dim = j.at("freedom_dim").get<std::size_t>();
    c.detection_residual = j.at("detection_residual").get<double>();
    c.projector_defect = j.at("projector_defect").get<double>();
    c.completion_orthogonality = j.at("completion_orthogonality").get<double>();
    c.feasibility_overlap = j.at("feasibility_overlap").get<double>();
    for (const auto &[k, v] : j.at("commutator_norms").items()) {
        c.commutator_norms[k] = v.get<double>();
    }
    return c;
}

Json to_json(const Operator &op) {
    Json entries = Json::array();
    for (std::size_t r = 0; r < op.dim(); ++r) {
        for (std::size_t c = 0; c < op.dim(); ++c) {
            const Complex z = op(r, c);
            if (z != Complex(0.0)) {
                entries.push_back(Json::array({r, c, z.real(), z.imag()}));
            }
        }
    }
    return Json{{"space", to_string(op.space())}, {"dim", op.dim()}, {"entries", std::move(entries)}};
}

Json to_json(const OutcomeDistribution &d) {
    Json outcomes = Json::array();
    for (const auto &o : d.outcomes) {
        Json row{{"bits", o.bits}, {"probability", o.probability}};
        if (d.provenance == OutcomeDistribution::Provenance::sampled) {
            row["count"] = o.count;
        }
        outcomes.push_back(std::move(row));
    }
    Json j{{"provenance", to_string(d.provenance)}};
    if (d.provenance == OutcomeDistribution::Provenance::sampled) {
        j["n_trials"] = d.n_trials;
        j["seed"] = d.seed;
        j["generator"] = d.generator_id;
    }
    j["total_probability"] = d.total_probability();
    j["outcomes"] = std::move(outcomes);
    return j;
}

Json to_json(const InferenceRow &row) {
    return Json{{"detector", row.detector},   {"property", row.property},
                {"p_detector", row.p_detector}, {"p_property", row.p_property},
                {"residual", row.residual},   {"inference", row.inference}};
}

Json to_json(const SolverSolution &sol) {
    return Json{{"certificate", to_json(sol.certificate)},
                {"fixed_rank", sol.fixed_rank},
                {"freedom_dim", sol.freedom_dim},
                {"property", to_json(sol.property)}};
}

Json to_json(const EnumeratedTriple &t, const SpinSystem &sys) {
    Json subsets = Json::array();
    for (auto m : t.masks) {
        subsets.push_back(SpinSubset(m, sys.dim()).to_string(sys));
    }
    return Json{{"masks", t.masks}, {"subsets", std::move(subsets)}, {"measured", t.measured}};
}

// ------------------------------------------------------------ scenario dump

namespace {

DumpVector dump_printed(const PrintedVector &p) {
    DumpVector v{p.name, to_string(p.space), p.dim, "printed", {}};
    for (const auto &e : p.entries) {
        v.entries.push_back({e.index, e.label, e.provenance, e.value.real(), e.value.imag()});
    }
    return v;
}

DumpVector dump_computed(const std::string &name, const StateVector &sv, const std::string &provenance,
                         std::string (*labeler)(std::size_t)) {
    DumpVector v{name, to_string(sv.space()), sv.dim(), provenance, {}};
    for (std::size_t i = 0; i < sv.dim(); ++i) {
        if (sv[i] != Complex(0.0)) {
            v.entries.push_back({i, labeler(i), "computed", sv[i].real(), sv[i].imag()});
        }
    }
    return v;
}

std::string spatial_index_label(std::size_t i) {
    return spatial_label(i + 1);
}

std::string composite_index_label(std::size_t i) {
    return composite_label(i / kSpinDim + 1, i % kSpinDim);
}

DumpOperator dump_operator(const std::string &name, const Operator &op, const std::string &provenance,
                           std::optional<Certificate> cert = std::nullopt) {
    DumpOperator d{name, to_string(op.space()), op.dim(), provenance, {}, std::move(cert)};
    for (std::size_t r = 0; r < op.dim(); ++r) {
        for (std::size_t c = 0; c < op.dim(); ++c) {
            const Complex z = op(r, c);
            if (z != Complex(0.0)) {
                d.entries.push_back({r, c, z.real(), z.imag()});
            }
        }
    }
    return d;
}

const Certificate *find_certificate(const PaperScenario &s, const std::string &subject) {
    for (const auto &c : s.certificates) {
        if (c.subject == subject) {
            return &c;
        }
    }
    return nullptr;
}

DumpVariant dump_variant(const PaperScenario &s, const Tolerances &tol) {
    DumpVariant out;
    out.variant = to_string(s.variant);
    out.notes = s.notes;
    const bool literal = s.variant == Variant::literal;
    if (literal) {
        out.vectors.push_back(dump_printed(build_Psi_literal()));
    } else {
        out.vectors.push_back(dump_computed("Psi", s.problem.state, "pipeline output, orthonormalised channels",
                                            composite_index_label));
    }
    out.vectors.push_back(dump_printed(printed_s_state()));
    const auto channels = channel_vectors(s.variant, 0, tol);
    for (const auto &c : channels.channels) {
        if (c.blocked) {
            continue;
        }
        if (literal) {
            out.vectors.push_back(dump_printed(*c.printed));
        } else {
            out.vectors.push_back(
                dump_computed(c.printed->name, c.vector, "Lowdin orthonormalisation of the printed channels",
                              spatial_index_label));
        }
    }
    const auto g = build_G_literal(tol);
    for (const auto &p : g.printed) {
        out.vectors.push_back(dump_printed(p));
    }
    if (literal) {
        auto alt = dump_printed(g.psi3_reading[0]);
        alt.name += "[psi3]";
        alt.provenance = "printed, third term read as psi3";
        out.vectors.push_back(std::move(alt));
    }
    for (const auto &p : build_L(tol).printed) {
        out.vectors.push_back(dump_printed(p));
    }

    const auto &pairs = s.problem.pairs;
    out.operators.push_back(dump_operator("E_I", pairs[0].property, "sum_{i=1..5} |psi_i><psi_i|"));
    for (std::size_t k = 1; k < 3; ++k) {
        const auto &p = pairs[k];
        const auto *cert = find_certificate(s, p.property_name);
        std::string prov;
        if (literal) {
            prov = k == 1 ? "sum_n |psi^(n)><psi^(n)| of the printed vectors" : "sum_n |psi^[n]><psi^[n]|";
        } else {
            prov = cert ? "derived from " + p.detector_name + " on the repaired state, completion " + cert->completion
                        : "printed";
        }
        out.operators.push_back(dump_operator(p.property_name + "_I", p.property, prov,
                                              cert ? std::optional<Certificate>(*cert) : std::nullopt));
    }
    for (const auto &p : pairs) {
        out.operators.push_back(dump_operator(p.detector_name + "_II", p.detector,
                                              "subset " + p.subset.to_string(s.problem.spin)));
    }
    return out;
}

Json to_json(const DumpVector &v) {
    Json entries = Json::array();
    for (const auto &e : v.entries) {
        entries.push_back(Json{{"index", e.index},
                               {"label", e.label},
                               {"provenance", e.provenance},
                               {"value", Json::array({e.re, e.im})}});
    }
    return Json{{"name", v.name},
                {"space", v.space},
                {"dim", v.dim},
                {"provenance", v.provenance},
                {"entries", std::move(entries)}};
}

Json to_json(const DumpOperator &o) {
    Json entries = Json::array();
    for (const auto &e : o.entries) {
        entries.push_back(Json::array({e.row, e.col, e.re, e.im}));
    }
    Json j{{"name", o.name},
           {"space", o.space},
           {"dim", o.dim},
           {"provenance", o.provenance},
           {"entries", std::move(entries)}};
    if (o.certificate) {
        j["certificate"] = to_json(*o.certificate);
    }
    return j;
}

}  // namespace

ScenarioDump build_dump(const std::vector<Variant> &variants, const Tolerances &tol) {
    ScenarioDump dump;
    dump.tolerances = tol;
    const auto literal = build_literal_scenario(tol);
    for (const auto v : variants) {
        dump.variants.push_back(dump_variant(v == Variant::literal ? literal : repair_scenario(literal, tol), tol));
    }
    return dump;
}

Json to_json(const ScenarioDump &dump) {
    Json variants = Json::array();
    for (const auto &v : dump.variants) {
        Json vectors = Json::array();
        for (const auto &x : v.vectors) {
            vectors.push_back(to_json(x));
        }
        Json ops = Json::array();
        for (const auto &x : v.operators) {
            ops.push_back(to_json(x));
        }
        variants.push_back(Json{{"variant", v.variant},
                                {"vectors", std::move(vectors)},
                                {"operators", std::move(ops)},
                                {"notes", v.notes}});
    }
    return Json{{"schema", dump.schema}, {"tolerances", to_json(dump.tolerances)}, {"variants", std::move(variants)}};
}

ScenarioDump dump_from_json(const Json &j) {
    try {
        ScenarioDump dump;
        dump.schema = j.at("schema").get<std::string>();
        if (dump.schema != kDumpSchema) {
            throw ContractError("unsupported dump schema '" + dump.schema + "'");
        }
        dump.tolerances = tolerances_from_json(j.at("tolerances"));
        for (const auto &jv : j.at("variants")) {
            DumpVariant v;
            v.variant = jv.at("variant").get<std::string>();
            for (const auto &jx : jv.at("vectors")) {
                DumpVector x{jx.at("name").get<std::string>(), jx.at("space").get<std::string>(),
                             jx.at("dim").get<std::size_t>(), jx.at("provenance").get<std::string>(), {}};
                for (const auto &je : jx.at("entries")) {
                    const auto &val = je.at("value");
                    x.entries.push_back({je.at("index").get<std::size_t>(), je.at("label").get<std::string>(),
                                         je.at("provenance").get<std::string>(), val.at(0).get<double>(),
                                         val.at(1).get<double>()});
                }
                v.vectors.push_back(std::move(x));
            }
            for (const auto &jo : jv.at("operators")) {
                DumpOperator o{jo.at("name").get<std::string>(), jo.at("space").get<std::string>(),
                               jo.at("dim").get<std::size_t>(), jo.at("provenance").get<std::string>(), {},
                               std::nullopt};
                for (const auto &je : jo.at("entries")) {
                    o.entries.push_back({je.at(0).get<std::size_t>(), je.at(1).get<std::size_t>(),
                                         je.at(2).get<double>(), je.at(3).get<double>()});
                }
                if (jo.contains("certificate")) {
                    o.certificate = certificate_from_json(jo.at("certificate"));
                }
                v.operators.push_back(std::move(o));
            }
            v.notes = jv.at("notes").get<std::vector<std::string>>();
            dump.variants.push_back(std::move(v));
        }
        return dump;
    } catch (const nlohmann::json::exception &e) {
        throw ContractError(std::string("malformed dump: ") + e.what());
    }
}

std::string render_dump_text(const ScenarioDump &dump) {
    std::ostringstream out;
    out << "# " << dump.schema << "\n";
    for (const auto &v : dump.variants) {
        out << "\n## variant " << v.variant << "\n";
        for (const auto &x : v.vectors) {
            out << "\n# " << x.name << " (" << x.space << ", dim " << x.dim << ", " << x.provenance << ")\n";
            for (const auto &e : x.entries) {
                out << x.name << "[" << e.label << "] = ";
                if (e.provenance == "computed") {
                    out << format_number(e.re);
                } else {
                    out << e.provenance << " (" << format_number(e.re) << ")";
                }
                if (e.im != 0.0) {
                    out << " + i*" << format_number(e.im);
                }
                out << "\n";
            }
        }
        for (const auto &o : v.operators) {
            out << "\n# " << o.name << " (" << o.space << ", dim " << o.dim << "): " << o.provenance << "\n";
            for (const auto &e : o.entries) {
                out << o.name << "(" << e.row << "," << e.col << ") = " << format_number(e.re);
                if (e.im != 0.0) {
                    out << " + i*" << format_number(e.im);
                }
                out << "\n";
            }
            if (o.certificate) {
                const auto &c = *o.certificate;
                out << o.name << ".certificate: completion " << c.completion << ", rank " << c.rank
                    << ", freedom_dim " << c.freedom_dim << ", detection_residual "
                    << format_number(c.detection_residual) << ", projector_defect "
                    << format_number(c.projector_defect) << ", completion_orthogonality "
                    << format_number(c.completion_orthogonality) << ", feasibility_overlap "
                    << format_number(c.feasibility_overlap) << "\n";
                for (const auto &[k, val] : c.commutator_norms) {
                    out << o.name << ".certificate: ||[" << c.subject << "," << k << "]|| = " << format_number(val)
                        << "\n";
                }
            }
        }
        for (const auto &n : v.notes) {
            out << "note: " << n << "\n";
        }
    }
    return out.str();
}

}  // namespace qdetect
