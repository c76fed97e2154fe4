#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qdetect/audit.hpp"
#include "qdetect/report_json.hpp"
#include "qdetect/scenario.hpp"
#include "qdetect/simulate.hpp"
#include "qdetect/solver.hpp"

namespace qdetect::cli {

namespace {

struct RunConfig {
    std::string command;
    std::string variant = "both";
    Tolerances tol;
    std::string format = "text";
    std::string output;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t trials = 0;
    std::size_t shards = 1;
    std::string psi = "repaired";
    bool enumerate = false;
    std::string input;
};

std::vector<Variant> selected_variants(const RunConfig &cfg) {
    if (cfg.variant == "both") {
        return {Variant::literal, Variant::repaired};
    }
    return {parse_variant(cfg.variant)};
}

Json config_json(const RunConfig &cfg) {
    Json j{{"variant", cfg.variant}, {"tolerances", to_json(cfg.tol)}, {"format", cfg.format}};
    if (cfg.command == "simulate") {
        j["seed"] = cfg.seed;
        j["trials"] = cfg.trials;
    }
    if (cfg.command == "solve") {
        j["psi"] = cfg.psi;
        j["enumerate"] = cfg.enumerate;
    }
    return j;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string pad(const std::string &s, std::size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

struct Scenarios {
    PaperScenario literal;
    std::optional<PaperScenario> repaired;

    const PaperScenario &get(Variant v) {
        if (v == Variant::literal) {
            return literal;
        }
        if (!repaired) {
            repaired = repair_scenario(literal, tol);
        }
        return *repaired;
    }
    Tolerances tol;
};

bool conditions_pass(const ConditionReport &r) {
    return r.passes();
}

// ------------------------------------------------------------ commands

int cmd_verify(const RunConfig &cfg, Json &results) {
    Scenarios sc{build_literal_scenario(cfg.tol), std::nullopt, cfg.tol};
    const auto variants = selected_variants(cfg);
    const Variant decisive = variants.size() == 1 ? variants[0] : Variant::repaired;
    Json list = Json::array();
    bool passed = false;
    for (auto v : variants) {
        const auto report = evaluate_conditions(sc.get(v), cfg.tol);
        if (v == decisive) {
            passed = conditions_pass(report);
        }
        list.push_back(Json{{"variant", to_string(v)}, {"conditions", to_json(report)}});
    }
    results["decisive_variant"] = to_string(decisive);
    results["passed"] = passed;
    results["variants"] = std::move(list);
    return passed ? kExitOk : kExitConditionFailure;
}

int cmd_audit(const RunConfig &cfg, Json &results) {
    Scenarios sc{build_literal_scenario(cfg.tol), std::nullopt, cfg.tol};
    Json list = Json::array();
    for (auto v : selected_variants(cfg)) {
        const auto &s = sc.get(v);
        list.push_back(Json{{"variant", to_string(v)},
                            {"structural", to_json(structural_audit(s, cfg.tol))},
                            {"conditions", to_json(evaluate_conditions(s, cfg.tol))}});
    }
    results["variants"] = std::move(list);
    return kExitOk;
}

StateVector chosen_state(const RunConfig &cfg) {
    if (cfg.psi == "repaired") {
        return repaired_state(cfg.tol);
    }
    if (cfg.psi == "literal") {
        return build_Psi_literal().vector();
    }
    // A product state: psi1 (x) |s>.
    const auto sys = SpinSystem::seven_halves();
    return tensor_vec(spatial_basis(1), sx_top_eigenvector(sys, cfg.tol));
}

int cmd_solve(const RunConfig &cfg, Json &results) {
    const auto psi = chosen_state(cfg);
    const auto space = scenario_space();
    const auto sys = SpinSystem::seven_halves();
    const auto det = build_detectors();
    results["psi"] = cfg.psi;
    Json subsets = Json::array();
    for (const auto &s : det.subsets) {
        subsets.push_back(s.to_string(sys));
    }
    results["subsets"] = std::move(subsets);

    int code = kExitOk;
    TripleOptions options;
    options.property_names = {"E", "G", "L"};
    options.detector_names = {"T", "Y", "W"};
    options.reference_property = std::pair{std::string("E_I"), build_E().spatial};
    try {
        const auto sol = solve_triple(psi, space, det.subsets, options, cfg.tol);
        Json sols = Json::array();
        for (const auto &s : sol.solutions) {
            sols.push_back(to_json(s));
        }
        results["solutions"] = std::move(sols);
        results["conditions"] = to_json(sol.report);
        results["passed"] = sol.report.passes();
        if (!sol.report.passes()) {
            code = kExitConditionFailure;
        }
    } catch (const InfeasibleError &e) {
        results["solutions"] = Json::array();
        results["passed"] = false;
        results["infeasible"] = Json{{"message", e.what()},
                                     {"subset_mask", e.subset_mask()},
                                     {"fixed_spin", sys.label(e.fixed_slot())},
                                     {"annihilated_spin", sys.label(e.annihilated_slot())},
                                     {"overlap", e.overlap()}};
        code = kExitConditionFailure;
    }

    if (cfg.enumerate) {
        const EnumerationOptions eo;
        Json triples = Json::array();
        const auto stats = enumerate_solutions(
            psi, space, eo, [&](const EnumeratedTriple &t) { triples.push_back(to_json(t, sys)); }, cfg.tol);
        const std::array<std::uint32_t, 3> printed{det.subsets[0].mask(), det.subsets[1].mask(),
                                                 det.subsets[2].mask()};
        const auto canonical = canonical_masks(printed, psi, space, eo, cfg.tol);
        bool found = false;
        for (const auto &t : triples) {
            if (t.at("masks").get<std::array<std::uint32_t, 3>>() == canonical) {
                found = true;
                break;
            }
        }
        Json canon_names = Json::array();
        for (auto m : canonical) {
            canon_names.push_back(SpinSubset(m, sys.dim()).to_string(sys));
        }
        results["enumeration"] = Json{
            {"options",
             {{"complement_pruning", eo.complement_pruning},
              {"absent_channel_pruning", eo.absent_channel_pruning},
              {"require_incompatibility", eo.require_incompatibility}}},
            {"stats",
             {{"candidate_subsets", stats.candidate_subsets},
              {"usable_subsets", stats.usable_subsets},
              {"triples_tested", stats.triples_tested},
              {"solutions", stats.solutions}}},
            {"printed_triple", {{"masks", printed}, {"canonical_masks", canonical}, {"canonical", canon_names}, {"found", found}}},
            {"count", triples.size()},
            {"triples", std::move(triples)}};
        if (stats.solutions == 0) {
            code = kExitConditionFailure;
        }
    }
    return code;
}

int cmd_simulate(const RunConfig &cfg, Json &results) {
    Scenarios sc{build_literal_scenario(cfg.tol), std::nullopt, cfg.tol};
    const auto det = build_detectors();
    const auto sys = SpinSystem::seven_halves();
    const std::vector<Operator> detectors(det.lifted.begin(), det.lifted.end());
    Json list = Json::array();
    for (auto v : selected_variants(cfg)) {
        const auto &s = sc.get(v);
        const auto &psi = s.problem.state;
        const auto exact = exact_joint_distribution(psi, detectors, cfg.tol);
        Json ex = to_json(exact);
        for (std::size_t o = 0; o < exact.outcomes.size(); ++o) {
            Json spins = Json::array();
            for (std::size_t m = 0; m < sys.dim(); ++m) {
                const std::vector<int> bits{det.subsets[0].contains(m), det.subsets[1].contains(m),
                                            det.subsets[2].contains(m)};
                if (bits == exact.outcomes[o].bits) {
                    spins.push_back(sys.label(m));
                }
            }
            ex["outcomes"][o]["spin"] = std::move(spins);
        }
        Json rows = Json::array();
        for (const auto &r : detection_inference_table(psi, s.problem, cfg.tol)) {
            rows.push_back(to_json(r));
        }
        Json entry{{"variant", to_string(v)},
                   {"state_norm_squared", psi.norm_squared()},
                   {"exact", std::move(ex)},
                   {"inference", std::move(rows)}};
        if (cfg.trials > 0) {
            const auto sampled = sample(exact, SamplerConfig{cfg.seed, cfg.trials, cfg.shards});
            entry["sampled"] = to_json(sampled);
            entry["total_variation"] = total_variation(exact, sampled);
        }
        list.push_back(std::move(entry));
    }
    results["detectors"] = Json::array({"T", "Y", "W"});
    results["variants"] = std::move(list);
    return kExitOk;
}

// ------------------------------------------------------------ text rendering

void render_report(std::ostream &os, const Json &report) {
    os << "  " << pad("id", 36) << pad("verdict", 14) << pad("measured", 13) << pad("rel", 4) << pad("threshold", 11)
       << "description\n";
    for (const auto &e : report.at("entries")) {
        os << "  " << pad(e.at("id").get<std::string>(), 36) << pad(e.at("verdict").get<std::string>(), 14)
           << pad(fmt(e.at("measured").get<double>()), 13) << pad(e.at("relation").get<std::string>(), 4)
           << pad(fmt(e.at("threshold").get<double>()), 11) << e.at("description").get<std::string>() << "\n";
        if (e.contains("components")) {
            for (const auto &[k, v] : e.at("components").items()) {
                os << "      " << k << " = " << fmt(v.get<double>()) << "\n";
            }
        }
    }
    for (const auto &n : report.at("notes")) {
        os << "  note: " << n.get<std::string>() << "\n";
    }
}

void render_failing(std::ostream &os, const Json &report) {
    const auto &failing = report.at("failing");
    if (failing.empty()) {
        os << "  all rows pass\n";
        return;
    }
    os << "  failing rows:";
    for (const auto &f : failing) {
        os << " " << f.get<std::string>();
    }
    os << "\n";
}

void render_distribution(std::ostream &os, const Json &d) {
    const bool sampled = d.at("provenance") == "sampled";
    os << "  " << d.at("provenance").get<std::string>();
    if (sampled) {
        os << " (n=" << d.at("n_trials").get<std::uint64_t>() << ", seed=" << d.at("seed").get<std::uint64_t>()
           << ", generator " << d.at("generator").get<std::string>() << ")";
    }
    os << ", total probability " << fmt(d.at("total_probability").get<double>()) << "\n";
    for (const auto &o : d.at("outcomes")) {
        os << "    (";
        const auto &bits = o.at("bits");
        for (std::size_t i = 0; i < bits.size(); ++i) {
            os << (i ? "," : "") << bits[i].get<int>();
        }
        os << ")  p=" << pad(fmt(o.at("probability").get<double>()), 12);
        if (sampled) {
            os << " count=" << o.at("count").get<std::uint64_t>();
        }
        if (o.contains("spin")) {
            os << " spin";
            for (const auto &m : o.at("spin")) {
                os << " " << m.get<std::string>();
            }
        }
        os << "\n";
    }
}

std::string render_text(const Json &doc) {
    std::ostringstream os;
    const auto command = doc.at("command").get<std::string>();
    const auto &cfg = doc.at("config");
    const auto &tol = cfg.at("tolerances");
    os << command << "  [" << doc.at("schema").get<std::string>() << "]  abs_tol=" << fmt(tol.at("abs_tol"))
       << " rel_tol=" << fmt(tol.at("rel_tol")) << " audit_warn_tol=" << fmt(tol.at("audit_warn_tol")) << "\n";
    const auto &res = doc.at("results");
    if (command == "verify") {
        for (const auto &v : res.at("variants")) {
            os << "\n== " << v.at("variant").get<std::string>() << " ==\n";
            render_report(os, v.at("conditions"));
            render_failing(os, v.at("conditions"));
        }
        os << "\nresult: " << (res.at("passed").get<bool>() ? "PASS" : "FAIL") << " (decisive variant "
           << res.at("decisive_variant").get<std::string>() << ")\n";
    } else if (command == "audit") {
        for (const auto &v : res.at("variants")) {
            os << "\n== " << v.at("variant").get<std::string>() << ": structural findings ==\n";
            render_report(os, v.at("structural"));
            os << "\n== " << v.at("variant").get<std::string>() << ": conditions ==\n";
            render_report(os, v.at("conditions"));
            render_failing(os, v.at("conditions"));
        }
    } else if (command == "solve") {
        os << "state: " << res.at("psi").get<std::string>() << "\nsubsets:";
        for (const auto &s : res.at("subsets")) {
            os << " " << s.get<std::string>();
        }
        os << "\n";
        if (res.contains("infeasible")) {
            os << "no solution: " << res.at("infeasible").at("message").get<std::string>() << "\n";
        }
        for (const auto &s : res.at("solutions")) {
            const auto &c = s.at("certificate");
            os << "  " << c.at("subject").get<std::string>() << ": rank " << c.at("rank").get<std::size_t>()
               << ", freedom_dim " << c.at("freedom_dim").get<std::size_t>() << ", completion "
               << c.at("completion").get<std::string>() << ", detection_residual "
               << fmt(c.at("detection_residual")) << ", projector_defect " << fmt(c.at("projector_defect"))
               << ", feasibility_overlap " << fmt(c.at("feasibility_overlap")) << "\n";
            for (const auto &[k, v] : c.at("commutator_norms").items()) {
                os << "      ||[" << c.at("subject").get<std::string>() << "," << k << "]|| = " << fmt(v) << "\n";
            }
        }
        if (res.contains("conditions")) {
            render_report(os, res.at("conditions"));
            render_failing(os, res.at("conditions"));
        }
        if (res.contains("enumeration")) {
            const auto &en = res.at("enumeration");
            const auto &st = en.at("stats");
            const auto &pt = en.at("printed_triple");
            os << "enumeration: " << en.at("count").get<std::size_t>() << " solving triples ("
               << st.at("candidate_subsets").get<std::size_t>() << " candidate subsets per slot, "
               << st.at("triples_tested").get<std::size_t>() << " triples tested)\n";
            os << "  printed triple as canonical";
            for (const auto &c : pt.at("canonical")) {
                os << " " << c.get<std::string>();
            }
            os << ": " << (pt.at("found").get<bool>() ? "found" : "not found") << "\n";
            std::size_t shown = 0;
            for (const auto &t : en.at("triples")) {
                if (shown++ == 10) {
                    os << "  ... (" << en.at("count").get<std::size_t>() - 10 << " more in the json output)\n";
                    break;
                }
                os << "  ";
                for (const auto &s : t.at("subsets")) {
                    os << pad(s.get<std::string>(), 28);
                }
                os << "C.1-3 = " << fmt(t.at("measured")[0]) << ", " << fmt(t.at("measured")[1]) << ", "
                   << fmt(t.at("measured")[2]) << "\n";
            }
        }
        os << "result: " << (doc.at("exit_code").get<int>() == 0 ? "PASS" : "FAIL") << "\n";
    } else if (command == "simulate") {
        for (const auto &v : res.at("variants")) {
            os << "\n== " << v.at("variant").get<std::string>() << " (||psi||^2 = "
               << fmt(v.at("state_norm_squared")) << ") ==\n";
            os << "outcomes over (T,Y,W):\n";
            render_distribution(os, v.at("exact"));
            if (v.contains("sampled")) {
                render_distribution(os, v.at("sampled"));
                os << "  total variation distance " << fmt(v.at("total_variation")) << "\n";
            }
            os << "  inference table:\n";
            for (const auto &r : v.at("inference")) {
                os << "    " << r.at("detector").get<std::string>() << " -> " << r.at("property").get<std::string>()
                   << ": P(detector=1) = " << fmt(r.at("p_detector")) << ", P(property=1) = "
                   << fmt(r.at("p_property")) << ", residual " << fmt(r.at("residual")) << ", "
                   << (r.at("inference").get<bool>() ? "inference holds" : "no inference") << "\n";
            }
        }
    }
    return os.str();
}

int emit(const RunConfig &cfg, const std::string &text, std::ostream &out, std::ostream &err) {
    if (cfg.output.empty()) {
        out << text;
        return kExitOk;
    }
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
        err << "error: cannot open " << cfg.output << " for writing\n";
        return kExitInternalError;
    }
    file << text;
    if (!file) {
        err << "error: failed writing " << cfg.output << "\n";
        return kExitInternalError;
    }
    return kExitOk;
}

int cmd_dump(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    ScenarioDump dump;
    if (!cfg.input.empty()) {
        std::ifstream in(cfg.input, std::ios::binary);
        if (!in) {
            err << "error: cannot read " << cfg.input << "\n";
            return kExitInternalError;
        }
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception &e) {
            err << "error: " << cfg.input << " is not valid json: " << e.what() << "\n";
            return kExitInternalError;
        }
        dump = dump_from_json(j);
    } else {
        dump = build_dump(selected_variants(cfg), cfg.tol);
    }
    const std::string text = cfg.format == "json" ? to_json(dump).dump(2) + "\n" : render_dump_text(dump);
    return emit(cfg, text, out, err);
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    CLI::App app{"Reconstruct, audit and re-derive the three-property detection construction."};
    app.require_subcommand(1);
    app.fallthrough();

    const Tolerances defaults;
    auto *abs_opt = app.add_option("--abs-tol", cfg.tol.abs_tol, "absolute tolerance")
                        ->envname("QDETECT_ABS_TOL")
                        ->capture_default_str();
    app.add_option("--rel-tol", cfg.tol.rel_tol, "relative tolerance")->envname("QDETECT_REL_TOL")->capture_default_str();
    auto *warn_opt = app.add_option("--warn-tol", cfg.tol.audit_warn_tol, "audit warning tolerance")
                         ->envname("QDETECT_WARN_TOL")
                         ->capture_default_str();
    app.add_option("--variant", cfg.variant, "scenario variant")
        ->check(CLI::IsMember({"literal", "repaired", "both"}))
        ->capture_default_str();
    app.add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--output,-o", cfg.output, "write output to this file instead of stdout");

    app.add_subcommand("verify", "evaluate C.1-C.10; exit 0 iff the decisive variant passes");
    app.add_subcommand("audit", "structural findings on every printed object");
    auto *solve = app.add_subcommand("solve", "derive properties for the printed detector subsets");
    solve->add_option("--psi", cfg.psi, "state to solve on")
        ->check(CLI::IsMember({"repaired", "literal", "product"}))
        ->capture_default_str();
    solve->add_flag("--enumerate", cfg.enumerate, "also enumerate every solving subset triple");
    auto *simulate = app.add_subcommand("simulate", "joint (T,Y,W) outcome statistics");
    simulate->add_option("--seed", cfg.seed, "sampler seed")->capture_default_str();
    simulate->add_option("--trials", cfg.trials, "number of sampled trials (0: exact only)")->capture_default_str();
    simulate->add_option("--shards", cfg.shards, "sampling worker threads")->check(CLI::PositiveNumber);
    auto *dump = app.add_subcommand("dump", "every scenario vector and operator with provenance");
    dump->add_option("--input", cfg.input, "re-emit a previously written json dump");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitInternalError;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (abs_opt->count() > 0 && warn_opt->count() == 0 && cfg.tol.abs_tol > defaults.audit_warn_tol) {
            cfg.tol.audit_warn_tol = cfg.tol.abs_tol;
        }
        cfg.tol.validate();
        if (cfg.command == "dump") {
            return cmd_dump(cfg, out, err);
        }
        Json results = Json::object();
        int code = kExitOk;
        if (cfg.command == "verify") {
            code = cmd_verify(cfg, results);
        } else if (cfg.command == "audit") {
            code = cmd_audit(cfg, results);
        } else if (cfg.command == "solve") {
            code = cmd_solve(cfg, results);
        } else {
            code = cmd_simulate(cfg, results);
        }
        Json doc{{"schema", kReportSchema},
                 {"command", cfg.command},
                 {"config", config_json(cfg)},
                 {"results", std::move(results)},
                 {"exit_code", code}};
        const std::string text = cfg.format == "json" ? doc.dump(2) + "\n" : render_text(doc);
        const int io = emit(cfg, text, out, err);
        return io != kExitOk ? io : code;
    } catch (const ContractError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
}

}  // namespace qdetect::cli
