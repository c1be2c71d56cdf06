// Python surface for the workbench: compile process terms to nets, extract
// subnets, decide the three equivalences, translate nets back to terms, and
// run the seeded law/congruence sweeps. Nets cross the boundary as a small
// wrapper class; markings as {place: count} dicts; reports as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fnmnet/equiv.hpp"
#include "fnmnet/errors.hpp"
#include "fnmnet/fnm.hpp"
#include "fnmnet/laws.hpp"
#include "fnmnet/netsem.hpp"
#include "fnmnet/petri.hpp"
#include "fnmnet/translate.hpp"

namespace py = pybind11;
using namespace fnmnet;
using nlohmann::ordered_json;

namespace {

py::object to_py(const ordered_json& j) {
    switch (j.type()) {
        case ordered_json::value_t::object: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
            return d;
        }
        case ordered_json::value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(to_py(v));
            return l;
        }
        case ordered_json::value_t::string:
            return py::str(j.get<std::string>());
        case ordered_json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case ordered_json::value_t::number_integer:
        case ordered_json::value_t::number_unsigned:
            return py::int_(j.get<std::int64_t>());
        case ordered_json::value_t::number_float:
            return py::float_(j.get<double>());
        default:
            return py::none();
    }
}

Marking marking_from_dict(const Net& n, const py::dict& d) {
    std::vector<Marking::Entry> es;
    for (auto item : d)
        es.emplace_back(n.index_of(py::cast<std::string>(item.first)),
                        py::cast<std::int64_t>(item.second));
    return Marking::from_entries(std::move(es));
}

py::dict marking_to_dict(const Net& n, const Marking& m) {
    py::dict d;
    for (const auto& [i, c] : m.entries()) d[py::str(n.places[i])] = py::int_(c);
    return d;
}

Marking pick_marking(const Net& n, const std::optional<py::dict>& d) {
    return d ? marking_from_dict(n, *d) : n.initial;
}

// Looks up a place of the original net inside the union.
std::int32_t union_index(const Net& u, const std::map<std::string, std::string>& rename,
                         const std::string& place) {
    auto it = rename.find(place);
    if (it == rename.end()) throw input_error("unknown place: " + place);
    return u.index_of(it->second);
}

Marking remap_entries(const Net& to, const std::map<std::string, std::string>& rename,
                      const py::dict& d) {
    std::vector<Marking::Entry> es;
    for (auto item : d)
        es.emplace_back(union_index(to, rename, py::cast<std::string>(item.first)),
                        py::cast<std::int64_t>(item.second));
    return Marking::from_entries(std::move(es));
}

// Both nets, their markings, and the candidate links mapped into one union.
struct UnionQuery {
    UnionNet u;
    Marking m1, m2;
    equiv::LinkSet links;
};

UnionQuery build_union(const Net& a, const Net& b, const std::optional<py::dict>& m1,
                       const std::optional<py::dict>& m2,
                       const std::optional<std::vector<std::pair<std::string, std::string>>>&
                           links) {
    UnionQuery q{disjoint_union(a, b), {}, {}, {}};
    const Net& n = q.u.net;
    q.m1 = m1 ? remap_entries(n, q.u.rename1, *m1) : q.u.initial1;
    q.m2 = m2 ? remap_entries(n, q.u.rename2, *m2) : q.u.initial2;
    if (links)
        for (const auto& [pa, pb] : *links)
            q.links.emplace_back(union_index(n, q.u.rename1, pa),
                                 union_index(n, q.u.rename2, pb));
    return q;
}

// Witness linkings rendered with each side's own place names.
py::list witness_to_py(const UnionQuery& q, const equiv::SpRelation& r) {
    std::map<std::string, std::string> back1, back2;
    for (const auto& [orig, tagged] : q.u.rename1) back1[tagged] = orig;
    for (const auto& [orig, tagged] : q.u.rename2) back2[tagged] = orig;
    py::list out;
    for (const auto& l : r.linkings) {
        py::list linking;
        for (const auto& [pair, count] : l.entries()) {
            const std::string& p1 = q.u.net.places[pair.first];
            const std::string& p2 = q.u.net.places[pair.second];
            linking.append(py::make_tuple(back1.at(p1), back2.at(p2), count));
        }
        out.append(linking);
    }
    return out;
}

netsem::NetOfOptions compile_opts(bool force, std::int64_t max_places,
                                  std::int64_t max_transitions) {
    netsem::NetOfOptions o;
    o.force = force;
    o.max_places = max_places;
    o.max_transitions = max_transitions;
    return o;
}

Net compile_source(const std::string& source, bool force, std::int64_t max_places,
                   std::int64_t max_transitions) {
    fnm::Program prog = fnm::parse_program(source);
    auto res = netsem::net_of(prog.main, prog.env, compile_opts(force, max_places, max_transitions));
    if (res.truncated) throw resource_error("net truncated at the place or transition cap");
    return res.net;
}

}  // namespace

PYBIND11_MODULE(fnmnet, m) {
    m.doc() = "Process calculus to P/T net compiler and equivalence workbench";

    py::register_exception<input_error>(m, "InputError", PyExc_ValueError);
    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
    py::register_exception<precondition_error>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<resource_error>(m, "ResourceLimit", PyExc_RuntimeError);

    py::class_<Net>(m, "Net")
        .def_static("from_json", [](const std::string& text) { return net_from_json(text); },
                    py::arg("text"))
        .def_property_readonly("places", [](const Net& n) { return n.places; })
        .def_property_readonly("transitions",
                               [](const Net& n) {
                                   py::list out;
                                   for (const auto& t : n.transitions) {
                                       py::dict d;
                                       d["pre"] = marking_to_dict(n, t.pre);
                                       d["label"] = t.label;
                                       d["post"] = marking_to_dict(n, t.post);
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def_property_readonly("initial",
                               [](const Net& n) { return marking_to_dict(n, n.initial); })
        .def("to_json", [](const Net& n) { return net_to_json(n); })
        .def(
            "to_dot",
            [](const Net& n, const std::optional<py::dict>& marking) {
                return marking ? net_to_dot(n, marking_from_dict(n, *marking)) : net_to_dot(n);
            },
            py::arg("marking") = std::nullopt)
        .def(
            "static_subnet",
            [](const Net& n, const std::optional<py::dict>& marking) {
                return static_subnet(n, pick_marking(n, marking));
            },
            py::arg("marking") = std::nullopt)
        .def(
            "dynamic_subnet",
            [](const Net& n, const std::optional<py::dict>& marking, std::int64_t cap) {
                return dynamic_subnet(n, pick_marking(n, marking), cap);
            },
            py::arg("marking") = std::nullopt, py::arg("cap") = kDefaultReachCap)
        .def(
            "is_bounded",
            [](const Net& n, const std::optional<py::dict>& marking, std::int64_t cap) {
                return is_bounded(n, pick_marking(n, marking), cap);
            },
            py::arg("marking") = std::nullopt, py::arg("cap") = kDefaultCoverabilityCap)
        .def(
            "reachable",
            [](const Net& n, const std::optional<py::dict>& marking, std::int64_t cap) {
                py::list out;
                for (const auto& r : reachable(n, pick_marking(n, marking), cap).nodes)
                    out.append(marking_to_dict(n, r));
                return out;
            },
            py::arg("marking") = std::nullopt, py::arg("cap") = kDefaultReachCap)
        .def("__repr__", [](const Net& n) {
            return "<fnmnet.Net " + std::to_string(n.places.size()) + " places, " +
                   std::to_string(n.transitions.size()) + " transitions>";
        });

    m.def(
        "parse",
        [](const std::string& source) {
            fnm::Program prog = fnm::parse_program(source);
            bool wf = fnm::well_formed(prog.main, prog.env);
            bool adm = fnm::admissible(prog.main, prog.env);
            py::list constants;
            for (const auto& name : prog.env.names()) {
                constants.append(name);
                wf = wf && fnm::well_formed(prog.env.body(name), prog.env);
                adm = adm && fnm::admissible(prog.env.body(name), prog.env);
            }
            py::dict d;
            d["constants"] = constants;
            d["main"] = fnm::print(prog.main);
            switch (fnm::category_of(prog.main)) {
                case fnm::Category::Guarded: d["category"] = "guarded"; break;
                case fnm::Category::Sequential: d["category"] = "sequential"; break;
                case fnm::Category::RestrictionFree: d["category"] = "restriction-free"; break;
                case fnm::Category::General: d["category"] = "general"; break;
            }
            d["well_formed"] = wf;
            d["admissible"] = adm;
            return d;
        },
        py::arg("source"), "Parse a program and report its diagnostics without compiling.");

    m.def("compile", &compile_source, py::arg("source"), py::arg("force") = false,
          py::arg("max_places") = netsem::kDefaultNetPlaceCap,
          py::arg("max_transitions") = netsem::kDefaultNetTransitionCap,
          "Compile a program to its place/transition net.");

    m.def(
        "equivalent",
        [](const Net& a, const Net& b, const std::string& kind, const std::optional<py::dict>& m1,
           const std::optional<py::dict>& m2,
           const std::optional<std::vector<std::pair<std::string, std::string>>>& links,
           std::int64_t max_markings, std::int64_t max_linkings, std::int64_t max_marking_size,
           std::int64_t max_steps) {
            UnionQuery q = build_union(a, b, m1, m2, links);
            if (kind == "int") {
                return equiv::interleaving_bisim(q.u.net, q.m1, q.m2, max_markings);
            } else if (kind == "step") {
                return equiv::step_bisim(q.u.net, q.m1, q.m2, max_markings, max_steps);
            } else if (kind == "sp") {
                equiv::EquivOptions opts{max_markings, max_linkings, max_marking_size, max_steps};
                return q.links.empty() ? equiv::sp_bisim(q.u.net, q.m1, q.m2, opts).equivalent
                                       : equiv::sp_bisim(q.u.net, q.m1, q.m2, q.links, opts)
                                             .equivalent;
            }
            throw input_error("kind must be one of sp, step, int");
        },
        py::arg("a"), py::arg("b"), py::arg("kind") = "sp", py::arg("m1") = std::nullopt,
        py::arg("m2") = std::nullopt, py::arg("links") = std::nullopt,
        py::arg("max_markings") = equiv::kDefaultEquivMarkingCap,
        py::arg("max_linkings") = equiv::kDefaultLinkingCap,
        py::arg("max_marking_size") = equiv::kDefaultMarkingSizeCap,
        py::arg("max_steps") = kDefaultStepCap,
        "Decide bisimilarity of two marked nets under the chosen equivalence.");

    m.def(
        "sp_bisim",
        [](const Net& a, const Net& b, const std::optional<py::dict>& m1,
           const std::optional<py::dict>& m2,
           const std::optional<std::vector<std::pair<std::string, std::string>>>& links,
           std::int64_t max_markings, std::int64_t max_linkings, std::int64_t max_marking_size,
           std::int64_t max_steps) {
            UnionQuery q = build_union(a, b, m1, m2, links);
            equiv::EquivOptions opts{max_markings, max_linkings, max_marking_size, max_steps};
            equiv::SpResult res = q.links.empty()
                                      ? equiv::sp_bisim(q.u.net, q.m1, q.m2, opts)
                                      : equiv::sp_bisim(q.u.net, q.m1, q.m2, q.links, opts);
            py::dict d;
            d["equivalent"] = res.equivalent;
            d["witness"] = res.witness ? py::object(witness_to_py(q, *res.witness))
                                       : py::object(py::none());
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("m1") = std::nullopt, py::arg("m2") = std::nullopt,
        py::arg("links") = std::nullopt, py::arg("max_markings") = equiv::kDefaultEquivMarkingCap,
        py::arg("max_linkings") = equiv::kDefaultLinkingCap,
        py::arg("max_marking_size") = equiv::kDefaultMarkingSizeCap,
        py::arg("max_steps") = kDefaultStepCap,
        "Structure-preserving bisimilarity with the witness relation, when one exists. "
        "Witness linkings are (place_in_a, place_in_b, count) triples.");

    m.def(
        "translate",
        [](const Net& n, const std::optional<py::dict>& marking, bool clean) {
            return translate::to_source(
                translate::to_fnm(n, pick_marking(n, marking), translate::TranslateOptions{clean}));
        },
        py::arg("net"), py::arg("marking") = std::nullopt, py::arg("clean") = false,
        "Render a process program whose compiled net is the given one.");

    m.def(
        "roundtrip",
        [](const Net& n, const std::optional<py::dict>& marking, std::int64_t max_places,
           std::int64_t max_transitions) {
            auto res = translate::roundtrip_check(n, pick_marking(n, marking),
                                                  compile_opts(false, max_places, max_transitions));
            return to_py(ordered_json::parse(translate::roundtrip_to_json(res)));
        },
        py::arg("net"), py::arg("marking") = std::nullopt,
        py::arg("max_places") = netsem::kDefaultNetPlaceCap,
        py::arg("max_transitions") = netsem::kDefaultNetTransitionCap,
        "Translate, recompile, and search for a rooted isomorphism.");

    m.def(
        "schemata",
        [] {
            py::list out;
            for (const auto& s : laws::schemata()) {
                py::dict d;
                d["id"] = s.id;
                d["metavariables"] = s.metavariables;
                d["side_conditions"] = s.side_conditions;
                d["equation"] = s.equation;
                out.append(d);
            }
            return out;
        },
        "The axiom schemata of the sound equational theory, in table order.");

    m.def(
        "check_laws",
        [](std::uint64_t seed, int per_schema, const std::vector<std::string>& schemata) {
            return to_py(ordered_json::parse(
                laws::report_to_json(laws::check_laws(seed, per_schema, {}, schemata))));
        },
        py::arg("seed"), py::arg("per_schema"),
        py::arg("schemata") = std::vector<std::string>{},
        "Seeded soundness sweep over the axiom schemata.");

    m.def(
        "check_congruence",
        [](std::uint64_t seed, int rounds) {
            return to_py(ordered_json::parse(
                laws::congruence_to_json(laws::check_congruence(seed, rounds))));
        },
        py::arg("seed"), py::arg("rounds"),
        "Closure of generated sp-equivalent pairs under the process contexts.");
}
