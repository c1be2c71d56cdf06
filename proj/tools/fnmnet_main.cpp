// Command-line front door: parse, compile, analyze, compare, translate.
// Exit codes: 0 success (or positive verdict), 1 usage, 2 bad input,
// 3 negative verdict (not equivalent / unbounded / not isomorphic /
// counterexample found), 4 resource limit hit.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fnmnet/equiv.hpp"
#include "fnmnet/errors.hpp"
#include "fnmnet/fnm.hpp"
#include "fnmnet/laws.hpp"
#include "fnmnet/netsem.hpp"
#include "fnmnet/petri.hpp"
#include "fnmnet/translate.hpp"

namespace {

using namespace fnmnet;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNegative = 3;
constexpr int kExitResource = 4;

bool g_json_errors = false;

void report_error(const std::string& kind, const std::string& message) {
    if (g_json_errors) {
        nlohmann::ordered_json e;
        e["error"]["kind"] = kind;
        e["error"]["message"] = message;
        std::cerr << e.dump() << "\n";
    } else {
        std::cerr << "fnmnet: " << message << "\n";
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    std::string body = text;
    if (body.empty() || body.back() != '\n') body += '\n';
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << body;
}

fnm::Program load_program(const std::string& path) {
    return fnm::parse_program(read_file(path));
}

Net load_net(const std::string& path) { return net_from_json(read_file(path)); }

// Optional marking flag; the net's own initial marking when absent.
Marking pick_marking(const Net& n, const std::string& flag) {
    return flag.empty() ? n.initial : marking_from_cli(n, flag);
}

// Forget the canonical term names: s1, s2, ... in declaration order.
Net rename_places(const Net& n) {
    std::vector<std::string> fresh;
    fresh.reserve(n.places.size());
    for (std::size_t i = 0; i < n.places.size(); ++i) fresh.push_back("s" + std::to_string(i + 1));
    return Net::make(std::move(fresh), n.transitions, n.initial);
}

const char* category_name(fnm::Category c) {
    switch (c) {
        case fnm::Category::Guarded: return "guarded";
        case fnm::Category::Sequential: return "sequential";
        case fnm::Category::RestrictionFree: return "restriction-free";
        case fnm::Category::General: return "general";
    }
    return "general";
}

struct ParseArgs {
    std::string file;
};

int run_parse(const ParseArgs& a) {
    fnm::Program prog = load_program(a.file);
    bool wf = well_formed(prog.main, prog.env);
    bool adm = admissible(prog.main, prog.env);
    for (const auto& name : prog.env.names()) {
        wf = wf && well_formed(prog.env.body(name), prog.env);
        adm = adm && admissible(prog.env.body(name), prog.env);
    }
    std::cout << "constants: " << prog.env.names().size() << "\n";
    std::cout << "main: " << fnm::print(prog.main) << "\n";
    std::cout << "category: " << category_name(fnm::category_of(prog.main)) << "\n";
    std::cout << "well-formed: " << (wf ? "yes" : "no") << "\n";
    std::cout << "admissible: " << (adm ? "yes" : "no") << "\n";
    if (!wf || !adm) {
        report_error("input", a.file + ": " + (wf ? "not admissible" : "not well-formed"));
        return kExitInput;
    }
    return kExitOk;
}

struct CompileArgs {
    std::string file;
    std::string out;
    bool dot = false;
    bool rename = false;
    netsem::NetOfOptions opts;
};

int run_compile(const CompileArgs& a) {
    fnm::Program prog = load_program(a.file);
    netsem::NetOfResult res = netsem::net_of(prog.main, prog.env, a.opts);
    Net net = a.rename ? rename_places(res.net) : res.net;
    write_output(a.out, a.dot ? net_to_dot(net) : net_to_json(net));
    if (res.truncated) {
        report_error("resource", "net truncated at the place/transition caps");
        return kExitResource;
    }
    return kExitOk;
}

struct SubnetArgs {
    std::string file;
    std::string marking;
    std::string out;
    bool stat = false;
    bool dyn = false;
    bool dot = false;
    std::int64_t cap = kDefaultReachCap;
};

int run_subnet(const SubnetArgs& a) {
    if (a.stat == a.dyn) {
        report_error("usage", "subnet needs exactly one of --static / --dynamic");
        return kExitUsage;
    }
    Net n = load_net(a.file);
    Marking m0 = pick_marking(n, a.marking);
    Net sub = a.stat ? static_subnet(n, m0) : dynamic_subnet(n, m0, a.cap);
    write_output(a.out, a.dot ? net_to_dot(sub) : net_to_json(sub));
    return kExitOk;
}

struct BoundedArgs {
    std::string file;
    std::string marking;
    std::int64_t cap = kDefaultCoverabilityCap;
};

int run_bounded(const BoundedArgs& a) {
    Net n = load_net(a.file);
    Marking m0 = pick_marking(n, a.marking);
    bool b = is_bounded(n, m0, a.cap);
    std::cout << (b ? "bounded" : "unbounded") << "\n";
    return b ? kExitOk : kExitNegative;
}

struct EquivArgs {
    std::vector<std::string> inputs;
    std::string kind;
    std::string m1, m2;
    std::string links_file;
    std::string witness_out;
    equiv::EquivOptions opts;
};

int run_equiv(const EquivArgs& a) {
    Net net;
    Marking m1, m2;
    std::map<std::string, std::string> rename1, rename2;
    if (a.inputs.size() == 2) {
        if (!a.m1.empty() || !a.m2.empty()) {
            report_error("usage", "--m1/--m2 only apply to the single-net form");
            return kExitUsage;
        }
        fnm::Program p1 = load_program(a.inputs[0]);
        fnm::Program p2 = load_program(a.inputs[1]);
        Net n1 = netsem::net_of(p1.main, p1.env).net;
        Net n2 = netsem::net_of(p2.main, p2.env).net;
        UnionNet u = disjoint_union(n1, n2);
        net = std::move(u.net);
        m1 = std::move(u.initial1);
        m2 = std::move(u.initial2);
        rename1 = std::move(u.rename1);
        rename2 = std::move(u.rename2);
    } else {
        if (a.m1.empty() || a.m2.empty()) {
            report_error("usage", "the single-net form needs --m1 and --m2");
            return kExitUsage;
        }
        net = load_net(a.inputs[0]);
        m1 = marking_from_cli(net, a.m1);
        m2 = marking_from_cli(net, a.m2);
    }

    if ((!a.links_file.empty() || !a.witness_out.empty()) && a.kind != "sp") {
        report_error("usage", "--links/--witness only apply to --kind sp");
        return kExitUsage;
    }

    bool eq = false;
    if (a.kind == "int") {
        eq = equiv::interleaving_bisim(net, m1, m2, a.opts.max_markings);
    } else if (a.kind == "step") {
        eq = equiv::step_bisim(net, m1, m2, a.opts.max_markings, a.opts.max_steps);
    } else {
        equiv::SpResult res;
        if (!a.links_file.empty()) {
            equiv::LinkSet links;
            if (a.inputs.size() == 2) {
                // Two-net form: link files name places of each source net; map
                // them through the disjoint-union renaming.
                auto parsed = nlohmann::json::parse(read_file(a.links_file));
                nlohmann::ordered_json mapped = nlohmann::json::array();
                for (const auto& pair : parsed) {
                    if (!pair.is_array() || pair.size() != 2)
                        throw input_error("links entries must be [place1, place2] pairs");
                    auto left = rename1.find(pair[0].get<std::string>());
                    auto right = rename2.find(pair[1].get<std::string>());
                    if (left == rename1.end())
                        throw input_error("unknown place in links: " + pair[0].get<std::string>());
                    if (right == rename2.end())
                        throw input_error("unknown place in links: " + pair[1].get<std::string>());
                    mapped.push_back({left->second, right->second});
                }
                links = equiv::links_from_json(net, mapped.dump());
            } else {
                links = equiv::links_from_json(net, read_file(a.links_file));
            }
            res = equiv::sp_bisim(net, m1, m2, links, a.opts);
        } else {
            res = equiv::sp_bisim(net, m1, m2, a.opts);
        }
        eq = res.equivalent;
        if (eq && !a.witness_out.empty())
            write_output(a.witness_out, equiv::sp_relation_to_json(net, *res.witness));
    }
    std::cout << (eq ? "equivalent" : "not equivalent") << "\n";
    return eq ? kExitOk : kExitNegative;
}

struct TranslateArgs {
    std::string file;
    std::string marking;
    std::string out;
    bool clean = false;
};

int run_translate(const TranslateArgs& a) {
    Net n = load_net(a.file);
    Marking m0 = pick_marking(n, a.marking);
    translate::TranslateOptions opts;
    opts.clean = a.clean;
    write_output(a.out, translate::to_source(translate::to_fnm(n, m0, opts)));
    return kExitOk;
}

struct RoundtripArgs {
    std::string file;
    std::string marking;
    netsem::NetOfOptions opts;
};

int run_roundtrip(const RoundtripArgs& a) {
    Net n = load_net(a.file);
    Marking m0 = pick_marking(n, a.marking);
    translate::RoundtripResult res = translate::roundtrip_check(n, m0, a.opts);
    std::cout << translate::roundtrip_to_json(res) << "\n";
    return res.iso ? kExitOk : kExitNegative;
}

struct LawsArgs {
    std::uint64_t seed = 0;
    int count = 0;
    std::vector<std::string> only;
    std::string out;
    bool json = false;
    laws::LawCaps caps;
};

int run_laws(const LawsArgs& a) {
    laws::LawReport rep = laws::check_laws(a.seed, a.count, a.caps, a.only);
    write_output(a.out, a.json ? laws::report_to_json(rep) : laws::report_summary(rep));
    return rep.total_counterexamples() == 0 ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FNM process calculus and P/T net workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json-errors", g_json_errors, "machine-readable errors on stderr");

    ParseArgs pa;
    auto* cmd_parse = app.add_subcommand("parse", "check a .fnm file");
    cmd_parse->add_option("file", pa.file, ".fnm source")->required();

    CompileArgs ca;
    auto* cmd_compile = app.add_subcommand("compile", "compile a .fnm file to a net");
    cmd_compile->add_option("file", ca.file, ".fnm source")->required();
    cmd_compile->add_option("-o,--output", ca.out, "output path (default stdout)");
    auto* cjson = cmd_compile->add_flag("--json", "JSON output (default)");
    cmd_compile->add_flag("--dot", ca.dot, "DOT output")->excludes(cjson);
    cmd_compile->add_flag("--rename", ca.rename, "rename places to s1, s2, ...");
    cmd_compile->add_flag("--force", ca.opts.force, "compile non-well-formed terms under caps");
    cmd_compile->add_option("--max-places", ca.opts.max_places, "place cap")
        ->capture_default_str();
    cmd_compile->add_option("--max-transitions", ca.opts.max_transitions, "transition cap")
        ->capture_default_str();

    SubnetArgs sa;
    auto* cmd_subnet = app.add_subcommand("subnet", "reachable subnet of a net");
    cmd_subnet->add_option("net", sa.file, "net JSON")->required();
    cmd_subnet->add_flag("--static", sa.stat, "statically reachable subnet");
    cmd_subnet->add_flag("--dynamic", sa.dyn, "dynamically reachable subnet");
    cmd_subnet->add_option("-m,--marking", sa.marking, "start marking place:count,...");
    cmd_subnet->add_option("--cap", sa.cap, "reachable marking cap")->capture_default_str();
    cmd_subnet->add_flag("--dot", sa.dot, "DOT output");
    cmd_subnet->add_option("-o,--output", sa.out, "output path (default stdout)");

    BoundedArgs ba;
    auto* cmd_bounded = app.add_subcommand("bounded", "decide boundedness");
    cmd_bounded->add_option("net", ba.file, "net JSON")->required();
    cmd_bounded->add_option("-m,--marking", ba.marking, "start marking place:count,...");
    cmd_bounded->add_option("--cap", ba.cap, "coverability node cap")->capture_default_str();

    EquivArgs ea;
    auto* cmd_equiv = app.add_subcommand("equiv", "decide behavioral equivalence");
    cmd_equiv->add_option("inputs", ea.inputs, "two .fnm files, or one net JSON")
        ->expected(1, 2)
        ->required();
    cmd_equiv->add_option("--kind", ea.kind, "sp | step | int")
        ->required()
        ->check(CLI::IsMember({"sp", "step", "int"}));
    cmd_equiv->add_option("--m1", ea.m1, "first marking (single-net form)");
    cmd_equiv->add_option("--m2", ea.m2, "second marking (single-net form)");
    cmd_equiv->add_option("--links", ea.links_file, "candidate link set JSON (sp fast path)");
    cmd_equiv->add_option("--witness", ea.witness_out, "write the sp witness JSON here");
    cmd_equiv->add_option("--max-markings", ea.opts.max_markings, "reachable marking cap")
        ->capture_default_str();
    cmd_equiv->add_option("--max-linkings", ea.opts.max_linkings, "linking cap")
        ->capture_default_str();
    cmd_equiv->add_option("--max-marking-size", ea.opts.max_marking_size, "marking size cap")
        ->capture_default_str();
    cmd_equiv->add_option("--max-steps", ea.opts.max_steps, "step enumeration cap")
        ->capture_default_str();

    TranslateArgs ta;
    auto* cmd_translate = app.add_subcommand("translate", "rebuild a process from a net");
    cmd_translate->add_option("net", ta.file, "net JSON")->required();
    cmd_translate->add_option("-m,--marking", ta.marking, "start marking place:count,...");
    cmd_translate->add_flag("--clean", ta.clean, "prune dead summands and unused names");
    cmd_translate->add_option("-o,--output", ta.out, "output path (default stdout)");

    RoundtripArgs ra;
    auto* cmd_roundtrip = app.add_subcommand("roundtrip", "net -> process -> net isomorphism");
    cmd_roundtrip->add_option("net", ra.file, "net JSON")->required();
    cmd_roundtrip->add_option("-m,--marking", ra.marking, "start marking place:count,...");
    cmd_roundtrip->add_option("--max-places", ra.opts.max_places, "place cap")
        ->capture_default_str();
    cmd_roundtrip->add_option("--max-transitions", ra.opts.max_transitions, "transition cap")
        ->capture_default_str();

    LawsArgs la;
    auto* cmd_laws = app.add_subcommand("laws", "seeded axiom soundness sweep");
    cmd_laws->add_option("--seed", la.seed, "generator seed")->required();
    cmd_laws->add_option("--count", la.count, "instances per schema")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_laws->add_option("--schema", la.only, "restrict to these schema ids (repeatable)");
    cmd_laws->add_flag("--json", la.json, "JSON report instead of the summary table");
    cmd_laws->add_option("-o,--output", la.out, "output path (default stdout)");
    cmd_laws->add_option("--max-markings", la.caps.equiv.max_markings, "reachable marking cap")
        ->capture_default_str();
    cmd_laws->add_option("--max-linkings", la.caps.equiv.max_linkings, "linking cap")
        ->capture_default_str();
    cmd_laws
        ->add_option("--max-marking-size", la.caps.equiv.max_marking_size, "marking size cap")
        ->capture_default_str();
    cmd_laws->add_option("--max-steps", la.caps.equiv.max_steps, "step enumeration cap")
        ->capture_default_str();
    cmd_laws->add_option("--max-places", la.caps.compile.max_places, "place cap")
        ->capture_default_str();
    cmd_laws->add_option("--max-transitions", la.caps.compile.max_transitions, "transition cap")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        report_error("usage", e.what());
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(cmd_parse)) return run_parse(pa);
        if (app.got_subcommand(cmd_compile)) return run_compile(ca);
        if (app.got_subcommand(cmd_subnet)) return run_subnet(sa);
        if (app.got_subcommand(cmd_bounded)) return run_bounded(ba);
        if (app.got_subcommand(cmd_equiv)) return run_equiv(ea);
        if (app.got_subcommand(cmd_translate)) return run_translate(ta);
        if (app.got_subcommand(cmd_roundtrip)) return run_roundtrip(ra);
        if (app.got_subcommand(cmd_laws)) return run_laws(la);
    } catch (const resource_error& e) {
        report_error("resource", e.what());
        return kExitResource;
    } catch (const input_error& e) {
        report_error("input", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        report_error("input", e.what());
        return kExitInput;
    }
    return kExitUsage;
}
