#include "fnmnet/translate.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fnmnet/equiv.hpp"
#include "fnmnet/errors.hpp"

namespace fnmnet::translate {

namespace {

using fnm::Action;
using fnm::TermPtr;

bool plain_input(const std::string& label) {
    if (label.empty() || label == "tau" || label == "nu" || label == "main") return false;
    if (!std::islower(static_cast<unsigned char>(label[0]))) return false;
    return std::all_of(label.begin(), label.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

// Synchronization names x_<transition>_<place>, 1-based like the rest of the
// naming; the prefix grows until the whole family avoids the label alphabet.
std::string sync_prefix(const Net& n) {
    std::set<std::string> alphabet;
    for (const auto& t : n.transitions) alphabet.insert(t.label);
    std::string prefix = "x";
    for (;;) {
        bool clash = false;
        for (std::size_t j = 0; !clash && j < n.transitions.size(); ++j)
            for (std::size_t i = 0; !clash && i < n.places.size(); ++i)
                clash = alphabet.count(prefix + "_" + std::to_string(j + 1) + "_" +
                                       std::to_string(i + 1)) > 0;
        if (!clash) return prefix;
        prefix = "x" + prefix;
    }
}

TermPtr strong_chain(const std::string& name, std::int64_t copies, TermPtr tail) {
    for (std::int64_t c = 0; c < copies; ++c)
        tail = fnm::strong_prefix(Action::input(name), std::move(tail));
    return tail;
}

}  // namespace

TranslationResult to_fnm(const Net& n, const Marking& m0, const TranslateOptions& opts) {
    for (const auto& t : n.transitions)
        if (t.label != "tau" && !plain_input(t.label))
            throw precondition_error("transition labels must be plain input names or tau, got \"" +
                                     t.label + "\"");

    TranslationResult out;
    std::string prefix = sync_prefix(n);
    auto sync_name = [&](std::size_t j, std::size_t i) {
        return prefix + "_" + std::to_string(j + 1) + "_" + std::to_string(i + 1);
    };

    out.constants.reserve(n.places.size());
    for (std::size_t i = 0; i < n.places.size(); ++i)
        out.constants.push_back("C" + std::to_string(i + 1));

    auto parallel_copies = [&](const Marking& m) {
        TermPtr par;
        for (const auto& [place, cnt] : m.entries()) {
            for (std::int64_t c = 0; c < cnt; ++c) {
                TermPtr inst = fnm::constant(out.constants[static_cast<std::size_t>(place)]);
                par = par ? fnm::par(par, inst) : inst;
            }
        }
        return par ? par : fnm::nil();
    };

    for (std::size_t i = 0; i < n.places.size(); ++i) {
        auto self = static_cast<std::int32_t>(i);
        TermPtr body;
        for (std::size_t j = 0; j < n.transitions.size(); ++j) {
            const Transition& t = n.transitions[j];
            std::int64_t here = t.pre.count(self);
            std::int32_t least = t.pre.entries().front().first;
            TermPtr summand;
            if (here == 0) {
                summand = fnm::nil();
            } else if (least < self) {
                // Some smaller-index place leads; this one contributes one
                // servant output per token.
                summand = fnm::prefix(Action::output(sync_name(j, i)), fnm::nil());
            } else {
                // Leader: collect the servants' inputs in place order, then
                // fire the visible label.
                Action fire = t.label == "tau" ? Action::tau() : Action::input(t.label);
                TermPtr seq = fnm::prefix(fire, parallel_copies(t.post));
                for (auto it = t.pre.entries().rbegin(); it != t.pre.entries().rend(); ++it) {
                    if (it->first == self) continue;
                    seq = strong_chain(sync_name(j, static_cast<std::size_t>(it->first)),
                                       it->second, std::move(seq));
                }
                if (here == 1) {
                    summand = seq;
                } else {
                    // Extra tokens of the leader place act as servants; the
                    // leader itself synchronizes with them first.
                    seq = strong_chain(sync_name(j, i), here - 1, std::move(seq));
                    summand = fnm::sum(fnm::prefix(Action::output(sync_name(j, i)), fnm::nil()),
                                       std::move(seq));
                }
            }
            if (opts.clean && summand->kind == fnm::TermKind::Nil) continue;
            body = body ? fnm::sum(body, std::move(summand)) : summand;
        }
        if (!body) body = fnm::nil();
        out.env.define(out.constants[i], body);
    }

    TermPtr inner = parallel_copies(m0);

    std::vector<std::string> names;
    for (std::size_t j = 0; j < n.transitions.size(); ++j)
        for (std::size_t i = 0; i < n.places.size(); ++i) names.push_back(sync_name(j, i));
    std::sort(names.begin(), names.end());
    if (opts.clean) {
        auto used = fnm::free_names(inner, out.env);
        std::erase_if(names, [&](const std::string& x) { return !used.count(x); });
    }

    TermPtr term = inner;
    for (auto it = names.rbegin(); it != names.rend(); ++it)
        term = fnm::restriction(*it, std::move(term));
    out.term = std::move(term);
    out.bound_names = std::move(names);
    return out;
}

std::string to_source(const TranslationResult& t) {
    std::ostringstream os;
    for (const auto& name : t.constants)
        os << name << " := " << fnm::print(t.env.body(name)) << ";\n";
    os << "main = " << fnm::print(t.term) << ";\n";
    return os.str();
}

RoundtripResult roundtrip_check(const Net& n, const Marking& m0,
                                const netsem::NetOfOptions& compile_opts) {
    Net reduced = static_subnet(n, m0);
    if (reduced.places.size() != n.places.size() ||
        reduced.transitions.size() != n.transitions.size()) {
        std::set<std::string> live(reduced.places.begin(), reduced.places.end());
        std::ostringstream os;
        os << "the net is not statically reduced;";
        std::string sep = " unreachable places:";
        for (const auto& p : n.places) {
            if (live.count(p)) continue;
            os << sep << " " << p;
            sep = ",";
        }
        // A transition is dropped exactly when part of its preset never
        // becomes statically reachable.
        sep = "; dead transitions:";
        for (std::size_t j = 0; j < n.transitions.size(); ++j) {
            bool enabled = true;
            for (const auto& [p, c] : n.transitions[j].pre.entries())
                enabled &= live.count(n.places[static_cast<std::size_t>(p)]) > 0;
            if (enabled) continue;
            os << sep << " " << n.transitions[j].label << " (index " << j << ")";
            sep = ",";
        }
        throw precondition_error(os.str());
    }

    TranslationResult tr = to_fnm(n, m0);
    netsem::NetOfResult compiled = netsem::net_of(tr.term, tr.env, compile_opts);

    Net source = Net::make(n.places, n.transitions, m0);
    auto iso = equiv::rooted_iso(source, compiled.net);
    RoundtripResult res;
    res.iso = iso.isomorphic;
    if (iso.isomorphic) {
        for (std::size_t i = 0; i < source.places.size(); ++i)
            res.bijection.emplace_back(
                source.places[i],
                compiled.net.places[static_cast<std::size_t>(iso.place_map[i])]);
    } else {
        std::ostringstream os;
        os << "no rooted isomorphism: source has " << source.places.size() << " places and "
           << source.transitions.size() << " transitions, compiled net has "
           << compiled.net.places.size() << " and " << compiled.net.transitions.size();
        res.mismatch = os.str();
    }
    return res;
}

std::string roundtrip_to_json(const RoundtripResult& r) {
    nlohmann::ordered_json doc;
    doc["iso"] = r.iso;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [a, b] : r.bijection) arr.push_back({a, b});
    doc["bijection"] = std::move(arr);
    if (r.mismatch.empty())
        doc["mismatch"] = nullptr;
    else
        doc["mismatch"] = r.mismatch;
    return doc.dump(2);
}

}  // namespace fnmnet::translate
