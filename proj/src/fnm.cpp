#include "fnmnet/fnm.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace fnmnet::fnm {

Action Action::complement() const {
    if (is_tau()) throw input_error("tau has no complement");
    Action a = *this;
    a.kind = is_input() ? ActKind::Output : ActKind::Input;
    return a;
}

std::string Action::str() const {
    if (is_tau()) return "tau";
    std::string s;
    if (is_output()) s += '~';
    s += name;
    if (restricted) s += '\'';
    return s;
}

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

Category category_impl(const Term& t) {
    switch (t.kind) {
        case TermKind::Nil:
        case TermKind::Prefix:
        case TermKind::StrongPrefix:
        case TermKind::Sum:
            return Category::Guarded;
        case TermKind::Const:
        case TermKind::Var:
            return Category::Sequential;
        case TermKind::Par:
            return Category::RestrictionFree;
        case TermKind::Restrict:
            return Category::General;
    }
    throw input_error("unknown term kind");
}

void require_category(const TermPtr& p, Category wanted, const char* where) {
    if (category_of(p) > wanted) {
        std::ostringstream os;
        os << where << " must be ";
        switch (wanted) {
            case Category::Guarded: os << "a guarded term"; break;
            case Category::Sequential: os << "a sequential term"; break;
            case Category::RestrictionFree: os << "restriction-free"; break;
            case Category::General: os << "a process"; break;
        }
        os << ", got: " << print(p);
        throw input_error(os.str());
    }
}

bool valid_name(const std::string& n, bool upper) {
    if (n.empty()) return false;
    if (upper ? !std::isupper(static_cast<unsigned char>(n[0]))
              : !std::islower(static_cast<unsigned char>(n[0])))
        return false;
    return std::all_of(n.begin(), n.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

void require_action_name(const std::string& n) {
    if (!valid_name(n, false) || n == "tau" || n == "nu" || n == "main")
        throw input_error("invalid action name: " + n);
}

}  // namespace

Category category_of(const TermPtr& p) {
    if (!p) throw input_error("null term");
    return category_impl(*p);
}

bool in_category(const TermPtr& p, Category c) { return category_of(p) <= c; }

TermPtr nil() {
    static const TermPtr n = make({TermKind::Nil, {}, nullptr, nullptr, ""});
    return n;
}

TermPtr prefix(Action act, TermPtr body) {
    require_category(body, Category::RestrictionFree, "a prefix continuation");
    if (!act.is_tau()) require_action_name(act.name);
    return make({TermKind::Prefix, std::move(act), std::move(body), nullptr, ""});
}

TermPtr strong_prefix(Action act, TermPtr body) {
    if (!act.is_input()) throw input_error("strong prefixes take inputs, got: " + act.str());
    require_action_name(act.name);
    require_category(body, Category::Guarded, "a strong prefix continuation");
    return make({TermKind::StrongPrefix, std::move(act), std::move(body), nullptr, ""});
}

TermPtr sum(TermPtr l, TermPtr r) {
    require_category(l, Category::Guarded, "a summand");
    require_category(r, Category::Guarded, "a summand");
    return make({TermKind::Sum, {}, std::move(l), std::move(r), ""});
}

TermPtr par(TermPtr l, TermPtr r) {
    require_category(l, Category::RestrictionFree, "a parallel component");
    require_category(r, Category::RestrictionFree, "a parallel component");
    return make({TermKind::Par, {}, std::move(l), std::move(r), ""});
}

TermPtr restriction(std::string name, TermPtr body) {
    require_action_name(name);
    if (!body) throw input_error("null term");
    return make({TermKind::Restrict, {}, std::move(body), nullptr, std::move(name)});
}

TermPtr constant(std::string name) {
    // Derived constants carry their originating substitution in the name,
    // e.g. A{c'/c}, so only the leading character and whitespace are checked.
    if (name.empty() || !std::isupper(static_cast<unsigned char>(name[0])) ||
        std::any_of(name.begin(), name.end(),
                    [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); }))
        throw input_error("invalid constant name: " + name);
    return make({TermKind::Const, {}, nullptr, nullptr, std::move(name)});
}

TermPtr variable(std::string name) {
    require_action_name(name);
    return make({TermKind::Var, {}, nullptr, nullptr, std::move(name)});
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->act != b->act || a->name != b->name) return false;
    return term_eq(a->left, b->left) && term_eq(a->right, b->right);
}

namespace {

// Parenthesize compound children so distinct trees print distinctly.
std::string print_wrapped(const TermPtr& p) {
    std::string s = print(p);
    if (p->kind == TermKind::Sum || p->kind == TermKind::Par ||
        p->kind == TermKind::Restrict)
        return "(" + s + ")";
    return s;
}

}  // namespace

std::string print(const TermPtr& p) {
    if (!p) throw input_error("null term");
    switch (p->kind) {
        case TermKind::Nil:
            return "0";
        case TermKind::Prefix:
            return p->act.str() + "." + print_wrapped(p->left);
        case TermKind::StrongPrefix: {
            std::string inner = p->act.name;
            if (p->act.restricted) inner += '\'';
            return "<" + inner + ">." + print_wrapped(p->left);
        }
        case TermKind::Sum:
            return print_wrapped(p->left) + " + " + print_wrapped(p->right);
        case TermKind::Par:
            return print_wrapped(p->left) + " | " + print_wrapped(p->right);
        case TermKind::Restrict: {
            std::string body = print(p->left);
            if (p->left->kind == TermKind::Sum || p->left->kind == TermKind::Par)
                body = "(" + body + ")";
            return "(nu " + p->name + ") " + body;
        }
        case TermKind::Const:
        case TermKind::Var:
            return p->name;
    }
    throw input_error("unknown term kind");
}

void ConstEnv::define(const std::string& name, TermPtr body) {
    if (!valid_name(name, true)) throw input_error("invalid constant name: " + name);
    if (defs_.count(name)) throw input_error("constant already defined: " + name);
    require_category(body, Category::Guarded, "a constant body");
    defs_.emplace(name, std::move(body));
}

bool ConstEnv::has(const std::string& name) const { return defs_.count(name) > 0; }

TermPtr ConstEnv::body(const std::string& name) const {
    auto it = defs_.find(name);
    if (it == defs_.end()) throw input_error("undefined constant: " + name);
    return it->second;
}

std::vector<std::string> ConstEnv::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& [n, _] : defs_) out.push_back(n);
    return out;
}

namespace {

// Whether the name set of interest reaches `p`, following constant bodies.
bool mentions(const TermPtr& p, const ConstEnv& env,
              const std::function<bool(const Term&)>& hit,
              const std::function<bool(const Term&)>& stop,
              std::set<std::string>& seen) {
    if (!p) return false;
    if (hit(*p)) return true;
    if (stop(*p)) return false;
    if (p->kind == TermKind::Const) {
        if (!env.has(p->name) || !seen.insert(p->name).second) return false;
        return mentions(env.body(p->name), env, hit, stop, seen);
    }
    return mentions(p->left, env, hit, stop, seen) ||
           mentions(p->right, env, hit, stop, seen);
}

bool mentions_action(const TermPtr& p, const ConstEnv& env, const std::string& name) {
    std::set<std::string> seen;
    return mentions(
        p, env,
        [&](const Term& t) {
            return (t.kind == TermKind::Prefix || t.kind == TermKind::StrongPrefix) &&
                   !t.act.is_tau() && !t.act.restricted && t.act.name == name;
        },
        [&](const Term& t) { return t.kind == TermKind::Restrict && t.name == name; },
        seen);
}

bool mentions_var(const TermPtr& p, const ConstEnv& env, const std::string& x) {
    std::set<std::string> seen;
    return mentions(
        p, env, [&](const Term& t) { return t.kind == TermKind::Var && t.name == x; },
        [](const Term&) { return false; }, seen);
}

std::string derived_name(const std::string& base, const std::string& to,
                         const std::string& from) {
    std::string compact;
    for (char c : to)
        if (c != ' ') compact += c;
    return base + "{" + compact + "/" + from + "}";
}

}  // namespace

TermPtr ConstEnv::substitute_action(const TermPtr& p, const std::string& from,
                                    const std::string& to, bool to_restricted) {
    require_action_name(from);
    require_action_name(to);
    if (!p) throw input_error("null term");
    switch (p->kind) {
        case TermKind::Nil:
        case TermKind::Var:
            return p;
        case TermKind::Prefix:
        case TermKind::StrongPrefix: {
            Action act = p->act;
            if (!act.is_tau() && !act.restricted && act.name == from) {
                act.name = to;
                act.restricted = to_restricted;
            }
            TermPtr body = substitute_action(p->left, from, to, to_restricted);
            if (act == p->act && body == p->left) return p;
            Term t = *p;
            t.act = act;
            t.left = body;
            return make(std::move(t));
        }
        case TermKind::Sum:
        case TermKind::Par: {
            TermPtr l = substitute_action(p->left, from, to, to_restricted);
            TermPtr r = substitute_action(p->right, from, to, to_restricted);
            if (l == p->left && r == p->right) return p;
            Term t = *p;
            t.left = l;
            t.right = r;
            return make(std::move(t));
        }
        case TermKind::Restrict: {
            if (p->name == from) return p;  // occurrences below are bound
            if (p->name == to && !to_restricted &&
                mentions_action(p->left, *this, from))
                throw input_error("substitution would capture " + to + " under (nu " +
                                  p->name + ")");
            TermPtr body = substitute_action(p->left, from, to, to_restricted);
            if (body == p->left) return p;
            Term t = *p;
            t.left = body;
            return make(std::move(t));
        }
        case TermKind::Const: {
            if (!mentions_action(p, *this, from)) return p;
            std::string to_txt = to + (to_restricted ? "'" : "");
            std::string dname = derived_name(p->name, to_txt, from);
            if (!defs_.count(dname)) {
                // Pre-register so recursive constants close the loop on the
                // derived name instead of recursing forever.
                defs_.emplace(dname, nullptr);
                defs_[dname] = substitute_action(body(p->name), from, to, to_restricted);
            }
            return constant(dname);
        }
    }
    throw input_error("unknown term kind");
}

TermPtr ConstEnv::substitute_var(const TermPtr& p, const std::string& x, const TermPtr& q) {
    require_action_name(x);
    require_category(q, Category::Sequential, "a substituted term");
    if (!free_vars(q, *this).empty())
        throw input_error("substituted term must be closed: " + print(q));
    std::function<TermPtr(const TermPtr&)> go = [&](const TermPtr& t) -> TermPtr {
        switch (t->kind) {
            case TermKind::Nil:
                return t;
            case TermKind::Var:
                return t->name == x ? q : t;
            case TermKind::Prefix:
            case TermKind::StrongPrefix: {
                TermPtr body = go(t->left);
                if (body == t->left) return t;
                Term u = *t;
                u.left = body;
                return make(std::move(u));
            }
            case TermKind::Sum:
            case TermKind::Par: {
                TermPtr l = go(t->left), r = go(t->right);
                if (l == t->left && r == t->right) return t;
                Term u = *t;
                u.left = l;
                u.right = r;
                return make(std::move(u));
            }
            case TermKind::Restrict: {
                if (mentions_var(t->left, *this, x) &&
                    free_names(q, *this).count(t->name))
                    throw input_error("substitution would capture " + t->name +
                                      " under (nu " + t->name + ")");
                TermPtr body = go(t->left);
                if (body == t->left) return t;
                Term u = *t;
                u.left = body;
                return make(std::move(u));
            }
            case TermKind::Const: {
                if (!mentions_var(t, *this, x)) return t;
                std::string dname = derived_name(t->name, print(q), x);
                if (!defs_.count(dname)) {
                    defs_.emplace(dname, nullptr);
                    defs_[dname] = go(body(t->name));
                }
                return constant(dname);
            }
        }
        throw input_error("unknown term kind");
    };
    return go(p);
}

namespace {

void collect(const TermPtr& p, const ConstEnv& env, std::set<std::string>* acts,
             std::set<std::string>* vars, std::set<std::string>& seen_consts,
             std::set<std::string> bound) {
    if (!p) return;
    switch (p->kind) {
        case TermKind::Nil:
            return;
        case TermKind::Prefix:
        case TermKind::StrongPrefix:
            if (acts && !p->act.is_tau()) {
                std::string base = p->act.name + (p->act.restricted ? "'" : "");
                if (p->act.restricted || !bound.count(p->act.name)) acts->insert(base);
            }
            collect(p->left, env, acts, vars, seen_consts, bound);
            return;
        case TermKind::Sum:
        case TermKind::Par:
            collect(p->left, env, acts, vars, seen_consts, bound);
            collect(p->right, env, acts, vars, seen_consts, bound);
            return;
        case TermKind::Restrict:
            bound.insert(p->name);
            collect(p->left, env, acts, vars, seen_consts, std::move(bound));
            return;
        case TermKind::Const:
            if (env.has(p->name) && seen_consts.insert(p->name).second)
                collect(env.body(p->name), env, acts, vars, seen_consts, std::move(bound));
            return;
        case TermKind::Var:
            if (vars) vars->insert(p->name);
            return;
    }
}

}  // namespace

std::set<std::string> free_names(const TermPtr& p, const ConstEnv& env) {
    std::set<std::string> acts, seen;
    collect(p, env, &acts, nullptr, seen, {});
    return acts;
}

std::set<std::string> bound_names(const TermPtr& p) {
    std::set<std::string> out;
    for (TermPtr cur = p; cur && cur->kind == TermKind::Restrict; cur = cur->left)
        out.insert(cur->name);
    return out;
}

std::set<std::string> free_vars(const TermPtr& p, const ConstEnv& env) {
    std::set<std::string> vars, seen;
    collect(p, env, nullptr, &vars, seen, {});
    return vars;
}

bool closed(const TermPtr& p, const ConstEnv& env) { return free_vars(p, env).empty(); }

bool admissible(const TermPtr& p, const ConstEnv& env) {
    std::set<std::string> fn = free_names(p, env);
    return std::none_of(fn.begin(), fn.end(), [&](const std::string& n) {
        return !n.empty() && n.back() == '\'' && fn.count(n.substr(0, n.size() - 1));
    });
}

namespace {

// Summands reachable from a strong prefix continuation may offer only 0,
// inputs, tau or further strong prefixes; outputs would make an executable
// atomic sequence emit before completing.
bool wf_continuation(const TermPtr& p) {
    switch (p->kind) {
        case TermKind::Nil:
        case TermKind::StrongPrefix:
            return true;
        case TermKind::Prefix:
            return !p->act.is_output();
        case TermKind::Sum:
            return wf_continuation(p->left) && wf_continuation(p->right);
        default:
            return false;
    }
}

bool wf_walk(const TermPtr& p, const ConstEnv& env, std::set<std::string>& seen) {
    if (!p) return true;
    if (p->kind == TermKind::Const)
        return !env.has(p->name) || !seen.insert(p->name).second ||
               wf_walk(env.body(p->name), env, seen);
    if (p->kind == TermKind::StrongPrefix && !wf_continuation(p->left)) return false;
    return wf_walk(p->left, env, seen) && wf_walk(p->right, env, seen);
}

}  // namespace

bool well_formed(const TermPtr& p, const ConstEnv& env) {
    std::set<std::string> seen;
    return wf_walk(p, env, seen);
}

namespace {

struct Token {
    enum Kind { Ident, UIdent, Zero, LParen, RParen, Dot, Plus, Bar, Lt, Gt, Tilde,
                Define, Equals, Semi, End } kind;
    std::string text;
    int line, col;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++pos_, ++line_, col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_, ++col_;
            } else {
                break;
            }
        }
        tok_ = {Token::End, "", line_, col_};
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        auto single = [&](Token::Kind k) {
            tok_.kind = k;
            tok_.text = c;
            ++pos_, ++col_;
        };
        switch (c) {
            case '0': single(Token::Zero); return;
            case '(': single(Token::LParen); return;
            case ')': single(Token::RParen); return;
            case '.': single(Token::Dot); return;
            case '+': single(Token::Plus); return;
            case '|': single(Token::Bar); return;
            case '<': single(Token::Lt); return;
            case '>': single(Token::Gt); return;
            case '~': single(Token::Tilde); return;
            case '=': single(Token::Equals); return;
            case ';': single(Token::Semi); return;
            case ':':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                    tok_ = {Token::Define, ":=", line_, col_};
                    pos_ += 2, col_ += 2;
                    return;
                }
                throw parse_error("stray ':'", line_, col_);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            tok_.text = text_.substr(start, pos_ - start);
            tok_.kind = std::isupper(static_cast<unsigned char>(c)) ? Token::UIdent
                                                                    : Token::Ident;
            col_ += static_cast<int>(pos_ - start);
            if (pos_ < text_.size() && text_[pos_] == '\'')
                throw parse_error("primed names are reserved for restricted actions",
                                  tok_.line, tok_.col);
            return;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", line_, col_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_{Token::End, "", 1, 1};
};

class Parser {
  public:
    Parser(const std::string& text, const ConstEnv* base) : lex_(text), base_(base) {}

    Program program() {
        Program prog;
        bool have_main = false;
        while (lex_.peek().kind != Token::End) {
            Token t = lex_.peek();
            if (t.kind == Token::UIdent) {
                Token name = lex_.take();
                expect(Token::Define, "':='");
                TermPtr body = wrap(name, [&] { return process(); });
                if (category_of(body) > Category::Guarded)
                    throw parse_error("constant body must be a guarded term", name.line,
                                      name.col);
                expect(Token::Semi, "';'");
                if (prog.env.has(name.text))
                    throw parse_error("constant already defined: " + name.text, name.line,
                                      name.col);
                prog.env.define(name.text, body);
            } else if (t.kind == Token::Ident && t.text == "main") {
                if (have_main) throw parse_error("duplicate main", t.line, t.col);
                have_main = true;
                lex_.take();
                expect(Token::Equals, "'='");
                prog.main = process();
                expect(Token::Semi, "';'");
            } else {
                throw parse_error("expected a definition or main", t.line, t.col);
            }
        }
        if (!have_main) throw parse_error("missing main", 1, 1);
        check_defined(prog.main, prog.env);
        for (const auto& n : prog.env.names()) check_defined(prog.env.body(n), prog.env);
        return prog;
    }

    TermPtr single_term() {
        TermPtr t = process();
        Token end = lex_.peek();
        if (end.kind != Token::End)
            throw parse_error("trailing input after term", end.line, end.col);
        check_defined(t, base_ ? *base_ : empty_env_);
        return t;
    }

  private:
    template <typename F>
    TermPtr wrap(const Token& at, F f) {
        try {
            return f();
        } catch (const parse_error&) {
            throw;
        } catch (const input_error& e) {
            throw parse_error(e.what(), at.line, at.col);
        }
    }

    Token expect(Token::Kind k, const char* what) {
        Token t = lex_.take();
        if (t.kind != k)
            throw parse_error(std::string("expected ") + what, t.line, t.col);
        return t;
    }

    TermPtr process() {
        if (lex_.peek().kind == Token::LParen) {
            // Either '(nu a) p' or a parenthesized term opening a +/| chain;
            // take '(' and look for the nu keyword to decide.
            Token open = lex_.take();
            if (lex_.peek().kind == Token::Ident && lex_.peek().text == "nu") {
                lex_.take();
                Token name = expect(Token::Ident, "an action name");
                if (name.text == "tau" || name.text == "nu" || name.text == "main")
                    throw parse_error("reserved word: " + name.text, name.line, name.col);
                expect(Token::RParen, "')'");
                return wrap(open, [&] { return restriction(name.text, process()); });
            }
            TermPtr inner = process();
            expect(Token::RParen, "')'");
            return par_tail(sum_tail(inner));
        }
        return par_tail(sum_chain());
    }

    TermPtr par_tail(TermPtr left) {
        while (lex_.peek().kind == Token::Bar) {
            Token op = lex_.take();
            TermPtr right = sum_chain();
            left = wrap(op, [&] { return par(left, right); });
        }
        return left;
    }

    TermPtr sum_chain() { return sum_tail(prefixed()); }

    TermPtr sum_tail(TermPtr left) {
        while (lex_.peek().kind == Token::Plus) {
            Token op = lex_.take();
            TermPtr right = prefixed();
            left = wrap(op, [&] { return sum(left, right); });
        }
        return left;
    }

    TermPtr prefixed() {
        Token t = lex_.peek();
        switch (t.kind) {
            case Token::Ident: {
                if (t.text == "tau") {
                    lex_.take();
                    expect(Token::Dot, "'.' after tau");
                    TermPtr body = prefixed();
                    return wrap(t, [&] { return prefix(Action::tau(), body); });
                }
                if (t.text == "nu" || t.text == "main")
                    throw parse_error("reserved word: " + t.text, t.line, t.col);
                lex_.take();
                expect(Token::Dot, "'.' after an action");
                TermPtr body = prefixed();
                return wrap(t, [&] { return prefix(Action::input(t.text), body); });
            }
            case Token::Tilde: {
                lex_.take();
                Token name = expect(Token::Ident, "an action name after '~'");
                if (name.text == "tau")
                    throw parse_error("tau cannot be an output", name.line, name.col);
                expect(Token::Dot, "'.' after an action");
                TermPtr body = prefixed();
                return wrap(name, [&] { return prefix(Action::output(name.text), body); });
            }
            case Token::Lt: {
                lex_.take();
                Token name = expect(Token::Ident, "an action name inside '<...>'");
                expect(Token::Gt, "'>'");
                expect(Token::Dot, "'.' after a strong prefix");
                TermPtr body = prefixed();
                return wrap(name, [&] { return strong_prefix(Action::input(name.text), body); });
            }
            case Token::Zero:
                lex_.take();
                return nil();
            case Token::UIdent:
                lex_.take();
                return constant(t.text);
            case Token::LParen: {
                lex_.take();
                if (lex_.peek().kind == Token::Ident && lex_.peek().text == "nu") {
                    lex_.take();
                    Token name = expect(Token::Ident, "an action name");
                    expect(Token::RParen, "')'");
                    return wrap(t, [&] { return restriction(name.text, process()); });
                }
                TermPtr inner = process();
                expect(Token::RParen, "')'");
                return inner;
            }
            default:
                throw parse_error("expected a term", t.line, t.col);
        }
    }

    void check_defined(const TermPtr& p, const ConstEnv& env) {
        if (!p) return;
        if (p->kind == TermKind::Const) {
            if (!env.has(p->name) && !(base_ && base_->has(p->name)))
                throw input_error("undefined constant: " + p->name);
            if (seen_.insert(p->name).second) {
                if (env.has(p->name)) check_defined(env.body(p->name), env);
                else check_defined(base_->body(p->name), env);
            }
            return;
        }
        check_defined(p->left, env);
        check_defined(p->right, env);
    }

    Lexer lex_;
    const ConstEnv* base_;
    ConstEnv empty_env_;
    std::set<std::string> seen_;
};

}  // namespace

Program parse_program(const std::string& text) {
    Parser p(text, nullptr);
    return p.program();
}

TermPtr parse_term(const std::string& text, const ConstEnv& env) {
    Parser p(text, &env);
    return p.single_term();
}

}  // namespace fnmnet::fnm
