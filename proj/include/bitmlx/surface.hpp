// Concrete textual syntax for BitMLx advertisements (.bx files).
//
//   participants A, B
//   chains BTC, DGC
//   deposit A 1 BTC, 0 DGC
//   secret A x
//   start 100 k0
//   contract = Pay >> Abort
//   Pay = withdraw(0 BTC, 1 DGC -> A; 1 BTC, 0 DGC -> B)
//   Abort = withdraw(1 BTC, 0 DGC -> A; 0 BTC, 1 DGC -> B)
//
// `>>` is the priority-choice operator. Named definitions (optionally indexed,
// `Name[i] = ...`) are macros inlined at parse time; indices must strictly
// decrease on self reference. `reveal* s` abbreviates `reveal s if |s| < 2`.
// `#` starts a line comment.

#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ast.hpp"

namespace bitmlx {

struct SourceFile {
    std::string text;
    std::string origin{"<stdin>"};
};

struct ParseError : std::runtime_error {
    int line, col;
    std::string expected;
    ParseError(int line_, int col_, const std::string& expected_)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                             ": expected " + expected_),
          line(line_), col(col_), expected(expected_) {}
};

struct MacroRecursionError : std::runtime_error {
    explicit MacroRecursionError(const std::string& name)
        : std::runtime_error("macro recursion does not decrease: " + name) {}
};

namespace detail {

struct Token {
    enum class Kind { ident, integer, punct, end };
    Kind kind{Kind::end};
    std::string text;
    long long value{0};
    int line{1}, col{1};
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') { ++line; col = 1; } else { ++col; }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') { advance(src[i]); ++i; }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) { advance(c); ++i; continue; }
        Token t;
        t.line = line; t.col = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                num += src[i]; advance(src[i]); ++i;
            }
            t.kind = Token::Kind::integer;
            t.text = num;
            t.value = std::strtoll(num.c_str(), nullptr, 10);
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                id += src[i]; advance(src[i]); ++i;
            }
            t.kind = Token::Kind::ident;
            t.text = id;
            out.push_back(t);
            continue;
        }
        // multi-char punctuation first
        static const char* two[] = {">>", "->", "&&", "==", "!=", "<="};
        bool matched = false;
        for (const char* p : two) {
            if (src.compare(i, 2, p) == 0) {
                t.kind = Token::Kind::punct;
                t.text = p;
                out.push_back(t);
                advance(src[i]); advance(src[i + 1]);
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        t.kind = Token::Kind::punct;
        t.text = std::string(1, c);
        out.push_back(t);
        advance(c);
        ++i;
    }
    Token eof;
    eof.kind = Token::Kind::end;
    eof.line = line; eof.col = col;
    out.push_back(eof);
    return out;
}

struct Macro {
    std::string param;          // empty when not indexed
    std::vector<Token> body;    // tokens up to end of definition
};

class Parser {
public:
    Parser(std::vector<Token> toks, const std::map<std::string, Macro>* macros, int expansion_bound)
        : toks_(std::move(toks)), macros_(macros), bound_(expansion_bound) {}

    // used for macro bodies: shares the macro table and expansion stack
    Parser(std::vector<Token> toks, const Parser& parent)
        : toks_(std::move(toks)), macros_(parent.macros_), bound_(parent.bound_),
          stack_(parent.stack_) {}

    const Token& peek(int k = 0) const {
        std::size_t j = pos_ + static_cast<std::size_t>(k);
        return j < toks_.size() ? toks_[j] : toks_.back();
    }
    bool at_punct(const std::string& p) const {
        return peek().kind == Token::Kind::punct && peek().text == p;
    }
    bool at_ident(const std::string& id) const {
        return peek().kind == Token::Kind::ident && peek().text == id;
    }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("'" + p + "'");
        take();
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != Token::Kind::ident) fail(what);
        return take().text;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(peek().line, peek().col, expected);
    }
    bool done() const { return peek().kind == Token::Kind::end; }

    // integer with constant folding: INT (('+'|'-') INT)*
    long long integer() {
        if (peek().kind != Token::Kind::integer) fail("integer");
        long long v = take().value;
        while (at_punct("+") || at_punct("-")) {
            bool plus = peek().text == "+";
            // only fold when the next token is an integer literal
            if (peek(1).kind != Token::Kind::integer) break;
            take();
            long long w = take().value;
            v = plus ? v + w : v - w;
        }
        return v;
    }

    Balance balance() {
        Balance b;
        while (true) {
            long long v = integer();
            std::string chain = expect_ident("chain name");
            b.set(Chain{chain}, v);
            if (at_punct(",") && peek(1).kind == Token::Kind::integer) {
                take();
                continue;
            }
            break;
        }
        return b;
    }

    Withdraw withdraw_body() {
        expect_punct("(");
        Withdraw w;
        while (true) {
            WithdrawAssign a;
            a.amount = balance();
            expect_punct("->");
            a.to = Participant{expect_ident("participant")};
            w.assigns.push_back(std::move(a));
            if (at_punct(";")) { take(); continue; }
            break;
        }
        expect_punct(")");
        return w;
    }

    ExprPtr expr_term() {
        if (at_punct("|")) {
            take();
            std::string s = expect_ident("secret name");
            expect_punct("|");
            return Expr::secret_len(s);
        }
        if (peek().kind == Token::Kind::integer)
            return Expr::constant(static_cast<std::int32_t>(take().value));
        fail("expression");
    }

    ExprPtr expression() {
        ExprPtr e = expr_term();
        while (at_punct("+") || at_punct("-")) {
            bool plus = take().text == "+";
            ExprPtr r = expr_term();
            e = plus ? Expr::add(e, r) : Expr::sub(e, r);
        }
        return e;
    }

    PredPtr pred_unit() {
        if (at_punct("!")) { take(); return Predicate::neg(pred_unit()); }
        if (at_ident("true")) { take(); return Predicate::truth(); }
        if (at_punct("(")) {
            take();
            PredPtr p = predicate();
            expect_punct(")");
            return p;
        }
        ExprPtr l = expression();
        if (at_punct("==") || at_punct("=")) { take(); return Predicate::eq(l, expression()); }
        if (at_punct("!=")) { take(); return Predicate::neg(Predicate::eq(l, expression())); }
        if (at_punct("<")) { take(); return Predicate::lt(l, expression()); }
        if (at_punct("<=")) {
            take();
            return Predicate::lt(l, Expr::add(expression(), Expr::constant(1)));
        }
        fail("comparison");
    }

    PredPtr predicate() {
        PredPtr p = pred_unit();
        while (at_punct("&&")) {
            take();
            p = Predicate::conj(p, pred_unit());
        }
        return p;
    }

    // atom: withdraw, parenthesized contract, or macro reference
    ContractPtr contract_atom() {
        if (at_ident("withdraw")) {
            take();
            return std::make_shared<Contract>(Contract{withdraw_body()});
        }
        if (at_punct("(")) {
            take();
            ContractPtr c = contract();
            expect_punct(")");
            return c;
        }
        if (peek().kind == Token::Kind::ident) return expand_contract(take());
        fail("contract");
    }

    GuardedPtr guarded() {
        if (at_ident("withdraw")) {
            take();
            return std::make_shared<GuardedContract>(GuardedContract{withdraw_body()});
        }
        if (at_ident("split")) {
            take();
            expect_punct("(");
            std::vector<std::pair<Balance, ContractPtr>> branches;
            while (true) {
                Balance b = balance();
                expect_punct("->");
                branches.emplace_back(std::move(b), contract_atom());
                if (at_punct(";")) { take(); continue; }
                break;
            }
            expect_punct(")");
            return GuardedContract::split(std::move(branches));
        }
        if (at_ident("auth")) {
            take();
            expect_punct("[");
            std::vector<Participant> signers;
            signers.push_back(Participant{expect_ident("participant")});
            while (at_punct(",")) {
                take();
                signers.push_back(Participant{expect_ident("participant")});
            }
            expect_punct("]");
            return GuardedContract::auth(std::move(signers), guarded());
        }
        if (at_ident("reveal")) {
            take();
            bool starred = false;
            if (at_punct("*")) { take(); starred = true; }
            std::vector<std::string> secrets;
            secrets.push_back(expect_ident("secret name"));
            while (at_punct(",")) {
                take();
                secrets.push_back(expect_ident("secret name"));
            }
            PredPtr cond = Predicate::truth();
            if (at_ident("if")) {
                take();
                cond = predicate();
            }
            if (starred) {
                // reveal* s  ==  reveal s if |s| < 2 (bit-valued secret)
                for (const auto& s : secrets)
                    cond = std::holds_alternative<Predicate::True>(cond->node)
                               ? Predicate::lt(Expr::secret_len(s), Expr::constant(2))
                               : Predicate::conj(Predicate::lt(Expr::secret_len(s), Expr::constant(2)), cond);
            }
            expect_punct(".");
            return GuardedContract::reveal(std::move(secrets), cond, contract_atom());
        }
        if (peek().kind == Token::Kind::ident) return expand_guarded(take());
        fail("guarded contract");
    }

    ContractPtr contract() {
        // A contract is either a plain withdraw/reference or guarded >> contract.
        // Disambiguate by looking for `>>` after the first unit.
        std::size_t save = pos_;
        if (at_ident("withdraw")) {
            take();
            Withdraw w = withdraw_body();
            if (at_punct(">>")) {
                take();
                return Contract::priority(std::make_shared<GuardedContract>(GuardedContract{std::move(w)}), contract());
            }
            return std::make_shared<Contract>(Contract{std::move(w)});
        }
        if (at_ident("split") || at_ident("auth") || at_ident("reveal")) {
            GuardedPtr g = guarded();
            expect_punct(">>");
            return Contract::priority(std::move(g), contract());
        }
        if (at_punct("(")) {
            take();
            ContractPtr inner = contract();
            expect_punct(")");
            if (at_punct(">>")) {
                take();
                GuardedPtr g = to_guarded(inner);
                return Contract::priority(std::move(g), contract());
            }
            return inner;
        }
        if (peek().kind == Token::Kind::ident) {
            Token name = take();
            if (at_punct("[") || !at_punct(">>")) {
                // maybe indexed reference; decide after the reference
                pos_ = save;
                Token name2 = take();
                ContractPtr c = expand_contract(name2);
                if (at_punct(">>")) {
                    take();
                    return Contract::priority(to_guarded(c), contract());
                }
                return c;
            }
            take();  // ">>"
            return Contract::priority(expand_guarded(name), contract());
        }
        fail("contract");
    }

private:
    // A contract used in guarded position must be a bare withdraw.
    GuardedPtr to_guarded(const ContractPtr& c) {
        if (auto* w = std::get_if<Withdraw>(&c->node))
            return std::make_shared<GuardedContract>(GuardedContract{*w});
        fail("guarded contract (priority choice cannot be the left branch)");
    }

    std::vector<Token> instantiate(const Macro& m, long long arg, bool indexed) {
        std::vector<Token> out;
        out.reserve(m.body.size() + 1);
        for (const auto& t : m.body) {
            if (indexed && t.kind == Token::Kind::ident && t.text == m.param) {
                Token n;
                n.kind = Token::Kind::integer;
                n.value = arg;
                n.text = std::to_string(arg);
                n.line = t.line; n.col = t.col;
                out.push_back(n);
            } else {
                out.push_back(t);
            }
        }
        Token eof;
        eof.kind = Token::Kind::end;
        out.push_back(eof);
        return out;
    }

    struct Frame { std::string name; long long index; bool indexed; };

    template <typename F>
    auto with_expansion(const Token& name, F&& parse_body) {
        if (!macros_ || macros_->find(name.text) == macros_->end())
            throw ParseError(name.line, name.col, "known contract name (got '" + name.text + "')");
        const Macro& m = macros_->at(name.text);
        bool indexed = !m.param.empty();
        long long arg = 0;
        if (indexed) {
            expect_punct("[");
            arg = integer();
            expect_punct("]");
        } else if (at_punct("[")) {
            fail("no index for macro '" + name.text + "'");
        }
        if (static_cast<int>(stack_.size()) >= bound_) throw MacroRecursionError(name.text);
        for (const auto& f : stack_) {
            if (f.name != name.text) continue;
            if (!indexed || arg >= f.index) throw MacroRecursionError(name.text);
        }
        Parser sub(instantiate(m, arg, indexed), *this);
        sub.stack_.push_back(Frame{name.text, arg, indexed});
        auto result = parse_body(sub);
        if (!sub.done()) sub.fail("end of definition for '" + name.text + "'");
        return result;
    }

    ContractPtr expand_contract(const Token& name) {
        return with_expansion(name, [](Parser& p) { return p.contract(); });
    }
    GuardedPtr expand_guarded(const Token& name) {
        return with_expansion(name, [&](Parser& p) {
            // A macro body that is a full contract can stand in guarded position
            // only when it is a bare withdraw.
            ContractPtr c = p.contract();
            return to_guarded(c);
        });
    }

    std::vector<Token> toks_;
    std::size_t pos_{0};
    const std::map<std::string, Macro>* macros_{nullptr};
    int bound_{64};
    std::vector<Frame> stack_;
};

}  // namespace detail

struct ParseOptions {
    int macro_expansion_bound = 64;
};

inline Advertisement parse_advertisement(const SourceFile& src, const ParseOptions& opts = {}) {
    using detail::Token;
    auto toks = detail::lex(src.text);

    // First pass: split into top-level items. An item starts at a keyword or
    // at `Name =` / `Name[i] =`.
    Advertisement adv;
    std::map<std::string, detail::Macro> macros;
    std::vector<Token> contract_toks;
    std::set<Chain> declared_chains;
    std::vector<Participant> declared_participants;
    bool saw_timing = false, saw_contract = false;

    std::size_t i = 0;
    auto at = [&](std::size_t k) -> const Token& { return k < toks.size() ? toks[k] : toks.back(); };
    auto is_item_start = [&](std::size_t k) {
        const Token& t = at(k);
        if (t.kind != Token::Kind::ident) return false;
        if (t.text == "participants" || t.text == "chains" || t.text == "deposit" ||
            t.text == "secret" || t.text == "start")
            return true;
        // Name = ...   or   Name [ id ] = ...
        if (at(k + 1).kind == Token::Kind::punct && at(k + 1).text == "=") return true;
        if (at(k + 1).kind == Token::Kind::punct && at(k + 1).text == "[" &&
            at(k + 2).kind == Token::Kind::ident &&
            at(k + 3).kind == Token::Kind::punct && at(k + 3).text == "]" &&
            at(k + 4).kind == Token::Kind::punct && at(k + 4).text == "=")
            return true;
        return false;
    };

    while (at(i).kind != Token::Kind::end) {
        const Token& t = at(i);
        if (t.kind != Token::Kind::ident) throw ParseError(t.line, t.col, "declaration");
        if (t.text == "participants" || t.text == "chains") {
            bool parts = t.text == "participants";
            ++i;
            while (true) {
                if (at(i).kind != Token::Kind::ident) throw ParseError(at(i).line, at(i).col, "name");
                if (parts)
                    declared_participants.push_back(Participant{at(i).text});
                else
                    declared_chains.insert(Chain{at(i).text});
                ++i;
                if (at(i).kind == Token::Kind::punct && at(i).text == ",") { ++i; continue; }
                break;
            }
            continue;
        }
        if (t.text == "deposit" || t.text == "secret" || t.text == "start") {
            // delimit: up to the next item start
            std::size_t j = i + 1;
            while (at(j).kind != Token::Kind::end && !is_item_start(j)) ++j;
            std::vector<Token> slice(toks.begin() + static_cast<long>(i) + 1, toks.begin() + static_cast<long>(j));
            Token eof; eof.kind = Token::Kind::end;
            if (!slice.empty()) { eof.line = slice.back().line; eof.col = slice.back().col; }
            slice.push_back(eof);
            detail::Parser p(std::move(slice), nullptr, opts.macro_expansion_bound);
            if (t.text == "deposit") {
                DepositDecl d;
                d.who = Participant{p.expect_ident("participant")};
                d.amount = p.balance();
                for (const auto& [c, v] : d.amount.amounts)
                    d.names[c] = "x:" + d.who.name + ":" + c.name;
                adv.pre.deposits.push_back(std::move(d));
            } else if (t.text == "secret") {
                SecretDecl s;
                s.who = Participant{p.expect_ident("participant")};
                s.name = p.expect_ident("secret name");
                adv.pre.secrets.push_back(std::move(s));
            } else {
                adv.pre.timing.start_time = p.integer();
                adv.pre.timing.stip_id = p.expect_ident("stipulation identifier");
                if (saw_timing) throw ParseError(t.line, t.col, "a single start declaration");
                saw_timing = true;
            }
            if (!p.done()) p.fail("end of declaration");
            i = j;
            continue;
        }
        // contract or macro definition
        std::string name = t.text;
        std::string param;
        std::size_t j = i + 1;
        if (at(j).kind == Token::Kind::punct && at(j).text == "[") {
            param = at(j + 1).text;
            j += 3;  // [ id ]
        }
        if (!(at(j).kind == Token::Kind::punct && at(j).text == "="))
            throw ParseError(at(j).line, at(j).col, "'='");
        ++j;
        std::size_t k = j;
        while (at(k).kind != Token::Kind::end && !is_item_start(k)) ++k;
        std::vector<Token> body(toks.begin() + static_cast<long>(j), toks.begin() + static_cast<long>(k));
        if (name == "contract") {
            contract_toks = std::move(body);
            saw_contract = true;
        } else {
            macros[name] = detail::Macro{param, std::move(body)};
        }
        i = k;
    }

    if (!saw_contract) throw ParseError(1, 1, "a 'contract = ...' definition");
    if (!saw_timing) throw ParseError(1, 1, "a 'start <t0> <id>' declaration");

    Token eof; eof.kind = Token::Kind::end;
    if (!contract_toks.empty()) { eof.line = contract_toks.back().line; eof.col = contract_toks.back().col; }
    contract_toks.push_back(eof);
    detail::Parser p(std::move(contract_toks), &macros, opts.macro_expansion_bound);
    adv.contract = p.contract();
    if (!p.done()) p.fail("end of contract");

    // Normalize balances over the declared chain set (missing entries are zero).
    if (!declared_chains.empty()) {
        for (auto& d : adv.pre.deposits) {
            for (const auto& c : declared_chains) {
                if (!d.amount.amounts.count(c)) d.amount.set(c, 0);
                if (!d.names.count(c)) d.names[c] = "x:" + d.who.name + ":" + c.name;
            }
        }
    }
    // Participants listed without a deposit still need a (zero) deposit entry
    // so the well-formedness rules can see them.
    for (const auto& pn : declared_participants) {
        bool has = false;
        for (const auto& d : adv.pre.deposits) has = has || d.who == pn;
        if (!has) {
            DepositDecl d;
            d.who = pn;
            for (const auto& c : declared_chains) {
                d.amount.set(c, 0);
                d.names[c] = "x:" + pn.name + ":" + c.name;
            }
            adv.pre.deposits.push_back(std::move(d));
        }
    }
    return adv;
}

// --------------------------------------------------------------------------
// Pretty printer. parse(pretty_print(adv)) reproduces the same AST.
// --------------------------------------------------------------------------

namespace detail {

inline void print_expr(std::ostream& os, const Expr& e) {
    if (auto* c = std::get_if<Expr::Const>(&e.node)) { os << c->value; return; }
    if (auto* s = std::get_if<Expr::SecretLen>(&e.node)) { os << "|" << s->secret << "|"; return; }
    if (auto* a = std::get_if<Expr::Add>(&e.node)) {
        print_expr(os, *a->lhs); os << " + "; print_expr(os, *a->rhs);
        return;
    }
    const auto& a = std::get<Expr::Sub>(e.node);
    print_expr(os, *a.lhs); os << " - "; print_expr(os, *a.rhs);
}

inline void print_pred(std::ostream& os, const Predicate& p) {
    if (std::holds_alternative<Predicate::True>(p.node)) { os << "true"; return; }
    if (auto* a = std::get_if<Predicate::And>(&p.node)) {
        print_pred(os, *a->lhs); os << " && "; print_pred(os, *a->rhs);
        return;
    }
    if (auto* n = std::get_if<Predicate::Not>(&p.node)) {
        os << "!(";
        print_pred(os, *n->inner);
        os << ")";
        return;
    }
    if (auto* e = std::get_if<Predicate::Eq>(&p.node)) {
        print_expr(os, *e->lhs); os << " == "; print_expr(os, *e->rhs);
        return;
    }
    const auto& e = std::get<Predicate::Lt>(p.node);
    print_expr(os, *e.lhs); os << " < "; print_expr(os, *e.rhs);
}

inline void print_balance(std::ostream& os, const Balance& b) {
    bool first = true;
    for (const auto& [c, v] : b.amounts) {
        if (!first) os << ", ";
        os << v << " " << c.name;
        first = false;
    }
    if (first) os << "0 none";
}

inline void print_withdraw(std::ostream& os, const Withdraw& w) {
    os << "withdraw(";
    bool first = true;
    for (const auto& a : w.assigns) {
        if (!first) os << "; ";
        print_balance(os, a.amount);
        os << " -> " << a.to.name;
        first = false;
    }
    os << ")";
}

void print_contract(std::ostream& os, const Contract& c);

inline void print_guarded(std::ostream& os, const GuardedContract& g) {
    if (auto* w = std::get_if<Withdraw>(&g.node)) { print_withdraw(os, *w); return; }
    if (auto* s = std::get_if<GuardedContract::Split>(&g.node)) {
        os << "split(";
        bool first = true;
        for (const auto& [b, sub] : s->branches) {
            if (!first) os << "; ";
            print_balance(os, b);
            os << " -> (";
            print_contract(os, *sub);
            os << ")";
            first = false;
        }
        os << ")";
        return;
    }
    if (auto* a = std::get_if<GuardedContract::Auth>(&g.node)) {
        os << "auth[";
        bool first = true;
        for (const auto& p : a->signers) {
            if (!first) os << ", ";
            os << p.name;
            first = false;
        }
        os << "] ";
        print_guarded(os, *a->inner);
        return;
    }
    const auto& r = std::get<GuardedContract::Reveal>(g.node);
    os << "reveal ";
    bool first = true;
    for (const auto& s : r.secrets) {
        if (!first) os << ", ";
        os << s;
        first = false;
    }
    if (!std::holds_alternative<Predicate::True>(r.condition->node)) {
        os << " if ";
        print_pred(os, *r.condition);
    }
    os << " . (";
    print_contract(os, *r.next);
    os << ")";
}

inline void print_contract(std::ostream& os, const Contract& c) {
    if (auto* w = std::get_if<Withdraw>(&c.node)) { print_withdraw(os, *w); return; }
    const auto& p = std::get<Contract::Priority>(c.node);
    print_guarded(os, *p.left);
    os << " >> ";
    print_contract(os, *p.right);
}

}  // namespace detail

inline std::string pretty_print(const Advertisement& adv) {
    std::ostringstream os;
    std::set<std::string> parts_seen;
    os << "participants ";
    bool first = true;
    for (const auto& d : adv.pre.deposits) {
        if (!parts_seen.insert(d.who.name).second) continue;
        if (!first) os << ", ";
        os << d.who.name;
        first = false;
    }
    os << "\nchains ";
    first = true;
    std::set<Chain> chains;
    for (const auto& d : adv.pre.deposits)
        for (const auto& [c, v] : d.amount.amounts) chains.insert(c);
    for (const auto& c : chains) {
        if (!first) os << ", ";
        os << c.name;
        first = false;
    }
    os << "\n";
    for (const auto& d : adv.pre.deposits) {
        os << "deposit " << d.who.name << " ";
        detail::print_balance(os, d.amount);
        os << "\n";
    }
    for (const auto& s : adv.pre.secrets) os << "secret " << s.who.name << " " << s.name << "\n";
    os << "start " << adv.pre.timing.start_time << " " << adv.pre.timing.stip_id << "\n";
    os << "contract = ";
    detail::print_contract(os, *adv.contract);
    os << "\n";
    return os.str();
}

}  // namespace bitmlx
