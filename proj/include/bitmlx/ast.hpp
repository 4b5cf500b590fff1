// Core abstract syntax: participants, chains, balances, node labels,
// reveal predicates, BitMLx contracts and the per-chain BitML target terms.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bitmlx {

using Money = std::int64_t;

struct Participant {
    std::string name;

    friend bool operator==(const Participant& a, const Participant& b) { return a.name == b.name; }
    friend bool operator!=(const Participant& a, const Participant& b) { return a.name != b.name; }
    friend bool operator<(const Participant& a, const Participant& b) { return a.name < b.name; }
};

struct Chain {
    std::string name;

    friend bool operator==(const Chain& a, const Chain& b) { return a.name == b.name; }
    friend bool operator!=(const Chain& a, const Chain& b) { return a.name != b.name; }
    friend bool operator<(const Chain& a, const Chain& b) { return a.name < b.name; }
};

// Componentwise per-chain coin amounts. Chains absent from the map count as zero.
struct Balance {
    std::map<Chain, Money> amounts;

    Money get(const Chain& c) const {
        auto it = amounts.find(c);
        return it == amounts.end() ? 0 : it->second;
    }
    void set(const Chain& c, Money v) { amounts[c] = v; }

    Balance& operator+=(const Balance& o) {
        for (const auto& [c, v] : o.amounts) amounts[c] += v;
        return *this;
    }
    friend Balance operator+(Balance a, const Balance& b) { return a += b; }

    // Componentwise subtraction; returns nullopt if any component would go negative.
    std::optional<Balance> checked_sub(const Balance& o) const {
        Balance r = *this;
        for (const auto& [c, v] : o.amounts) {
            r.amounts[c] -= v;
            if (r.amounts[c] < 0) return std::nullopt;
        }
        return r;
    }

    bool is_zero() const {
        for (const auto& [c, v] : amounts)
            if (v != 0) return false;
        return true;
    }

    friend bool operator==(const Balance& a, const Balance& b) {
        // Compare up to zero entries.
        std::set<Chain> chains;
        for (const auto& [c, v] : a.amounts) chains.insert(c);
        for (const auto& [c, v] : b.amounts) chains.insert(c);
        for (const auto& c : chains)
            if (a.get(c) != b.get(c)) return false;
        return true;
    }
    friend bool operator!=(const Balance& a, const Balance& b) { return !(a == b); }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [c, v] : amounts) {
            if (!first) os << ", ";
            os << v << " " << c.name;
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// Node labels. A label is a path rooted at a stipulation identifier; segments
// record how the node was reached: L (guarded branch / left continuation),
// R (low-priority continuation), a split branch index, or a terminal index.
// ---------------------------------------------------------------------------

struct LabelSeg {
    enum class Kind { left, right, branch, leaf };
    Kind kind{Kind::left};
    int index{0};  // branch / leaf only, 1-based

    static LabelSeg L() { return {Kind::left, 0}; }
    static LabelSeg R() { return {Kind::right, 0}; }
    static LabelSeg Branch(int i) { return {Kind::branch, i}; }
    static LabelSeg Leaf(int i) { return {Kind::leaf, i}; }

    friend bool operator==(const LabelSeg& a, const LabelSeg& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator<(const LabelSeg& a, const LabelSeg& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.index < b.index;
    }

    std::string str() const {
        switch (kind) {
            case Kind::left: return "L";
            case Kind::right: return "R";
            case Kind::branch: return std::to_string(index);
            case Kind::leaf: return "w" + std::to_string(index);
        }
        return "?";
    }
};

struct Label {
    std::string stip;            // head: stipulation identifier
    std::vector<LabelSeg> path;  // segments below the head

    static Label root(std::string stip_id) { return Label{std::move(stip_id), {}}; }

    Label child(LabelSeg seg) const {
        Label l = *this;
        l.path.push_back(seg);
        return l;
    }
    Label left() const { return child(LabelSeg::L()); }
    Label right() const { return child(LabelSeg::R()); }
    Label branch(int i) const { return child(LabelSeg::Branch(i)); }
    Label leaf(int i) const { return child(LabelSeg::Leaf(i)); }

    // Count of segments below the head.
    std::size_t depth() const { return path.size(); }

    // Rounds needed to reach this node: the stipulation counts as one, then
    // one more per L/R segment (split branch indices happen within a round).
    int round_depth() const {
        int d = 1;
        for (const auto& s : path)
            if (s.kind == LabelSeg::Kind::left || s.kind == LabelSeg::Kind::right) ++d;
        return d;
    }

    // Non-strict prefix relation.
    bool is_ancestor_of(const Label& o) const {
        if (stip != o.stip || path.size() > o.path.size()) return false;
        for (std::size_t i = 0; i < path.size(); ++i)
            if (!(path[i] == o.path[i])) return false;
        return true;
    }
    bool is_strict_ancestor_of(const Label& o) const {
        return path.size() < o.path.size() && is_ancestor_of(o);
    }

    friend bool operator==(const Label& a, const Label& b) {
        return a.stip == b.stip && a.path == b.path;
    }
    friend bool operator!=(const Label& a, const Label& b) { return !(a == b); }
    friend bool operator<(const Label& a, const Label& b) {
        if (a.stip != b.stip) return a.stip < b.stip;
        return a.path < b.path;
    }

    std::string str() const {
        std::string s = "[" + stip;
        for (const auto& seg : path) s += "," + seg.str();
        return s + "]";
    }
};

// ---------------------------------------------------------------------------
// Reveal predicates: boolean grammar over secret lengths and 32-bit constants.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    struct Const { std::int32_t value; };
    struct SecretLen { std::string secret; };
    struct Add { ExprPtr lhs, rhs; };
    struct Sub { ExprPtr lhs, rhs; };
    std::variant<Const, SecretLen, Add, Sub> node;

    static ExprPtr constant(std::int32_t v) { return std::make_shared<Expr>(Expr{Const{v}}); }
    static ExprPtr secret_len(std::string s) { return std::make_shared<Expr>(Expr{SecretLen{std::move(s)}}); }
    static ExprPtr add(ExprPtr l, ExprPtr r) { return std::make_shared<Expr>(Expr{Add{std::move(l), std::move(r)}}); }
    static ExprPtr sub(ExprPtr l, ExprPtr r) { return std::make_shared<Expr>(Expr{Sub{std::move(l), std::move(r)}}); }
};

struct Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

struct Predicate {
    struct True {};
    struct And { PredPtr lhs, rhs; };
    struct Not { PredPtr inner; };
    struct Eq { ExprPtr lhs, rhs; };
    struct Lt { ExprPtr lhs, rhs; };
    std::variant<True, And, Not, Eq, Lt> node;

    static PredPtr truth() { return std::make_shared<Predicate>(Predicate{True{}}); }
    static PredPtr conj(PredPtr l, PredPtr r) { return std::make_shared<Predicate>(Predicate{And{std::move(l), std::move(r)}}); }
    static PredPtr neg(PredPtr p) { return std::make_shared<Predicate>(Predicate{Not{std::move(p)}}); }
    static PredPtr eq(ExprPtr l, ExprPtr r) { return std::make_shared<Predicate>(Predicate{Eq{std::move(l), std::move(r)}}); }
    static PredPtr lt(ExprPtr l, ExprPtr r) { return std::make_shared<Predicate>(Predicate{Lt{std::move(l), std::move(r)}}); }
};

struct UnboundSecret : std::runtime_error {
    explicit UnboundSecret(const std::string& name)
        : std::runtime_error("unbound secret in predicate: " + name) {}
};

using SecretEnv = std::map<std::string, std::int64_t>;  // secret name -> revealed length

inline std::int64_t eval_expr(const Expr& e, const SecretEnv& env) {
    struct V {
        const SecretEnv& env;
        std::int64_t operator()(const Expr::Const& c) const { return c.value; }
        std::int64_t operator()(const Expr::SecretLen& s) const {
            auto it = env.find(s.secret);
            if (it == env.end()) throw UnboundSecret(s.secret);
            return it->second;
        }
        std::int64_t operator()(const Expr::Add& a) const { return eval_expr(*a.lhs, env) + eval_expr(*a.rhs, env); }
        std::int64_t operator()(const Expr::Sub& a) const { return eval_expr(*a.lhs, env) - eval_expr(*a.rhs, env); }
    };
    return std::visit(V{env}, e.node);
}

inline bool eval_predicate(const Predicate& p, const SecretEnv& env) {
    struct V {
        const SecretEnv& env;
        bool operator()(const Predicate::True&) const { return true; }
        bool operator()(const Predicate::And& a) const { return eval_predicate(*a.lhs, env) && eval_predicate(*a.rhs, env); }
        bool operator()(const Predicate::Not& n) const { return !eval_predicate(*n.inner, env); }
        bool operator()(const Predicate::Eq& e) const { return eval_expr(*e.lhs, env) == eval_expr(*e.rhs, env); }
        bool operator()(const Predicate::Lt& e) const { return eval_expr(*e.lhs, env) < eval_expr(*e.rhs, env); }
    };
    return std::visit(V{env}, p.node);
}

// Secret names referenced by |s| expressions.
inline void collect_secrets(const Expr& e, std::set<std::string>& out) {
    if (auto* s = std::get_if<Expr::SecretLen>(&e.node)) { out.insert(s->secret); return; }
    if (auto* a = std::get_if<Expr::Add>(&e.node)) { collect_secrets(*a->lhs, out); collect_secrets(*a->rhs, out); return; }
    if (auto* a = std::get_if<Expr::Sub>(&e.node)) { collect_secrets(*a->lhs, out); collect_secrets(*a->rhs, out); return; }
}
inline void collect_secrets(const Predicate& p, std::set<std::string>& out) {
    if (auto* a = std::get_if<Predicate::And>(&p.node)) { collect_secrets(*a->lhs, out); collect_secrets(*a->rhs, out); return; }
    if (auto* n = std::get_if<Predicate::Not>(&p.node)) { collect_secrets(*n->inner, out); return; }
    if (auto* e = std::get_if<Predicate::Eq>(&p.node)) { collect_secrets(*e->lhs, out); collect_secrets(*e->rhs, out); return; }
    if (auto* e = std::get_if<Predicate::Lt>(&p.node)) { collect_secrets(*e->lhs, out); collect_secrets(*e->rhs, out); return; }
}

// ---------------------------------------------------------------------------
// BitMLx contracts. A top-level contract is a chain of priority choices whose
// rightmost leaf is a withdraw; guarded contracts sit on the left of a choice.
// ---------------------------------------------------------------------------

struct Contract;
struct GuardedContract;
using ContractPtr = std::shared_ptr<const Contract>;
using GuardedPtr = std::shared_ptr<const GuardedContract>;

struct WithdrawAssign {
    Participant to;
    Balance amount;

    friend bool operator==(const WithdrawAssign& a, const WithdrawAssign& b) {
        return a.to == b.to && a.amount == b.amount;
    }
};

struct Withdraw {
    std::vector<WithdrawAssign> assigns;

    Balance total() const {
        Balance b;
        for (const auto& a : assigns) b += a.amount;
        return b;
    }
    friend bool operator==(const Withdraw& a, const Withdraw& b) { return a.assigns == b.assigns; }
};

struct Contract {
    struct Priority {
        GuardedPtr left;
        ContractPtr right;
    };
    std::variant<Priority, Withdraw> node;

    static ContractPtr priority(GuardedPtr l, ContractPtr r) {
        return std::make_shared<Contract>(Contract{Priority{std::move(l), std::move(r)}});
    }
    static ContractPtr withdraw(std::vector<WithdrawAssign> as) {
        return std::make_shared<Contract>(Contract{Withdraw{std::move(as)}});
    }
    bool is_withdraw() const { return std::holds_alternative<Withdraw>(node); }
};

struct GuardedContract {
    struct Split {
        std::vector<std::pair<Balance, ContractPtr>> branches;
    };
    struct Auth {
        std::vector<Participant> signers;
        GuardedPtr inner;
    };
    struct Reveal {
        std::vector<std::string> secrets;
        PredPtr condition;
        ContractPtr next;
    };
    std::variant<Withdraw, Split, Auth, Reveal> node;

    static GuardedPtr withdraw(std::vector<WithdrawAssign> as) {
        return std::make_shared<GuardedContract>(GuardedContract{Withdraw{std::move(as)}});
    }
    static GuardedPtr split(std::vector<std::pair<Balance, ContractPtr>> bs) {
        return std::make_shared<GuardedContract>(GuardedContract{Split{std::move(bs)}});
    }
    static GuardedPtr auth(std::vector<Participant> signers, GuardedPtr inner) {
        return std::make_shared<GuardedContract>(GuardedContract{Auth{std::move(signers), std::move(inner)}});
    }
    static GuardedPtr reveal(std::vector<std::string> secrets, PredPtr p, ContractPtr next) {
        return std::make_shared<GuardedContract>(GuardedContract{Reveal{std::move(secrets), std::move(p), std::move(next)}});
    }
};

bool equal(const Contract& a, const Contract& b);
bool equal(const Predicate& a, const Predicate& b);

inline bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* c = std::get_if<Expr::Const>(&a.node)) return c->value == std::get<Expr::Const>(b.node).value;
    if (auto* s = std::get_if<Expr::SecretLen>(&a.node)) return s->secret == std::get<Expr::SecretLen>(b.node).secret;
    if (auto* x = std::get_if<Expr::Add>(&a.node)) {
        const auto& y = std::get<Expr::Add>(b.node);
        return equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
    }
    const auto& x = std::get<Expr::Sub>(a.node);
    const auto& y = std::get<Expr::Sub>(b.node);
    return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

inline bool equal(const Predicate& a, const Predicate& b) {
    if (a.node.index() != b.node.index()) return false;
    if (std::holds_alternative<Predicate::True>(a.node)) return true;
    if (auto* x = std::get_if<Predicate::And>(&a.node)) {
        const auto& y = std::get<Predicate::And>(b.node);
        return equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
    }
    if (auto* x = std::get_if<Predicate::Not>(&a.node)) return equal(*x->inner, *std::get<Predicate::Not>(b.node).inner);
    if (auto* x = std::get_if<Predicate::Eq>(&a.node)) {
        const auto& y = std::get<Predicate::Eq>(b.node);
        return equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
    }
    const auto& x = std::get<Predicate::Lt>(a.node);
    const auto& y = std::get<Predicate::Lt>(b.node);
    return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

inline bool equal(const GuardedContract& a, const GuardedContract& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* w = std::get_if<Withdraw>(&a.node)) return *w == std::get<Withdraw>(b.node);
    if (auto* s = std::get_if<GuardedContract::Split>(&a.node)) {
        const auto& t = std::get<GuardedContract::Split>(b.node);
        if (s->branches.size() != t.branches.size()) return false;
        for (std::size_t i = 0; i < s->branches.size(); ++i) {
            if (s->branches[i].first != t.branches[i].first) return false;
            if (!equal(*s->branches[i].second, *t.branches[i].second)) return false;
        }
        return true;
    }
    if (auto* u = std::get_if<GuardedContract::Auth>(&a.node)) {
        const auto& v = std::get<GuardedContract::Auth>(b.node);
        return u->signers == v.signers && equal(*u->inner, *v.inner);
    }
    const auto& u = std::get<GuardedContract::Reveal>(a.node);
    const auto& v = std::get<GuardedContract::Reveal>(b.node);
    return u.secrets == v.secrets && equal(*u.condition, *v.condition) && equal(*u.next, *v.next);
}

inline bool equal(const Contract& a, const Contract& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* w = std::get_if<Withdraw>(&a.node)) return *w == std::get<Withdraw>(b.node);
    const auto& x = std::get<Contract::Priority>(a.node);
    const auto& y = std::get<Contract::Priority>(b.node);
    return equal(*x.left, *y.left) && equal(*x.right, *y.right);
}

// Structural sanity: every chain of priority choices bottoms out in a withdraw.
// True by construction for values built through the factories above.
inline bool rightmost_is_withdraw(const Contract& c) {
    const Contract* cur = &c;
    while (auto* p = std::get_if<Contract::Priority>(&cur->node)) cur = p->right.get();
    return cur->is_withdraw();
}

// ---------------------------------------------------------------------------
// Preconditions and advertisements.
// ---------------------------------------------------------------------------

struct DepositDecl {
    Participant who;
    Balance amount;
    std::map<Chain, std::string> names;  // per-chain deposit identifiers
};

struct SecretDecl {
    Participant who;
    std::string name;
};

struct Timing {
    std::int64_t start_time{0};
    std::string stip_id;  // the stipulation identifier kappa_0
};

struct Precondition {
    std::vector<DepositDecl> deposits;
    std::vector<SecretDecl> secrets;
    Timing timing;

    std::vector<Participant> participants() const {
        std::vector<Participant> out;
        for (const auto& d : deposits) {
            bool seen = false;
            for (const auto& p : out) seen = seen || p == d.who;
            if (!seen) out.push_back(d.who);
        }
        return out;
    }

    std::vector<Chain> chains() const {
        std::set<Chain> cs;
        for (const auto& d : deposits)
            for (const auto& [c, v] : d.amount.amounts) cs.insert(c);
        return {cs.begin(), cs.end()};
    }

    Balance total_balance() const {
        Balance b;
        for (const auto& d : deposits) b += d.amount;
        return b;
    }

    Money balance_on(const Chain& c) const { return total_balance().get(c); }

    std::vector<std::string> secrets_of(const Participant& p) const {
        std::vector<std::string> out;
        for (const auto& s : secrets)
            if (s.who == p) out.push_back(s.name);
        return out;
    }

    bool has_secret(const std::string& name) const {
        for (const auto& s : secrets)
            if (s.name == name) return true;
        return false;
    }

    Balance deposit_of(const Participant& p) const {
        Balance b;
        for (const auto& d : deposits)
            if (d.who == p) b += d.amount;
        return b;
    }
};

struct Advertisement {
    Precondition pre;
    ContractPtr contract;

    const std::string& stip_id() const { return pre.timing.stip_id; }
    std::int64_t start_time() const { return pre.timing.start_time; }
};

// ---------------------------------------------------------------------------
// BitML target terms (per-chain compiler output).
// ---------------------------------------------------------------------------

struct BitmlContract;
struct BitmlGuarded;
using BitmlPtr = std::shared_ptr<const BitmlContract>;
using BitmlGuardedPtr = std::shared_ptr<const BitmlGuarded>;

struct BitmlGuarded {
    struct PutReveal {
        std::vector<std::string> secrets;
        PredPtr condition;
        BitmlPtr next;
    };
    struct Split {
        std::vector<std::pair<Money, BitmlPtr>> branches;
    };
    struct Auth {
        std::vector<Participant> signers;
        BitmlGuardedPtr inner;
    };
    struct After {
        std::int64_t time{0};
        BitmlGuardedPtr inner;
    };
    struct WithdrawOne {
        Participant to;
    };
    struct Tau {
        BitmlPtr next;
    };
    std::variant<PutReveal, Split, Auth, After, WithdrawOne, Tau> node;
};

struct BitmlContract {
    std::vector<BitmlGuardedPtr> choices;
};

inline BitmlPtr bitml_choice(std::vector<BitmlGuardedPtr> cs) {
    return std::make_shared<BitmlContract>(BitmlContract{std::move(cs)});
}
inline BitmlGuardedPtr bitml_reveal(std::vector<std::string> secrets, PredPtr p, BitmlPtr next) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::PutReveal{std::move(secrets), std::move(p), std::move(next)}});
}
inline BitmlGuardedPtr bitml_split(std::vector<std::pair<Money, BitmlPtr>> bs) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::Split{std::move(bs)}});
}
inline BitmlGuardedPtr bitml_auth(std::vector<Participant> signers, BitmlGuardedPtr inner) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::Auth{std::move(signers), std::move(inner)}});
}
inline BitmlGuardedPtr bitml_after(std::int64_t t, BitmlGuardedPtr inner) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::After{t, std::move(inner)}});
}
inline BitmlGuardedPtr bitml_withdraw(Participant p) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::WithdrawOne{std::move(p)}});
}
inline BitmlGuardedPtr bitml_tau(BitmlPtr next) {
    return std::make_shared<BitmlGuarded>(BitmlGuarded{BitmlGuarded::Tau{std::move(next)}});
}

// Step/init secret naming shared by the compiler and both semantics.
inline std::string step_secret_name(const Participant& p, const Label& at) {
    return "step:" + p.name + ":" + at.str();
}
inline std::string init_secret_name(const Participant& p, const std::string& stip) {
    return "init:" + p.name + ":" + stip;
}

}  // namespace bitmlx
