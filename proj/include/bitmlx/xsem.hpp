// Executable BitMLx operational semantics: configurations, contract reduction,
// authorizations and the stipulation protocol.

#pragma once

#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "runtime.hpp"

namespace bitmlx {

// ---------------------------------------------------------------------------
// Actions.
// ---------------------------------------------------------------------------

struct XAction {
    struct Advertise { std::string adv; };
    struct Commit {
        Participant who;
        std::string adv;
        std::map<std::string, std::optional<std::int64_t>> lengths;  // secret -> length (nullopt = unknown value)
    };
    struct Sign { Participant who; std::string adv; };
    struct Initialize { std::string adv; };
    struct Abort { std::string adv; };
    struct DWithdraw { Label at; };
    struct DoSplit { Label at; };
    struct DoReveal { Label at; };
    struct CWithdraw { Label at; };
    struct Skip { Label at; };
    struct AuthSig { Participant who; Label at; };
    struct RevealSecret { Participant who; std::string secret; };

    std::variant<Advertise, Commit, Sign, Initialize, Abort, DWithdraw, DoSplit, DoReveal,
                 CWithdraw, Skip, AuthSig, RevealSecret>
        node;

    // Participant this action is attributable to, if any.
    std::optional<Participant> actor() const {
        if (auto* c = std::get_if<Commit>(&node)) return c->who;
        if (auto* s = std::get_if<Sign>(&node)) return s->who;
        if (auto* a = std::get_if<AuthSig>(&node)) return a->who;
        if (auto* r = std::get_if<RevealSecret>(&node)) return r->who;
        return std::nullopt;
    }
    bool needs_consent() const { return std::holds_alternative<Skip>(node); }

    // Label the action operates on, for contract moves.
    std::optional<Label> label() const {
        if (auto* d = std::get_if<DWithdraw>(&node)) return d->at;
        if (auto* d = std::get_if<DoSplit>(&node)) return d->at;
        if (auto* d = std::get_if<DoReveal>(&node)) return d->at;
        if (auto* d = std::get_if<CWithdraw>(&node)) return d->at;
        if (auto* d = std::get_if<Skip>(&node)) return d->at;
        return std::nullopt;
    }

    std::string str() const {
        std::ostringstream os;
        if (auto* a = std::get_if<Advertise>(&node)) os << "advertise(" << a->adv << ")";
        else if (auto* a = std::get_if<Commit>(&node)) os << "commit(" << a->who.name << "," << a->adv << ")";
        else if (auto* a = std::get_if<Sign>(&node)) os << "sign(" << a->who.name << "," << a->adv << ")";
        else if (auto* a = std::get_if<Initialize>(&node)) os << "initialize(" << a->adv << ")";
        else if (auto* a = std::get_if<Abort>(&node)) os << "abort(" << a->adv << ")";
        else if (auto* a = std::get_if<DWithdraw>(&node)) os << "dwithdraw(" << a->at.str() << ")";
        else if (auto* a = std::get_if<DoSplit>(&node)) os << "split(" << a->at.str() << ")";
        else if (auto* a = std::get_if<DoReveal>(&node)) os << "reveal(" << a->at.str() << ")";
        else if (auto* a = std::get_if<CWithdraw>(&node)) os << "cwithdraw(" << a->at.str() << ")";
        else if (auto* a = std::get_if<Skip>(&node)) os << "skip(" << a->at.str() << ")";
        else if (auto* a = std::get_if<AuthSig>(&node)) os << "auth(" << a->who.name << "," << a->at.str() << ")";
        else if (auto* a = std::get_if<RevealSecret>(&node)) os << "revealSecret(" << a->who.name << "," << a->secret << ")";
        return os.str();
    }

    friend bool operator==(const XAction& a, const XAction& b) { return a.str() == b.str(); }
    friend bool operator<(const XAction& a, const XAction& b) { return a.str() < b.str(); }
};

// ---------------------------------------------------------------------------
// Configurations.
// ---------------------------------------------------------------------------

struct XActive {
    std::string adv;
    ContractPtr contract;
    Balance balance;
};

struct XAssigned {
    std::string adv;
    Participant who;
    Balance balance;
    std::optional<Label> at;  // absent for stipulation-abort refunds
};

struct XConfig {
    std::set<std::string> advertised;
    enum class AdvFate { initialized, aborted };
    std::map<std::string, AdvFate> consumed;

    std::map<Label, XActive> active;
    std::vector<XAssigned> assigned;

    std::map<std::pair<Participant, std::string>, std::optional<std::int64_t>> commits;
    std::map<std::pair<Participant, std::string>, std::int64_t> reveals;

    std::set<std::pair<Participant, Label>> auths;        // A:[kappa > D]
    std::set<std::pair<Participant, std::string>> commit_auths;  // A:[# > adv]
    std::set<std::pair<Participant, std::string>> init_auths;    // A:[adv]

    bool secret_name_used(const std::string& s) const {
        for (const auto& [k, v] : commits)
            if (k.second == s) return true;
        return false;
    }
    std::optional<std::int64_t> revealed_length(const std::string& secret) const {
        for (const auto& [k, v] : reveals)
            if (k.second == secret) return v;
        return std::nullopt;
    }
    SecretEnv reveal_env() const {
        SecretEnv env;
        for (const auto& [k, v] : reveals) env[k.second] = v;
        return env;
    }
};

// ---------------------------------------------------------------------------
// Enabledness and the transition function.
// ---------------------------------------------------------------------------

namespace xdetail {

// Strip authorization prefixes; returns the inner guarded contract and signers.
inline const GuardedContract* strip_auth(const GuardedContract& g, std::vector<Participant>& signers) {
    const GuardedContract* cur = &g;
    while (auto* a = std::get_if<GuardedContract::Auth>(&cur->node)) {
        for (const auto& p : a->signers) signers.push_back(p);
        cur = a->inner.get();
    }
    return cur;
}

inline bool auths_complete(const XConfig& c, const Label& at, const std::vector<Participant>& signers) {
    for (const auto& p : signers)
        if (!c.auths.count({p, at})) return false;
    return true;
}

// The left move an active priority choice would perform, if its premises hold.
inline std::optional<XAction> left_move(const XConfig& c, const Label& at, const XActive& a) {
    auto* pr = std::get_if<Contract::Priority>(&a.contract->node);
    if (!pr) return std::nullopt;
    std::vector<Participant> signers;
    const GuardedContract* inner = strip_auth(*pr->left, signers);
    if (!auths_complete(c, at, signers)) return std::nullopt;
    if (std::holds_alternative<Withdraw>(inner->node)) return XAction{XAction::DWithdraw{at}};
    if (std::holds_alternative<GuardedContract::Split>(inner->node)) return XAction{XAction::DoSplit{at}};
    const auto& r = std::get<GuardedContract::Reveal>(inner->node);
    SecretEnv env = c.reveal_env();
    for (const auto& s : r.secrets)
        if (!env.count(s)) return std::nullopt;
    try {
        if (!eval_predicate(*r.condition, env)) return std::nullopt;
    } catch (const UnboundSecret&) {
        return std::nullopt;
    }
    return XAction{XAction::DoReveal{at}};
}

}  // namespace xdetail

inline std::vector<XAction> x_enabled(const XConfig& c, const Registry& reg) {
    std::vector<XAction> out;

    for (const auto& [id, adv] : reg.advertisements) {
        if (c.advertised.count(id) || c.consumed.count(id)) continue;
        bool fresh = true;
        for (const auto& s : adv.pre.secrets) fresh = fresh && !c.secret_name_used(s.name);
        bool any_honest = false;
        for (const auto& p : adv.pre.participants()) any_honest = any_honest || reg.is_honest(p);
        if (fresh && any_honest && check_well_formed(adv).ok())
            out.push_back(XAction{XAction::Advertise{id}});
    }

    for (const auto& id : c.advertised) {
        const Advertisement& adv = reg.adv(id);
        auto participants = adv.pre.participants();
        bool all_committed = true;
        for (const auto& p : participants) all_committed = all_committed && c.commit_auths.count({p, id});
        for (const auto& p : participants) {
            if (!c.commit_auths.count({p, id})) {
                XAction::Commit cm{p, id, {}};
                for (const auto& s : adv.pre.secrets_of(p))
                    cm.lengths[s] = reg.is_honest(p) ? std::optional<std::int64_t>(0) : std::nullopt;
                out.push_back(XAction{std::move(cm)});
            }
            if (all_committed && !c.init_auths.count({p, id}))
                out.push_back(XAction{XAction::Sign{p, id}});
        }
        bool all_signed = all_committed;
        for (const auto& p : participants) all_signed = all_signed && c.init_auths.count({p, id});
        if (all_signed) out.push_back(XAction{XAction::Initialize{id}});
        out.push_back(XAction{XAction::Abort{id}});
    }

    for (const auto& [at, a] : c.active) {
        if (std::holds_alternative<Withdraw>(a.contract->node)) {
            out.push_back(XAction{XAction::CWithdraw{at}});
            continue;
        }
        if (auto mv = xdetail::left_move(c, at, a)) out.push_back(*mv);
        out.push_back(XAction{XAction::Skip{at}});
        const auto& pr = std::get<Contract::Priority>(a.contract->node);
        std::vector<Participant> signers;
        xdetail::strip_auth(*pr.left, signers);
        for (const auto& p : signers)
            if (!c.auths.count({p, at})) out.push_back(XAction{XAction::AuthSig{p, at}});
    }

    for (const auto& [key, len] : c.commits) {
        if (!len.has_value()) continue;
        if (c.reveals.count(key)) continue;
        out.push_back(XAction{XAction::RevealSecret{key.first, key.second}});
    }
    return out;
}

inline bool x_is_enabled(const XConfig& c, const Registry& reg, const XAction& a) {
    // Commit lengths do not affect enabledness; compare up to them.
    if (auto* cm = std::get_if<XAction::Commit>(&a.node)) {
        const Advertisement& adv = reg.adv(cm->adv);
        if (!c.advertised.count(cm->adv)) return false;
        bool member = false;
        for (const auto& p : adv.pre.participants()) member = member || p == cm->who;
        if (!member || c.commit_auths.count({cm->who, cm->adv})) return false;
        if (reg.is_honest(cm->who)) {
            for (const auto& s : adv.pre.secrets_of(cm->who)) {
                auto it = cm->lengths.find(s);
                if (it == cm->lengths.end() || !it->second.has_value() || *it->second < 0) return false;
            }
        }
        return true;
    }
    for (const auto& e : x_enabled(c, reg))
        if (e == a) return true;
    return false;
}

inline XConfig x_step(const XConfig& c0, const Registry& reg, const XAction& act) {
    if (!x_is_enabled(c0, reg, act)) throw NotEnabled(act.str());
    XConfig c = c0;

    if (auto* a = std::get_if<XAction::Advertise>(&act.node)) {
        c.advertised.insert(a->adv);
        return c;
    }
    if (auto* a = std::get_if<XAction::Commit>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        for (const auto& s : adv.pre.secrets_of(a->who)) {
            auto it = a->lengths.find(s);
            std::optional<std::int64_t> len = it == a->lengths.end() ? std::nullopt : it->second;
            c.commits[{a->who, s}] = len;
        }
        c.commit_auths.insert({a->who, a->adv});
        return c;
    }
    if (auto* a = std::get_if<XAction::Sign>(&act.node)) {
        c.init_auths.insert({a->who, a->adv});
        return c;
    }
    if (auto* a = std::get_if<XAction::Initialize>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        c.advertised.erase(a->adv);
        for (const auto& p : adv.pre.participants()) {
            c.commit_auths.erase({p, a->adv});
            c.init_auths.erase({p, a->adv});
        }
        c.consumed[a->adv] = XConfig::AdvFate::initialized;
        c.active[Label::root(a->adv)] = XActive{a->adv, adv.contract, adv.pre.total_balance()};
        return c;
    }
    if (auto* a = std::get_if<XAction::Abort>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        c.advertised.erase(a->adv);
        for (const auto& p : adv.pre.participants()) {
            c.commit_auths.erase({p, a->adv});
            c.init_auths.erase({p, a->adv});
        }
        c.consumed[a->adv] = XConfig::AdvFate::aborted;
        for (const auto& d : adv.pre.deposits)
            c.assigned.push_back(XAssigned{a->adv, d.who, d.amount, std::nullopt});
        return c;
    }
    if (auto* a = std::get_if<XAction::AuthSig>(&act.node)) {
        c.auths.insert({a->who, a->at});
        return c;
    }
    if (auto* a = std::get_if<XAction::RevealSecret>(&act.node)) {
        c.reveals[{a->who, a->secret}] = *c.commits.at({a->who, a->secret});
        return c;
    }

    Label at = *act.label();
    XActive active = c.active.at(at);
    auto consume = [&](bool drop_auths) {
        c.active.erase(at);
        if (drop_auths) {
            for (auto it = c.auths.begin(); it != c.auths.end();)
                it = it->second == at ? c.auths.erase(it) : std::next(it);
        }
    };

    if (std::holds_alternative<XAction::CWithdraw>(act.node)) {
        const auto& w = std::get<Withdraw>(active.contract->node);
        consume(false);
        int i = 1;
        for (const auto& a : w.assigns)
            c.assigned.push_back(XAssigned{active.adv, a.to, a.amount, at.leaf(i++)});
        return c;
    }
    if (std::holds_alternative<XAction::Skip>(act.node)) {
        const auto& pr = std::get<Contract::Priority>(active.contract->node);
        consume(false);
        c.active[at.right()] = XActive{active.adv, pr.right, active.balance};
        return c;
    }

    const auto& pr = std::get<Contract::Priority>(active.contract->node);
    std::vector<Participant> signers;
    const GuardedContract* inner = xdetail::strip_auth(*pr.left, signers);

    if (std::holds_alternative<XAction::DWithdraw>(act.node)) {
        const auto& w = std::get<Withdraw>(inner->node);
        consume(true);
        int i = 1;
        for (const auto& a : w.assigns)
            c.assigned.push_back(XAssigned{active.adv, a.to, a.amount, at.left().leaf(i++)});
        return c;
    }
    if (std::holds_alternative<XAction::DoSplit>(act.node)) {
        const auto& sp = std::get<GuardedContract::Split>(inner->node);
        consume(true);
        int i = 1;
        for (const auto& [b, sub] : sp.branches) {
            c.active[at.left().branch(i)] = XActive{active.adv, sub, b};
            ++i;
        }
        return c;
    }
    const auto& r = std::get<GuardedContract::Reveal>(inner->node);
    consume(true);
    c.active[at.left()] = XActive{active.adv, r.next, active.balance};
    return c;
}

// ---------------------------------------------------------------------------
// Runs and money accounting.
// ---------------------------------------------------------------------------

struct XRun {
    const Registry* registry{nullptr};
    XConfig initial;
    struct Step {
        XAction action;
        XConfig config;
    };
    std::vector<Step> steps;

    const XConfig& last() const { return steps.empty() ? initial : steps.back().config; }

    void apply(const XAction& a) {
        steps.push_back(Step{a, x_step(last(), *registry, a)});
    }

    // Users that ever authorized kappa's guarded branch (history-based).
    std::set<Participant> auth_history(const Label& at) const {
        std::set<Participant> out;
        for (const auto& s : steps)
            if (auto* a = std::get_if<XAction::AuthSig>(&s.action.node))
                if (a->at == at) out.insert(a->who);
        return out;
    }

    // Labels that ever appeared on contract-execution elements.
    std::set<Label> labels_seen() const {
        std::set<Label> out;
        auto scan = [&out](const XConfig& c) {
            for (const auto& [l, a] : c.active) out.insert(l);
            for (const auto& a : c.assigned)
                if (a.at) out.insert(*a.at);
        };
        scan(initial);
        for (const auto& s : steps) scan(s.config);
        return out;
    }
};

struct XMoney {
    std::map<Chain, Money> active;
    std::map<Chain, Money> assigned;
};

inline XMoney x_money(const XConfig& c) {
    XMoney m;
    for (const auto& [l, a] : c.active)
        for (const auto& [ch, v] : a.balance.amounts) m.active[ch] += v;
    for (const auto& a : c.assigned)
        for (const auto& [ch, v] : a.balance.amounts) m.assigned[ch] += v;
    return m;
}

// Money preservation: per chain, active + assigned funds equal the deposits of
// every advertisement consumed by initialize or abort.
inline bool x_money_preserved(const XConfig& c, const Registry& reg) {
    Balance inputs;
    for (const auto& [id, fate] : c.consumed) inputs += reg.adv(id).pre.total_balance();
    XMoney m = x_money(c);
    std::set<Chain> chains;
    for (const auto& [ch, v] : inputs.amounts) chains.insert(ch);
    for (const auto& [ch, v] : m.active) chains.insert(ch);
    for (const auto& [ch, v] : m.assigned) chains.insert(ch);
    for (const auto& ch : chains) {
        Money lhs = 0;
        auto ia = m.active.find(ch);
        auto ib = m.assigned.find(ch);
        if (ia != m.active.end()) lhs += ia->second;
        if (ib != m.assigned.end()) lhs += ib->second;
        if (lhs != inputs.get(ch)) return false;
    }
    return true;
}

}  // namespace bitmlx
