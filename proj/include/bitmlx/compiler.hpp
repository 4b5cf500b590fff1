// BitMLx-to-BitML compiler: settings record, step-secret generation over node
// labels, guarded/top-level/compensation/refund/stipulation compilation and
// the per-chain advertisement entry point.

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ast.hpp"
#include "wellformed.hpp"

namespace bitmlx {

struct NotWellFormed : std::runtime_error {
    WfReport report;
    explicit NotWellFormed(WfReport r)
        : std::runtime_error("advertisement is not well-formed (" +
                             std::to_string(r.violations.size()) + " violations)"),
          report(std::move(r)) {}
};

struct CompilerSettings {
    std::vector<Participant> participants;  // declaration order
    Money balance{0};                       // logical balance on the target chain
    Money collateral{0};                    // per participant
    std::int64_t current_time{0};
    std::int64_t time_elapse{10};           // delta
    Label current_label;
    std::set<std::pair<Participant, Label>> step_secrets;
    std::set<Participant> init_secret_holders;

    bool has_step_secret(const Participant& p, const Label& at) const {
        return step_secrets.count({p, at}) > 0;
    }
    CompilerSettings with(Money b, Money c, Label l) const {
        CompilerSettings s = *this;
        s.balance = b;
        s.collateral = c;
        s.current_label = std::move(l);
        return s;
    }
    CompilerSettings at_time(std::int64_t t) const {
        CompilerSettings s = *this;
        s.current_time = t;
        return s;
    }
    CompilerSettings at_label(Label l) const {
        CompilerSettings s = *this;
        s.current_label = std::move(l);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Step-secret label generation (the nodes / nodes_D recursion).
// ---------------------------------------------------------------------------

inline void nodes_of(const Contract& c, const Label& at, std::set<Label>& out);

inline void nodes_of_guarded(const GuardedContract& g, const Label& at, std::set<Label>& out) {
    if (std::holds_alternative<Withdraw>(g.node)) {
        out.insert(at);
        return;
    }
    if (auto* s = std::get_if<GuardedContract::Split>(&g.node)) {
        out.insert(at);
        int i = 1;
        for (const auto& [b, sub] : s->branches) nodes_of(*sub, at.branch(i++), out);
        return;
    }
    if (auto* a = std::get_if<GuardedContract::Auth>(&g.node)) {
        nodes_of_guarded(*a->inner, at, out);
        return;
    }
    const auto& r = std::get<GuardedContract::Reveal>(g.node);
    out.insert(at);
    nodes_of(*r.next, at, out);
}

inline void nodes_of(const Contract& c, const Label& at, std::set<Label>& out) {
    if (std::holds_alternative<Withdraw>(c.node)) return;  // top-level withdraw has no step secret
    const auto& p = std::get<Contract::Priority>(c.node);
    nodes_of_guarded(*p.left, at.left(), out);
    nodes_of(*p.right, at.right(), out);
}

inline std::set<Label> nodes(const Contract& c, const Label& root) {
    std::set<Label> out;
    nodes_of(c, root, out);
    return out;
}

inline CompilerSettings initial_settings(const Advertisement& adv, const Chain& chain,
                                         std::int64_t delta) {
    CompilerSettings s;
    s.participants = adv.pre.participants();
    s.balance = adv.pre.balance_on(chain);
    Money n = static_cast<Money>(s.participants.size());
    s.collateral = std::max<Money>(0, n - 2) * s.balance;
    s.current_time = adv.pre.timing.start_time;
    s.time_elapse = delta;
    Label root = Label::root(adv.stip_id());
    s.current_label = root;
    std::set<Label> labels = nodes(*adv.contract, root);
    labels.insert(root);  // stipulation step secrets
    for (const auto& p : s.participants) {
        for (const auto& l : labels) s.step_secrets.insert({p, l});
        s.init_secret_holders.insert(p);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Compilation rules.
// ---------------------------------------------------------------------------

// Withdraw outputs: every settings participant gets their assigned amount on
// this chain plus the collateral; zero entries are pruned.
inline std::vector<std::pair<Money, Participant>> compile_out(
    const std::vector<WithdrawAssign>& assigns, const CompilerSettings& s, const Chain& chain) {
    std::vector<std::pair<Money, Participant>> out;
    for (const auto& p : s.participants) {
        Money v = s.collateral;
        for (const auto& a : assigns)
            if (a.to == p) v += a.amount.get(chain);
        if (v > 0) out.emplace_back(v, p);
    }
    return out;
}

inline BitmlGuardedPtr out_split(const std::vector<std::pair<Money, Participant>>& out) {
    std::vector<std::pair<Money, BitmlPtr>> branches;
    for (const auto& [v, p] : out)
        branches.emplace_back(v, bitml_choice({bitml_withdraw(p)}));
    return bitml_split(std::move(branches));
}

BitmlPtr compile_toplevel(const Contract& c, const CompilerSettings& s, const Chain& chain);

// Compensation: one clause per participant with a positive stake; revealing
// A_i's step secret at the current label pays each other participant the
// per-user share (n-1)*b, i.e. collateral refund plus the maximal payout.
inline std::vector<BitmlGuardedPtr> compile_compensation(const CompilerSettings& s, const Chain& chain) {
    (void)chain;
    std::vector<BitmlGuardedPtr> clauses;
    Money n = static_cast<Money>(s.participants.size());
    Money share = (n - 1) * s.balance;
    if (s.balance <= 0 || n < 2) return clauses;
    for (std::size_t i = 0; i < s.participants.size(); ++i) {
        std::vector<std::pair<Money, BitmlPtr>> branches;
        for (std::size_t j = 0; j < s.participants.size(); ++j) {
            if (j == i) continue;
            branches.emplace_back(share, bitml_choice({bitml_withdraw(s.participants[j])}));
        }
        clauses.push_back(bitml_reveal({step_secret_name(s.participants[i], s.current_label)},
                                       Predicate::truth(),
                                       bitml_choice({bitml_split(std::move(branches))})));
    }
    return clauses;
}

// Guarded contracts compile to a sum of step-secret-guarded clauses.
inline std::vector<BitmlGuardedPtr> compile_guarded(const GuardedContract& g,
                                                    const CompilerSettings& s, const Chain& chain) {
    if (auto* w = std::get_if<Withdraw>(&g.node)) {
        std::vector<BitmlGuardedPtr> clauses;
        BitmlGuardedPtr split = out_split(compile_out(w->assigns, s, chain));
        for (const auto& p : s.participants)
            clauses.push_back(bitml_reveal({step_secret_name(p, s.current_label)},
                                           Predicate::truth(), bitml_choice({split})));
        return clauses;
    }
    if (auto* sp = std::get_if<GuardedContract::Split>(&g.node)) {
        Money n = static_cast<Money>(s.participants.size());
        std::vector<std::pair<Money, BitmlPtr>> branches;
        int i = 1;
        for (const auto& [bal, sub] : sp->branches) {
            Money b = bal.get(chain);
            Money c = std::max<Money>(0, n - 2) * b;
            Money mu = b + n * c;
            CompilerSettings child = s.with(b, c, s.current_label.branch(i));
            if (mu > 0) branches.emplace_back(mu, compile_toplevel(*sub, child, chain));
            ++i;
        }
        BitmlGuardedPtr split = bitml_split(std::move(branches));
        std::vector<BitmlGuardedPtr> clauses;
        for (const auto& p : s.participants)
            clauses.push_back(bitml_reveal({step_secret_name(p, s.current_label)},
                                           Predicate::truth(), bitml_choice({split})));
        return clauses;
    }
    if (auto* a = std::get_if<GuardedContract::Auth>(&g.node)) {
        std::vector<BitmlGuardedPtr> inner = compile_guarded(*a->inner, s, chain);
        std::vector<BitmlGuardedPtr> clauses;
        for (const auto& cl : inner) clauses.push_back(bitml_auth(a->signers, cl));
        return clauses;
    }
    const auto& r = std::get<GuardedContract::Reveal>(g.node);
    BitmlPtr next = compile_toplevel(*r.next, s, chain);
    std::vector<BitmlGuardedPtr> clauses;
    for (const auto& p : s.participants) {
        std::vector<std::string> secrets = r.secrets;
        secrets.push_back(step_secret_name(p, s.current_label));
        clauses.push_back(bitml_reveal(std::move(secrets), r.condition, next));
    }
    return clauses;
}

inline BitmlPtr compile_toplevel(const Contract& c, const CompilerSettings& s, const Chain& chain) {
    if (auto* w = std::get_if<Withdraw>(&c.node))
        return bitml_choice({out_split(compile_out(w->assigns, s, chain))});

    const auto& pr = std::get<Contract::Priority>(c.node);
    std::int64_t t = s.current_time;
    std::int64_t d = s.time_elapse;
    CompilerSettings left = s.at_time(t + 2 * d).at_label(s.current_label.left());
    CompilerSettings right = s.at_time(t + 2 * d).at_label(s.current_label.right());

    std::vector<BitmlGuardedPtr> clauses = compile_guarded(*pr.left, left, chain);
    std::vector<BitmlGuardedPtr> low = compile_compensation(left, chain);
    low.push_back(bitml_after(t + 2 * d, bitml_tau(compile_toplevel(*pr.right, right, chain))));
    clauses.push_back(bitml_after(t + d, bitml_tau(bitml_choice(std::move(low)))));
    return bitml_choice(std::move(clauses));
}

// Refund arm of the stipulation: return every participant their chain deposit
// plus collateral.
inline BitmlPtr compile_refund(const Precondition& pre, const CompilerSettings& s, const Chain& chain) {
    std::vector<WithdrawAssign> assigns;
    for (const auto& p : s.participants)
        assigns.push_back(WithdrawAssign{p, pre.deposit_of(p)});
    return bitml_choice({out_split(compile_out(assigns, s, chain))});
}

// Stipulation wrapper: the contract guarded by all init secrets as the
// high-priority arm, compensation at the root label after t0+delta, and the
// refund after t0+2*delta.
inline BitmlPtr compile_stipulation(const Advertisement& adv, const CompilerSettings& s,
                                    const Chain& chain) {
    std::int64_t t = s.current_time;
    std::int64_t d = s.time_elapse;
    CompilerSettings inner = s.at_time(t + 2 * d);  // label stays at the root

    std::vector<std::string> init_secrets;
    for (const auto& p : s.participants) init_secrets.push_back(init_secret_name(p, adv.stip_id()));
    GuardedPtr guard = GuardedContract::reveal(std::move(init_secrets), Predicate::truth(), adv.contract);

    std::vector<BitmlGuardedPtr> clauses = compile_guarded(*guard, inner, chain);
    std::vector<BitmlGuardedPtr> low = compile_compensation(inner, chain);
    low.push_back(bitml_after(t + 2 * d, bitml_tau(compile_refund(adv.pre, s, chain))));
    clauses.push_back(bitml_after(t + d, bitml_tau(bitml_choice(std::move(low)))));
    return bitml_choice(std::move(clauses));
}

// ---------------------------------------------------------------------------
// Advertisement compilation.
// ---------------------------------------------------------------------------

struct BitmlDeposit {
    Participant who;
    Money amount{0};
    std::string name;
};

struct CompiledChain {
    Chain chain;
    std::vector<BitmlDeposit> deposits;  // chain deposit + collateral per user
    BitmlPtr contract;
    CompilerSettings settings;
};

struct SecretDeclEntry {
    Participant who;
    std::string name;
    enum class Kind { logical, step, init } kind;
};

struct CompiledAdvertisement {
    std::map<Chain, CompiledChain> per_chain;
    std::vector<SecretDeclEntry> shared_secrets;
};

inline CompiledAdvertisement compile_advertisement(const Advertisement& adv, std::int64_t delta) {
    WfReport wf = check_well_formed(adv);
    if (!wf.ok()) throw NotWellFormed(std::move(wf));

    CompiledAdvertisement out;
    for (const auto& chain : adv.pre.chains()) {
        CompilerSettings s = initial_settings(adv, chain, delta);
        CompiledChain cc;
        cc.chain = chain;
        cc.settings = s;
        for (const auto& p : s.participants) {
            BitmlDeposit d;
            d.who = p;
            d.amount = adv.pre.deposit_of(p).get(chain) + s.collateral;
            d.name = "x:" + p.name + ":" + chain.name;
            cc.deposits.push_back(std::move(d));
        }
        cc.contract = compile_stipulation(adv, s, chain);
        out.per_chain.emplace(chain, std::move(cc));
    }

    // Shared declarations: logical secrets plus step and init secrets.
    for (const auto& sec : adv.pre.secrets)
        out.shared_secrets.push_back({sec.who, sec.name, SecretDeclEntry::Kind::logical});
    Label root = Label::root(adv.stip_id());
    std::set<Label> labels = nodes(*adv.contract, root);
    labels.insert(root);
    for (const auto& p : adv.pre.participants()) {
        for (const auto& l : labels)
            out.shared_secrets.push_back({p, step_secret_name(p, l), SecretDeclEntry::Kind::step});
        out.shared_secrets.push_back({p, init_secret_name(p, adv.stip_id()), SecretDeclEntry::Kind::init});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Node counting (structural size report).
// ---------------------------------------------------------------------------

struct NodeCounts {
    std::int64_t reveal{0}, split{0}, withdraw{0}, tau{0}, after{0}, auth{0};
    std::int64_t total() const { return reveal + split + withdraw + tau + after + auth; }
};

inline void count_nodes(const BitmlContract& c, NodeCounts& n);

inline void count_nodes(const BitmlGuarded& g, NodeCounts& n) {
    if (auto* r = std::get_if<BitmlGuarded::PutReveal>(&g.node)) {
        ++n.reveal;
        count_nodes(*r->next, n);
        return;
    }
    if (auto* s = std::get_if<BitmlGuarded::Split>(&g.node)) {
        ++n.split;
        for (const auto& [v, sub] : s->branches) count_nodes(*sub, n);
        return;
    }
    if (auto* a = std::get_if<BitmlGuarded::Auth>(&g.node)) {
        ++n.auth;
        count_nodes(*a->inner, n);
        return;
    }
    if (auto* a = std::get_if<BitmlGuarded::After>(&g.node)) {
        ++n.after;
        count_nodes(*a->inner, n);
        return;
    }
    if (std::holds_alternative<BitmlGuarded::WithdrawOne>(g.node)) {
        ++n.withdraw;
        return;
    }
    const auto& t = std::get<BitmlGuarded::Tau>(g.node);
    ++n.tau;
    count_nodes(*t.next, n);
}

inline void count_nodes(const BitmlContract& c, NodeCounts& n) {
    for (const auto& g : c.choices) count_nodes(*g, n);
}

inline NodeCounts count_nodes(const BitmlContract& c) {
    NodeCounts n;
    count_nodes(c, n);
    return n;
}

// ---------------------------------------------------------------------------
// BitML pretty form (human-readable compiled output).
// ---------------------------------------------------------------------------

inline void print_bitml(std::ostream& os, const BitmlContract& c, int indent);

inline void print_bitml(std::ostream& os, const BitmlGuarded& g, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (auto* r = std::get_if<BitmlGuarded::PutReveal>(&g.node)) {
        os << pad << "reveal [";
        for (std::size_t i = 0; i < r->secrets.size(); ++i)
            os << (i ? ", " : "") << r->secrets[i];
        os << "]";
        if (!std::holds_alternative<Predicate::True>(r->condition->node)) {
            os << " if ";
            detail::print_pred(os, *r->condition);
        }
        os << " .\n";
        print_bitml(os, *r->next, indent + 1);
        return;
    }
    if (auto* s = std::get_if<BitmlGuarded::Split>(&g.node)) {
        os << pad << "split\n";
        for (const auto& [v, sub] : s->branches) {
            os << pad << "  " << v << " ->\n";
            print_bitml(os, *sub, indent + 2);
        }
        return;
    }
    if (auto* a = std::get_if<BitmlGuarded::Auth>(&g.node)) {
        os << pad << "auth [";
        for (std::size_t i = 0; i < a->signers.size(); ++i)
            os << (i ? ", " : "") << a->signers[i].name;
        os << "] :\n";
        print_bitml(os, *a->inner, indent + 1);
        return;
    }
    if (auto* a = std::get_if<BitmlGuarded::After>(&g.node)) {
        os << pad << "after " << a->time << " :\n";
        print_bitml(os, *a->inner, indent + 1);
        return;
    }
    if (auto* w = std::get_if<BitmlGuarded::WithdrawOne>(&g.node)) {
        os << pad << "withdraw " << w->to.name << "\n";
        return;
    }
    const auto& t = std::get<BitmlGuarded::Tau>(g.node);
    os << pad << "tau .\n";
    print_bitml(os, *t.next, indent + 1);
}

inline void print_bitml(std::ostream& os, const BitmlContract& c, int indent = 0) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    bool first = true;
    for (const auto& g : c.choices) {
        if (!first) os << pad << "+\n";
        print_bitml(os, *g, indent);
        first = false;
    }
    if (c.choices.empty()) os << pad << "(empty)\n";
}

}  // namespace bitmlx
