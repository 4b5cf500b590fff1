// Timed intermediate semantics: per-chain contract state machines for the
// compiled execution, the stipulation lifecycle, step/init secrets,
// compensation and the global clock.

#pragma once

#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "runtime.hpp"

namespace bitmlx {

// ---------------------------------------------------------------------------
// Contract status.
// ---------------------------------------------------------------------------

struct ContractStatus {
    enum class Kind {
        stip_choice,
        stip_right,
        stip_slashed,
        stip_compensated,
        stip_refunded,
        choice,
        left,
        right,
        slashed,
        compensated,
        assigned,
    };
    Kind kind{Kind::stip_choice};
    Participant who;  // slashed/compensated: cheater; assigned/refunded: beneficiary

    static ContractStatus make(Kind k) { return ContractStatus{k, {}}; }
    static ContractStatus make(Kind k, Participant p) { return ContractStatus{k, std::move(p)}; }

    bool is_stipulation() const {
        return kind == Kind::stip_choice || kind == Kind::stip_right || kind == Kind::stip_slashed ||
               kind == Kind::stip_compensated || kind == Kind::stip_refunded;
    }
    bool is_terminal() const {
        return kind == Kind::assigned || kind == Kind::slashed || kind == Kind::compensated ||
               kind == Kind::stip_refunded || kind == Kind::stip_slashed || kind == Kind::stip_compensated;
    }

    std::string str() const {
        switch (kind) {
            case Kind::stip_choice: return "StipChoice";
            case Kind::stip_right: return "StipRight";
            case Kind::stip_slashed: return "StipSlashed(" + who.name + ")";
            case Kind::stip_compensated: return "StipCompensated(" + who.name + ")";
            case Kind::stip_refunded: return "StipRefunded(" + who.name + ")";
            case Kind::choice: return "Choice";
            case Kind::left: return "Left";
            case Kind::right: return "Right";
            case Kind::slashed: return "Slashed(" + who.name + ")";
            case Kind::compensated: return "Compensated(" + who.name + ")";
            case Kind::assigned: return "Assigned(" + who.name + ")";
        }
        return "?";
    }
    friend bool operator==(const ContractStatus& a, const ContractStatus& b) {
        return a.kind == b.kind && a.who == b.who;
    }
};

struct ISState {
    Money balance{0};
    ContractStatus status;
    std::int64_t time{0};
};

struct ISRecord {
    std::string adv;
    Chain chain;
    Label at;
    ContractPtr node;  // the BitMLx term this record executes (kept on terminals)
    ISState state;
    std::int64_t anchor{0};  // BitML transaction anchor counter
};

// ---------------------------------------------------------------------------
// Actions.
// ---------------------------------------------------------------------------

struct ISAction {
    struct Advertise { std::string adv; };
    struct Commit {
        Participant who;
        std::string adv;
        std::map<std::string, std::optional<std::int64_t>> lengths;
    };
    struct AuthInit { Participant who; std::string adv; Chain chain; };
    struct Publish { std::string adv; Chain chain; };
    struct DoubleSpend { std::string adv; Participant who; Chain chain; };
    struct RevealInit { Participant who; std::string adv; };
    struct RevealStep { Participant who; Label at; };
    struct Init { std::string adv; Chain chain; };
    struct SRight { std::string adv; Chain chain; };
    struct SAbort { std::string adv; Chain chain; };
    struct SSlash { std::string adv; Chain chain; Participant who; };
    struct SCompensate { std::string adv; Chain chain; Participant who; };
    struct RevealSecret { Participant who; std::string secret; };
    struct ILeft { Label at; Chain chain; };
    struct RevealMove { Label at; Chain chain; };
    struct AuthControl { Participant who; Label at; Chain chain; };
    struct IRight { Label at; Chain chain; };
    struct RightMove { Label at; Chain chain; };
    struct Slash { Label at; Chain chain; Participant who; };
    struct Compensate { Label at; Chain chain; Participant who; };
    struct DWithdraw { Label at; Chain chain; };
    struct SplitMove { Label at; Chain chain; };
    struct CWithdraw { Label at; Chain chain; };
    struct Delay { std::int64_t amount{1}; };

    std::variant<Advertise, Commit, AuthInit, Publish, DoubleSpend, RevealInit, RevealStep, Init,
                 SRight, SAbort, SSlash, SCompensate, RevealSecret, ILeft, RevealMove, AuthControl,
                 IRight, RightMove, Slash, Compensate, DWithdraw, SplitMove, CWithdraw, Delay>
        node;

    std::optional<Participant> actor() const {
        if (auto* a = std::get_if<Commit>(&node)) return a->who;
        if (auto* a = std::get_if<AuthInit>(&node)) return a->who;
        if (auto* a = std::get_if<DoubleSpend>(&node)) return a->who;
        if (auto* a = std::get_if<RevealInit>(&node)) return a->who;
        if (auto* a = std::get_if<RevealStep>(&node)) return a->who;
        if (auto* a = std::get_if<RevealSecret>(&node)) return a->who;
        if (auto* a = std::get_if<AuthControl>(&node)) return a->who;
        return std::nullopt;
    }

    // Moves discarding a high-priority option need the honest user's consent.
    bool needs_consent() const {
        return std::holds_alternative<IRight>(node) || std::holds_alternative<RightMove>(node) ||
               std::holds_alternative<SRight>(node) || std::holds_alternative<SAbort>(node);
    }
    bool is_delay() const { return std::holds_alternative<Delay>(node); }

    std::string str() const {
        std::ostringstream os;
        if (auto* a = std::get_if<Advertise>(&node)) os << "advertise(" << a->adv << ")";
        else if (auto* a = std::get_if<Commit>(&node)) os << "commit(" << a->who.name << "," << a->adv << ")";
        else if (auto* a = std::get_if<AuthInit>(&node)) os << "authInit(" << a->who.name << "," << a->adv << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<Publish>(&node)) os << "publish(" << a->adv << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<DoubleSpend>(&node)) os << "doubleSpend(" << a->adv << "," << a->who.name << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<RevealInit>(&node)) os << "revealInit(" << a->who.name << "," << a->adv << ")";
        else if (auto* a = std::get_if<RevealStep>(&node)) os << "revealStep(" << a->who.name << "," << a->at.str() << ")";
        else if (auto* a = std::get_if<Init>(&node)) os << "init(" << a->adv << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<SRight>(&node)) os << "sright(" << a->adv << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<SAbort>(&node)) os << "abort(" << a->adv << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<SSlash>(&node)) os << "sslash(" << a->adv << "," << a->chain.name << "," << a->who.name << ")";
        else if (auto* a = std::get_if<SCompensate>(&node)) os << "scompensate(" << a->adv << "," << a->chain.name << "," << a->who.name << ")";
        else if (auto* a = std::get_if<RevealSecret>(&node)) os << "revealSecret(" << a->who.name << "," << a->secret << ")";
        else if (auto* a = std::get_if<ILeft>(&node)) os << "ileft(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<RevealMove>(&node)) os << "reveal(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<AuthControl>(&node)) os << "authControl(" << a->who.name << "," << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<IRight>(&node)) os << "iright(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<RightMove>(&node)) os << "right(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<Slash>(&node)) os << "slash(" << a->at.str() << "," << a->chain.name << "," << a->who.name << ")";
        else if (auto* a = std::get_if<Compensate>(&node)) os << "compensate(" << a->at.str() << "," << a->chain.name << "," << a->who.name << ")";
        else if (auto* a = std::get_if<DWithdraw>(&node)) os << "dwithdraw(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<SplitMove>(&node)) os << "split(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<CWithdraw>(&node)) os << "cwithdraw(" << a->at.str() << "," << a->chain.name << ")";
        else if (auto* a = std::get_if<Delay>(&node)) os << "delay(" << a->amount << ")";
        return os.str();
    }
    friend bool operator==(const ISAction& a, const ISAction& b) { return a.str() == b.str(); }
    friend bool operator<(const ISAction& a, const ISAction& b) { return a.str() < b.str(); }
};

// ---------------------------------------------------------------------------
// Configurations.
// ---------------------------------------------------------------------------

struct ISConfig {
    std::set<std::pair<std::string, Chain>> advertised_on;
    std::map<std::pair<Chain, Label>, ISRecord> records;
    std::map<std::tuple<Participant, Chain, std::string>, Money> deposits;  // genesis funds per advertisement

    std::map<std::pair<Participant, std::string>, std::optional<std::int64_t>> commits;  // logical
    std::map<std::pair<Participant, std::string>, std::int64_t> reveals;
    std::set<std::pair<Participant, Label>> step_committed;
    std::set<std::pair<Participant, Label>> step_revealed;
    std::set<std::pair<Participant, std::string>> init_committed;
    std::set<std::pair<Participant, std::string>> init_revealed;

    std::set<std::pair<Participant, std::string>> commit_auths;                 // A:[# > adv], all chains
    std::set<std::tuple<Participant, std::string, Chain>> init_auths;           // A:[x > adv@B]
    std::set<std::tuple<Participant, Label, Chain>> contract_auths;             // A:[(kappa,B) > D]

    // Monotone lifecycle witnesses.
    std::set<std::pair<std::string, Chain>> published;
    std::set<std::pair<std::string, Chain>> init_done;
    std::set<std::pair<std::string, Chain>> abort_done;
    std::set<std::tuple<Participant, std::string, Chain>> double_spent;

    std::int64_t clock{0};
    std::int64_t next_anchor{1};

    SecretEnv reveal_env() const {
        SecretEnv env;
        for (const auto& [k, v] : reveals) env[k.second] = v;
        return env;
    }
    const ISRecord* record(const Chain& c, const Label& l) const {
        auto it = records.find({c, l});
        return it == records.end() ? nullptr : &it->second;
    }
    std::set<Participant> step_secret_users(const Label& at) const {
        std::set<Participant> out;
        for (const auto& [p, l] : step_revealed)
            if (l == at) out.insert(p);
        return out;
    }
    std::set<Participant> init_secret_users(const std::string& stip) const {
        std::set<Participant> out;
        for (const auto& [p, s] : init_revealed)
            if (s == stip) out.insert(p);
        return out;
    }
};

// Genesis configuration for a registry: every participant holds, per chain and
// advertisement, their deposit plus the collateral required at stipulation.
inline ISConfig is_genesis(const Registry& reg) {
    ISConfig c;
    for (const auto& [id, adv] : reg.advertisements) {
        auto participants = adv.pre.participants();
        Money n = static_cast<Money>(participants.size());
        for (const auto& chain : adv.pre.chains()) {
            Money collateral = std::max<Money>(0, n - 2) * adv.pre.balance_on(chain);
            for (const auto& p : participants)
                c.deposits[{p, chain, id}] = adv.pre.deposit_of(p).get(chain) + collateral;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Rule machinery.
// ---------------------------------------------------------------------------

namespace isdetail {

inline const GuardedContract* strip_auth(const GuardedContract& g, std::vector<Participant>& signers) {
    const GuardedContract* cur = &g;
    while (auto* a = std::get_if<GuardedContract::Auth>(&cur->node)) {
        for (const auto& p : a->signers) signers.push_back(p);
        cur = a->inner.get();
    }
    return cur;
}

inline bool contract_auths_complete(const ISConfig& c, const Label& at, const Chain& chain,
                                    const std::vector<Participant>& signers) {
    for (const auto& p : signers)
        if (!c.contract_auths.count({p, at, chain})) return false;
    return true;
}

inline bool any_step_secret(const ISConfig& c, const Label& at) {
    for (const auto& [p, l] : c.step_revealed)
        if (l == at) return true;
    return false;
}

}  // namespace isdetail

inline std::vector<ISAction> is_enabled(const ISConfig& c, const Registry& reg) {
    std::vector<ISAction> out;

    // Stipulation lifecycle.
    for (const auto& [id, adv] : reg.advertisements) {
        auto participants = adv.pre.participants();
        auto chains = adv.pre.chains();
        bool anywhere = false;
        for (const auto& ch : chains)
            anywhere = anywhere || c.advertised_on.count({id, ch}) || c.published.count({id, ch});
        if (!anywhere) {
            bool funded = true;
            for (const auto& p : participants)
                for (const auto& ch : chains)
                    funded = funded && c.deposits.count({p, ch, id});
            bool any_honest = false;
            for (const auto& p : participants) any_honest = any_honest || reg.is_honest(p);
            bool fresh = true;
            for (const auto& s : adv.pre.secrets)
                for (const auto& [k, v] : c.commits) fresh = fresh && k.second != s.name;
            if (funded && any_honest && fresh && check_well_formed(adv).ok())
                out.push_back(ISAction{ISAction::Advertise{id}});
        }

        bool on_all = true;
        for (const auto& ch : chains) on_all = on_all && c.advertised_on.count({id, ch});
        bool all_committed = true;
        for (const auto& p : participants) all_committed = all_committed && c.commit_auths.count({p, id});

        for (const auto& p : participants) {
            if (on_all && !c.commit_auths.count({p, id})) {
                ISAction::Commit cm{p, id, {}};
                for (const auto& s : adv.pre.secrets_of(p))
                    cm.lengths[s] = reg.is_honest(p) ? std::optional<std::int64_t>(0) : std::nullopt;
                out.push_back(ISAction{std::move(cm)});
            }
            if ((c.init_committed.count({p, id})) && !c.init_revealed.count({p, id}))
                out.push_back(ISAction{ISAction::RevealInit{p, id}});
        }

        for (const auto& ch : chains) {
            if (!c.advertised_on.count({id, ch})) continue;
            bool deposits_ok = true;
            bool auths_ok = true;
            for (const auto& p : participants) {
                if (all_committed && c.deposits.count({p, ch, id}) &&
                    !c.init_auths.count({p, id, ch}))
                    out.push_back(ISAction{ISAction::AuthInit{p, id, ch}});
                deposits_ok = deposits_ok && c.deposits.count({p, ch, id});
                auths_ok = auths_ok && c.init_auths.count({p, id, ch});
                if (c.deposits.count({p, ch, id}))
                    out.push_back(ISAction{ISAction::DoubleSpend{id, p, ch}});
            }
            if (all_committed && deposits_ok && auths_ok)
                out.push_back(ISAction{ISAction::Publish{id, ch}});
        }
    }

    // Step-secret and logical-secret reveals.
    for (const auto& [p, l] : c.step_committed)
        if (!c.step_revealed.count({p, l})) out.push_back(ISAction{ISAction::RevealStep{p, l}});
    for (const auto& [k, len] : c.commits)
        if (len.has_value() && !c.reveals.count(k))
            out.push_back(ISAction{ISAction::RevealSecret{k.first, k.second}});

    // Per-record moves.
    for (const auto& [key, rec] : c.records) {
        const Chain& chain = key.first;
        const Label& at = key.second;
        const Advertisement& adv = reg.adv(rec.adv);
        const auto participants = adv.pre.participants();
        const ContractStatus& st = rec.state.status;
        const Label root = Label::root(rec.adv);

        switch (st.kind) {
            case ContractStatus::Kind::stip_choice: {
                bool all_init = true;
                for (const auto& p : participants) all_init = all_init && c.init_revealed.count({p, rec.adv});
                if (all_init && isdetail::any_step_secret(c, root))
                    out.push_back(ISAction{ISAction::Init{rec.adv, chain}});
                if (c.clock >= rec.state.time)
                    out.push_back(ISAction{ISAction::SRight{rec.adv, chain}});
                break;
            }
            case ContractStatus::Kind::stip_right: {
                if (c.clock >= rec.state.time)
                    out.push_back(ISAction{ISAction::SAbort{rec.adv, chain}});
                for (const auto& p : participants)
                    if (c.step_revealed.count({p, root}))
                        out.push_back(ISAction{ISAction::SSlash{rec.adv, chain, p}});
                break;
            }
            case ContractStatus::Kind::stip_slashed:
                out.push_back(ISAction{ISAction::SCompensate{rec.adv, chain, st.who}});
                break;
            case ContractStatus::Kind::choice: {
                if (std::holds_alternative<Withdraw>(rec.node->node)) {
                    out.push_back(ISAction{ISAction::CWithdraw{at, chain}});
                    break;
                }
                const auto& pr = std::get<Contract::Priority>(rec.node->node);
                std::vector<Participant> signers;
                const GuardedContract* inner = isdetail::strip_auth(*pr.left, signers);
                for (const auto& p : signers)
                    if (!c.contract_auths.count({p, at, chain}))
                        out.push_back(ISAction{ISAction::AuthControl{p, at, chain}});
                bool sigs = isdetail::contract_auths_complete(c, at, chain, signers);
                bool secret = isdetail::any_step_secret(c, at.left());
                if (sigs && secret) {
                    if (auto* rv = std::get_if<GuardedContract::Reveal>(&inner->node)) {
                        SecretEnv env = c.reveal_env();
                        bool all = true;
                        for (const auto& s : rv->secrets) all = all && env.count(s);
                        bool pred = false;
                        if (all) {
                            try {
                                pred = eval_predicate(*rv->condition, env);
                            } catch (const UnboundSecret&) {
                                pred = false;
                            }
                        }
                        if (all && pred) out.push_back(ISAction{ISAction::RevealMove{at, chain}});
                    } else {
                        out.push_back(ISAction{ISAction::ILeft{at, chain}});
                    }
                }
                if (c.clock >= rec.state.time)
                    out.push_back(ISAction{ISAction::IRight{at, chain}});
                break;
            }
            case ContractStatus::Kind::left: {
                const auto& pr = std::get<Contract::Priority>(rec.node->node);
                std::vector<Participant> signers;
                const GuardedContract* inner = isdetail::strip_auth(*pr.left, signers);
                if (std::holds_alternative<Withdraw>(inner->node))
                    out.push_back(ISAction{ISAction::DWithdraw{at, chain}});
                else if (std::holds_alternative<GuardedContract::Split>(inner->node))
                    out.push_back(ISAction{ISAction::SplitMove{at, chain}});
                break;
            }
            case ContractStatus::Kind::right: {
                if (c.clock >= rec.state.time)
                    out.push_back(ISAction{ISAction::RightMove{at, chain}});
                for (const auto& p : participants)
                    if (c.step_revealed.count({p, at.left()}))
                        out.push_back(ISAction{ISAction::Slash{at, chain, p}});
                break;
            }
            case ContractStatus::Kind::slashed:
                out.push_back(ISAction{ISAction::Compensate{at, chain, st.who}});
                break;
            default:
                break;  // terminal
        }
    }
    return out;
}

inline bool is_action_enabled(const ISConfig& c, const Registry& reg, const ISAction& a) {
    if (auto* d = std::get_if<ISAction::Delay>(&a.node)) return d->amount > 0;
    if (auto* cm = std::get_if<ISAction::Commit>(&a.node)) {
        // lengths don't affect enabledness, but honest commitments must be valued
        for (const auto& e : is_enabled(c, reg)) {
            if (auto* ec = std::get_if<ISAction::Commit>(&e.node)) {
                if (ec->who == cm->who && ec->adv == cm->adv) {
                    if (reg.is_honest(cm->who)) {
                        for (const auto& s : reg.adv(cm->adv).pre.secrets_of(cm->who)) {
                            auto it = cm->lengths.find(s);
                            if (it == cm->lengths.end() || !it->second.has_value() || *it->second < 0)
                                return false;
                        }
                    }
                    return true;
                }
            }
        }
        return false;
    }
    for (const auto& e : is_enabled(c, reg))
        if (e == a) return true;
    return false;
}

inline ISConfig is_step(const ISConfig& c0, const Registry& reg, const ISAction& act) {
    if (!is_action_enabled(c0, reg, act)) throw NotEnabled(act.str());
    ISConfig c = c0;

    if (auto* d = std::get_if<ISAction::Delay>(&act.node)) {
        if (d->amount <= 0) throw NonPositiveDelay();
        c.clock += d->amount;
        return c;
    }
    if (auto* a = std::get_if<ISAction::Advertise>(&act.node)) {
        for (const auto& ch : reg.adv(a->adv).pre.chains()) c.advertised_on.insert({a->adv, ch});
        return c;
    }
    if (auto* a = std::get_if<ISAction::Commit>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        for (const auto& s : adv.pre.secrets_of(a->who)) {
            auto it = a->lengths.find(s);
            c.commits[{a->who, s}] = it == a->lengths.end() ? std::nullopt : it->second;
        }
        Label root = Label::root(a->adv);
        std::set<Label> labels = nodes(*adv.contract, root);
        labels.insert(root);
        for (const auto& l : labels) c.step_committed.insert({a->who, l});
        c.init_committed.insert({a->who, a->adv});
        c.commit_auths.insert({a->who, a->adv});
        return c;
    }
    if (auto* a = std::get_if<ISAction::AuthInit>(&act.node)) {
        c.init_auths.insert({a->who, a->adv, a->chain});
        return c;
    }
    if (auto* a = std::get_if<ISAction::DoubleSpend>(&act.node)) {
        c.deposits.erase({a->who, a->chain, a->adv});
        c.double_spent.insert({a->who, a->adv, a->chain});
        return c;
    }
    if (auto* a = std::get_if<ISAction::Publish>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        c.advertised_on.erase({a->adv, a->chain});
        for (const auto& p : adv.pre.participants()) {
            c.deposits.erase({p, a->chain, a->adv});
            c.init_auths.erase({p, a->adv, a->chain});
        }
        ISRecord rec;
        rec.adv = a->adv;
        rec.chain = a->chain;
        rec.at = Label::root(a->adv);
        rec.node = adv.contract;
        rec.state = ISState{adv.pre.balance_on(a->chain), ContractStatus::make(ContractStatus::Kind::stip_choice),
                            adv.start_time()};
        rec.anchor = c.next_anchor++;
        c.records[{a->chain, rec.at}] = std::move(rec);
        c.published.insert({a->adv, a->chain});
        return c;
    }
    if (auto* a = std::get_if<ISAction::RevealInit>(&act.node)) {
        c.init_revealed.insert({a->who, a->adv});
        return c;
    }
    if (auto* a = std::get_if<ISAction::RevealStep>(&act.node)) {
        c.step_revealed.insert({a->who, a->at});
        return c;
    }
    if (auto* a = std::get_if<ISAction::RevealSecret>(&act.node)) {
        c.reveals[{a->who, a->secret}] = *c.commits.at({a->who, a->secret});
        return c;
    }

    auto stip_record = [&](const std::string& adv, const Chain& ch) -> ISRecord& {
        return c.records.at({ch, Label::root(adv)});
    };

    if (auto* a = std::get_if<ISAction::Init>(&act.node)) {
        ISRecord& rec = stip_record(a->adv, a->chain);
        rec.state.status = ContractStatus::make(ContractStatus::Kind::choice);
        rec.state.time += 2 * reg.delta;
        rec.anchor = c.next_anchor++;
        c.init_done.insert({a->adv, a->chain});
        return c;
    }
    if (auto* a = std::get_if<ISAction::SRight>(&act.node)) {
        ISRecord& rec = stip_record(a->adv, a->chain);
        rec.state.status = ContractStatus::make(ContractStatus::Kind::stip_right);
        rec.state.time += reg.delta;
        rec.anchor = c.next_anchor++;
        return c;
    }
    if (auto* a = std::get_if<ISAction::SAbort>(&act.node)) {
        const Advertisement& adv = reg.adv(a->adv);
        ISRecord base = stip_record(a->adv, a->chain);
        c.records.erase({a->chain, Label::root(a->adv)});
        int i = 1;
        for (const auto& p : adv.pre.participants()) {
            ISRecord rec = base;
            rec.at = Label::root(a->adv).right().leaf(i++);
            rec.state.status = ContractStatus::make(ContractStatus::Kind::stip_refunded, p);
            rec.state.balance = adv.pre.deposit_of(p).get(a->chain);
            rec.anchor = c.next_anchor++;
            c.records[{a->chain, rec.at}] = std::move(rec);
        }
        c.abort_done.insert({a->adv, a->chain});
        return c;
    }
    if (auto* a = std::get_if<ISAction::SSlash>(&act.node)) {
        ISRecord& rec = stip_record(a->adv, a->chain);
        rec.state.status = ContractStatus::make(ContractStatus::Kind::stip_slashed, a->who);
        rec.anchor = c.next_anchor++;
        return c;
    }
    if (auto* a = std::get_if<ISAction::SCompensate>(&act.node)) {
        ISRecord& rec = stip_record(a->adv, a->chain);
        rec.state.status = ContractStatus::make(ContractStatus::Kind::stip_compensated, a->who);
        rec.anchor = c.next_anchor++;
        return c;
    }

    // Contract-level moves.
    const Chain* chain = nullptr;
    const Label* at = nullptr;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, ISAction::ILeft> || std::is_same_v<T, ISAction::RevealMove> ||
                          std::is_same_v<T, ISAction::IRight> || std::is_same_v<T, ISAction::RightMove> ||
                          std::is_same_v<T, ISAction::DWithdraw> || std::is_same_v<T, ISAction::SplitMove> ||
                          std::is_same_v<T, ISAction::CWithdraw>) {
                chain = &a.chain;
                at = &a.at;
            } else if constexpr (std::is_same_v<T, ISAction::Slash> || std::is_same_v<T, ISAction::Compensate>) {
                chain = &a.chain;
                at = &a.at;
            } else if constexpr (std::is_same_v<T, ISAction::AuthControl>) {
                chain = &a.chain;
                at = &a.at;
            }
        },
        act.node);

    if (auto* a = std::get_if<ISAction::AuthControl>(&act.node)) {
        c.contract_auths.insert({a->who, *at, *chain});
        return c;
    }

    ISRecord rec = c.records.at({*chain, *at});
    auto drop_auths = [&]() {
        for (auto it = c.contract_auths.begin(); it != c.contract_auths.end();) {
            if (std::get<1>(*it) == *at && std::get<2>(*it) == *chain)
                it = c.contract_auths.erase(it);
            else
                ++it;
        }
    };

    if (std::holds_alternative<ISAction::ILeft>(act.node)) {
        drop_auths();
        ISRecord& r = c.records.at({*chain, *at});
        r.state.status = ContractStatus::make(ContractStatus::Kind::left);
        r.anchor = c.next_anchor++;
        return c;
    }
    if (std::holds_alternative<ISAction::RevealMove>(act.node)) {
        const auto& pr = std::get<Contract::Priority>(rec.node->node);
        std::vector<Participant> signers;
        const GuardedContract* inner = isdetail::strip_auth(*pr.left, signers);
        const auto& rv = std::get<GuardedContract::Reveal>(inner->node);
        drop_auths();
        c.records.erase({*chain, *at});
        ISRecord child = rec;
        child.at = at->left();
        child.node = rv.next;
        child.state.status = ContractStatus::make(ContractStatus::Kind::choice);
        child.state.time += 2 * reg.delta;
        child.anchor = c.next_anchor++;
        c.records[{*chain, child.at}] = std::move(child);
        return c;
    }
    if (std::holds_alternative<ISAction::IRight>(act.node)) {
        ISRecord& r = c.records.at({*chain, *at});
        r.state.status = ContractStatus::make(ContractStatus::Kind::right);
        r.state.time += reg.delta;
        r.anchor = c.next_anchor++;
        return c;
    }
    if (std::holds_alternative<ISAction::RightMove>(act.node)) {
        const auto& pr = std::get<Contract::Priority>(rec.node->node);
        c.records.erase({*chain, *at});
        ISRecord child = rec;
        child.at = at->right();
        child.node = pr.right;
        child.state.status = ContractStatus::make(ContractStatus::Kind::choice);
        child.state.time += reg.delta;
        child.anchor = c.next_anchor++;
        c.records[{*chain, child.at}] = std::move(child);
        return c;
    }
    if (auto* a = std::get_if<ISAction::Slash>(&act.node)) {
        ISRecord& r = c.records.at({*chain, *at});
        r.state.status = ContractStatus::make(ContractStatus::Kind::slashed, a->who);
        r.anchor = c.next_anchor++;
        return c;
    }
    if (auto* a = std::get_if<ISAction::Compensate>(&act.node)) {
        ISRecord& r = c.records.at({*chain, *at});
        r.state.status = ContractStatus::make(ContractStatus::Kind::compensated, a->who);
        r.anchor = c.next_anchor++;
        return c;
    }
    if (std::holds_alternative<ISAction::DWithdraw>(act.node)) {
        const auto& pr = std::get<Contract::Priority>(rec.node->node);
        std::vector<Participant> signers;
        const GuardedContract* inner = isdetail::strip_auth(*pr.left, signers);
        const auto& w = std::get<Withdraw>(inner->node);
        c.records.erase({*chain, *at});
        int i = 1;
        for (const auto& asg : w.assigns) {
            ISRecord term = rec;
            term.at = at->left().leaf(i++);
            term.state.status = ContractStatus::make(ContractStatus::Kind::assigned, asg.to);
            term.state.balance = asg.amount.get(*chain);
            term.anchor = c.next_anchor++;
            c.records[{*chain, term.at}] = std::move(term);
        }
        return c;
    }
    if (std::holds_alternative<ISAction::SplitMove>(act.node)) {
        const auto& pr = std::get<Contract::Priority>(rec.node->node);
        std::vector<Participant> signers;
        const GuardedContract* inner = isdetail::strip_auth(*pr.left, signers);
        const auto& sp = std::get<GuardedContract::Split>(inner->node);
        c.records.erase({*chain, *at});
        int i = 1;
        for (const auto& [b, sub] : sp.branches) {
            ISRecord child = rec;
            child.at = at->left().branch(i++);
            child.node = sub;
            child.state.status = ContractStatus::make(ContractStatus::Kind::choice);
            child.state.balance = b.get(*chain);
            child.state.time = rec.state.time + 2 * reg.delta;
            child.anchor = c.next_anchor++;
            c.records[{*chain, child.at}] = std::move(child);
        }
        return c;
    }
    // CWithdraw
    const auto& w = std::get<Withdraw>(rec.node->node);
    c.records.erase({*chain, *at});
    int i = 1;
    for (const auto& asg : w.assigns) {
        ISRecord term = rec;
        term.at = at->leaf(i++);
        term.state.status = ContractStatus::make(ContractStatus::Kind::assigned, asg.to);
        term.state.balance = asg.amount.get(*chain);
        term.anchor = c.next_anchor++;
        c.records[{*chain, term.at}] = std::move(term);
    }
    return c;
}

inline ISConfig is_delay(const ISConfig& c, std::int64_t amount) {
    if (amount <= 0) throw NonPositiveDelay();
    ISConfig out = c;
    out.clock += amount;
    return out;
}

// ---------------------------------------------------------------------------
// Runs.
// ---------------------------------------------------------------------------

struct ISRun {
    const Registry* registry{nullptr};
    ISConfig initial;
    struct Step {
        ISAction action;
        ISConfig config;
    };
    std::vector<Step> steps;

    const ISConfig& last() const { return steps.empty() ? initial : steps.back().config; }

    void apply(const ISAction& a) {
        steps.push_back(Step{a, is_step(last(), *registry, a)});
    }

    // Chains on which `who` authorized kappa's guarded branch (history-based).
    std::set<Chain> chain_auths(const Participant& who, const Label& at) const {
        std::set<Chain> out;
        for (const auto& s : steps)
            if (auto* a = std::get_if<ISAction::AuthControl>(&s.action.node))
                if (a->who == who && a->at == at) out.insert(a->chain);
        return out;
    }
    std::set<Participant> contract_auth_users(const Label& at) const {
        std::set<Participant> out;
        for (const auto& s : steps)
            if (auto* a = std::get_if<ISAction::AuthControl>(&s.action.node))
                if (a->at == at) out.insert(a->who);
        return out;
    }
    // Chains on which `who` authorized the stipulation of the advertisement.
    std::set<Chain> stip_chain_auths(const Participant& who, const std::string& adv) const {
        std::set<Chain> out;
        for (const auto& s : steps)
            if (auto* a = std::get_if<ISAction::AuthInit>(&s.action.node))
                if (a->who == who && a->adv == adv) out.insert(a->chain);
        return out;
    }
    std::set<Participant> stip_auth_users(const std::string& adv) const {
        std::set<Participant> out;
        for (const auto& s : steps)
            if (auto* a = std::get_if<ISAction::AuthInit>(&s.action.node))
                if (a->adv == adv) out.insert(a->who);
        return out;
    }

    // Labels ever seen per chain, optionally restricted to contract-execution
    // records (excluding the stipulation lifecycle statuses).
    std::set<Label> labels_seen(const Chain& chain, bool include_stipulation) const {
        std::set<Label> out;
        auto scan = [&](const ISConfig& c) {
            for (const auto& [key, rec] : c.records) {
                if (key.first != chain) continue;
                if (!include_stipulation && rec.state.status.is_stipulation()) continue;
                out.insert(key.second);
            }
        };
        scan(initial);
        for (const auto& s : steps) scan(s.config);
        return out;
    }
};

}  // namespace bitmlx
