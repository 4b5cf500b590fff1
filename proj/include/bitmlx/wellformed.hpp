// Well-formedness judgment over advertisements: balance conservation on
// withdraws and splits, participant and secret references, no nested auths.

#pragma once

#include <string>
#include <vector>

#include "ast.hpp"

namespace bitmlx {

struct WfViolation {
    std::string rule;  // WF-PChoice, WF-Withdraw, WFG-Split, WFG-Reveal, WFG-AuthOp, WFG-Withdraw
    Label at;
    std::string message;
};

struct WfReport {
    std::vector<WfViolation> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

struct WfCtx {
    const Precondition& pre;
    std::vector<Participant> participants;
    WfReport& report;

    bool known(const Participant& p) const {
        for (const auto& q : participants)
            if (q == p) return true;
        return false;
    }
    void flag(std::string rule, const Label& at, std::string msg) {
        report.violations.push_back(WfViolation{std::move(rule), at, std::move(msg)});
    }
};

inline void check_withdraw(WfCtx& ctx, const Withdraw& w, const Balance& governed,
                           const Label& at, const char* rule) {
    Balance total = w.total();
    if (total != governed)
        ctx.flag(rule, at, "withdraw distributes " + total.str() + " but governs " + governed.str());
    for (const auto& a : w.assigns) {
        if (!ctx.known(a.to))
            ctx.flag(rule, at, "unknown participant " + a.to.name);
        for (const auto& [c, v] : a.amount.amounts)
            if (v < 0) ctx.flag(rule, at, "negative amount for " + a.to.name);
    }
}

void check_contract(WfCtx& ctx, const Contract& c, const Balance& governed, const Label& at);

inline void check_guarded(WfCtx& ctx, const GuardedContract& g, const Balance& governed,
                          const Label& at) {
    if (auto* w = std::get_if<Withdraw>(&g.node)) {
        check_withdraw(ctx, *w, governed, at, "WFG-Withdraw");
        return;
    }
    if (auto* s = std::get_if<GuardedContract::Split>(&g.node)) {
        Balance total;
        for (const auto& [b, sub] : s->branches) total += b;
        if (total != governed)
            ctx.flag("WFG-Split", at, "split branches hold " + total.str() + " but govern " + governed.str());
        int i = 1;
        for (const auto& [b, sub] : s->branches) {
            for (const auto& [c2, v] : b.amounts)
                if (v < 0) ctx.flag("WFG-Split", at, "negative branch amount");
            check_contract(ctx, *sub, b, at.branch(i));
            ++i;
        }
        return;
    }
    if (auto* a = std::get_if<GuardedContract::Auth>(&g.node)) {
        for (const auto& p : a->signers)
            if (!ctx.known(p)) ctx.flag("WFG-AuthOp", at, "unknown signer " + p.name);
        if (std::holds_alternative<GuardedContract::Auth>(a->inner->node))
            ctx.flag("WFG-AuthOp", at, "authorization directly nested in authorization");
        check_guarded(ctx, *a->inner, governed, at);
        return;
    }
    const auto& r = std::get<GuardedContract::Reveal>(g.node);
    for (const auto& s : r.secrets)
        if (!ctx.pre.has_secret(s)) ctx.flag("WFG-Reveal", at, "secret " + s + " not committed in preconditions");
    std::set<std::string> referenced;
    collect_secrets(*r.condition, referenced);
    for (const auto& s : referenced)
        if (!ctx.pre.has_secret(s)) ctx.flag("WFG-Reveal", at, "predicate references uncommitted secret " + s);
    check_contract(ctx, *r.next, governed, at);
}

inline void check_contract(WfCtx& ctx, const Contract& c, const Balance& governed, const Label& at) {
    if (auto* w = std::get_if<Withdraw>(&c.node)) {
        check_withdraw(ctx, *w, governed, at, "WF-Withdraw");
        return;
    }
    const auto& p = std::get<Contract::Priority>(c.node);
    check_guarded(ctx, *p.left, governed, at.left());
    check_contract(ctx, *p.right, governed, at.right());
}

}  // namespace detail

inline WfReport check_well_formed(const Advertisement& adv) {
    WfReport report;
    detail::WfCtx ctx{adv.pre, adv.pre.participants(), report};
    Label root = Label::root(adv.pre.timing.stip_id.empty() ? "k0" : adv.pre.timing.stip_id);

    if (ctx.participants.empty())
        ctx.flag("WF-PChoice", root, "no participants declared");
    {
        std::set<std::string> names;
        for (const auto& p : ctx.participants)
            if (!names.insert(p.name).second)
                ctx.flag("WF-PChoice", root, "duplicate participant " + p.name);
    }
    {
        std::set<std::string> names;
        for (const auto& s : adv.pre.secrets)
            if (!names.insert(s.name).second)
                ctx.flag("WF-PChoice", root, "duplicate secret " + s.name);
    }
    if (adv.pre.chains().empty())
        ctx.flag("WF-PChoice", root, "advertisement has no active chains");
    if (!rightmost_is_withdraw(*adv.contract))
        ctx.flag("WF-PChoice", root, "rightmost leaf is not a withdraw");

    detail::check_contract(ctx, *adv.contract, adv.pre.total_balance(), root);
    return report;
}

}  // namespace bitmlx
