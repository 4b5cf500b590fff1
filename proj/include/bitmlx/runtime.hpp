// Shared runtime context for both semantics: the advertisement registry,
// the honest-participant set and the scenario time parameters.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "ast.hpp"

namespace bitmlx {

struct NotEnabled : std::runtime_error {
    explicit NotEnabled(const std::string& what) : std::runtime_error("action not enabled: " + what) {}
};

struct NonPositiveDelay : std::runtime_error {
    NonPositiveDelay() : std::runtime_error("delay must be positive") {}
};

// Scenario-scoped universe of advertisements. Configurations reference
// advertisements by their stipulation identifier.
struct Registry {
    std::map<std::string, Advertisement> advertisements;  // stip id -> advertisement
    std::set<Participant> honest;
    std::int64_t delta{10};  // time elapse (maximal scheduler delay per honest action)

    const Advertisement& adv(const std::string& id) const {
        auto it = advertisements.find(id);
        if (it == advertisements.end()) throw std::runtime_error("unknown advertisement: " + id);
        return it->second;
    }
    bool is_honest(const Participant& p) const { return honest.count(p) > 0; }

    void add(Advertisement a) {
        std::string id = a.stip_id();
        advertisements.emplace(std::move(id), std::move(a));
    }
};

}  // namespace bitmlx
