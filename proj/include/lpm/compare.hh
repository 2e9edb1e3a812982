#pragma once

#include <lpm/consistency.hh>

namespace lpm
{
    struct DominanceReport
    {
        std::optional<int> agent; // set for the single-agent comparison
        std::vector<std::string> hypothesis_failures;
        bool holds = true;
        std::optional<Witness> witness; // profile, agent, and both outcomes

        auto hypotheses_hold() const -> bool { return hypothesis_failures.empty(); }
    };

    /// Every agent weakly prefers the smaller assignment's outcome. Hypotheses:
    /// alpha inside larger pointwise, larger forward consistent, both
    /// implementable. The constraints may differ.
    auto check_pointwise_dominance(const CompromiserAssignment & alpha, const CompromiserAssignment & larger,
        ProfileIndex budget = default_profile_budget) -> DominanceReport;

    /// Agent i weakly prefers its outcome under other. Hypotheses: same
    /// constraint, both consistent and implementable, others compromise in
    /// other wherever they do in alpha, and i compromises in alpha wherever it
    /// does in other.
    auto check_agent_dominance(const CompromiserAssignment & alpha, const CompromiserAssignment & other, int i,
        Reading reading = Reading::strict, ProfileIndex budget = default_profile_budget) -> DominanceReport;
}
