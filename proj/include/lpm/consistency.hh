#pragma once

#include <lpm/axioms.hh>

namespace lpm
{
    /// Scope of x' in backward consistency: every allocation, or only the
    /// infeasible ones.
    enum class Reading
    {
        strict,
        relaxed
    };

    auto reading_name(Reading r) -> std::string;

    /// Whenever d(x,y) is inside alpha(x), alpha(y) keeps alpha(x) - d(x,y).
    /// A feasible y with a nonempty remainder is a violation.
    auto is_forward_consistent(const CompromiserAssignment & alpha) -> Verdict;

    /// Shortest acyclic path x = z1, ..., zp = y whose first move is agent i
    /// alone and whose later moves are subsets of the current compromisers.
    /// Both ends must be infeasible.
    auto i_connected(const CompromiserAssignment & alpha, Code x, Code y, int i) -> std::optional<std::vector<Code>>;

    /// Every infeasible y that is i-connected to x, in increasing code order.
    auto i_connected_set(const CompromiserAssignment & alpha, Code x, int i) -> std::vector<Code>;

    auto is_backward_consistent(const CompromiserAssignment & alpha, Reading reading = Reading::strict) -> Verdict;

    auto is_consistent(const CompromiserAssignment & alpha, Reading reading = Reading::strict) -> Verdict;

    /// Outcome of checking a proposition on one input: whether its hypotheses
    /// held, and whether its conclusion did.
    struct ClaimReport
    {
        std::optional<std::string> hypothesis_failure;
        Verdict conclusion;

        auto holds() const -> bool { return ! hypothesis_failure && conclusion.holds; }
    };

    /// sub is a pointwise-smaller assignment for the same constraint; with alpha
    /// implementable and forward consistent, both induce the same mechanism.
    auto verify_subset_equivalence(const CompromiserAssignment & alpha, const CompromiserAssignment & sub,
        ProfileIndex budget = default_profile_budget) -> ClaimReport;

    /// Two assignments inducing the same group strategy-proof mechanism; their
    /// pointwise union induces it too.
    auto verify_union_closure(const CompromiserAssignment & alpha, const CompromiserAssignment & other,
        ProfileIndex budget = default_profile_budget) -> ClaimReport;

    struct HarnessReport
    {
        std::uint64_t assignments = 0;
        std::uint64_t mechanisms = 0;
        std::uint64_t gsp_failures = 0;
        std::uint64_t pe_failures = 0;
        std::uint64_t not_implementable = 0;
        bool complete = false;
        std::optional<CompromiserAssignment> counterexample;
    };

    /// Enumerates consistent implementable assignments for the constraint and
    /// checks that every induced mechanism is group strategy-proof and efficient.
    auto theorem_harness(const Constraint & constraint, Reading reading, std::uint64_t node_budget) -> HarnessReport;

    /// An implementable assignment whose mechanism is efficient but bossy.
    /// Random search; nullopt when the budget runs out.
    auto find_pe_not_gsp(const Constraint & constraint, std::uint64_t budget, std::uint64_t seed = 1)
        -> std::optional<CompromiserAssignment>;

    /// An implementable, forward consistent assignment whose mechanism is group
    /// strategy-proof although the assignment fails relaxed backward consistency.
    /// Deterministic; the budget counts search nodes.
    auto find_gsp_backward_violation(std::span<const Constraint> constraints, std::uint64_t budget)
        -> std::optional<CompromiserAssignment>;
}
