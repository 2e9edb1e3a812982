#pragma once

#include <lpm/core.hh>
#include <lpm/engine.hh>

#include <functional>
#include <string>
#include <utility>

namespace lpm
{
    /// A counterexample: the named profiles and allocations that together
    /// violate a property, plus whatever agents and path it involves.
    struct Witness
    {
        std::string reason;
        std::vector<std::pair<std::string, Profile>> profiles;
        std::vector<std::pair<std::string, Code>> allocations;
        AgentSet agents;
        std::vector<Code> path;

        /// Throw std::out_of_range for missing names.
        auto profile(const std::string & name) const -> const Profile &;
        auto allocation(const std::string & name) const -> Code;
    };

    struct Verdict
    {
        bool holds = true;
        std::optional<Witness> witness;

        static auto pass() -> Verdict { return Verdict{}; }
        static auto fail(Witness w) -> Verdict { return Verdict{false, std::move(w)}; }
        explicit operator bool() const { return holds; }
    };

    auto is_strategy_proof(const MechanismTable & f) -> Verdict;

    /// Strategy-proofness plus every pair deviation; exhaustive tries every
    /// coalition instead.
    auto is_group_strategy_proof(const MechanismTable & f, bool exhaustive = false) -> Verdict;
    auto is_nonbossy(const MechanismTable & f) -> Verdict;
    auto is_maskin_monotonic(const MechanismTable & f) -> Verdict;

    /// Against f's own constraint unless one is given.
    auto is_pareto_efficient(const MechanismTable & f) -> Verdict;
    auto is_pareto_efficient(const MechanismTable & f, const Constraint & constraint) -> Verdict;

    // The characterization conditions judge feasibility by the image of f.

    auto check_unanimity(const MechanismTable & f) -> Verdict;

    /// Agents who miss their top object at every profile whose tops are mu.
    auto fixed_compromisers(const MechanismTable & f, Code mu) -> AgentSet;
    auto check_fixed_compromiser(const MechanismTable & f) -> Verdict;
    auto check_compromiser_invariance(const MechanismTable & f) -> Verdict;

    /// Fixed compromisers at every allocation outside the image. Throws
    /// StructuralError if some such cell would be empty.
    auto derive_alpha(const MechanismTable & f) -> CompromiserAssignment;

    struct LocalPriorityResult
    {
        bool holds = false;
        std::optional<CompromiserAssignment> alpha;
        std::string failed; // unanimity | fixed-compromiser | invariance | reconstruction
        std::optional<Witness> witness;
        bool image_differs = false; // declared constraint is not the image
    };

    auto is_local_priority(const MechanismTable & f) -> LocalPriorityResult;

    /// Mechanisms too large to tabulate are probed through a function.
    using ProfileFunction = std::function<Code(const Profile &)>;

    struct SampledCompromisers
    {
        AgentSet agents;               // intersection over the profiles examined
        std::vector<Profile> profiles; // the ones that shrank it, in order
    };

    /// Runs hints first, then seeded random profiles with tops mu. The result
    /// over-approximates the true fixed compromisers, so an empty set refutes
    /// the fixed compromiser condition at mu.
    auto sampled_fixed_compromisers(const Instance & instance, const ProfileFunction & f, Code mu,
        std::span<const Profile> hints, int samples, std::uint64_t seed) -> SampledCompromisers;

    /// Fails with a witness if the sampled intersection at mu is empty; mu must
    /// lie outside the mechanism's range.
    auto refute_fixed_compromiser(const Instance & instance, const ProfileFunction & f, Code mu,
        std::span<const Profile> hints, int samples, std::uint64_t seed) -> Verdict;
}
