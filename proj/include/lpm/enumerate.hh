#pragma once

#include <lpm/consistency.hh>

#include <functional>
#include <random>

namespace lpm
{
    struct EnumerationOptions
    {
        Reading reading = Reading::strict;
        bool require_forward = true;
        bool require_backward = true;
        bool quotient_symmetry = false;
        bool dedupe_by_mechanism = false;
        std::uint64_t node_budget = std::uint64_t{1} << 32;
        double seconds = 0; // 0 means no time limit
        /// Only assignments pointwise inside this one; same constraint.
        std::optional<CompromiserAssignment> within;
    };

    struct EnumerationSummary
    {
        std::uint64_t count = 0;       // every assignment found, before quotienting
        std::uint64_t orbit_count = 0; // orbits among them
        std::uint64_t mechanism_count = 0;
        std::uint64_t nodes = 0;
        std::uint64_t pruned_nodes = 0;
        bool complete = false;
    };

    struct Symmetry
    {
        std::vector<int> agents;  // agent j goes to agents[j]
        std::vector<int> objects; // object a goes to objects[a]

        auto apply(const Instance & instance, Code x) const -> Code;
        auto apply(AgentSet s) const -> AgentSet;
        auto apply(const CompromiserAssignment & alpha) const -> CompromiserAssignment;
    };

    struct SymmetryGroup
    {
        std::vector<Symmetry> elements; // identity first

        auto order() const -> std::size_t { return elements.size(); }
    };

    /// Every (agent permutation, object permutation) pair fixing the feasible set.
    auto constraint_symmetries(const Constraint & constraint) -> SymmetryGroup;

    /// Orbit representative test: alpha is minimal among its images, compared
    /// by cells in code order.
    auto is_canonical(const CompromiserAssignment & alpha, const SymmetryGroup & group) -> bool;
    auto orbit_size(const CompromiserAssignment & alpha, const SymmetryGroup & group) -> std::uint64_t;

    struct EnumerationResult
    {
        std::vector<CompromiserAssignment> assignments; // canonical order
        std::vector<std::uint64_t> orbit_sizes;         // parallel to assignments when quotienting
        EnumerationSummary summary;
    };

    /// Returns false to stop the enumeration, which then reports itself incomplete.
    using AssignmentSink = std::function<bool(const CompromiserAssignment &, std::uint64_t orbit)>;

    /// Implementable assignments satisfying the requested consistency
    /// conditions, in lexicographic order of their cells.
    auto enumerate_consistent(const Constraint & constraint, const EnumerationOptions & options, const AssignmentSink & sink)
        -> EnumerationSummary;
    auto enumerate_consistent(const Constraint & constraint, const EnumerationOptions & options) -> EnumerationResult;

    /// One random implementable assignment meeting the options' consistency
    /// requirements, or nullopt if the node budget runs out first.
    auto sample_assignment(const Constraint & constraint, const EnumerationOptions & options, std::mt19937_64 & rng)
        -> std::optional<CompromiserAssignment>;
}
