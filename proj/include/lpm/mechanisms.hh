#pragma once

#include <lpm/core.hh>

namespace lpm
{
    struct SchoolSpec
    {
        std::vector<int> capacities;             // per object
        std::vector<std::vector<int>> priorities; // per object, agents highest priority first

        /// Checks shape, permutations, and that total capacity covers the agents.
        auto validate(const Instance & instance) const -> void;
    };

    struct Endowment
    {
        std::vector<int> owned; // object owned by each agent

        auto validate(const Instance & instance) const -> void;
        auto owner_of(int object) const -> int;
    };

    struct DictatorOrder
    {
        std::vector<int> order;

        auto validate(const Instance & instance) const -> void;
    };

    struct MarriageSpec
    {
        std::vector<int> men, women;

        auto validate(const Instance & instance) const -> void;
    };

    auto serial_dictatorship(const Constraint & constraint, const DictatorOrder & order, const Profile & profile) -> Allocation;
    auto sd_alpha(const Constraint & constraint, const DictatorOrder & order) -> CompromiserAssignment;

    struct DaResult
    {
        Allocation allocation;
        std::vector<Allocation> rounds; // the applications of each round; the last is the outcome
    };

    auto cumulative_da(const Instance & instance, const SchoolSpec & spec, const Profile & profile) -> DaResult;
    auto da_alpha(const Instance & instance, const SchoolSpec & spec) -> CompromiserAssignment;

    auto ttc(const Instance & instance, const Endowment & endowment, const Profile & profile) -> Allocation;
    auto ttc_alpha(const Instance & instance, const Endowment & endowment) -> CompromiserAssignment;

    auto immediate_acceptance(const Instance & instance, const SchoolSpec & spec, const Profile & profile) -> Allocation;

    /// Man-proposing deferred acceptance with objects = agents (holding yourself
    /// means unmatched).
    auto marriage_da(const Instance & instance, const MarriageSpec & spec, const Profile & profile) -> Allocation;

    /// Each agent's object-index of its own namesake, for O = N instances.
    auto self_objects(const Instance & instance) -> std::vector<int>;
}
