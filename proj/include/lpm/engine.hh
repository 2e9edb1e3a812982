#pragma once

#include <lpm/core.hh>

#include <functional>
#include <variant>

namespace lpm
{
    struct TraceStep
    {
        Code allocation;
        AgentSet compromisers; // applied at this allocation; empty on the terminal step

        auto operator==(const TraceStep &) const -> bool = default;
    };

    struct Trace
    {
        std::vector<TraceStep> steps;

        auto allocations() const -> std::vector<Code>;
    };

    struct Final
    {
        Code allocation;
        Trace trace;
    };

    /// The algorithm stopped with the empty outcome: agent had nothing left below
    /// its current object at the given (1-based) step.
    struct Exhausted
    {
        int agent;
        int step;
        Trace trace;
    };

    using Outcome = std::variant<Final, Exhausted>;

    auto run_lp(const CompromiserAssignment & alpha, const Profile & profile) -> Outcome;

    /// Tight loop over perm ids, no trace. Returns the final code, or the
    /// exhausting agent encoded as a negative value -(agent + 1).
    class LpRunner
    {
        private:
            const CompromiserAssignment & _alpha;
            const PreferenceSpace & _prefs;
            int _agents;

        public:
            LpRunner(const CompromiserAssignment & alpha, const PreferenceSpace & prefs);
            auto run(std::span<const int> perms) const -> std::int64_t;
    };

    /// Extensional feasible mechanism: one allocation code per profile index.
    class MechanismTable
    {
        private:
            Constraint _constraint;
            std::shared_ptr<const ProfileSpace> _space;
            std::vector<Code> _table;

        public:
            MechanismTable(Constraint constraint, std::shared_ptr<const ProfileSpace> space, std::vector<Code> table);

            /// Tabulates an arbitrary function of the perm vector.
            static auto from_function(Constraint constraint, const std::function<Code(std::span<const int>)> & f,
                ProfileIndex budget = default_profile_budget) -> MechanismTable;

            auto constraint() const -> const Constraint & { return _constraint; }
            auto instance() const -> const Instance & { return _constraint.instance(); }
            auto space() const -> const ProfileSpace & { return *_space; }
            auto shared_space() const -> std::shared_ptr<const ProfileSpace> { return _space; }
            auto table() const -> const std::vector<Code> & { return _table; }
            auto size() const -> ProfileIndex { return _table.size(); }
            auto operator[](ProfileIndex p) const -> Code { return _table[p]; }
            auto at(const Profile & profile) const -> Code { return _table[_space->index(profile)]; }
            auto object(ProfileIndex p, int agent) const -> int { return instance().object_of(_table[p], agent); }

            auto image() const -> std::vector<Code>;
            auto image_constraint() const -> Constraint;
            auto with_constraint(Constraint constraint) const -> MechanismTable;
            auto hash() const -> std::uint64_t;
    };

    struct Implementability
    {
        bool implementable;
        std::optional<ProfileIndex> witness; // lexicographically first exhausting profile
    };

    auto is_implementable(const CompromiserAssignment & alpha, ProfileIndex budget = default_profile_budget) -> Implementability;

    class NotImplementable : public std::runtime_error
    {
        public:
            ProfileIndex witness;
            NotImplementable(ProfileIndex w) : std::runtime_error("assignment is not implementable"), witness(w) {}
    };

    /// Throws NotImplementable carrying the first exhausting profile.
    auto tabulate(const CompromiserAssignment & alpha, ProfileIndex budget = default_profile_budget) -> MechanismTable;
    auto tabulate(const CompromiserAssignment & alpha, std::shared_ptr<const ProfileSpace> space) -> MechanismTable;

    /// nullopt when equal, else the first profile where they disagree.
    auto first_disagreement(const MechanismTable & f, const MechanismTable & g) -> std::optional<ProfileIndex>;
    auto mechanisms_equal(const MechanismTable & f, const MechanismTable & g) -> bool;

    auto is_truncation(const Trace & longer, const Trace & shorter) -> bool;

    struct RankVector
    {
        std::vector<int> counts;

        /// componentwise >=
        auto dominates(const RankVector & o) const -> bool;
        auto operator==(const RankVector &) const -> bool = default;
    };

    auto rank_vector(const Profile & profile, const Allocation & x) -> RankVector;

    /// Holds agents outside M at fixed preferences; M is the set of agents
    /// without one. The result lives over the sub-instance of M with the
    /// image of the marginal map as its constraint.
    auto marginal(const MechanismTable & f, const std::vector<std::optional<Preference>> & fixed) -> MechanismTable;
}
