#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpm
{
    /// Canonical integer encoding of an allocation: mixed radix base |O|,
    /// agent 0 least significant.
    using Code = std::uint32_t;
    using ProfileIndex = std::uint64_t;

    inline constexpr int max_agents = 24;
    inline constexpr std::uint64_t max_allocations = std::uint64_t{1} << 24;

    class InputError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    class StructuralError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    class BudgetExceeded : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    class AgentSet
    {
        private:
            std::uint32_t _bits = 0;

        public:
            constexpr AgentSet() = default;
            constexpr explicit AgentSet(std::uint32_t bits) : _bits(bits) {}

            static constexpr auto single(int agent) -> AgentSet { return AgentSet{std::uint32_t{1} << agent}; }
            static constexpr auto all(int n) -> AgentSet { return AgentSet{n >= 32 ? ~0u : (std::uint32_t{1} << n) - 1}; }

            constexpr auto bits() const -> std::uint32_t { return _bits; }
            constexpr auto empty() const -> bool { return 0 == _bits; }
            constexpr auto size() const -> int { return std::popcount(_bits); }
            constexpr auto contains(int agent) const -> bool { return (_bits >> agent) & 1u; }
            constexpr auto insert(int agent) -> void { _bits |= std::uint32_t{1} << agent; }
            constexpr auto erase(int agent) -> void { _bits &= ~(std::uint32_t{1} << agent); }
            constexpr auto subset_of(AgentSet o) const -> bool { return (_bits & ~o._bits) == 0; }

            constexpr auto operator|(AgentSet o) const -> AgentSet { return AgentSet{_bits | o._bits}; }
            constexpr auto operator&(AgentSet o) const -> AgentSet { return AgentSet{_bits & o._bits}; }
            constexpr auto operator-(AgentSet o) const -> AgentSet { return AgentSet{_bits & ~o._bits}; }
            constexpr auto operator==(const AgentSet &) const -> bool = default;

            auto members() const -> std::vector<int>;
    };

    /// Agents and objects by name; indices into these lists are the identities
    /// used everywhere else.
    class Instance
    {
        private:
            std::vector<std::string> _agents;
            std::vector<std::string> _objects;
            std::vector<Code> _radix;
            Code _allocation_count;

        public:
            Instance(std::vector<std::string> agents, std::vector<std::string> objects);

            auto agent_count() const -> int { return int(_agents.size()); }
            auto object_count() const -> int { return int(_objects.size()); }
            auto allocation_count() const -> Code { return _allocation_count; }
            auto agents() const -> const std::vector<std::string> & { return _agents; }
            auto objects() const -> const std::vector<std::string> & { return _objects; }
            auto agent_name(int i) const -> const std::string & { return _agents.at(i); }
            auto object_name(int a) const -> const std::string & { return _objects.at(a); }

            /// Throws InputError for unknown names.
            auto agent_index(const std::string & name) const -> int;
            auto object_index(const std::string & name) const -> int;

            auto radix(int agent) const -> Code { return _radix[agent]; }
            auto object_of(Code code, int agent) const -> int { return int((code / _radix[agent]) % Code(_objects.size())); }
            auto with_object(Code code, int agent, int object) const -> Code
            {
                return code + (Code(object) - Code(object_of(code, agent))) * _radix[agent];
            }
            auto encode(std::span<const int> objects) const -> Code;
            auto decode(Code code) const -> std::vector<int>;

            /// Allocation codes ordered lexicographically, agent 0 most significant.
            auto lexicographic_codes() const -> std::vector<Code>;

            auto operator==(const Instance &) const -> bool = default;
    };

    class Allocation
    {
        private:
            std::vector<int> _objects;
            Code _code = 0;

        public:
            Allocation() = default;
            Allocation(const Instance & instance, std::vector<int> objects);
            Allocation(const Instance & instance, Code code);

            auto objects() const -> const std::vector<int> & { return _objects; }
            auto code() const -> Code { return _code; }
            auto operator[](int agent) const -> int { return _objects[agent]; }
            auto size() const -> int { return int(_objects.size()); }
            auto operator==(const Allocation & o) const -> bool { return _objects == o._objects; }
    };

    /// A feasible-for-a-subset partial allocation: the objects held by agents
    /// in the domain.
    struct Suballocation
    {
        AgentSet domain;
        std::vector<int> objects; // indexed by agent; entries outside the domain are ignored

        auto operator==(const Suballocation & o) const -> bool;
    };

    class Preference
    {
        private:
            std::vector<int> _ranking;
            std::vector<int> _position;

        public:
            Preference() = default;
            explicit Preference(std::vector<int> ranking);

            auto ranking() const -> const std::vector<int> & { return _ranking; }
            auto size() const -> int { return int(_ranking.size()); }
            auto top() const -> int { return _ranking.front(); }
            auto position(int object) const -> int { return _position.at(object); }
            auto prefers(int a, int b) const -> bool { return _position[a] < _position[b]; }
            auto weakly_prefers(int a, int b) const -> bool { return _position[a] <= _position[b]; }
            auto at_rank(int k) const -> int; // 1-based
            auto next_below(int object) const -> std::optional<int>;
            /// Moves object to the bottom, otherwise keeping the order.
            auto with_bottom(int object) const -> Preference;
            auto operator==(const Preference & o) const -> bool { return _ranking == o._ranking; }
    };

    using Profile = std::vector<Preference>;

    struct Contours
    {
        std::vector<int> lower;
        std::vector<int> upper;
    };

    auto contours(const Preference & pref, int object) -> Contours;
    auto tau(const Preference & pref, int k) -> int;
    auto tau(const Instance & instance, const Profile & profile, int k) -> Allocation;
    auto diff(const Allocation & x, const Allocation & y) -> AgentSet;
    auto diff(const Instance & instance, Code x, Code y) -> AgentSet;

    /// All m! strict preferences over m objects in lexicographic order of their
    /// rankings, with the lookup tables the hot loops need.
    class PreferenceSpace
    {
        private:
            int _objects;
            std::vector<std::vector<int>> _rankings;
            std::vector<int> _position; // [perm * m + object]
            std::vector<int> _below;    // [perm * m + object], -1 at the bottom

        public:
            explicit PreferenceSpace(int objects);

            auto object_count() const -> int { return _objects; }
            auto size() const -> int { return int(_rankings.size()); }
            auto ranking(int perm) const -> const std::vector<int> & { return _rankings[perm]; }
            auto top(int perm) const -> int { return _rankings[perm][0]; }
            auto position(int perm, int object) const -> int { return _position[perm * _objects + object]; }
            auto below(int perm, int object) const -> int { return _below[perm * _objects + object]; }
            auto prefers(int perm, int a, int b) const -> bool { return position(perm, a) < position(perm, b); }
            auto index_of(const Preference & pref) const -> int;
            auto preference(int perm) const -> Preference { return Preference{_rankings[perm]}; }
            /// perm with object moved to the bottom
            auto bottom_ranked(int perm, int object) const -> int;
    };

    /// Dense indexing of all (m!)^n profiles; agent 0 is the most significant digit so
    /// index order is lexicographic order.
    class ProfileSpace
    {
        private:
            int _agents;
            std::shared_ptr<const PreferenceSpace> _prefs;
            ProfileIndex _count;
            std::vector<ProfileIndex> _weight;

        public:
            ProfileSpace(const Instance & instance, ProfileIndex budget);

            auto agent_count() const -> int { return _agents; }
            auto count() const -> ProfileIndex { return _count; }
            auto preferences() const -> const PreferenceSpace & { return *_prefs; }
            auto weight(int agent) const -> ProfileIndex { return _weight[agent]; }
            auto perm_of(ProfileIndex p, int agent) const -> int { return int((p / _weight[agent]) % ProfileIndex(_prefs->size())); }
            auto with_perm(ProfileIndex p, int agent, int perm) const -> ProfileIndex
            {
                return p - ProfileIndex(perm_of(p, agent)) * _weight[agent] + ProfileIndex(perm) * _weight[agent];
            }
            auto perms(ProfileIndex p) const -> std::vector<int>;
            auto index(std::span<const int> perms) const -> ProfileIndex;
            auto index(const Profile & profile) const -> ProfileIndex;
            auto profile(ProfileIndex p) const -> Profile;
            auto tops(const Instance & instance, ProfileIndex p) const -> Code;
    };

    inline constexpr ProfileIndex default_profile_budget = ProfileIndex{1} << 22;

    auto factorial(int k) -> std::uint64_t;

    /// Profiles whose top-choice vector is mu, in lexicographic order.
    auto profiles_with_tops(const Instance & instance, const Allocation & mu) -> std::vector<Profile>;
    auto profile_indices_with_tops(const ProfileSpace & space, const Instance & instance, Code mu) -> std::vector<ProfileIndex>;

    enum class ConstraintKind
    {
        explicit_set,
        house,
        school,
        social,
        one_sided,
        two_sided
    };

    auto constraint_kind_name(ConstraintKind) -> std::string;

    struct Generator
    {
        ConstraintKind kind = ConstraintKind::explicit_set;
        std::vector<int> capacities; // school
        std::vector<int> men, women; // two-sided, as agent indices
    };

    /// The feasible set C as a bitset over allocation codes. Immutable; copies
    /// share storage.
    class Constraint
    {
        private:
            struct Data
            {
                Instance instance;
                std::vector<std::uint64_t> bits;
                Generator generator;
                Code feasible_count = 0;
            };
            std::shared_ptr<const Data> _data;

            Constraint(Instance instance, std::vector<std::uint64_t> bits, Generator generator);

        public:
            static auto explicit_set(const Instance & instance, std::span<const Code> feasible) -> Constraint;
            static auto from_predicate(const Instance & instance, const auto & is_feasible, Generator generator) -> Constraint;
            static auto house(const Instance & instance) -> Constraint;
            static auto school(const Instance & instance, std::vector<int> capacities) -> Constraint;
            static auto social(const Instance & instance) -> Constraint;
            static auto one_sided(const Instance & instance) -> Constraint;
            static auto two_sided(const Instance & instance, std::vector<int> men, std::vector<int> women) -> Constraint;
            static auto everything(const Instance & instance) -> Constraint;

            auto instance() const -> const Instance & { return _data->instance; }
            auto generator() const -> const Generator & { return _data->generator; }
            auto feasible(Code code) const -> bool { return (_data->bits[code >> 6] >> (code & 63)) & 1u; }
            auto feasible(const Allocation & x) const -> bool { return feasible(x.code()); }
            auto feasible_count() const -> Code { return _data->feasible_count; }
            auto infeasible_count() const -> Code { return instance().allocation_count() - feasible_count(); }
            auto feasible_codes() const -> std::vector<Code>;
            auto infeasible_codes() const -> std::vector<Code>;
            auto bits() const -> const std::vector<std::uint64_t> & { return _data->bits; }

            /// Rebuilds from the generator tag; explicit constraints return themselves.
            auto regenerate() const -> Constraint;
            auto same_set(const Constraint & other) const -> bool;

            auto project(AgentSet agents) const -> std::vector<Suballocation>;
            auto extend(const Suballocation & nu) const -> std::vector<Allocation>;
            /// Objects agent can hold in some feasible completion of nu.
            auto compatible_objects(const Suballocation & nu, int agent) const -> std::vector<int>;
    };

    auto Constraint::from_predicate(const Instance & instance, const auto & is_feasible, Generator generator) -> Constraint
    {
        std::vector<std::uint64_t> bits((instance.allocation_count() + 63) / 64, 0);
        std::vector<int> objs(instance.agent_count(), 0);
        for (Code c = 0; c < instance.allocation_count(); ++c) {
            if (is_feasible(std::span<const int>(objs)))
                bits[c >> 6] |= std::uint64_t{1} << (c & 63);
            for (int i = 0; i < instance.agent_count(); ++i) {
                if (++objs[i] < instance.object_count())
                    break;
                objs[i] = 0;
            }
        }
        return Constraint{instance, std::move(bits), std::move(generator)};
    }

    /// alpha: one agent set per allocation code, empty exactly on feasible ones.
    class CompromiserAssignment
    {
        private:
            Constraint _constraint;
            std::vector<AgentSet> _cells;

        public:
            /// Validates that cells cover exactly the infeasible allocations.
            CompromiserAssignment(Constraint constraint, std::vector<AgentSet> cells);

            /// The constraint is implied: an allocation is feasible iff its cell is empty.
            static auto from_cells(const Instance & instance, std::vector<AgentSet> cells) -> CompromiserAssignment;

            auto constraint() const -> const Constraint & { return _constraint; }
            auto instance() const -> const Instance & { return _constraint.instance(); }
            auto operator()(Code code) const -> AgentSet { return _cells[code]; }
            auto operator()(const Allocation & x) const -> AgentSet { return _cells[x.code()]; }
            auto cells() const -> const std::vector<AgentSet> & { return _cells; }

            auto with_cell(Code code, AgentSet agents) const -> CompromiserAssignment;
            /// Pointwise union; both must share the same instance.
            auto united(const CompromiserAssignment & other) const -> CompromiserAssignment;
            auto pointwise_subset_of(const CompromiserAssignment & other) const -> bool;
            auto operator==(const CompromiserAssignment & o) const -> bool { return _cells == o._cells; }
    };
}
