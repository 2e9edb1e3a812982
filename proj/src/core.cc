#include <lpm/core.hh>

#include <algorithm>
#include <numeric>
#include <set>

using std::string;
using std::vector;

namespace lpm
{
    auto AgentSet::members() const -> vector<int>
    {
        vector<int> result;
        for (auto b = _bits; b; b &= b - 1)
            result.push_back(std::countr_zero(b));
        return result;
    }

    namespace
    {
        auto check_unique(const vector<string> & names, const char * what) -> void
        {
            std::set<string> seen;
            for (auto & s : names) {
                if (s.empty())
                    throw InputError{string{"empty "} + what + " name"};
                if (! seen.insert(s).second)
                    throw InputError{string{"duplicate "} + what + " name '" + s + "'"};
            }
        }
    }

    Instance::Instance(vector<string> agents, vector<string> objects) :
        _agents(std::move(agents)),
        _objects(std::move(objects))
    {
        if (_agents.empty())
            throw InputError{"an instance needs at least one agent"};
        if (_objects.empty())
            throw InputError{"an instance needs at least one object"};
        if (int(_agents.size()) > max_agents)
            throw InputError{"too many agents (limit " + std::to_string(max_agents) + ")"};
        check_unique(_agents, "agent");
        check_unique(_objects, "object");

        std::uint64_t count = 1;
        for (std::size_t i = 0; i < _agents.size(); ++i) {
            _radix.push_back(Code(count));
            count *= _objects.size();
            if (count > max_allocations)
                throw InputError{"instance too large: |O|^n exceeds 2^24 allocations"};
        }
        _allocation_count = Code(count);
    }

    auto Instance::agent_index(const string & name) const -> int
    {
        auto it = std::find(_agents.begin(), _agents.end(), name);
        if (it == _agents.end())
            throw InputError{"unknown agent '" + name + "'"};
        return int(it - _agents.begin());
    }

    auto Instance::object_index(const string & name) const -> int
    {
        auto it = std::find(_objects.begin(), _objects.end(), name);
        if (it == _objects.end())
            throw InputError{"unknown object '" + name + "'"};
        return int(it - _objects.begin());
    }

    auto Instance::encode(std::span<const int> objects) const -> Code
    {
        if (int(objects.size()) != agent_count())
            throw InputError{"allocation has " + std::to_string(objects.size()) + " entries, expected " + std::to_string(agent_count())};
        Code code = 0;
        for (int i = 0; i < agent_count(); ++i) {
            if (objects[i] < 0 || objects[i] >= object_count())
                throw InputError{"object index out of range"};
            code += Code(objects[i]) * _radix[i];
        }
        return code;
    }

    auto Instance::decode(Code code) const -> vector<int>
    {
        vector<int> result(agent_count());
        for (int i = 0; i < agent_count(); ++i)
            result[i] = object_of(code, i);
        return result;
    }

    auto Instance::lexicographic_codes() const -> vector<Code>
    {
        vector<Code> result;
        result.reserve(_allocation_count);
        vector<int> objs(agent_count(), 0);
        for (Code k = 0; k < _allocation_count; ++k) {
            result.push_back(encode(objs));
            for (int i = agent_count() - 1; i >= 0; --i) {
                if (++objs[i] < object_count())
                    break;
                objs[i] = 0;
            }
        }
        return result;
    }

    Allocation::Allocation(const Instance & instance, vector<int> objects) :
        _objects(std::move(objects)),
        _code(instance.encode(_objects))
    {
    }

    Allocation::Allocation(const Instance & instance, Code code) :
        _objects(instance.decode(code)),
        _code(code)
    {
        if (code >= instance.allocation_count())
            throw InputError{"allocation code out of range"};
    }

    auto Suballocation::operator==(const Suballocation & o) const -> bool
    {
        if (domain != o.domain)
            return false;
        for (int i : domain.members())
            if (objects.at(i) != o.objects.at(i))
                return false;
        return true;
    }

    Preference::Preference(vector<int> ranking) :
        _ranking(std::move(ranking)),
        _position(_ranking.size(), -1)
    {
        if (_ranking.empty())
            throw InputError{"empty preference"};
        for (std::size_t k = 0; k < _ranking.size(); ++k) {
            int a = _ranking[k];
            if (a < 0 || a >= int(_ranking.size()) || _position[a] != -1)
                throw InputError{"preference must rank every object exactly once"};
            _position[a] = int(k);
        }
    }

    auto Preference::at_rank(int k) const -> int
    {
        if (k < 1 || k > size())
            throw InputError{"rank " + std::to_string(k) + " out of range"};
        return _ranking[k - 1];
    }

    auto Preference::next_below(int object) const -> std::optional<int>
    {
        int pos = position(object);
        if (pos + 1 >= size())
            return std::nullopt;
        return _ranking[pos + 1];
    }

    auto Preference::with_bottom(int object) const -> Preference
    {
        vector<int> r;
        r.reserve(_ranking.size());
        for (int a : _ranking)
            if (a != object)
                r.push_back(a);
        r.push_back(object);
        return Preference{std::move(r)};
    }

    auto contours(const Preference & pref, int object) -> Contours
    {
        if (object < 0 || object >= pref.size())
            throw InputError{"object index out of range"};
        Contours result;
        int pos = pref.position(object);
        for (int k = 0; k < pref.size(); ++k) {
            if (k < pos)
                result.upper.push_back(pref.ranking()[k]);
            else if (k > pos)
                result.lower.push_back(pref.ranking()[k]);
        }
        std::sort(result.upper.begin(), result.upper.end());
        std::sort(result.lower.begin(), result.lower.end());
        return result;
    }

    auto tau(const Preference & pref, int k) -> int
    {
        return pref.at_rank(k);
    }

    auto tau(const Instance & instance, const Profile & profile, int k) -> Allocation
    {
        if (int(profile.size()) != instance.agent_count())
            throw InputError{"profile size does not match the number of agents"};
        vector<int> objs;
        for (auto & p : profile)
            objs.push_back(p.at_rank(k));
        return Allocation{instance, std::move(objs)};
    }

    auto diff(const Allocation & x, const Allocation & y) -> AgentSet
    {
        AgentSet result;
        for (int i = 0; i < x.size(); ++i)
            if (x[i] != y[i])
                result.insert(i);
        return result;
    }

    auto diff(const Instance & instance, Code x, Code y) -> AgentSet
    {
        AgentSet result;
        const Code m = Code(instance.object_count());
        for (int i = 0; i < instance.agent_count(); ++i, x /= m, y /= m)
            if (x % m != y % m)
                result.insert(i);
        return result;
    }

    auto factorial(int k) -> std::uint64_t
    {
        std::uint64_t r = 1;
        for (int i = 2; i <= k; ++i)
            r *= std::uint64_t(i);
        return r;
    }

    PreferenceSpace::PreferenceSpace(int objects) :
        _objects(objects)
    {
        if (objects < 1 || objects > 8)
            throw InputError{"preference space supports 1 to 8 objects"};
        vector<int> r(objects);
        std::iota(r.begin(), r.end(), 0);
        do
            _rankings.push_back(r);
        while (std::next_permutation(r.begin(), r.end()));

        _position.assign(_rankings.size() * objects, 0);
        _below.assign(_rankings.size() * objects, -1);
        for (std::size_t p = 0; p < _rankings.size(); ++p)
            for (int k = 0; k < objects; ++k) {
                _position[p * objects + _rankings[p][k]] = k;
                if (k + 1 < objects)
                    _below[p * objects + _rankings[p][k]] = _rankings[p][k + 1];
            }
    }

    auto PreferenceSpace::index_of(const Preference & pref) const -> int
    {
        if (pref.size() != _objects)
            throw InputError{"preference ranks the wrong number of objects"};
        // lexicographic rank of a permutation
        int rank = 0;
        vector<bool> used(_objects, false);
        for (int k = 0; k < _objects; ++k) {
            int a = pref.ranking()[k], smaller = 0;
            for (int b = 0; b < a; ++b)
                if (! used[b])
                    ++smaller;
            rank += smaller * int(factorial(_objects - 1 - k));
            used[a] = true;
        }
        return rank;
    }

    auto PreferenceSpace::bottom_ranked(int perm, int object) const -> int
    {
        return index_of(preference(perm).with_bottom(object));
    }

    ProfileSpace::ProfileSpace(const Instance & instance, ProfileIndex budget) :
        _agents(instance.agent_count())
    {
        if (instance.object_count() > 8)
            throw BudgetExceeded{"profile sweeps support at most 8 objects"};
        _prefs = std::make_shared<const PreferenceSpace>(instance.object_count());
        const auto base = ProfileIndex(_prefs->size());
        _weight.assign(_agents, 1);
        long double total = 1;
        for (int i = 0; i < _agents; ++i)
            total *= (long double)base;
        if (total > (long double)budget)
            throw BudgetExceeded{"profile space of size (|O|!)^n exceeds the sweep budget of " + std::to_string(budget)};
        _count = 1;
        for (int i = _agents - 1; i >= 0; --i) {
            _weight[i] = _count;
            _count *= base;
        }
    }

    auto ProfileSpace::perms(ProfileIndex p) const -> vector<int>
    {
        vector<int> result(_agents);
        for (int i = 0; i < _agents; ++i)
            result[i] = perm_of(p, i);
        return result;
    }

    auto ProfileSpace::index(std::span<const int> perms) const -> ProfileIndex
    {
        ProfileIndex p = 0;
        for (int i = 0; i < _agents; ++i)
            p += ProfileIndex(perms[i]) * _weight[i];
        return p;
    }

    auto ProfileSpace::index(const Profile & profile) const -> ProfileIndex
    {
        if (int(profile.size()) != _agents)
            throw InputError{"profile size does not match the number of agents"};
        ProfileIndex p = 0;
        for (int i = 0; i < _agents; ++i)
            p += ProfileIndex(_prefs->index_of(profile[i])) * _weight[i];
        return p;
    }

    auto ProfileSpace::profile(ProfileIndex p) const -> Profile
    {
        Profile result;
        for (int i = 0; i < _agents; ++i)
            result.push_back(_prefs->preference(perm_of(p, i)));
        return result;
    }

    auto ProfileSpace::tops(const Instance & instance, ProfileIndex p) const -> Code
    {
        Code code = 0;
        for (int i = 0; i < _agents; ++i)
            code += Code(_prefs->top(perm_of(p, i))) * instance.radix(i);
        return code;
    }

    namespace
    {
        // Every profile with the given tops: each agent ranks its top first and the
        // remaining objects in any order. Calls emit(perms) in lexicographic order.
        template <typename F_>
        auto for_each_with_tops(const PreferenceSpace & prefs, const vector<int> & tops, const F_ & emit) -> void
        {
            const int n = int(tops.size());
            const int block = int(factorial(prefs.object_count() - 1));
            // permutations with top a occupy a contiguous lexicographic block
            vector<int> perms(n), offset(n, 0);
            while (true) {
                for (int i = 0; i < n; ++i)
                    perms[i] = tops[i] * block + offset[i];
                emit(perms);
                int i = n - 1;
                for (; i >= 0; --i) {
                    if (++offset[i] < block)
                        break;
                    offset[i] = 0;
                }
                if (i < 0)
                    return;
            }
        }
    }

    auto profiles_with_tops(const Instance & instance, const Allocation & mu) -> vector<Profile>
    {
        PreferenceSpace prefs(instance.object_count());
        vector<Profile> result;
        for_each_with_tops(prefs, mu.objects(), [&](const vector<int> & perms) {
            Profile p;
            for (int k : perms)
                p.push_back(prefs.preference(k));
            result.push_back(std::move(p));
        });
        return result;
    }

    auto profile_indices_with_tops(const ProfileSpace & space, const Instance & instance, Code mu) -> vector<ProfileIndex>
    {
        vector<ProfileIndex> result;
        for_each_with_tops(space.preferences(), instance.decode(mu), [&](const vector<int> & perms) {
            result.push_back(space.index(perms));
        });
        return result;
    }

    auto constraint_kind_name(ConstraintKind kind) -> string
    {
        switch (kind) {
            case ConstraintKind::explicit_set: return "explicit";
            case ConstraintKind::house: return "house";
            case ConstraintKind::school: return "school";
            case ConstraintKind::social: return "social";
            case ConstraintKind::one_sided: return "one_sided";
            case ConstraintKind::two_sided: return "two_sided";
        }
        return "explicit";
    }

    Constraint::Constraint(Instance instance, vector<std::uint64_t> bits, Generator generator)
    {
        Code count = 0;
        for (auto w : bits)
            count += Code(std::popcount(w));
        if (0 == count)
            throw InputError{"constraint has no feasible allocation"};
        _data = std::make_shared<const Data>(Data{std::move(instance), std::move(bits), std::move(generator), count});
    }

    auto Constraint::explicit_set(const Instance & instance, std::span<const Code> feasible) -> Constraint
    {
        vector<std::uint64_t> bits((instance.allocation_count() + 63) / 64, 0);
        for (Code c : feasible) {
            if (c >= instance.allocation_count())
                throw InputError{"feasible allocation code out of range"};
            bits[c >> 6] |= std::uint64_t{1} << (c & 63);
        }
        return Constraint{instance, std::move(bits), Generator{}};
    }

    auto Constraint::house(const Instance & instance) -> Constraint
    {
        return from_predicate(instance, [&](std::span<const int> x) {
            vector<bool> used(instance.object_count(), false);
            for (int a : x) {
                if (used[a])
                    return false;
                used[a] = true;
            }
            return true;
        }, Generator{ConstraintKind::house, {}, {}, {}});
    }

    auto Constraint::school(const Instance & instance, vector<int> capacities) -> Constraint
    {
        if (int(capacities.size()) != instance.object_count())
            throw InputError{"school constraint needs one capacity per object"};
        for (int q : capacities)
            if (q < 0)
                throw InputError{"capacities must be nonnegative"};
        auto caps = capacities;
        return from_predicate(instance, [&](std::span<const int> x) {
            vector<int> load(instance.object_count(), 0);
            for (int a : x)
                if (++load[a] > caps[a])
                    return false;
            return true;
        }, Generator{ConstraintKind::school, std::move(capacities), {}, {}});
    }

    auto Constraint::social(const Instance & instance) -> Constraint
    {
        return from_predicate(instance, [&](std::span<const int> x) {
            return std::all_of(x.begin(), x.end(), [&](int a) { return a == x[0]; });
        }, Generator{ConstraintKind::social, {}, {}, {}});
    }

    namespace
    {
        // object index for each agent's namesake; matching constraints need O = N
        auto partner_map(const Instance & instance) -> vector<int>
        {
            if (instance.object_count() != instance.agent_count())
                throw InputError{"matching constraints need the objects to be the agents"};
            vector<int> object_of_agent(instance.agent_count());
            vector<int> agent_of_object(instance.object_count());
            for (int i = 0; i < instance.agent_count(); ++i) {
                object_of_agent[i] = instance.object_index(instance.agent_name(i));
                agent_of_object[object_of_agent[i]] = i;
            }
            return agent_of_object;
        }
    }

    auto Constraint::one_sided(const Instance & instance) -> Constraint
    {
        auto agent_of = partner_map(instance);
        return from_predicate(instance, [&](std::span<const int> x) {
            for (int i = 0; i < int(x.size()); ++i) {
                int j = agent_of[x[i]];
                if (agent_of[x[j]] != i)
                    return false;
            }
            return true;
        }, Generator{ConstraintKind::one_sided, {}, {}, {}});
    }

    auto Constraint::two_sided(const Instance & instance, vector<int> men, vector<int> women) -> Constraint
    {
        auto agent_of = partner_map(instance);
        vector<int> side(instance.agent_count(), -1);
        for (int m : men) {
            if (m < 0 || m >= instance.agent_count() || side[m] != -1)
                throw InputError{"men and women must partition the agents"};
            side[m] = 0;
        }
        for (int w : women) {
            if (w < 0 || w >= instance.agent_count() || side[w] != -1)
                throw InputError{"men and women must partition the agents"};
            side[w] = 1;
        }
        if (std::find(side.begin(), side.end(), -1) != side.end())
            throw InputError{"men and women must partition the agents"};

        return from_predicate(instance, [&](std::span<const int> x) {
            for (int i = 0; i < int(x.size()); ++i) {
                int j = agent_of[x[i]];
                if (j != i && side[j] == side[i])
                    return false;
                if (agent_of[x[j]] != i)
                    return false;
            }
            return true;
        }, Generator{ConstraintKind::two_sided, {}, std::move(men), std::move(women)});
    }

    auto Constraint::everything(const Instance & instance) -> Constraint
    {
        return from_predicate(instance, [](std::span<const int>) { return true; }, Generator{});
    }

    auto Constraint::feasible_codes() const -> vector<Code>
    {
        vector<Code> result;
        for (Code c = 0; c < instance().allocation_count(); ++c)
            if (feasible(c))
                result.push_back(c);
        return result;
    }

    auto Constraint::infeasible_codes() const -> vector<Code>
    {
        vector<Code> result;
        for (Code c = 0; c < instance().allocation_count(); ++c)
            if (! feasible(c))
                result.push_back(c);
        return result;
    }

    auto Constraint::regenerate() const -> Constraint
    {
        auto & g = generator();
        switch (g.kind) {
            case ConstraintKind::explicit_set: return *this;
            case ConstraintKind::house: return house(instance());
            case ConstraintKind::school: return school(instance(), g.capacities);
            case ConstraintKind::social: return social(instance());
            case ConstraintKind::one_sided: return one_sided(instance());
            case ConstraintKind::two_sided: return two_sided(instance(), g.men, g.women);
        }
        return *this;
    }

    auto Constraint::same_set(const Constraint & other) const -> bool
    {
        return instance() == other.instance() && bits() == other.bits();
    }

    auto Constraint::project(AgentSet agents) const -> vector<Suballocation>
    {
        vector<Suballocation> result;
        std::set<vector<int>> seen;
        for (Code c = 0; c < instance().allocation_count(); ++c) {
            if (! feasible(c))
                continue;
            auto objs = instance().decode(c);
            vector<int> key(instance().agent_count(), -1);
            for (int i : agents.members())
                key[i] = objs[i];
            if (seen.insert(key).second)
                result.push_back(Suballocation{agents, key});
        }
        std::sort(result.begin(), result.end(), [](const Suballocation & a, const Suballocation & b) {
            return a.objects < b.objects;
        });
        return result;
    }

    auto Constraint::extend(const Suballocation & nu) const -> vector<Allocation>
    {
        vector<Allocation> result;
        for (Code c = 0; c < instance().allocation_count(); ++c) {
            if (! feasible(c))
                continue;
            bool ok = true;
            for (int i : nu.domain.members())
                if (instance().object_of(c, i) != nu.objects.at(i)) {
                    ok = false;
                    break;
                }
            if (ok)
                result.emplace_back(instance(), c);
        }
        return result;
    }

    auto Constraint::compatible_objects(const Suballocation & nu, int agent) const -> vector<int>
    {
        vector<bool> seen(instance().object_count(), false);
        for (auto & x : extend(nu))
            seen[x[agent]] = true;
        vector<int> result;
        for (int a = 0; a < instance().object_count(); ++a)
            if (seen[a])
                result.push_back(a);
        return result;
    }

    CompromiserAssignment::CompromiserAssignment(Constraint constraint, vector<AgentSet> cells) :
        _constraint(std::move(constraint)),
        _cells(std::move(cells))
    {
        auto & inst = _constraint.instance();
        if (_cells.size() != inst.allocation_count())
            throw StructuralError{"compromiser assignment must have one cell per allocation"};
        const auto everyone = AgentSet::all(inst.agent_count());
        for (Code c = 0; c < inst.allocation_count(); ++c) {
            if (! _cells[c].subset_of(everyone))
                throw StructuralError{"compromiser cell names an agent outside the instance"};
            if (_constraint.feasible(c) && ! _cells[c].empty())
                throw StructuralError{"feasible allocation " + std::to_string(c) + " has compromisers"};
            if (! _constraint.feasible(c) && _cells[c].empty())
                throw StructuralError{"infeasible allocation " + std::to_string(c) + " has no compromisers"};
        }
    }

    auto CompromiserAssignment::from_cells(const Instance & instance, vector<AgentSet> cells) -> CompromiserAssignment
    {
        if (cells.size() != instance.allocation_count())
            throw StructuralError{"compromiser assignment must have one cell per allocation"};
        vector<Code> feasible;
        for (Code c = 0; c < instance.allocation_count(); ++c)
            if (cells[c].empty())
                feasible.push_back(c);
        return CompromiserAssignment{Constraint::explicit_set(instance, feasible), std::move(cells)};
    }

    auto CompromiserAssignment::with_cell(Code code, AgentSet agents) const -> CompromiserAssignment
    {
        auto cells = _cells;
        cells.at(code) = agents;
        return CompromiserAssignment{_constraint, std::move(cells)};
    }

    auto CompromiserAssignment::united(const CompromiserAssignment & other) const -> CompromiserAssignment
    {
        if (! (instance() == other.instance()))
            throw InputError{"cannot unite assignments over different instances"};
        auto cells = _cells;
        for (std::size_t c = 0; c < cells.size(); ++c)
            cells[c] = cells[c] | other._cells[c];
        if (_constraint.same_set(other._constraint))
            return CompromiserAssignment{_constraint, std::move(cells)};
        return from_cells(instance(), std::move(cells));
    }

    auto CompromiserAssignment::pointwise_subset_of(const CompromiserAssignment & other) const -> bool
    {
        for (std::size_t c = 0; c < _cells.size(); ++c)
            if (! _cells[c].subset_of(other._cells.at(c)))
                return false;
        return true;
    }
}
