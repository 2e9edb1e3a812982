#include <lpm/mechanisms.hh>

#include <algorithm>
#include <numeric>

using std::vector;

namespace lpm
{
    namespace
    {
        auto is_permutation_of(const vector<int> & v, int k) -> bool
        {
            if (int(v.size()) != k)
                return false;
            vector<bool> seen(k, false);
            for (int x : v) {
                if (x < 0 || x >= k || seen[x])
                    return false;
                seen[x] = true;
            }
            return true;
        }
    }

    auto SchoolSpec::validate(const Instance & instance) const -> void
    {
        const int n = instance.agent_count(), m = instance.object_count();
        if (int(capacities.size()) != m)
            throw InputError{"school spec needs one capacity per object"};
        if (int(priorities.size()) != m)
            throw InputError{"school spec needs one priority order per object"};
        for (int a = 0; a < m; ++a) {
            if (capacities[a] < 0)
                throw InputError{"capacity of '" + instance.object_name(a) + "' is negative"};
            if (! is_permutation_of(priorities[a], n))
                throw InputError{"priority order of '" + instance.object_name(a) + "' must rank every agent once"};
        }
        if (std::accumulate(capacities.begin(), capacities.end(), 0) < n)
            throw InputError{"total capacity is smaller than the number of agents"};
    }

    auto Endowment::validate(const Instance & instance) const -> void
    {
        if (instance.object_count() != instance.agent_count())
            throw InputError{"an endowment needs as many objects as agents"};
        if (! is_permutation_of(owned, instance.agent_count()))
            throw InputError{"an endowment must be a bijection from agents to objects"};
    }

    auto Endowment::owner_of(int object) const -> int
    {
        return int(std::find(owned.begin(), owned.end(), object) - owned.begin());
    }

    auto DictatorOrder::validate(const Instance & instance) const -> void
    {
        if (! is_permutation_of(order, instance.agent_count()))
            throw InputError{"dictator order must list every agent once"};
    }

    auto MarriageSpec::validate(const Instance & instance) const -> void
    {
        vector<int> all = men;
        all.insert(all.end(), women.begin(), women.end());
        if (! is_permutation_of(all, instance.agent_count()))
            throw InputError{"men and women must partition the agents"};
        self_objects(instance);
    }

    auto self_objects(const Instance & instance) -> vector<int>
    {
        if (instance.object_count() != instance.agent_count())
            throw InputError{"matching needs the objects to be the agents"};
        vector<int> result;
        for (auto & name : instance.agents())
            result.push_back(instance.object_index(name));
        return result;
    }

    auto serial_dictatorship(const Constraint & constraint, const DictatorOrder & order, const Profile & profile) -> Allocation
    {
        auto & inst = constraint.instance();
        order.validate(inst);
        vector<Code> surviving = constraint.feasible_codes();
        vector<int> objs(inst.agent_count(), 0);
        for (int d : order.order) {
            vector<bool> available(inst.object_count(), false);
            for (Code c : surviving)
                available[inst.object_of(c, d)] = true;
            int pick = -1;
            for (int a : profile.at(d).ranking())
                if (available[a]) {
                    pick = a;
                    break;
                }
            objs[d] = pick;
            std::erase_if(surviving, [&](Code c) { return inst.object_of(c, d) != pick; });
        }
        return Allocation{inst, objs};
    }

    auto sd_alpha(const Constraint & constraint, const DictatorOrder & order) -> CompromiserAssignment
    {
        auto & inst = constraint.instance();
        order.validate(inst);
        const auto feasible = constraint.feasible_codes();
        vector<AgentSet> cells(inst.allocation_count());
        for (Code mu = 0; mu < inst.allocation_count(); ++mu) {
            if (constraint.feasible(mu))
                continue;
            auto surviving = feasible;
            for (int d : order.order) {
                int want = inst.object_of(mu, d);
                std::erase_if(surviving, [&](Code c) { return inst.object_of(c, d) != want; });
                if (surviving.empty()) {
                    cells[mu] = AgentSet::single(d);
                    break;
                }
            }
        }
        return CompromiserAssignment{constraint, std::move(cells)};
    }

    auto cumulative_da(const Instance & instance, const SchoolSpec & spec, const Profile & profile) -> DaResult
    {
        spec.validate(instance);
        const int n = instance.agent_count(), m = instance.object_count();
        // rank[s][i]: position of student i in school s's priority order
        vector<vector<int>> rank(m, vector<int>(n));
        for (int s = 0; s < m; ++s)
            for (int k = 0; k < n; ++k)
                rank[s][spec.priorities[s][k]] = k;

        vector<vector<bool>> rejected(n, vector<bool>(m, false));
        DaResult result;
        while (true) {
            vector<int> apply(n, -1);
            for (int i = 0; i < n; ++i) {
                for (int s : profile.at(i).ranking())
                    if (! rejected[i][s]) {
                        apply[i] = s;
                        break;
                    }
                if (apply[i] < 0)
                    throw std::logic_error{"student rejected by every school"};
            }
            result.rounds.emplace_back(instance, apply);

            bool any = false;
            for (int i = 0; i < n; ++i) {
                int s = apply[i], higher = 0;
                for (int j = 0; j < n; ++j)
                    if (apply[j] == s && rank[s][j] < rank[s][i])
                        ++higher;
                if (higher >= spec.capacities[s]) {
                    rejected[i][s] = true;
                    any = true;
                }
            }
            if (! any) {
                result.allocation = result.rounds.back();
                return result;
            }
        }
    }

    auto da_alpha(const Instance & instance, const SchoolSpec & spec) -> CompromiserAssignment
    {
        spec.validate(instance);
        const int n = instance.agent_count(), m = instance.object_count();
        vector<vector<int>> rank(m, vector<int>(n));
        for (int s = 0; s < m; ++s)
            for (int k = 0; k < n; ++k)
                rank[s][spec.priorities[s][k]] = k;

        auto constraint = Constraint::school(instance, spec.capacities);
        vector<AgentSet> cells(instance.allocation_count());
        for (Code x = 0; x < instance.allocation_count(); ++x) {
            auto objs = instance.decode(x);
            for (int i = 0; i < n; ++i) {
                int s = objs[i], higher = 0;
                for (int j = 0; j < n; ++j)
                    if (objs[j] == s && rank[s][j] < rank[s][i])
                        ++higher;
                if (higher >= spec.capacities[s])
                    cells[x].insert(i);
            }
        }
        return CompromiserAssignment{constraint, std::move(cells)};
    }

    auto ttc(const Instance & instance, const Endowment & endowment, const Profile & profile) -> Allocation
    {
        endowment.validate(instance);
        const int n = instance.agent_count();
        vector<bool> remaining(n, true);
        vector<int> result(n, -1);
        int left = n;
        while (left > 0) {
            vector<int> points(n, -1);
            for (int i = 0; i < n; ++i) {
                if (! remaining[i])
                    continue;
                for (int a : profile.at(i).ranking()) {
                    int owner = endowment.owner_of(a);
                    if (remaining[owner]) {
                        points[i] = owner;
                        break;
                    }
                }
            }
            // walk from every remaining agent; any walk ends in a cycle
            vector<bool> on_cycle(n, false);
            for (int start = 0; start < n; ++start) {
                if (! remaining[start])
                    continue;
                int slow = start;
                for (int k = 0; k < n; ++k)
                    slow = points[slow];
                // slow is now on a cycle
                int v = slow;
                do {
                    on_cycle[v] = true;
                    v = points[v];
                } while (v != slow);
            }
            for (int i = 0; i < n; ++i)
                if (on_cycle[i]) {
                    result[i] = endowment.owned[points[i]];
                    remaining[i] = false;
                    --left;
                }
        }
        return Allocation{instance, result};
    }

    auto ttc_alpha(const Instance & instance, const Endowment & endowment) -> CompromiserAssignment
    {
        endowment.validate(instance);
        const int n = instance.agent_count();
        auto constraint = Constraint::house(instance);
        vector<AgentSet> cells(instance.allocation_count());
        for (Code x = 0; x < instance.allocation_count(); ++x) {
            if (constraint.feasible(x))
                continue;
            vector<int> succ(n);
            for (int i = 0; i < n; ++i)
                succ[i] = endowment.owner_of(instance.object_of(x, i));
            vector<bool> on_cycle(n, false);
            for (int start = 0; start < n; ++start) {
                int v = start;
                for (int k = 0; k < n; ++k)
                    v = succ[v];
                int w = v;
                do {
                    on_cycle[w] = true;
                    w = succ[w];
                } while (w != v);
            }
            for (int i = 0; i < n; ++i)
                if (! on_cycle[i] && on_cycle[succ[i]])
                    cells[x].insert(i);
        }
        return CompromiserAssignment{constraint, std::move(cells)};
    }

    auto immediate_acceptance(const Instance & instance, const SchoolSpec & spec, const Profile & profile) -> Allocation
    {
        spec.validate(instance);
        const int n = instance.agent_count(), m = instance.object_count();
        vector<int> seats = spec.capacities;
        vector<int> result(n, -1);
        int unassigned = n;
        for (int t = 0; t < m && unassigned > 0; ++t) {
            for (int s = 0; s < m; ++s) {
                // applicants in priority order
                for (int i : spec.priorities[s]) {
                    if (seats[s] == 0)
                        break;
                    if (result[i] < 0 && profile.at(i).ranking()[t] == s) {
                        result[i] = s;
                        --seats[s];
                        --unassigned;
                    }
                }
            }
        }
        if (unassigned > 0)
            throw std::logic_error{"immediate acceptance left a student unassigned"};
        return Allocation{instance, result};
    }

    auto marriage_da(const Instance & instance, const MarriageSpec & spec, const Profile & profile) -> Allocation
    {
        spec.validate(instance);
        const int n = instance.agent_count();
        auto self = self_objects(instance);
        vector<int> agent_of(n);
        for (int i = 0; i < n; ++i)
            agent_of[self[i]] = i;
        vector<bool> is_woman(n, false);
        for (int w : spec.women)
            is_woman[w] = true;

        vector<int> next(n, 0), partner(n, -1);
        vector<int> free_men(spec.men.rbegin(), spec.men.rend());
        while (! free_men.empty()) {
            int m = free_men.back();
            auto & list = profile.at(m).ranking();
            bool placed = false;
            while (next[m] < n) {
                int w = agent_of[list[next[m]++]];
                if (w == m)
                    break; // prefers being single to everyone left
                if (! is_woman[w])
                    continue;
                auto & pw = profile.at(w);
                if (pw.prefers(self[w], self[m]))
                    continue;
                if (partner[w] >= 0 && pw.prefers(self[partner[w]], self[m]))
                    continue;
                free_men.pop_back();
                if (partner[w] >= 0) {
                    partner[partner[w]] = -1;
                    free_men.push_back(partner[w]);
                }
                partner[w] = m;
                partner[m] = w;
                placed = true;
                break;
            }
            if (! placed)
                free_men.pop_back();
        }
        vector<int> objs(n);
        for (int i = 0; i < n; ++i)
            objs[i] = self[partner[i] >= 0 ? partner[i] : i];
        return Allocation{instance, objs};
    }
}
