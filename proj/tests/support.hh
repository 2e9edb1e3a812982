#pragma once

#include <lpm/core.hh>
#include <lpm/engine.hh>

#include <algorithm>
#include <string>
#include <vector>

// Fixture helpers: agents are "1".."n", objects single letters, allocations
// and preferences written as strings like "aab".
namespace fixture
{
    inline auto instance(int n, int m) -> lpm::Instance
    {
        std::vector<std::string> agents, objects;
        for (int i = 1; i <= n; ++i)
            agents.push_back(std::to_string(i));
        for (int a = 0; a < m; ++a)
            objects.push_back(std::string(1, char('a' + a)));
        return lpm::Instance{agents, objects};
    }

    inline auto objs(const std::string & s) -> std::vector<int>
    {
        std::vector<int> r;
        for (char c : s)
            r.push_back(c - 'a');
        return r;
    }

    inline auto code(const lpm::Instance & inst, const std::string & s) -> lpm::Code
    {
        return inst.encode(objs(s));
    }

    inline auto name(const lpm::Instance & inst, lpm::Code c) -> std::string
    {
        std::string s;
        for (int a : inst.decode(c))
            s += char('a' + a);
        return s;
    }

    inline auto pref(const std::string & s) -> lpm::Preference
    {
        return lpm::Preference{objs(s)};
    }

    inline auto profile(std::initializer_list<std::string> prefs) -> lpm::Profile
    {
        lpm::Profile p;
        for (auto & s : prefs)
            p.push_back(pref(s));
        return p;
    }

    // agents as 1-based digits: "12" -> {0,1}
    inline auto agents(const std::string & s) -> lpm::AgentSet
    {
        lpm::AgentSet r;
        for (char c : s)
            r.insert(c - '1');
        return r;
    }

    inline auto constraint(const lpm::Instance & inst, std::initializer_list<std::string> infeasible) -> lpm::Constraint
    {
        std::vector<bool> bad(inst.allocation_count(), false);
        for (auto & s : infeasible)
            bad[code(inst, s)] = true;
        std::vector<lpm::Code> ok;
        for (lpm::Code c = 0; c < inst.allocation_count(); ++c)
            if (! bad[c])
                ok.push_back(c);
        return lpm::Constraint::explicit_set(inst, ok);
    }

    // cells: {"aaa", "12"}; unspecified infeasible cells are an error at construction
    inline auto alpha(const lpm::Instance & inst, std::initializer_list<std::pair<std::string, std::string>> cells)
        -> lpm::CompromiserAssignment
    {
        std::vector<lpm::AgentSet> v(inst.allocation_count());
        for (auto & [x, a] : cells)
            v[code(inst, x)] = agents(a);
        return lpm::CompromiserAssignment::from_cells(inst, v);
    }

    inline auto final_code(const lpm::Outcome & o) -> lpm::Code
    {
        return std::get<lpm::Final>(o).allocation;
    }
}

#include <lpm/mechanisms.hh>

namespace fixture
{
    // three students, unit capacities; school a ranks 3,1,2
    inline auto da_spec() -> lpm::SchoolSpec
    {
        return lpm::SchoolSpec{{1, 1, 1}, {{2, 0, 1}, {0, 1, 2}, {0, 1, 2}}};
    }

    inline auto da_profile() -> lpm::Profile
    {
        return profile({"abc", "abc", "bac"});
    }

    // 1 owns b, 2 owns c, 3 owns a
    inline auto ttc_endowment() -> lpm::Endowment
    {
        return lpm::Endowment{{1, 2, 0}};
    }

    inline auto ttc_profile() -> lpm::Profile
    {
        return profile({"acb", "bac", "acb"});
    }

    // two agents, three objects; any allocation giving someone a is infeasible
    inline auto nonunique_constraint(const lpm::Instance & inst) -> lpm::Constraint
    {
        return constraint(inst, {"aa", "ba", "ca", "ab", "ac"});
    }

    inline auto nonunique_alpha(const lpm::Instance & inst, const std::string & at_aa) -> lpm::CompromiserAssignment
    {
        return alpha(inst, {{"aa", at_aa}, {"ba", "2"}, {"ca", "2"}, {"ab", "1"}, {"ac", "1"}});
    }
}

namespace fixture
{
    inline auto marriage_instance() -> lpm::Instance
    {
        std::vector<std::string> people{"m1", "m2", "m3", "w1", "w2", "w3"};
        return lpm::Instance{people, people};
    }

    inline auto marriage_spec() -> lpm::MarriageSpec
    {
        return lpm::MarriageSpec{{0, 1, 2}, {3, 4, 5}};
    }

    // shown entries first, the rest in declaration order
    inline auto marriage_pref(const lpm::Instance & inst, std::vector<std::string> shown) -> lpm::Preference
    {
        std::vector<int> r;
        for (auto & s : shown)
            r.push_back(inst.object_index(s));
        for (int a = 0; a < inst.object_count(); ++a)
            if (std::find(r.begin(), r.end(), a) == r.end())
                r.push_back(a);
        return lpm::Preference{r};
    }

    // the three profiles sharing the top vector (w1, w2, w2, m3, m1, m3)
    inline auto marriage_profiles(const lpm::Instance & inst) -> std::vector<lpm::Profile>
    {
        auto p = [&](std::vector<std::vector<std::string>> lists) {
            lpm::Profile r;
            for (auto & l : lists)
                r.push_back(marriage_pref(inst, l));
            return r;
        };
        return {
            p({{"w1"}, {"w2"}, {"w2", "w3", "w1"}, {"m3", "m1", "m2"}, {"m1", "m2", "m3"}, {"m3"}}),
            p({{"w1"}, {"w2", "w3", "w1"}, {"w2"}, {"m3", "m1", "m2"}, {"m1", "m3", "m2"}, {"m3", "m2", "m1"}}),
            p({{"w1", "w2", "w3"}, {"w2", "w3", "w1"}, {"w2", "w1", "w3"}, {"m3", "m1", "m2"}, {"m1", "m2", "m3"}, {"m3", "m2", "m1"}}),
        };
    }

    inline auto marriage_tops(const lpm::Instance & inst) -> lpm::Code
    {
        std::vector<int> t;
        for (auto s : {"w1", "w2", "w2", "m3", "m1", "m3"})
            t.push_back(inst.object_index(s));
        return inst.encode(t);
    }

    // the boston fixture: unit capacities, a ranks 2,3,1
    inline auto ia_spec() -> lpm::SchoolSpec
    {
        return lpm::SchoolSpec{{1, 1, 1}, {{1, 2, 0}, {0, 1, 2}, {0, 1, 2}}};
    }

    // bossy but unanimous: the comparative statics assignment where 1 and 2 both move
    inline auto bossy_alpha(const lpm::Instance & inst) -> lpm::CompromiserAssignment
    {
        return alpha(inst, {{"aaa", "12"}, {"baa", "123"}});
    }
}
