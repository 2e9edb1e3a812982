#include <lpm/engine.hh>

#include <algorithm>

using std::optional;
using std::vector;

namespace lpm
{
    auto Trace::allocations() const -> vector<Code>
    {
        vector<Code> result;
        for (auto & s : steps)
            result.push_back(s.allocation);
        return result;
    }

    auto run_lp(const CompromiserAssignment & alpha, const Profile & profile) -> Outcome
    {
        auto & inst = alpha.instance();
        const int n = inst.agent_count();
        if (int(profile.size()) != n)
            throw InputError{"profile size does not match the number of agents"};
        for (auto & p : profile)
            if (p.size() != inst.object_count())
                throw InputError{"preference ranks the wrong number of objects"};

        Trace trace;
        Code x = tau(inst, profile, 1).code();
        // each step moves at least one agent strictly down; n(|O|-1)+1 allocations at most
        const int cap = n * (inst.object_count() - 1) + 1;
        for (int t = 1;; ++t) {
            if (t > cap)
                throw std::logic_error{"local priority run exceeded its step bound"};
            if (alpha.constraint().feasible(x)) {
                trace.steps.push_back({x, AgentSet{}});
                return Final{x, std::move(trace)};
            }
            auto movers = alpha(x);
            if (movers.empty())
                throw StructuralError{"infeasible allocation without compromisers"};
            trace.steps.push_back({x, movers});
            Code next = x;
            for (int i : movers.members()) {
                auto below = profile[i].next_below(inst.object_of(x, i));
                if (! below)
                    return Exhausted{i, t, std::move(trace)};
                next = inst.with_object(next, i, *below);
            }
            x = next;
        }
    }

    LpRunner::LpRunner(const CompromiserAssignment & alpha, const PreferenceSpace & prefs) :
        _alpha(alpha),
        _prefs(prefs),
        _agents(alpha.instance().agent_count())
    {
    }

    auto LpRunner::run(std::span<const int> perms) const -> std::int64_t
    {
        auto & inst = _alpha.instance();
        auto & cons = _alpha.constraint();
        Code x = 0;
        for (int i = 0; i < _agents; ++i)
            x += Code(_prefs.top(perms[i])) * inst.radix(i);
        while (! cons.feasible(x)) {
            Code next = x;
            for (auto b = _alpha(x).bits(); b; b &= b - 1) {
                int i = std::countr_zero(b);
                int below = _prefs.below(perms[i], inst.object_of(x, i));
                if (below < 0)
                    return -std::int64_t(i) - 1;
                next = inst.with_object(next, i, below);
            }
            x = next;
        }
        return x;
    }

    MechanismTable::MechanismTable(Constraint constraint, std::shared_ptr<const ProfileSpace> space, vector<Code> table) :
        _constraint(std::move(constraint)),
        _space(std::move(space)),
        _table(std::move(table))
    {
        if (_table.size() != _space->count())
            throw InputError{"mechanism table must have one entry per profile"};
        for (Code c : _table)
            if (c >= instance().allocation_count() || ! _constraint.feasible(c))
                throw InputError{"mechanism table selects an infeasible allocation"};
    }

    auto MechanismTable::from_function(Constraint constraint, const std::function<Code(std::span<const int>)> & f,
        ProfileIndex budget) -> MechanismTable
    {
        auto space = std::make_shared<const ProfileSpace>(constraint.instance(), budget);
        vector<Code> table(space->count());
        vector<int> perms(constraint.instance().agent_count());
        for (ProfileIndex p = 0; p < space->count(); ++p) {
            for (int i = 0; i < int(perms.size()); ++i)
                perms[i] = space->perm_of(p, i);
            table[p] = f(perms);
        }
        return MechanismTable{std::move(constraint), std::move(space), std::move(table)};
    }

    auto MechanismTable::image() const -> vector<Code>
    {
        vector<bool> seen(instance().allocation_count(), false);
        for (Code c : _table)
            seen[c] = true;
        vector<Code> result;
        for (Code c = 0; c < instance().allocation_count(); ++c)
            if (seen[c])
                result.push_back(c);
        return result;
    }

    auto MechanismTable::image_constraint() const -> Constraint
    {
        auto img = image();
        return Constraint::explicit_set(instance(), img);
    }

    auto MechanismTable::with_constraint(Constraint constraint) const -> MechanismTable
    {
        return MechanismTable{std::move(constraint), _space, _table};
    }

    auto MechanismTable::hash() const -> std::uint64_t
    {
        // FNV-1a over the codes
        std::uint64_t h = 1469598103934665603ull;
        for (Code c : _table)
            for (int k = 0; k < 4; ++k) {
                h ^= (c >> (8 * k)) & 0xffu;
                h *= 1099511628211ull;
            }
        return h;
    }

    auto is_implementable(const CompromiserAssignment & alpha, ProfileIndex budget) -> Implementability
    {
        ProfileSpace space(alpha.instance(), budget);
        LpRunner runner(alpha, space.preferences());
        vector<int> perms(alpha.instance().agent_count());
        for (ProfileIndex p = 0; p < space.count(); ++p) {
            for (int i = 0; i < int(perms.size()); ++i)
                perms[i] = space.perm_of(p, i);
            if (runner.run(perms) < 0)
                return Implementability{false, p};
        }
        return Implementability{true, std::nullopt};
    }

    auto tabulate(const CompromiserAssignment & alpha, std::shared_ptr<const ProfileSpace> space) -> MechanismTable
    {
        LpRunner runner(alpha, space->preferences());
        vector<Code> table(space->count());
        vector<int> perms(alpha.instance().agent_count());
        for (ProfileIndex p = 0; p < space->count(); ++p) {
            for (int i = 0; i < int(perms.size()); ++i)
                perms[i] = space->perm_of(p, i);
            auto r = runner.run(perms);
            if (r < 0)
                throw NotImplementable{p};
            table[p] = Code(r);
        }
        return MechanismTable{alpha.constraint(), std::move(space), std::move(table)};
    }

    auto tabulate(const CompromiserAssignment & alpha, ProfileIndex budget) -> MechanismTable
    {
        return tabulate(alpha, std::make_shared<const ProfileSpace>(alpha.instance(), budget));
    }

    auto first_disagreement(const MechanismTable & f, const MechanismTable & g) -> optional<ProfileIndex>
    {
        if (! (f.instance() == g.instance()))
            throw InputError{"mechanisms are over different instances"};
        for (ProfileIndex p = 0; p < f.size(); ++p)
            if (f[p] != g[p])
                return p;
        return std::nullopt;
    }

    auto mechanisms_equal(const MechanismTable & f, const MechanismTable & g) -> bool
    {
        return ! first_disagreement(f, g);
    }

    auto is_truncation(const Trace & longer, const Trace & shorter) -> bool
    {
        auto a = longer.allocations(), b = shorter.allocations();
        if (b.size() > a.size())
            return false;
        return std::equal(b.begin(), b.end(), a.end() - std::ptrdiff_t(b.size()));
    }

    auto RankVector::dominates(const RankVector & o) const -> bool
    {
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] < o.counts.at(i))
                return false;
        return true;
    }

    auto rank_vector(const Profile & profile, const Allocation & x) -> RankVector
    {
        if (int(profile.size()) != x.size())
            throw InputError{"profile and allocation sizes differ"};
        RankVector r;
        for (int i = 0; i < x.size(); ++i)
            r.counts.push_back(profile[i].position(x[i]));
        return r;
    }

    auto marginal(const MechanismTable & f, const vector<optional<Preference>> & fixed) -> MechanismTable
    {
        auto & inst = f.instance();
        const int n = inst.agent_count();
        if (int(fixed.size()) != n)
            throw InputError{"partial profile must have one slot per agent"};

        vector<int> members;
        vector<std::string> names;
        vector<int> full(n, 0);
        auto & prefs = f.space().preferences();
        for (int i = 0; i < n; ++i) {
            if (fixed[i])
                full[i] = prefs.index_of(*fixed[i]);
            else {
                members.push_back(i);
                names.push_back(inst.agent_name(i));
            }
        }
        if (members.empty())
            throw InputError{"marginal mechanism needs at least one free agent"};
        if (int(members.size()) == n)
            return f;

        Instance sub(names, inst.objects());
        auto space = std::make_shared<const ProfileSpace>(sub, f.space().count());
        vector<Code> table(space->count());
        for (ProfileIndex p = 0; p < space->count(); ++p) {
            for (std::size_t k = 0; k < members.size(); ++k)
                full[members[k]] = space->perm_of(p, int(k));
            Code x = f[f.space().index(full)];
            vector<int> objs;
            for (int i : members)
                objs.push_back(inst.object_of(x, i));
            table[p] = sub.encode(objs);
        }
        vector<Code> image(table);
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());
        return MechanismTable{Constraint::explicit_set(sub, image), std::move(space), std::move(table)};
    }
}
