#include <lpm/compare.hh>

using std::vector;

namespace lpm
{
    namespace
    {
        auto implementable_or_note(const CompromiserAssignment & alpha, const char * which, ProfileIndex budget,
            vector<std::string> & notes) -> bool
        {
            if (is_implementable(alpha, budget).implementable)
                return true;
            notes.push_back(std::string{which} + " is not implementable");
            return false;
        }

        /// First (profile, agent) where agent strictly prefers worse's outcome to better's.
        auto compare_tables(const MechanismTable & better, const MechanismTable & worse, std::optional<int> only)
            -> std::optional<Witness>
        {
            auto & space = better.space();
            auto & prefs = space.preferences();
            auto & inst = better.instance();
            for (ProfileIndex p = 0; p < space.count(); ++p)
                for (int i = 0; i < inst.agent_count(); ++i) {
                    if (only && *only != i)
                        continue;
                    int perm = space.perm_of(p, i);
                    int a = inst.object_of(better[p], i), b = inst.object_of(worse[p], i);
                    if (prefs.prefers(perm, b, a)) {
                        Witness w;
                        w.reason = "the agent strictly prefers the outcome it was supposed to weakly disprefer";
                        w.profiles = {{"profile", space.profile(p)}};
                        w.allocations = {{"expected better", better[p]}, {"expected worse", worse[p]}};
                        w.agents = AgentSet::single(i);
                        return w;
                    }
                }
            return std::nullopt;
        }
    }

    auto check_pointwise_dominance(const CompromiserAssignment & alpha, const CompromiserAssignment & larger, ProfileIndex budget)
        -> DominanceReport
    {
        if (! (alpha.instance() == larger.instance()))
            throw InputError{"assignments are over different instances"};
        DominanceReport r;
        if (! alpha.pointwise_subset_of(larger))
            r.hypothesis_failures.push_back("the first assignment is not pointwise inside the second");
        if (! is_forward_consistent(larger))
            r.hypothesis_failures.push_back("the second assignment is not forward consistent");
        bool ok = implementable_or_note(alpha, "the first assignment", budget, r.hypothesis_failures);
        ok = implementable_or_note(larger, "the second assignment", budget, r.hypothesis_failures) && ok;
        if (! ok) {
            r.holds = false;
            return r;
        }
        auto space = std::make_shared<const ProfileSpace>(alpha.instance(), budget);
        r.witness = compare_tables(tabulate(alpha, space), tabulate(larger, space), std::nullopt);
        r.holds = ! r.witness;
        return r;
    }

    auto check_agent_dominance(const CompromiserAssignment & alpha, const CompromiserAssignment & other, int i,
        Reading reading, ProfileIndex budget) -> DominanceReport
    {
        if (! (alpha.instance() == other.instance()))
            throw InputError{"assignments are over different instances"};
        if (i < 0 || i >= alpha.instance().agent_count())
            throw InputError{"agent index out of range"};
        DominanceReport r;
        r.agent = i;
        if (! alpha.constraint().same_set(other.constraint()))
            r.hypothesis_failures.push_back("the assignments are for different constraints");
        if (! is_consistent(alpha, reading))
            r.hypothesis_failures.push_back("the first assignment is not consistent");
        if (! is_consistent(other, reading))
            r.hypothesis_failures.push_back("the second assignment is not consistent");
        for (Code x : alpha.constraint().infeasible_codes()) {
            AgentSet a = alpha(x), b = other(x);
            AgentSet me = AgentSet::single(i);
            if (! (a - me).subset_of(b)) {
                r.hypothesis_failures.push_back("another agent compromises in the first assignment but not the second");
                break;
            }
            if (b.contains(i) && ! a.contains(i)) {
                r.hypothesis_failures.push_back("the agent compromises in the second assignment but not the first");
                break;
            }
        }
        bool ok = implementable_or_note(alpha, "the first assignment", budget, r.hypothesis_failures);
        ok = implementable_or_note(other, "the second assignment", budget, r.hypothesis_failures) && ok;
        if (! ok) {
            r.holds = false;
            return r;
        }
        auto space = std::make_shared<const ProfileSpace>(alpha.instance(), budget);
        r.witness = compare_tables(tabulate(other, space), tabulate(alpha, space), i);
        r.holds = ! r.witness;
        return r;
    }
}
