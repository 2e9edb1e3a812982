#include <lpm/consistency.hh>
#include <lpm/enumerate.hh>
#include <lpm/mechanisms.hh>

#include <numeric>
#include <unordered_map>

namespace lpm
{
    namespace
    {
        struct Checked
        {
            MechanismTable table;
            bool gsp;
            bool pe;
        };

        auto implementable_table(const CompromiserAssignment & alpha, const std::shared_ptr<const ProfileSpace> & space)
            -> std::optional<MechanismTable>
        {
            try {
                return tabulate(alpha, space);
            }
            catch (const NotImplementable &) {
                return std::nullopt;
            }
        }
    }

    auto theorem_harness(const Constraint & constraint, Reading reading, std::uint64_t node_budget) -> HarnessReport
    {
        EnumerationOptions options;
        options.reading = reading;
        options.node_budget = node_budget;
        auto space = std::make_shared<const ProfileSpace>(constraint.instance(), default_profile_budget);
        const bool exhaustive = constraint.instance().agent_count() <= 3;
        std::unordered_map<std::uint64_t, std::vector<Checked>> seen;

        HarnessReport r;
        auto note = [&](const CompromiserAssignment & alpha) {
            if (! r.counterexample)
                r.counterexample = alpha;
        };
        auto summary = enumerate_consistent(constraint, options, [&](const CompromiserAssignment & alpha, std::uint64_t) {
            ++r.assignments;
            auto f = implementable_table(alpha, space);
            if (! f) {
                ++r.not_implementable;
                note(alpha);
                return true;
            }
            auto & bucket = seen[f->hash()];
            const Checked * hit = nullptr;
            for (const auto & c : bucket)
                if (mechanisms_equal(c.table, *f))
                    hit = &c;
            if (! hit) {
                ++r.mechanisms;
                bucket.push_back({*f, is_group_strategy_proof(*f, exhaustive).holds, is_pareto_efficient(*f).holds});
                hit = &bucket.back();
            }
            if (! hit->gsp)
                ++r.gsp_failures;
            if (! hit->pe)
                ++r.pe_failures;
            if (! hit->gsp || ! hit->pe)
                note(alpha);
            return true;
        });
        r.complete = summary.complete;
        return r;
    }

    auto find_pe_not_gsp(const Constraint & constraint, std::uint64_t budget, std::uint64_t seed)
        -> std::optional<CompromiserAssignment>
    {
        std::mt19937_64 rng{seed};
        auto space = std::make_shared<const ProfileSpace>(constraint.instance(), default_profile_budget);
        EnumerationOptions options;
        options.require_backward = false;
        options.node_budget = 4096;
        for (std::uint64_t k = 0; k < budget; ++k) {
            // alternate between arbitrary and forward consistent assignments
            options.require_forward = k % 2 == 1;
            auto alpha = sample_assignment(constraint, options, rng);
            if (! alpha)
                continue;
            auto f = implementable_table(*alpha, space);
            if (f && is_pareto_efficient(*f) && ! is_nonbossy(*f))
                return alpha;
        }
        return std::nullopt;
    }

    auto find_gsp_backward_violation(std::span<const Constraint> constraints, std::uint64_t budget)
        -> std::optional<CompromiserAssignment>
    {
        // Every assignment inducing a group strategy-proof table sits inside the
        // table's derived assignment and induces the same table, so candidates
        // are the subsets of derive_alpha(f) for known group strategy-proof f.
        std::uint64_t spent = 0;
        std::optional<CompromiserAssignment> found;
        auto inside = [&](const Constraint & c, const MechanismTable & f) {
            if (found || spent >= budget || ! is_group_strategy_proof(f))
                return;
            auto top = derive_alpha(f);
            if (! is_backward_consistent(top, Reading::relaxed)) {
                found = top;
                return;
            }
            EnumerationOptions o;
            o.require_backward = false;
            o.within = top;
            o.node_budget = budget - spent;
            spent += enumerate_consistent(c, o, [&](const CompromiserAssignment & alpha, std::uint64_t) {
                if (is_backward_consistent(alpha, Reading::relaxed))
                    return true;
                found = alpha;
                return false;
            }).nodes;
        };

        for (const auto & c : constraints) {
            auto & inst = c.instance();
            auto space = std::make_shared<const ProfileSpace>(inst, default_profile_budget);
            std::vector<int> order(inst.agent_count());
            std::iota(order.begin(), order.end(), 0);
            do
                inside(c, tabulate(sd_alpha(c, DictatorOrder{order}), space));
            while (! found && std::next_permutation(order.begin(), order.end()));
            if (c.generator().kind == ConstraintKind::house) {
                std::iota(order.begin(), order.end(), 0);
                do
                    inside(c, tabulate(ttc_alpha(inst, Endowment{order}), space));
                while (! found && std::next_permutation(order.begin(), order.end()));
            }
            if (found)
                return found;
        }
        // then whatever the consistent enumeration turns up
        for (const auto & c : constraints) {
            auto space = std::make_shared<const ProfileSpace>(c.instance(), default_profile_budget);
            EnumerationOptions o;
            o.dedupe_by_mechanism = true;
            o.node_budget = std::max<std::uint64_t>(1, (budget - std::min(budget, spent)) / 2);
            spent += enumerate_consistent(c, o, [&](const CompromiserAssignment & alpha, std::uint64_t) {
                inside(c, tabulate(alpha, space));
                return ! found && spent < budget;
            }).nodes;
            if (found)
                return found;
        }
        return std::nullopt;
    }
}
