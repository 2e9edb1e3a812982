#include <lpm/axioms.hh>

#include <algorithm>
#include <numeric>
#include <random>

using std::string;
using std::vector;

namespace lpm
{
    auto Witness::profile(const string & name) const -> const Profile &
    {
        for (auto & [k, p] : profiles)
            if (k == name)
                return p;
        throw std::out_of_range{"witness has no profile '" + name + "'"};
    }

    auto Witness::allocation(const string & name) const -> Code
    {
        for (auto & [k, c] : allocations)
            if (k == name)
                return c;
        throw std::out_of_range{"witness has no allocation '" + name + "'"};
    }

    namespace
    {
        struct Sweep
        {
            const MechanismTable & f;
            const Instance & inst;
            const ProfileSpace & space;
            const PreferenceSpace & prefs;
            int n;

            explicit Sweep(const MechanismTable & f_) :
                f(f_),
                inst(f_.instance()),
                space(f_.space()),
                prefs(f_.space().preferences()),
                n(f_.instance().agent_count())
            {
            }

            auto rank(ProfileIndex p, int i, Code x) const -> int
            {
                return prefs.position(space.perm_of(p, i), inst.object_of(x, i));
            }

            /// Every member of M weakly prefers y to x at p and one strictly.
            auto gains(ProfileIndex p, Code x, Code y, AgentSet M) const -> bool
            {
                bool strict = false;
                for (auto b = M.bits(); b; b &= b - 1) {
                    int i = std::countr_zero(b);
                    int rx = rank(p, i, x), ry = rank(p, i, y);
                    if (ry > rx)
                        return false;
                    strict = strict || ry < rx;
                }
                return strict;
            }

            auto deviation(ProfileIndex p, ProfileIndex q, AgentSet M, const string & reason) const -> Witness
            {
                Witness w;
                w.reason = reason;
                w.profiles = {{"truthful", space.profile(p)}, {"misreport", space.profile(q)}};
                w.allocations = {{"truthful outcome", f[p]}, {"misreport outcome", f[q]}};
                w.agents = M;
                return w;
            }

            auto image_bits() const -> vector<bool>
            {
                vector<bool> img(inst.allocation_count(), false);
                for (Code c : f.table())
                    img[c] = true;
                return img;
            }
        };

        auto coalition_sweep(const Sweep & s, int max_size) -> Verdict
        {
            const int m = s.prefs.size();
            vector<AgentSet> coalitions;
            for (int size = 1; size <= max_size; ++size)
                for (std::uint32_t bits = 1; bits < (1u << s.n); ++bits)
                    if (std::popcount(bits) == size)
                        coalitions.emplace_back(bits);

            vector<int> digits;
            for (ProfileIndex p = 0; p < s.space.count(); ++p) {
                const Code x = s.f[p];
                for (auto M : coalitions) {
                    auto members = M.members();
                    digits.assign(members.size(), 0);
                    while (true) {
                        ProfileIndex q = p;
                        for (std::size_t k = 0; k < members.size(); ++k)
                            q = s.space.with_perm(q, members[k], digits[k]);
                        if (q != p && s.gains(p, x, s.f[q], M))
                            return Verdict::fail(s.deviation(p, q, M,
                                M.size() == 1 ? "a single agent gains by misreporting" : "a coalition gains by misreporting jointly"));
                        std::size_t k = members.size();
                        while (k > 0 && ++digits[k - 1] == m)
                            digits[--k] = 0;
                        if (k == 0)
                            break;
                    }
                }
            }
            return Verdict::pass();
        }

        auto tops_witness(const MechanismTable & f, Code mu, const string & reason) -> Witness
        {
            Witness w;
            w.reason = reason;
            w.allocations = {{"mu", mu}};
            auto & space = f.space();
            auto & inst = f.instance();
            AgentSet left = AgentSet::all(inst.agent_count());
            int k = 0;
            for (auto p : profile_indices_with_tops(space, inst, mu)) {
                auto next = left & diff(inst, f[p], mu);
                if (next == left)
                    continue;
                left = next;
                w.profiles.emplace_back("p" + std::to_string(++k), space.profile(p));
                if (left.empty())
                    break;
            }
            return w;
        }
    }

    auto is_strategy_proof(const MechanismTable & f) -> Verdict
    {
        return coalition_sweep(Sweep{f}, 1);
    }

    auto is_group_strategy_proof(const MechanismTable & f, bool exhaustive) -> Verdict
    {
        Sweep s{f};
        return coalition_sweep(s, exhaustive ? s.n : std::min(2, s.n));
    }

    auto is_nonbossy(const MechanismTable & f) -> Verdict
    {
        Sweep s{f};
        for (ProfileIndex p = 0; p < s.space.count(); ++p) {
            const Code x = f[p];
            for (int i = 0; i < s.n; ++i)
                for (int r = 0; r < s.prefs.size(); ++r) {
                    auto q = s.space.with_perm(p, i, r);
                    const Code y = f[q];
                    if (y != x && s.inst.object_of(y, i) == s.inst.object_of(x, i))
                        return Verdict::fail(s.deviation(p, q, AgentSet::single(i),
                            "an agent changes others' objects without changing its own"));
                }
        }
        return Verdict::pass();
    }

    auto is_maskin_monotonic(const MechanismTable & f) -> Verdict
    {
        Sweep s{f};
        const int m = s.prefs.size(), k = s.prefs.object_count();
        // lower contour sets as bitmasks, then for each (perm, object) the perms
        // whose lower contour at that object contains it
        vector<std::uint32_t> lower(std::size_t(m) * k, 0);
        for (int r = 0; r < m; ++r)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    if (s.prefs.prefers(r, a, b))
                        lower[r * k + a] |= 1u << b;
        vector<vector<int>> expands(std::size_t(m) * k);
        for (int r = 0; r < m; ++r)
            for (int a = 0; a < k; ++a)
                for (int r2 = 0; r2 < m; ++r2)
                    if ((lower[r * k + a] & ~lower[r2 * k + a]) == 0)
                        expands[r * k + a].push_back(r2);

        vector<const vector<int> *> lists(s.n);
        vector<std::size_t> digits(s.n);
        for (ProfileIndex p = 0; p < s.space.count(); ++p) {
            const Code x = f[p];
            for (int i = 0; i < s.n; ++i)
                lists[i] = &expands[s.space.perm_of(p, i) * k + s.inst.object_of(x, i)];
            std::fill(digits.begin(), digits.end(), 0);
            while (true) {
                ProfileIndex q = 0;
                for (int i = 0; i < s.n; ++i)
                    q += ProfileIndex((*lists[i])[digits[i]]) * s.space.weight(i);
                if (f[q] != x) {
                    Witness w;
                    w.reason = "outcome changes although every lower contour set at it only grew";
                    w.profiles = {{"before", s.space.profile(p)}, {"after", s.space.profile(q)}};
                    w.allocations = {{"before outcome", x}, {"after outcome", f[q]}};
                    return Verdict::fail(std::move(w));
                }
                int i = s.n;
                while (i > 0 && ++digits[i - 1] == lists[i - 1]->size())
                    digits[--i] = 0;
                if (i == 0)
                    break;
            }
        }
        return Verdict::pass();
    }

    auto is_pareto_efficient(const MechanismTable & f) -> Verdict
    {
        return is_pareto_efficient(f, f.constraint());
    }

    auto is_pareto_efficient(const MechanismTable & f, const Constraint & constraint) -> Verdict
    {
        Sweep s{f};
        if (! (constraint.instance() == s.inst))
            throw InputError{"constraint and mechanism are over different instances"};
        const auto feasible = constraint.feasible_codes();
        const auto everyone = AgentSet::all(s.n);
        for (ProfileIndex p = 0; p < s.space.count(); ++p) {
            const Code x = f[p];
            for (Code y : feasible)
                if (s.gains(p, x, y, everyone)) {
                    Witness w;
                    w.reason = "a feasible allocation makes everyone weakly and someone strictly better off";
                    w.profiles = {{"profile", s.space.profile(p)}};
                    w.allocations = {{"outcome", x}, {"improvement", y}};
                    return Verdict::fail(std::move(w));
                }
        }
        return Verdict::pass();
    }

    auto check_unanimity(const MechanismTable & f) -> Verdict
    {
        Sweep s{f};
        auto img = s.image_bits();
        for (ProfileIndex p = 0; p < s.space.count(); ++p) {
            Code t = s.space.tops(s.inst, p);
            if (img[t] && f[p] != t) {
                Witness w;
                w.reason = "top choices are feasible but not selected";
                w.profiles = {{"profile", s.space.profile(p)}};
                w.allocations = {{"tops", t}, {"outcome", f[p]}};
                return Verdict::fail(std::move(w));
            }
        }
        return Verdict::pass();
    }

    auto fixed_compromisers(const MechanismTable & f, Code mu) -> AgentSet
    {
        auto & inst = f.instance();
        AgentSet result = AgentSet::all(inst.agent_count());
        for (auto p : profile_indices_with_tops(f.space(), inst, mu))
            result = result & diff(inst, f[p], mu);
        return result;
    }

    auto check_fixed_compromiser(const MechanismTable & f) -> Verdict
    {
        Sweep s{f};
        auto img = s.image_bits();
        for (Code mu : s.inst.lexicographic_codes())
            if (! img[mu] && fixed_compromisers(f, mu).empty())
                return Verdict::fail(tops_witness(f, mu, "no agent misses its top object at every profile with these tops"));
        return Verdict::pass();
    }

    auto check_compromiser_invariance(const MechanismTable & f) -> Verdict
    {
        Sweep s{f};
        for (Code mu : s.inst.lexicographic_codes()) {
            auto M = fixed_compromisers(f, mu);
            if (M.empty())
                continue;
            for (auto p : profile_indices_with_tops(s.space, s.inst, mu)) {
                ProfileIndex q = p;
                for (int i : M.members())
                    q = s.space.with_perm(q, i, s.prefs.bottom_ranked(s.space.perm_of(p, i), s.inst.object_of(mu, i)));
                if (f[q] != f[p]) {
                    Witness w;
                    w.reason = "bottom-ranking the fixed compromisers' tops changes the outcome";
                    w.profiles = {{"profile", s.space.profile(p)}, {"bottom-ranked", s.space.profile(q)}};
                    w.allocations = {{"mu", mu}, {"outcome", f[p]}, {"bottom-ranked outcome", f[q]}};
                    w.agents = M;
                    return Verdict::fail(std::move(w));
                }
            }
        }
        return Verdict::pass();
    }

    auto derive_alpha(const MechanismTable & f) -> CompromiserAssignment
    {
        Sweep s{f};
        auto img = s.image_bits();
        vector<AgentSet> cells(s.inst.allocation_count());
        for (Code mu = 0; mu < s.inst.allocation_count(); ++mu) {
            if (img[mu])
                continue;
            cells[mu] = fixed_compromisers(f, mu);
            if (cells[mu].empty()) {
                string name;
                for (int a : s.inst.decode(mu))
                    name += (name.empty() ? "" : ",") + s.inst.object_name(a);
                throw StructuralError{"no fixed compromiser at (" + name + ")"};
            }
        }
        return CompromiserAssignment{f.image_constraint(), std::move(cells)};
    }

    auto is_local_priority(const MechanismTable & f) -> LocalPriorityResult
    {
        LocalPriorityResult r;
        r.image_differs = ! f.image_constraint().same_set(f.constraint());
        auto fail = [&](const char * what, Verdict v) {
            r.failed = what;
            r.witness = std::move(v.witness);
            return r;
        };
        if (auto v = check_unanimity(f); ! v)
            return fail("unanimity", std::move(v));
        if (auto v = check_fixed_compromiser(f); ! v)
            return fail("fixed-compromiser", std::move(v));
        if (auto v = check_compromiser_invariance(f); ! v)
            return fail("invariance", std::move(v));

        auto alpha = derive_alpha(f);
        try {
            auto g = tabulate(alpha, f.shared_space());
            if (auto p = first_disagreement(f, g)) {
                Witness w;
                w.reason = "the derived assignment induces a different mechanism";
                w.profiles = {{"profile", f.space().profile(*p)}};
                w.allocations = {{"outcome", f[*p]}, {"derived outcome", g[*p]}};
                r.failed = "reconstruction";
                r.witness = std::move(w);
                r.alpha = std::move(alpha);
                return r;
            }
        }
        catch (const NotImplementable & e) {
            Witness w;
            w.reason = "the derived assignment is not implementable";
            w.profiles = {{"profile", f.space().profile(e.witness)}};
            r.failed = "reconstruction";
            r.witness = std::move(w);
            r.alpha = std::move(alpha);
            return r;
        }
        r.holds = true;
        r.alpha = std::move(alpha);
        return r;
    }

    auto sampled_fixed_compromisers(const Instance & instance, const ProfileFunction & f, Code mu,
        std::span<const Profile> hints, int samples, std::uint64_t seed) -> SampledCompromisers
    {
        const int n = instance.agent_count();
        SampledCompromisers result{AgentSet::all(n), {}};
        auto visit = [&](const Profile & p) {
            auto next = result.agents & diff(instance, f(p), mu);
            if (next != result.agents) {
                result.agents = next;
                result.profiles.push_back(p);
            }
        };
        for (auto & p : hints) {
            if (tau(instance, p, 1).code() != mu)
                throw InputError{"hint profile does not have the requested tops"};
            visit(p);
        }
        std::mt19937_64 rng(seed);
        for (int k = 0; k < samples && ! result.agents.empty(); ++k) {
            Profile p;
            for (int i = 0; i < n; ++i) {
                vector<int> rest;
                for (int a = 0; a < instance.object_count(); ++a)
                    if (a != instance.object_of(mu, i))
                        rest.push_back(a);
                std::shuffle(rest.begin(), rest.end(), rng);
                rest.insert(rest.begin(), instance.object_of(mu, i));
                p.emplace_back(rest);
            }
            visit(p);
        }
        return result;
    }

    auto refute_fixed_compromiser(const Instance & instance, const ProfileFunction & f, Code mu,
        std::span<const Profile> hints, int samples, std::uint64_t seed) -> Verdict
    {
        auto s = sampled_fixed_compromisers(instance, f, mu, hints, samples, seed);
        if (! s.agents.empty())
            return Verdict::pass();
        Witness w;
        w.reason = "no agent misses its top object at every profile with these tops";
        w.allocations = {{"mu", mu}};
        for (std::size_t k = 0; k < s.profiles.size(); ++k)
            w.profiles.emplace_back("p" + std::to_string(k + 1), s.profiles[k]);
        return Verdict::fail(std::move(w));
    }
}
