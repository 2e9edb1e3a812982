#include <lpm/consistency.hh>

#include <algorithm>
#include <deque>
#include <map>

using std::optional;
using std::vector;

namespace lpm
{
    auto reading_name(Reading r) -> std::string
    {
        return r == Reading::strict ? "strict" : "relaxed";
    }

    namespace
    {
        /// Calls fn on every allocation that agrees with x outside T, in
        /// lexicographic order (agent 0 most significant). Stops when fn
        /// returns false.
        template <typename F_>
        auto for_each_variation(const Instance & inst, Code x, AgentSet T, const F_ & fn) -> bool
        {
            auto members = T.members();
            const int m = inst.object_count();
            Code y = x;
            for (int j : members)
                y = inst.with_object(y, j, 0);
            vector<int> digits(members.size(), 0);
            while (true) {
                if (! fn(y))
                    return false;
                std::size_t k = members.size();
                while (k > 0) {
                    int j = members[k - 1];
                    if (++digits[k - 1] < m) {
                        y = inst.with_object(y, j, digits[k - 1]);
                        break;
                    }
                    digits[k - 1] = 0;
                    y = inst.with_object(y, j, 0);
                    --k;
                }
                if (k == 0)
                    return true;
            }
        }

        auto allocation_order(const Instance & inst) -> vector<std::size_t>
        {
            // rank of each code in lexicographic order
            auto lex = inst.lexicographic_codes();
            vector<std::size_t> rank(inst.allocation_count());
            for (std::size_t k = 0; k < lex.size(); ++k)
                rank[lex[k]] = k;
            return rank;
        }

        /// Breadth-first search over (allocation, abandoned objects per agent).
        class ConnectSearch
        {
            private:
                using State = std::pair<Code, std::uint64_t>;

                const CompromiserAssignment & _alpha;
                const Instance & _inst;
                int _n, _m;
                std::map<State, State> _parent;
                std::map<Code, State> _first; // first state reaching each infeasible allocation
                State _root;

                auto abandoned(std::uint64_t bits, int j, int a) const -> bool { return (bits >> (j * _m + a)) & 1u; }

                template <typename F_>
                auto moves(Code z, std::uint64_t bits, AgentSet D, const F_ & emit) const -> void
                {
                    auto members = D.members();
                    auto rec = [&](auto & self, std::size_t k, Code y, std::uint64_t b) -> void {
                        if (k == members.size()) {
                            emit(y, b);
                            return;
                        }
                        int j = members[k], cur = _inst.object_of(z, j);
                        for (int a = 0; a < _m; ++a)
                            if (a != cur && ! abandoned(bits, j, a))
                                self(self, k + 1, _inst.with_object(y, j, a), b | (std::uint64_t{1} << (j * _m + cur)));
                    };
                    rec(rec, 0, z, bits);
                }

            public:
                ConnectSearch(const CompromiserAssignment & alpha, Code x, int i) :
                    _alpha(alpha),
                    _inst(alpha.instance()),
                    _n(alpha.instance().agent_count()),
                    _m(alpha.instance().object_count()),
                    _root{x, 0}
                {
                    if (_n * _m > 64)
                        throw InputError{"instance too large for connectedness search"};
                    if (! alpha(x).contains(i))
                        return;
                    const State root = _root;
                    std::deque<State> queue;
                    auto visit = [&](const State & from, Code y, std::uint64_t b) {
                        State s{y, b};
                        if (_parent.emplace(s, from).second) {
                            queue.push_back(s);
                            if (! _alpha(y).empty())
                                _first.emplace(y, s);
                        }
                    };
                    moves(x, 0, AgentSet::single(i), [&](Code y, std::uint64_t b) { visit(root, y, b); });
                    while (! queue.empty()) {
                        State s = queue.front();
                        queue.pop_front();
                        AgentSet A = _alpha(s.first);
                        // every nonempty subset of the current compromisers
                        for (std::uint32_t sub = A.bits(); sub; sub = (sub - 1) & A.bits())
                            moves(s.first, s.second, AgentSet{sub}, [&](Code y, std::uint64_t b) { visit(s, y, b); });
                    }
                }

                auto reached() const -> vector<Code>
                {
                    vector<Code> r;
                    for (auto & [y, s] : _first)
                        r.push_back(y);
                    return r;
                }

                auto path_to(Code y) const -> optional<vector<Code>>
                {
                    auto it = _first.find(y);
                    if (it == _first.end())
                        return std::nullopt;
                    vector<Code> path;
                    State s = it->second;
                    while (s != _root) {
                        path.push_back(s.first);
                        s = _parent.at(s);
                    }
                    path.push_back(_root.first);
                    std::reverse(path.begin(), path.end());
                    return path;
                }
        };
    }

    auto is_forward_consistent(const CompromiserAssignment & alpha) -> Verdict
    {
        auto & inst = alpha.instance();
        for (Code x : inst.lexicographic_codes()) {
            AgentSet A = alpha(x);
            if (A.empty())
                continue;
            optional<Witness> found;
            for_each_variation(inst, x, A, [&](Code y) {
                AgentSet D = diff(inst, x, y);
                if (D == A)
                    return true;
                AgentSet need = A - D;
                if (need.subset_of(alpha(y)))
                    return true;
                Witness w;
                w.reason = alpha(y).empty() ? "moving part of the compromisers reaches a feasible allocation"
                                            : "compromisers who have not moved are dropped";
                w.allocations = {{"x", x}, {"y", y}};
                w.agents = need - alpha(y);
                found = std::move(w);
                return false;
            });
            if (found)
                return Verdict::fail(std::move(*found));
        }
        return Verdict::pass();
    }

    auto i_connected(const CompromiserAssignment & alpha, Code x, Code y, int i) -> optional<vector<Code>>
    {
        if (alpha(x).empty() || alpha(y).empty())
            return std::nullopt;
        return ConnectSearch{alpha, x, i}.path_to(y);
    }

    auto i_connected_set(const CompromiserAssignment & alpha, Code x, int i) -> vector<Code>
    {
        if (alpha(x).empty())
            return {};
        return ConnectSearch{alpha, x, i}.reached();
    }

    auto is_backward_consistent(const CompromiserAssignment & alpha, Reading reading) -> Verdict
    {
        auto & inst = alpha.instance();
        auto rank = allocation_order(inst);
        for (Code x : inst.lexicographic_codes()) {
            AgentSet A = alpha(x);
            for (int i : A.members()) {
                ConnectSearch search{alpha, x, i};
                auto ys = search.reached();
                std::sort(ys.begin(), ys.end(), [&](Code a, Code b) { return rank[a] < rank[b]; });
                vector<bool> checked(std::size_t{1} << inst.agent_count(), false);
                for (Code y : ys) {
                    AgentSet T = alpha(y);
                    T.erase(i);
                    if (checked[T.bits()])
                        continue;
                    checked[T.bits()] = true;
                    optional<Witness> found;
                    for_each_variation(inst, x, T, [&](Code xp) {
                        AgentSet at = alpha(xp);
                        if (at.contains(i) || (at.empty() && reading == Reading::relaxed))
                            return true;
                        Witness w;
                        w.reason = at.empty() ? "a branch from the chain's end is feasible" : "the chain's initiator is not a compromiser on a branch";
                        w.allocations = {{"x", x}, {"y", y}, {"x'", xp}};
                        w.agents = AgentSet::single(i);
                        w.path = *search.path_to(y);
                        found = std::move(w);
                        return false;
                    });
                    if (found)
                        return Verdict::fail(std::move(*found));
                }
            }
        }
        return Verdict::pass();
    }

    auto is_consistent(const CompromiserAssignment & alpha, Reading reading) -> Verdict
    {
        if (auto v = is_forward_consistent(alpha); ! v)
            return v;
        return is_backward_consistent(alpha, reading);
    }

    namespace
    {
        auto disagreement(const MechanismTable & f, const MechanismTable & g, ProfileIndex p, const char * reason) -> Witness
        {
            Witness w;
            w.reason = reason;
            w.profiles = {{"profile", f.space().profile(p)}};
            w.allocations = {{"first", f[p]}, {"second", g[p]}};
            return w;
        }

        auto try_tabulate(const CompromiserAssignment & alpha, ProfileIndex budget) -> std::variant<MechanismTable, ProfileIndex>
        {
            try {
                return tabulate(alpha, budget);
            }
            catch (const NotImplementable & e) {
                return e.witness;
            }
        }

        auto exhaustion(const CompromiserAssignment & alpha, ProfileIndex p, ProfileIndex budget, const char * reason) -> Witness
        {
            Witness w;
            w.reason = reason;
            w.profiles = {{"profile", ProfileSpace{alpha.instance(), budget}.profile(p)}};
            return w;
        }
    }

    auto verify_subset_equivalence(const CompromiserAssignment & alpha, const CompromiserAssignment & sub, ProfileIndex budget)
        -> ClaimReport
    {
        ClaimReport r;
        if (! sub.constraint().same_set(alpha.constraint()))
            r.hypothesis_failure = "the assignments are for different constraints";
        else if (! sub.pointwise_subset_of(alpha))
            r.hypothesis_failure = "the smaller assignment is not pointwise inside the larger";
        else if (! is_forward_consistent(alpha))
            r.hypothesis_failure = "the larger assignment is not forward consistent";

        auto big = try_tabulate(alpha, budget);
        if (auto * p = std::get_if<ProfileIndex>(&big)) {
            if (! r.hypothesis_failure)
                r.hypothesis_failure = "the larger assignment is not implementable";
            r.conclusion = Verdict::fail(exhaustion(alpha, *p, budget, "the larger assignment exhausts an agent"));
            return r;
        }
        auto small = try_tabulate(sub, budget);
        if (auto * p = std::get_if<ProfileIndex>(&small)) {
            r.conclusion = Verdict::fail(exhaustion(sub, *p, budget, "the smaller assignment exhausts an agent"));
            return r;
        }
        auto & f = std::get<MechanismTable>(big);
        auto & g = std::get<MechanismTable>(small);
        if (auto p = first_disagreement(f, g))
            r.conclusion = Verdict::fail(disagreement(f, g, *p, "the two assignments induce different mechanisms"));
        return r;
    }

    auto verify_union_closure(const CompromiserAssignment & alpha, const CompromiserAssignment & other, ProfileIndex budget)
        -> ClaimReport
    {
        ClaimReport r;
        auto a = try_tabulate(alpha, budget);
        auto b = try_tabulate(other, budget);
        if (! std::holds_alternative<MechanismTable>(a) || ! std::holds_alternative<MechanismTable>(b)) {
            r.hypothesis_failure = "an assignment is not implementable";
            return r;
        }
        auto & f = std::get<MechanismTable>(a);
        auto & g = std::get<MechanismTable>(b);
        if (! mechanisms_equal(f, g)) {
            r.hypothesis_failure = "the assignments induce different mechanisms";
            return r;
        }
        if (! is_group_strategy_proof(f))
            r.hypothesis_failure = "the common mechanism is not group strategy-proof";

        auto u = try_tabulate(alpha.united(other), budget);
        if (auto * p = std::get_if<ProfileIndex>(&u)) {
            r.conclusion = Verdict::fail(exhaustion(alpha, *p, budget, "the union exhausts an agent"));
            return r;
        }
        auto & h = std::get<MechanismTable>(u);
        if (auto p = first_disagreement(f, h))
            r.conclusion = Verdict::fail(disagreement(f, h, *p, "the union induces a different mechanism"));
        return r;
    }
}
