#include <lpm/enumerate.hh>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

using std::vector;

namespace lpm
{
    namespace
    {
        /// Bit S of a domain is set when agent set S is still a candidate cell value.
        using Domain = std::uint64_t;

        constexpr int implementability_origin = 0;

        struct Pending
        {
            int origin;
            std::uint64_t bits;
        };

        struct Work
        {
            int origin;
            Code z;
            std::uint64_t bits;
        };

        /// Depth-first search over cell values with three propagators:
        ///  - forward consistency as a binary constraint between infeasible
        ///    cells (arc consistency over bitmask domains) plus a unary one
        ///    against feasible allocations;
        ///  - implementability as reachability over (allocation, abandoned
        ///    objects) states, where every compromiser moves at once;
        ///  - backward consistency as one such reachability per (x, i) origin
        ///    with subset moves, checking branches as chain ends get decided.
        /// Every propagator only ever adds states or removes values, so an
        /// undo trail restores the parent node exactly.
        class Search
        {
            private:
                const Constraint & _constraint;
                const Instance & _inst;
                EnumerationOptions _options;
                int _n, _m;
                int _sets;          // 2^n
                Domain _all;        // every nonempty agent set
                std::uint64_t _stride; // 2^(n m)
                std::uint64_t _full_objects;

                vector<Code> _cells;
                vector<int> _cell_index;
                vector<Domain> _dom;
                vector<std::uint8_t> _value;
                vector<vector<std::pair<Code, std::uint32_t>>> _neighbors;
                vector<Domain> _allowed; // [D * sets + S]
                vector<Domain> _with_agent;

                vector<vector<std::uint64_t>> _visited; // per origin, lazily sized
                vector<std::uint32_t> _checked;         // per backward origin: T sets already swept
                vector<vector<Pending>> _pending;

                vector<std::pair<Code, Domain>> _dom_trail;
                vector<std::pair<int, std::uint64_t>> _visit_trail;
                vector<Code> _pending_trail;
                vector<std::pair<int, std::uint32_t>> _checked_trail;

                vector<Code> _ac;
                vector<Work> _work;
                bool _root_ok = true;

                std::chrono::steady_clock::time_point _start;
                bool _stopped = false;

                struct Mark
                {
                    std::size_t dom, visit, pending, checked;
                };

                auto mark() const -> Mark { return {_dom_trail.size(), _visit_trail.size(), _pending_trail.size(), _checked_trail.size()}; }

                auto undo(const Mark & k) -> void
                {
                    while (_dom_trail.size() > k.dom) {
                        _dom[_dom_trail.back().first] = _dom_trail.back().second;
                        _dom_trail.pop_back();
                    }
                    while (_visit_trail.size() > k.visit) {
                        auto [o, idx] = _visit_trail.back();
                        _visited[o][idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
                        _visit_trail.pop_back();
                    }
                    while (_pending_trail.size() > k.pending) {
                        _pending[_pending_trail.back()].pop_back();
                        _pending_trail.pop_back();
                    }
                    while (_checked_trail.size() > k.checked) {
                        _checked[_checked_trail.back().first] = _checked_trail.back().second;
                        _checked_trail.pop_back();
                    }
                    _ac.clear();
                    _work.clear();
                }

                auto restrict(Code y, Domain d) -> bool
                {
                    if (d == _dom[y])
                        return true;
                    _dom_trail.emplace_back(y, _dom[y]);
                    _dom[y] = d;
                    if (0 == d)
                        return false;
                    if (_options.require_forward)
                        _ac.push_back(y);
                    return true;
                }

                auto exhausted(Code z, std::uint64_t bits, int j) const -> bool
                {
                    std::uint64_t held = (bits >> (j * _m)) & _full_objects;
                    held |= std::uint64_t{1} << _inst.object_of(z, j);
                    return held == _full_objects;
                }

                auto origin_agent(int o) const -> int { return (o - 1) % _n; }
                auto origin_cell(int o) const -> Code { return _cells[(o - 1) / _n]; }
                auto origin_of(Code x, int i) const -> int { return 1 + _cell_index[x] * _n + i; }

                /// Returns false if the state was already seen.
                auto visit(int o, Code y, std::uint64_t bits) -> bool
                {
                    auto & v = _visited[o];
                    if (v.empty())
                        v.assign((std::uint64_t(_inst.allocation_count()) * _stride + 63) / 64, 0);
                    std::uint64_t idx = std::uint64_t(y) * _stride + bits;
                    auto & word = v[idx >> 6];
                    std::uint64_t b = std::uint64_t{1} << (idx & 63);
                    if (word & b)
                        return false;
                    word |= b;
                    _visit_trail.emplace_back(o, idx);
                    return true;
                }

                auto arrive(int o, Code y, std::uint64_t bits) -> bool
                {
                    if (_constraint.feasible(y) || ! visit(o, y, bits))
                        return true;
                    if (_value[y]) {
                        _work.push_back({o, y, bits});
                        return true;
                    }
                    _pending[y].push_back({o, bits});
                    _pending_trail.push_back(y);
                    if (o == implementability_origin)
                        for (int j = 0; j < _n; ++j)
                            if (exhausted(y, bits, j) && ! restrict(y, _dom[y] & ~_with_agent[j]))
                                return false;
                    return true;
                }

                /// Every way for the agents in `movers` to step to objects they
                /// have not held yet.
                template <typename F_>
                auto moves(Code z, std::uint64_t bits, std::uint32_t movers, const F_ & emit) -> bool
                {
                    int members[8];
                    int k = 0;
                    for (int j = 0; j < _n; ++j)
                        if ((movers >> j) & 1u)
                            members[k++] = j;
                    auto rec = [&](auto & self, int at, Code y, std::uint64_t b) -> bool {
                        if (at == k)
                            return emit(y, b);
                        int j = members[at], cur = _inst.object_of(z, j);
                        std::uint64_t left = b | (std::uint64_t{1} << (j * _m + cur));
                        for (int a = 0; a < _m; ++a)
                            if (a != cur && ! ((bits >> (j * _m + a)) & 1u))
                                if (! self(self, at + 1, _inst.with_object(y, j, a), left))
                                    return false;
                        return true;
                    };
                    return rec(rec, 0, z, bits);
                }

                /// Backward condition for origin (x, i) against a decided chain end.
                auto sweep_branches(int o, Code y) -> bool
                {
                    const int i = origin_agent(o);
                    const Code x = origin_cell(o);
                    std::uint32_t T = _value[y] & ~(1u << i);
                    if (0 == T || ((_checked[o] >> T) & 1u))
                        return true;
                    _checked_trail.emplace_back(o, _checked[o]);
                    _checked[o] |= 1u << T;

                    int members[8];
                    int k = 0;
                    for (int j = 0; j < _n; ++j)
                        if ((T >> j) & 1u)
                            members[k++] = j;
                    auto rec = [&](auto & self, int at, Code xp) -> bool {
                        if (at == k) {
                            if (_constraint.feasible(xp))
                                return _options.reading == Reading::relaxed;
                            if (_value[xp])
                                return (_value[xp] >> i) & 1u;
                            return restrict(xp, _dom[xp] & _with_agent[i]);
                        }
                        for (int a = 0; a < _m; ++a)
                            if (! self(self, at + 1, _inst.with_object(xp, members[at], a)))
                                return false;
                        return true;
                    };
                    return rec(rec, 0, x);
                }

                auto process(const Work & w) -> bool
                {
                    std::uint32_t S = _value[w.z];
                    auto step = [&](Code y, std::uint64_t b) { return arrive(w.origin, y, b); };
                    if (w.origin == implementability_origin) {
                        for (int j = 0; j < _n; ++j)
                            if (((S >> j) & 1u) && exhausted(w.z, w.bits, j))
                                return false;
                        return moves(w.z, w.bits, S, step);
                    }
                    if (! sweep_branches(w.origin, w.z))
                        return false;
                    for (std::uint32_t sub = S; sub; sub = (sub - 1) & S)
                        if (! moves(w.z, w.bits, sub, step))
                            return false;
                    return true;
                }

                auto propagate() -> bool
                {
                    while (! _work.empty() || ! _ac.empty()) {
                        if (! _work.empty()) {
                            Work w = _work.back();
                            _work.pop_back();
                            if (! process(w))
                                return false;
                            continue;
                        }
                        Code x = _ac.back();
                        _ac.pop_back();
                        Domain d = _dom[x];
                        for (auto [y, D] : _neighbors[x]) {
                            Domain support = 0;
                            for (Domain rest = d; rest; rest &= rest - 1)
                                support |= _allowed[D * _sets + std::countr_zero(rest)];
                            if (! restrict(y, _dom[y] & support))
                                return false;
                        }
                    }
                    return true;
                }

                auto assign(Code x, std::uint32_t S) -> bool
                {
                    _value[x] = std::uint8_t(S);
                    if (! restrict(x, Domain{1} << S))
                        return false;
                    for (const auto & p : _pending[x])
                        _work.push_back({p.origin, x, p.bits});
                    if (_options.require_backward)
                        for (int i = 0; i < _n; ++i)
                            if ((S >> i) & 1u) {
                                int o = origin_of(x, i);
                                auto first = [&](Code y, std::uint64_t b) { return arrive(o, y, b); };
                                if (! moves(x, 0, 1u << i, first))
                                    return false;
                            }
                    return propagate();
                }

                auto out_of_budget(std::uint64_t limit) -> bool
                {
                    if (nodes >= limit)
                        return true;
                    if (_options.seconds > 0 && (nodes & 1023) == 0) {
                        std::chrono::duration<double> spent = std::chrono::steady_clock::now() - _start;
                        return spent.count() > _options.seconds;
                    }
                    return false;
                }

                template <typename Emit_>
                auto descend(std::size_t k, const Emit_ & emit, std::mt19937_64 * rng, std::uint64_t limit) -> bool
                {
                    if (k == _cells.size()) {
                        vector<AgentSet> cells(_inst.allocation_count());
                        for (Code x : _cells)
                            cells[x] = AgentSet{_value[x]};
                        return emit(cells);
                    }
                    Code x = _cells[k];
                    vector<std::uint32_t> values;
                    for (Domain rest = _dom[x]; rest; rest &= rest - 1)
                        values.push_back(std::uint32_t(std::countr_zero(rest)));
                    if (rng)
                        std::shuffle(values.begin(), values.end(), *rng);
                    for (std::uint32_t S : values) {
                        if (out_of_budget(limit)) {
                            _stopped = true;
                            return false;
                        }
                        ++nodes;
                        Mark k0 = mark();
                        bool go = true;
                        if (assign(x, S))
                            go = descend(k + 1, emit, rng, limit);
                        else
                            ++pruned;
                        undo(k0);
                        _value[x] = 0;
                        if (! go)
                            return false;
                    }
                    return true;
                }

            public:
                std::uint64_t nodes = 0;
                std::uint64_t pruned = 0;

                Search(const Constraint & constraint, const EnumerationOptions & options) :
                    _constraint(constraint),
                    _inst(constraint.instance()),
                    _options(options),
                    _n(_inst.agent_count()),
                    _m(_inst.object_count())
                {
                    if (_n > 5)
                        throw InputError{"enumeration supports at most 5 agents"};
                    if (_n * _m > 30 || (std::uint64_t(_inst.allocation_count()) << (_n * _m)) > (std::uint64_t{1} << 24))
                        throw InputError{"instance too large to enumerate"};
                    _sets = 1 << _n;
                    _all = ((Domain{1} << _sets) - 1) & ~Domain{1};
                    _stride = std::uint64_t{1} << (_n * _m);
                    _full_objects = (std::uint64_t{1} << _m) - 1;
                    _start = std::chrono::steady_clock::now();

                    const Code N = _inst.allocation_count();
                    _cells = constraint.infeasible_codes();
                    _cell_index.assign(N, -1);
                    for (std::size_t k = 0; k < _cells.size(); ++k)
                        _cell_index[_cells[k]] = int(k);
                    _dom.assign(N, 0);
                    _value.assign(N, 0);
                    _pending.resize(N);
                    _neighbors.resize(N);
                    _visited.resize(1 + _cells.size() * _n);
                    _checked.assign(_visited.size(), 0);

                    _with_agent.assign(_n, 0);
                    for (int j = 0; j < _n; ++j)
                        for (int S = 1; S < _sets; ++S)
                            if ((S >> j) & 1)
                                _with_agent[j] |= Domain{1} << S;

                    // S_y is compatible with S_x across difference D when both
                    // directions of the forward condition hold
                    _allowed.assign(std::size_t(_sets) * _sets, 0);
                    for (int D = 1; D < _sets; ++D)
                        for (int Sx = 1; Sx < _sets; ++Sx)
                            for (int Sy = 1; Sy < _sets; ++Sy) {
                                bool there = (D & ~Sx) || ! ((Sx & ~D) & ~Sy);
                                bool back = (D & ~Sy) || ! ((Sy & ~D) & ~Sx);
                                if (there && back)
                                    _allowed[D * _sets + Sx] |= Domain{1} << Sy;
                            }

                    if (_options.within && ! _options.within->constraint().same_set(constraint))
                        throw InputError{"the bounding assignment is for a different constraint"};
                    for (Code x : _cells) {
                        Domain d = _all;
                        if (_options.within) {
                            std::uint32_t bound = (*_options.within)(x).bits();
                            for (int S = 1; S < _sets; ++S)
                                if (S & ~bound)
                                    d &= ~(Domain{1} << S);
                        }
                        if (_options.require_forward)
                            for (Code y = 0; y < N; ++y) {
                                if (y == x)
                                    continue;
                                std::uint32_t D = diff(_inst, x, y).bits();
                                if (constraint.feasible(y)) {
                                    // a proper superset of D would leave someone behind at y
                                    for (int S = 1; S < _sets; ++S)
                                        if ((S & D) == D && S != int(D))
                                            d &= ~(Domain{1} << S);
                                }
                                else
                                    _neighbors[x].emplace_back(y, D);
                            }
                        _dom[x] = d;
                        if (0 == d)
                            _root_ok = false;
                    }
                    if (! _root_ok)
                        return;
                    for (Code x : _cells)
                        if (! arrive(implementability_origin, x, 0)) {
                            _root_ok = false;
                            return;
                        }
                    if (_options.require_forward)
                        _ac = _cells;
                    _root_ok = propagate();
                    // the root state is never undone
                    _dom_trail.clear();
                    _visit_trail.clear();
                    _pending_trail.clear();
                    _checked_trail.clear();
                }

                auto stopped() const -> bool { return _stopped; }

                /// Emit returns false to stop. Returns true when the whole tree
                /// was searched.
                template <typename Emit_>
                auto run(const Emit_ & emit, std::mt19937_64 * rng, std::uint64_t limit) -> bool
                {
                    _stopped = false;
                    if (! _root_ok)
                        return true;
                    bool finished = descend(0, emit, rng, limit);
                    return finished && ! _stopped;
                }
        };

        auto permutations(int k) -> vector<vector<int>>
        {
            vector<int> p(k);
            std::iota(p.begin(), p.end(), 0);
            vector<vector<int>> all;
            do
                all.push_back(p);
            while (std::next_permutation(p.begin(), p.end()));
            return all;
        }

        /// The group acting on the cell vector of one constraint.
        class Action
        {
            private:
                vector<Code> _cells;
                vector<vector<std::size_t>> _preimage; // per element, per cell index
                vector<vector<std::uint32_t>> _sets;   // per element, agent-set image

            public:
                Action(const Constraint & constraint, const SymmetryGroup & group)
                {
                    auto & inst = constraint.instance();
                    _cells = constraint.infeasible_codes();
                    vector<std::size_t> index(inst.allocation_count(), 0);
                    for (std::size_t k = 0; k < _cells.size(); ++k)
                        index[_cells[k]] = k;
                    const std::uint32_t sets = 1u << inst.agent_count();
                    for (const auto & g : group.elements) {
                        vector<std::size_t> pre(_cells.size());
                        for (std::size_t k = 0; k < _cells.size(); ++k) {
                            Code image = g.apply(inst, _cells[k]);
                            if (constraint.feasible(image))
                                throw InputError{"symmetry does not preserve the constraint"};
                            pre[index[image]] = k;
                        }
                        _preimage.push_back(std::move(pre));
                        vector<std::uint32_t> s(sets);
                        for (std::uint32_t S = 0; S < sets; ++S)
                            s[S] = g.apply(AgentSet{S}).bits();
                        _sets.push_back(std::move(s));
                    }
                }

                /// <0, 0, >0 as the image under element e is below, equal to, above alpha.
                auto compare(const vector<AgentSet> & cells, std::size_t e) const -> int
                {
                    for (std::size_t k = 0; k < _cells.size(); ++k) {
                        std::uint32_t image = _sets[e][cells[_cells[_preimage[e][k]]].bits()];
                        std::uint32_t own = cells[_cells[k]].bits();
                        if (image != own)
                            return image < own ? -1 : 1;
                    }
                    return 0;
                }

                /// 0 if alpha is not the orbit's minimum, otherwise the orbit size.
                auto orbit_if_canonical(const vector<AgentSet> & cells) const -> std::uint64_t
                {
                    std::uint64_t stabilizer = 0;
                    for (std::size_t e = 0; e < _preimage.size(); ++e) {
                        int c = compare(cells, e);
                        if (c < 0)
                            return 0;
                        if (c == 0)
                            ++stabilizer;
                    }
                    return _preimage.size() / stabilizer;
                }

                auto orbit(const vector<AgentSet> & cells) const -> std::uint64_t
                {
                    std::uint64_t stabilizer = 0;
                    for (std::size_t e = 0; e < _preimage.size(); ++e)
                        if (compare(cells, e) == 0)
                            ++stabilizer;
                    return _preimage.size() / stabilizer;
                }
        };

        /// Distinct mechanisms by table hash, with full comparison on collision.
        class MechanismSet
        {
            private:
                std::unordered_map<std::uint64_t, vector<MechanismTable>> _seen;
                std::uint64_t _count = 0;

            public:
                auto insert(const MechanismTable & f) -> bool
                {
                    auto & bucket = _seen[f.hash()];
                    for (const auto & g : bucket)
                        if (mechanisms_equal(f, g))
                            return false;
                    bucket.push_back(f);
                    ++_count;
                    return true;
                }

                auto size() const -> std::uint64_t { return _count; }
        };
    }

    auto Symmetry::apply(const Instance & instance, Code x) const -> Code
    {
        Code y = 0;
        for (int j = 0; j < instance.agent_count(); ++j)
            y = instance.with_object(y, agents[j], objects[instance.object_of(x, j)]);
        return y;
    }

    auto Symmetry::apply(AgentSet s) const -> AgentSet
    {
        AgentSet r;
        for (int j : s.members())
            r.insert(agents[j]);
        return r;
    }

    auto Symmetry::apply(const CompromiserAssignment & alpha) const -> CompromiserAssignment
    {
        auto & inst = alpha.instance();
        vector<AgentSet> cells(inst.allocation_count());
        for (Code x = 0; x < inst.allocation_count(); ++x)
            cells[apply(inst, x)] = apply(alpha(x));
        return CompromiserAssignment{alpha.constraint(), std::move(cells)};
    }

    auto constraint_symmetries(const Constraint & constraint) -> SymmetryGroup
    {
        auto & inst = constraint.instance();
        auto feasible = constraint.feasible_codes();
        SymmetryGroup group;
        auto agent_perms = permutations(inst.agent_count());
        auto object_perms = permutations(inst.object_count());
        for (const auto & sigma : agent_perms)
            for (const auto & pi : object_perms) {
                Symmetry g{sigma, pi};
                bool keeps = std::all_of(feasible.begin(), feasible.end(), [&](Code x) { return constraint.feasible(g.apply(inst, x)); });
                if (keeps)
                    group.elements.push_back(std::move(g));
            }
        return group;
    }

    auto is_canonical(const CompromiserAssignment & alpha, const SymmetryGroup & group) -> bool
    {
        return Action{alpha.constraint(), group}.orbit_if_canonical(alpha.cells()) > 0;
    }

    auto orbit_size(const CompromiserAssignment & alpha, const SymmetryGroup & group) -> std::uint64_t
    {
        return Action{alpha.constraint(), group}.orbit(alpha.cells());
    }

    auto enumerate_consistent(const Constraint & constraint, const EnumerationOptions & options, const AssignmentSink & sink)
        -> EnumerationSummary
    {
        if (options.node_budget == 0)
            throw InputError{"node budget must be positive"};
        EnumerationSummary summary;
        Search search{constraint, options};
        std::optional<Action> action;
        if (options.quotient_symmetry)
            action.emplace(constraint, constraint_symmetries(constraint));
        auto space = std::make_shared<const ProfileSpace>(constraint.instance(), default_profile_budget);
        MechanismSet all, emitted;

        auto emit = [&](const vector<AgentSet> & cells) {
            ++summary.count;
            CompromiserAssignment alpha{constraint, cells};
            std::optional<MechanismTable> table;
            if (options.dedupe_by_mechanism) {
                table = tabulate(alpha, space);
                all.insert(*table);
            }
            std::uint64_t orbit = 1;
            if (action) {
                orbit = action->orbit_if_canonical(cells);
                if (0 == orbit)
                    return true;
            }
            ++summary.orbit_count;
            if (table && ! emitted.insert(*table))
                return true;
            return sink(alpha, orbit);
        };
        summary.complete = search.run(emit, nullptr, options.node_budget);
        if (! action)
            summary.orbit_count = summary.count;
        summary.mechanism_count = all.size();
        summary.nodes = search.nodes;
        summary.pruned_nodes = search.pruned;
        return summary;
    }

    auto enumerate_consistent(const Constraint & constraint, const EnumerationOptions & options) -> EnumerationResult
    {
        EnumerationResult r;
        r.summary = enumerate_consistent(constraint, options, [&](const CompromiserAssignment & alpha, std::uint64_t orbit) {
            r.assignments.push_back(alpha);
            if (options.quotient_symmetry)
                r.orbit_sizes.push_back(orbit);
            return true;
        });
        return r;
    }

    auto sample_assignment(const Constraint & constraint, const EnumerationOptions & options, std::mt19937_64 & rng)
        -> std::optional<CompromiserAssignment>
    {
        Search search{constraint, options};
        std::optional<CompromiserAssignment> found;
        auto emit = [&](const vector<AgentSet> & cells) {
            found.emplace(constraint, cells);
            return false;
        };
        // restarts keep one bad early choice from eating the whole budget
        const std::uint64_t per_restart = 64 + 16 * std::uint64_t(constraint.infeasible_count());
        while (! found && search.nodes < options.node_budget) {
            std::uint64_t limit = std::min(options.node_budget, search.nodes + per_restart);
            if (search.run(emit, &rng, limit) && ! found)
                return std::nullopt; // searched everything: nothing exists
        }
        return found;
    }
}
