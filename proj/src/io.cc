#include <lpm/io.hh>

#include <fstream>
#include <sstream>

using std::string;
using std::vector;

namespace lpm::io
{
    namespace
    {
        [[noreturn]] auto fail(const string & where, const string & what) -> void
        {
            throw InputError{where + ": " + what};
        }

        auto member(const Json & j, const string & key, const string & where) -> const Json &
        {
            if (! j.is_object())
                fail(where, "expected an object");
            auto it = j.find(key);
            if (it == j.end())
                fail(where, "missing \"" + key + "\"");
            return *it;
        }

        auto strings(const Json & j, const string & where) -> vector<string>
        {
            if (! j.is_array())
                fail(where, "expected an array of names");
            vector<string> r;
            for (const auto & e : j) {
                if (! e.is_string())
                    fail(where, "expected a name, got " + e.dump());
                r.push_back(e.get<string>());
            }
            return r;
        }

        auto text(const Json & j, const string & where) -> string
        {
            if (! j.is_string())
                fail(where, "expected a string, got " + j.dump());
            return j.get<string>();
        }

        auto agent(const Instance & inst, const string & name, const string & where) -> int
        {
            try {
                return inst.agent_index(name);
            }
            catch (const InputError &) {
                fail(where, "unknown agent '" + name + "'");
            }
        }

        auto object(const Instance & inst, const string & name, const string & where) -> int
        {
            try {
                return inst.object_index(name);
            }
            catch (const InputError &) {
                fail(where, "unknown object '" + name + "'");
            }
        }

        auto instance_from(const Json & j, const string & where) -> Instance
        {
            auto agents = strings(member(j, "agents", where), where + ": agents");
            auto objects = strings(member(j, "objects", where), where + ": objects");
            for (const auto & o : objects)
                if (o.find(',') != string::npos)
                    fail(where + ": objects", "object names may not contain ','");
            try {
                return Instance{agents, objects};
            }
            catch (const InputError & e) {
                fail(where, e.what());
            }
        }

        auto allocation_from(const Instance & inst, const Json & j, const string & where) -> Code
        {
            if (j.is_string())
                return allocation_from_key(inst, j.get<string>());
            auto names = strings(j, where);
            if (int(names.size()) != inst.agent_count())
                fail(where, "allocation needs one object per agent");
            vector<int> objs;
            for (const auto & s : names)
                objs.push_back(object(inst, s, where));
            return inst.encode(objs);
        }

        auto agent_set(const Instance & inst, const Json & j, const string & where) -> AgentSet
        {
            AgentSet s;
            for (const auto & name : strings(j, where))
                s.insert(agent(inst, name, where));
            return s;
        }

        auto agents_json(const Instance & inst, AgentSet s) -> Json
        {
            Json r = Json::array();
            for (int i : s.members())
                r.push_back(inst.agent_name(i));
            return r;
        }

        auto ranking(const Instance & inst, const Json & j, const string & where) -> Preference
        {
            vector<int> r;
            vector<bool> seen(inst.object_count(), false);
            for (const auto & s : strings(j, where)) {
                int a = object(inst, s, where);
                if (seen[a])
                    fail(where, "object '" + s + "' ranked twice");
                seen[a] = true;
                r.push_back(a);
            }
            if (int(r.size()) != inst.object_count())
                fail(where, "a ranking must list every object");
            return Preference{r};
        }

        auto trace_json(const Instance & inst, const Trace & t) -> Json
        {
            Json r = Json::array();
            for (const auto & s : t.steps)
                r.push_back({{"allocation", allocation_to_json(inst, s.allocation)}, {"compromisers", agents_json(inst, s.compromisers)}});
            return r;
        }
    }

    auto parse_json(const string & text, const string & where) -> Json
    {
        try {
            return Json::parse(text);
        }
        catch (const nlohmann::json::parse_error & e) {
            fail(where, string{"malformed JSON: "} + e.what());
        }
    }

    auto read_json(const string & path) -> Json
    {
        std::ifstream in{path};
        if (! in)
            fail(path, "cannot open file");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json(ss.str(), path);
    }

    auto allocation_key(const Instance & inst, Code x) -> string
    {
        string s;
        for (int j = 0; j < inst.agent_count(); ++j) {
            if (j)
                s += ',';
            s += inst.object_name(inst.object_of(x, j));
        }
        return s;
    }

    auto allocation_from_key(const Instance & inst, const string & key) -> Code
    {
        vector<int> objs;
        std::stringstream ss{key};
        string part;
        while (std::getline(ss, part, ','))
            objs.push_back(object(inst, part, "allocation \"" + key + "\""));
        if (int(objs.size()) != inst.agent_count())
            fail("allocation \"" + key + "\"", "needs one object per agent");
        return inst.encode(objs);
    }

    auto allocation_to_json(const Instance & inst, Code x) -> Json
    {
        Json r = Json::array();
        for (int j = 0; j < inst.agent_count(); ++j)
            r.push_back(inst.object_name(inst.object_of(x, j)));
        return r;
    }

    auto constraint_from_json(const Json & j) -> Constraint
    {
        const string where = "constraint";
        auto inst = instance_from(j, where);
        auto kind = text(member(j, "kind", where), where + ": kind");
        try {
            if (kind == "house")
                return Constraint::house(inst);
            if (kind == "social")
                return Constraint::social(inst);
            if (kind == "one_sided")
                return Constraint::one_sided(inst);
            if (kind == "school") {
                const auto & caps = member(j, "capacities", where);
                vector<int> q(inst.object_count(), 0);
                if (caps.is_array()) {
                    if (int(caps.size()) != inst.object_count())
                        fail(where + ": capacities", "needs one entry per object");
                    for (int a = 0; a < inst.object_count(); ++a)
                        q[a] = caps[a].get<int>();
                }
                else if (caps.is_object()) {
                    for (const auto & [name, v] : caps.items())
                        q[object(inst, name, where + ": capacities")] = v.get<int>();
                }
                else
                    fail(where + ": capacities", "expected an array or an object");
                return Constraint::school(inst, q);
            }
            if (kind == "two_sided") {
                vector<int> men, women;
                for (const auto & s : strings(member(j, "men", where), where + ": men"))
                    men.push_back(agent(inst, s, where + ": men"));
                for (const auto & s : strings(member(j, "women", where), where + ": women"))
                    women.push_back(agent(inst, s, where + ": women"));
                return Constraint::two_sided(inst, men, women);
            }
            if (kind == "explicit") {
                vector<Code> codes;
                if (j.contains("feasible")) {
                    for (const auto & x : member(j, "feasible", where))
                        codes.push_back(allocation_from(inst, x, where + ": feasible"));
                    return Constraint::explicit_set(inst, codes);
                }
                vector<bool> bad(inst.allocation_count(), false);
                for (const auto & x : member(j, "infeasible", where))
                    bad[allocation_from(inst, x, where + ": infeasible")] = true;
                for (Code c = 0; c < inst.allocation_count(); ++c)
                    if (! bad[c])
                        codes.push_back(c);
                return Constraint::explicit_set(inst, codes);
            }
        }
        catch (const nlohmann::json::exception & e) {
            fail(where, e.what());
        }
        catch (const InputError & e) {
            // messages from fail() already carry a location
            if (string{e.what()}.starts_with(where))
                throw;
            fail(where, e.what());
        }
        fail(where + ": kind", "unknown kind '" + kind + "'");
    }

    auto to_json(const Constraint & c) -> Json
    {
        auto & inst = c.instance();
        auto & g = c.generator();
        Json j;
        j["agents"] = inst.agents();
        j["objects"] = inst.objects();
        j["kind"] = constraint_kind_name(g.kind);
        switch (g.kind) {
            case ConstraintKind::school: j["capacities"] = g.capacities; break;
            case ConstraintKind::two_sided:
            {
                Json men = Json::array(), women = Json::array();
                for (int i : g.men)
                    men.push_back(inst.agent_name(i));
                for (int i : g.women)
                    women.push_back(inst.agent_name(i));
                j["men"] = men;
                j["women"] = women;
                break;
            }
            case ConstraintKind::explicit_set:
            {
                Json f = Json::array();
                for (Code x : inst.lexicographic_codes())
                    if (c.feasible(x))
                        f.push_back(allocation_to_json(inst, x));
                j["feasible"] = f;
                break;
            }
            default: break;
        }
        return j;
    }

    auto alpha_from_json(const Json & j, const std::optional<Constraint> & constraint) -> CompromiserAssignment
    {
        const string where = "alpha";
        std::optional<Constraint> c = constraint;
        if (! c && j.is_object() && j.contains("constraint"))
            c = constraint_from_json(j["constraint"]);
        auto inst = c ? c->instance() : instance_from(j, where);
        if (c && j.is_object() && j.contains("agents")) {
            auto declared = instance_from(j, where);
            if (! (declared == inst))
                fail(where, "agents or objects differ from the constraint's");
        }
        const auto & cells = member(j, "cells", where);
        if (! cells.is_object())
            fail(where + ": cells", "expected an object keyed by allocation");
        vector<AgentSet> v(inst.allocation_count());
        vector<bool> given(inst.allocation_count(), false);
        for (const auto & [key, agents] : cells.items()) {
            const string at = where + ": cells: \"" + key + "\"";
            Code x = allocation_from_key(inst, key);
            if (given[x])
                fail(at, "allocation listed twice");
            given[x] = true;
            v[x] = agent_set(inst, agents, at);
            if (v[x].empty())
                fail(at, "empty cell");
            if (c && c->feasible(x))
                fail(at, "cell on a feasible allocation");
        }
        if (! c) {
            bool any_feasible = std::find(given.begin(), given.end(), false) != given.end();
            if (! any_feasible)
                fail(where, "every allocation has a cell, so nothing is feasible");
            return CompromiserAssignment::from_cells(inst, v);
        }
        for (Code x = 0; x < inst.allocation_count(); ++x)
            if (! c->feasible(x) && ! given[x])
                fail(where + ": cells", "missing cell for infeasible allocation \"" + allocation_key(inst, x) + "\"");
        return CompromiserAssignment{*c, v};
    }

    auto to_json(const CompromiserAssignment & alpha) -> Json
    {
        auto & inst = alpha.instance();
        Json j;
        j["agents"] = inst.agents();
        j["objects"] = inst.objects();
        Json cells = Json::object();
        for (Code x : inst.lexicographic_codes())
            if (! alpha(x).empty())
                cells[allocation_key(inst, x)] = agents_json(inst, alpha(x));
        j["cells"] = cells;
        return j;
    }

    auto profile_from_json(const Instance & inst, const Json & j) -> Profile
    {
        const string where = "profile";
        if (! j.is_object())
            fail(where, "expected an object keyed by agent");
        Profile p(inst.agent_count());
        vector<bool> seen(inst.agent_count(), false);
        for (const auto & [name, r] : j.items()) {
            int i = agent(inst, name, where);
            seen[i] = true;
            p[i] = ranking(inst, r, where + ": " + name);
        }
        for (int i = 0; i < inst.agent_count(); ++i)
            if (! seen[i])
                fail(where, "no ranking for agent '" + inst.agent_name(i) + "'");
        return p;
    }

    auto to_json(const Instance & inst, const Profile & p) -> Json
    {
        Json j = Json::object();
        for (int i = 0; i < inst.agent_count(); ++i) {
            Json r = Json::array();
            for (int a : p[i].ranking())
                r.push_back(inst.object_name(a));
            j[inst.agent_name(i)] = r;
        }
        return j;
    }

    auto school_from_json(const Instance & inst, const Json & j) -> SchoolSpec
    {
        const string where = "school spec";
        SchoolSpec s;
        s.capacities.assign(inst.object_count(), 0);
        s.priorities.assign(inst.object_count(), {});
        try {
            const auto & caps = member(j, "capacities", where);
            if (caps.is_array()) {
                if (int(caps.size()) != inst.object_count())
                    fail(where + ": capacities", "needs one entry per object");
                for (int a = 0; a < inst.object_count(); ++a)
                    s.capacities[a] = caps[a].get<int>();
            }
            else
                for (const auto & [name, v] : caps.items())
                    s.capacities[object(inst, name, where + ": capacities")] = v.get<int>();
        }
        catch (const nlohmann::json::exception & e) {
            fail(where + ": capacities", e.what());
        }
        const auto & pri = member(j, "priorities", where);
        if (! pri.is_object())
            fail(where + ": priorities", "expected an object keyed by object");
        for (const auto & [name, list] : pri.items()) {
            const string at = where + ": priorities: " + name;
            auto & row = s.priorities[object(inst, name, at)];
            for (const auto & a : strings(list, at))
                row.push_back(agent(inst, a, at));
        }
        try {
            s.validate(inst);
        }
        catch (const InputError & e) {
            fail(where, e.what());
        }
        return s;
    }

    auto endowment_from_json(const Instance & inst, const Json & j) -> Endowment
    {
        const string where = "endowment spec";
        const auto & e = member(j, "endowment", where);
        if (! e.is_object())
            fail(where, "expected an object mapping agents to objects");
        Endowment s;
        s.owned.assign(inst.agent_count(), -1);
        for (const auto & [name, o] : e.items())
            s.owned[agent(inst, name, where)] = object(inst, text(o, where + ": " + name), where + ": " + name);
        try {
            s.validate(inst);
        }
        catch (const InputError & err) {
            fail(where, err.what());
        }
        return s;
    }

    auto order_from_json(const Instance & inst, const Json & j) -> DictatorOrder
    {
        const string where = "order spec";
        DictatorOrder d;
        for (const auto & a : strings(member(j, "order", where), where + ": order"))
            d.order.push_back(agent(inst, a, where + ": order"));
        try {
            d.validate(inst);
        }
        catch (const InputError & e) {
            fail(where, e.what());
        }
        return d;
    }

    auto marriage_from_json(const Instance & inst, const Json & j) -> MarriageSpec
    {
        const string where = "marriage spec";
        MarriageSpec m;
        for (const auto & a : strings(member(j, "men", where), where + ": men"))
            m.men.push_back(agent(inst, a, where + ": men"));
        for (const auto & a : strings(member(j, "women", where), where + ": women"))
            m.women.push_back(agent(inst, a, where + ": women"));
        try {
            m.validate(inst);
        }
        catch (const InputError & e) {
            fail(where, e.what());
        }
        return m;
    }

    auto to_json(const Instance & inst, const Witness & w) -> Json
    {
        Json j;
        j["reason"] = w.reason;
        if (! w.profiles.empty()) {
            Json p = Json::object();
            for (const auto & [name, prof] : w.profiles)
                p[name] = to_json(inst, prof);
            j["profiles"] = p;
        }
        if (! w.allocations.empty()) {
            Json a = Json::object();
            for (const auto & [name, x] : w.allocations)
                a[name] = allocation_to_json(inst, x);
            j["allocations"] = a;
        }
        if (! w.agents.empty())
            j["agents"] = agents_json(inst, w.agents);
        if (! w.path.empty()) {
            Json path = Json::array();
            for (Code x : w.path)
                path.push_back(allocation_to_json(inst, x));
            j["path"] = path;
        }
        return j;
    }

    auto to_json(const Instance & inst, const Verdict & v) -> Json
    {
        Json j;
        j["holds"] = v.holds;
        if (v.witness)
            j["witness"] = to_json(inst, *v.witness);
        return j;
    }

    auto to_json(const Instance & inst, const Outcome & o, bool trace) -> Json
    {
        Json j;
        if (const auto * f = std::get_if<Final>(&o)) {
            j["outcome"] = "final";
            j["allocation"] = allocation_to_json(inst, f->allocation);
            if (trace)
                j["trace"] = trace_json(inst, f->trace);
        }
        else {
            const auto & e = std::get<Exhausted>(o);
            j["outcome"] = "exhausted";
            j["agent"] = inst.agent_name(e.agent);
            j["step"] = e.step;
            if (trace)
                j["trace"] = trace_json(inst, e.trace);
        }
        return j;
    }

    auto to_json(const Instance & inst, const DominanceReport & r) -> Json
    {
        Json j;
        j["mode"] = r.agent ? "agent" : "pointwise";
        if (r.agent)
            j["agent"] = inst.agent_name(*r.agent);
        j["hypotheses_hold"] = r.hypotheses_hold();
        j["hypothesis_failures"] = r.hypothesis_failures;
        j["holds"] = r.holds;
        if (r.witness)
            j["witness"] = to_json(inst, *r.witness);
        return j;
    }

    auto to_json(const EnumerationSummary & s) -> Json
    {
        Json j;
        j["count"] = s.count;
        j["orbit_count"] = s.orbit_count;
        j["mechanism_count"] = s.mechanism_count;
        j["pruned_nodes"] = s.pruned_nodes;
        j["nodes"] = s.nodes;
        j["complete"] = s.complete;
        return j;
    }
}
