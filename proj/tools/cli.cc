#include "cli.hh"

#include <lpm/io.hh>
#include <lpm/render.hh>

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <ostream>

using std::string;
using std::vector;

namespace lpm::cli
{
    namespace
    {
        using io::Json;

        // Exit code 1 with a JSON document on standard output.
        struct Violated
        {
            Json document;
        };

        struct Paths
        {
            string constraint, alpha, alpha2, profile, mechanism, spec;
        };

        auto load_constraint(const Paths & p) -> std::optional<Constraint>
        {
            if (p.constraint.empty())
                return std::nullopt;
            return io::constraint_from_json(io::read_json(p.constraint));
        }

        auto load_alpha(const string & path, const std::optional<Constraint> & c) -> CompromiserAssignment
        {
            auto j = io::read_json(path);
            try {
                return io::alpha_from_json(j, c);
            }
            catch (const InputError & e) {
                throw InputError{path + ": " + e.what()};
            }
        }

        auto require(const string & value, const string & flag) -> const string &
        {
            if (value.empty())
                throw InputError{flag + " is required"};
            return value;
        }

        // A mechanism named on the command line together with its spec file.
        struct Named
        {
            Constraint constraint;
            std::function<Code(const Profile &)> run;
            std::optional<CompromiserAssignment> alpha; // for the ones with a canonical assignment
        };

        auto named(const Paths & p) -> Named
        {
            auto c = load_constraint(p);
            if (! c)
                throw InputError{"--constraint is required with --mechanism"};
            auto spec = io::read_json(require(p.spec, "--spec"));
            auto & inst = c->instance();
            const auto & m = p.mechanism;
            if (m == "sd") {
                auto order = io::order_from_json(inst, spec);
                return {*c, [c = *c, order](const Profile & q) { return serial_dictatorship(c, order, q).code(); },
                    sd_alpha(*c, order)};
            }
            if (m == "da") {
                auto s = io::school_from_json(inst, spec);
                return {*c, [inst, s](const Profile & q) { return cumulative_da(inst, s, q).allocation.code(); },
                    da_alpha(inst, s)};
            }
            if (m == "ttc") {
                auto e = io::endowment_from_json(inst, spec);
                return {*c, [inst, e](const Profile & q) { return ttc(inst, e, q).code(); }, ttc_alpha(inst, e)};
            }
            if (m == "ia") {
                auto s = io::school_from_json(inst, spec);
                return {*c, [inst, s](const Profile & q) { return immediate_acceptance(inst, s, q).code(); }, std::nullopt};
            }
            if (m == "marriage") {
                auto s = io::marriage_from_json(inst, spec);
                return {*c, [inst, s](const Profile & q) { return marriage_da(inst, s, q).code(); }, std::nullopt};
            }
            throw InputError{"unknown mechanism '" + m + "' (sd, da, ttc, ia, marriage)"};
        }

        auto tabulate_named(const Named & n) -> MechanismTable
        {
            PreferenceSpace prefs(n.constraint.instance().object_count());
            return MechanismTable::from_function(n.constraint, [&](std::span<const int> perms) {
                Profile q;
                for (int r : perms)
                    q.push_back(prefs.preference(r));
                return n.run(q);
            });
        }

        auto reading_from(const string & s) -> Reading
        {
            if (s == "strict")
                return Reading::strict;
            if (s == "relaxed")
                return Reading::relaxed;
            throw InputError{"unknown reading '" + s + "' (strict, relaxed)"};
        }

        auto print(std::ostream & out, const Json & j) -> void
        {
            out << j.dump(2) << "\n";
        }

        auto cmd_run(const Paths & p, bool trace, std::ostream & out) -> int
        {
            auto alpha = load_alpha(require(p.alpha, "--alpha"), load_constraint(p));
            auto profile = io::profile_from_json(alpha.instance(), io::read_json(require(p.profile, "--profile")));
            auto outcome = run_lp(alpha, profile);
            auto j = io::to_json(alpha.instance(), outcome, trace);
            if (std::holds_alternative<Exhausted>(outcome))
                throw Violated{j};
            print(out, j);
            return 0;
        }

        auto cmd_mechanism(const Paths & p, std::ostream & out) -> int
        {
            auto n = named(p);
            auto & inst = n.constraint.instance();
            auto profile = io::profile_from_json(inst, io::read_json(require(p.profile, "--profile")));
            Json j;
            j["mechanism"] = p.mechanism;
            j["allocation"] = io::allocation_to_json(inst, n.run(profile));
            print(out, j);
            return 0;
        }

        auto cmd_derive(const Paths & p, std::ostream & out) -> int
        {
            auto n = named(p);
            if (! n.alpha)
                throw InputError{"no assignment is defined for mechanism '" + p.mechanism + "' (sd, da, ttc)"};
            print(out, io::to_json(*n.alpha));
            return 0;
        }

        auto exhaustion(const Instance & inst, ProfileIndex p) -> Verdict
        {
            Witness w;
            w.reason = "some agent runs out of objects";
            w.profiles.emplace_back("profile", ProfileSpace(inst, default_profile_budget).profile(p));
            return Verdict::fail(std::move(w));
        }

        const vector<string> all_props{"forward", "backward", "implementable", "sp", "gsp", "nonbossy", "maskin", "pe",
            "unanimity", "fixed-compromiser", "invariance", "local-priority"};

        auto cmd_check(const Paths & p, const vector<string> & props, const string & reading_name, std::ostream & out) -> int
        {
            const Reading reading = reading_from(reading_name);
            for (const auto & prop : props)
                if (std::find(all_props.begin(), all_props.end(), prop) == all_props.end())
                    throw InputError{"unknown property '" + prop + "'"};

            std::optional<CompromiserAssignment> alpha;
            std::optional<Named> mechanism;
            if (! p.alpha.empty())
                alpha = load_alpha(p.alpha, load_constraint(p));
            else if (! p.mechanism.empty()) {
                mechanism = named(p);
                alpha = mechanism->alpha;
            }
            else
                throw InputError{"give --alpha or --mechanism"};
            const Instance & inst = alpha ? alpha->instance() : mechanism->constraint.instance();

            std::optional<MechanismTable> table;
            auto f = [&]() -> const MechanismTable & {
                if (table)
                    return *table;
                try {
                    table = mechanism ? tabulate_named(*mechanism) : tabulate(*alpha);
                }
                catch (const NotImplementable & e) {
                    throw Violated{Json{{"implementable", io::to_json(inst, exhaustion(inst, e.witness))}}};
                }
                return *table;
            };
            auto need_alpha = [&](const string & prop) -> const CompromiserAssignment & {
                if (! alpha)
                    throw InputError{"property '" + prop + "' needs a compromiser assignment"};
                return *alpha;
            };

            Json result = Json::object();
            bool holds = true;
            for (const auto & prop : props) {
                Verdict v;
                if (prop == "forward")
                    v = is_forward_consistent(need_alpha(prop));
                else if (prop == "backward")
                    v = is_backward_consistent(need_alpha(prop), reading);
                else if (prop == "implementable") {
                    auto r = is_implementable(need_alpha(prop));
                    if (! r.implementable)
                        v = exhaustion(inst, *r.witness);
                }
                else if (prop == "local-priority") {
                    auto r = is_local_priority(f());
                    Json j{{"holds", r.holds}};
                    if (! r.holds)
                        j["failed"] = r.failed;
                    if (r.witness)
                        j["witness"] = io::to_json(inst, *r.witness);
                    if (r.image_differs)
                        j["image_differs"] = true;
                    holds = holds && r.holds;
                    result[prop] = j;
                    continue;
                }
                else if (prop == "sp")
                    v = is_strategy_proof(f());
                else if (prop == "gsp")
                    v = is_group_strategy_proof(f(), inst.agent_count() <= 3);
                else if (prop == "nonbossy")
                    v = is_nonbossy(f());
                else if (prop == "maskin")
                    v = is_maskin_monotonic(f());
                else if (prop == "pe")
                    v = is_pareto_efficient(f());
                else if (prop == "unanimity")
                    v = check_unanimity(f());
                else if (prop == "fixed-compromiser")
                    v = check_fixed_compromiser(f());
                else if (prop == "invariance")
                    v = check_compromiser_invariance(f());
                holds = holds && v.holds;
                result[prop] = io::to_json(inst, v);
            }
            if (! holds)
                throw Violated{result};
            print(out, result);
            return 0;
        }

        auto cmd_compare(const Paths & p, const string & mode, const string & agent, const string & reading_name,
            std::ostream & out) -> int
        {
            auto c = load_constraint(p);
            auto a = load_alpha(require(p.alpha, "--alpha"), c);
            auto b = load_alpha(require(p.alpha2, "--alpha2"), c);
            DominanceReport r;
            if (mode == "pointwise")
                r = check_pointwise_dominance(a, b);
            else if (mode == "agent") {
                int i = a.instance().agent_index(require(agent, "--agent"));
                r = check_agent_dominance(a, b, i, reading_from(reading_name));
            }
            else
                throw InputError{"unknown mode '" + mode + "' (pointwise, agent)"};
            auto j = io::to_json(a.instance(), r);
            if (! r.hypotheses_hold() || ! r.holds)
                throw Violated{j};
            print(out, j);
            return 0;
        }

        struct EnumerateFlags
        {
            bool forward = false, backward = false, quotient = false, dedupe = false;
            string reading = "strict";
            std::uint64_t budget = 1ull << 32;
            double seconds = 0;
        };

        auto cmd_enumerate(const Paths & p, const EnumerateFlags & e, std::ostream & out) -> int
        {
            auto c = load_constraint(p);
            if (! c)
                throw InputError{"--constraint is required"};
            EnumerationOptions o;
            o.reading = reading_from(e.reading);
            // neither flag means both
            o.require_forward = e.forward || ! e.backward;
            o.require_backward = e.backward || ! e.forward;
            o.quotient_symmetry = e.quotient;
            o.dedupe_by_mechanism = e.dedupe;
            o.node_budget = e.budget;
            o.seconds = e.seconds;
            auto summary = enumerate_consistent(*c, o, [&](const CompromiserAssignment & alpha, std::uint64_t orbit) {
                auto j = io::to_json(alpha);
                if (e.quotient)
                    j["orbit_size"] = orbit;
                out << j.dump() << "\n";
                return true;
            });
            out << Json{{"summary", io::to_json(summary)}}.dump() << "\n";
            return 0;
        }

        auto cmd_render(const Paths & p, const string & format, std::ostream & out) -> int
        {
            RenderFormat fmt;
            if (format == "ascii")
                fmt = RenderFormat::ascii;
            else if (format == "svg")
                fmt = RenderFormat::svg;
            else
                throw InputError{"unknown format '" + format + "' (ascii, svg)"};
            auto c = load_constraint(p);
            if (! p.alpha.empty())
                out << render(load_alpha(p.alpha, c), fmt);
            else if (c)
                out << render(*c, fmt);
            else
                throw InputError{"give --alpha or --constraint"};
            return 0;
        }
    }

    auto cli_main(const vector<string> & args, std::ostream & out, std::ostream & err) -> int
    {
        CLI::App app{"local priority mechanism workbench", "lp"};
        app.require_subcommand(1);
        Paths p;

        auto constraint_opt = [&](CLI::App * s, bool required = false) {
            auto o = s->add_option("--constraint", p.constraint, "constraint JSON file");
            if (required)
                o->required();
        };
        auto mechanism_opts = [&](CLI::App * s) {
            s->add_option("--mechanism", p.mechanism, "sd | da | ttc | ia | marriage");
            s->add_option("--spec", p.spec, "spec JSON for the named mechanism");
        };

        bool trace = false;
        auto run = app.add_subcommand("run", "run the local priority algorithm on one profile");
        constraint_opt(run);
        run->add_option("--alpha", p.alpha, "assignment JSON file")->required();
        run->add_option("--profile", p.profile, "profile JSON file")->required();
        run->add_flag("--trace", trace, "print every allocation visited");

        vector<string> props;
        string reading = "strict";
        auto check = app.add_subcommand("check", "check properties of an assignment or a named mechanism");
        constraint_opt(check);
        check->add_option("--alpha", p.alpha, "assignment JSON file");
        mechanism_opts(check);
        check->add_option("--props", props, "comma separated properties")->delimiter(',')->required();
        check->add_option("--reading", reading, "strict | relaxed");

        auto derive = app.add_subcommand("derive", "write the assignment of a named mechanism");
        constraint_opt(derive, true);
        mechanism_opts(derive);

        EnumerateFlags ef;
        auto enumerate = app.add_subcommand("enumerate", "list consistent assignments of a constraint");
        constraint_opt(enumerate, true);
        enumerate->add_flag("--forward", ef.forward, "require forward consistency");
        enumerate->add_flag("--backward", ef.backward, "require backward consistency");
        enumerate->add_option("--reading", ef.reading, "strict | relaxed");
        enumerate->add_flag("--quotient", ef.quotient, "one assignment per symmetry orbit");
        enumerate->add_flag("--dedupe", ef.dedupe, "one assignment per mechanism");
        enumerate->add_option("--budget", ef.budget, "search node budget")->check(CLI::PositiveNumber);
        enumerate->add_option("--seconds", ef.seconds, "time limit, 0 for none")->check(CLI::NonNegativeNumber);

        string mode = "pointwise", agent;
        auto compare = app.add_subcommand("compare", "compare outcomes under two assignments");
        constraint_opt(compare);
        compare->add_option("--alpha", p.alpha, "first assignment")->required();
        compare->add_option("--alpha2", p.alpha2, "second assignment")->required();
        compare->add_option("--agent", agent, "agent for --mode agent");
        compare->add_option("--mode", mode, "pointwise | agent");
        compare->add_option("--reading", reading, "strict | relaxed");

        string format = "ascii";
        auto render_cmd = app.add_subcommand("render", "draw an assignment or constraint as grids");
        constraint_opt(render_cmd);
        render_cmd->add_option("--alpha", p.alpha, "assignment JSON file");
        render_cmd->add_option("--format", format, "ascii | svg");

        auto mechanisms = app.add_subcommand("mechanisms", "run a named mechanism on one profile");
        constraint_opt(mechanisms, true);
        mechanisms->add_option("--mechanism", p.mechanism, "sd | da | ttc | ia | marriage")->required();
        mechanisms->add_option("--spec", p.spec, "spec JSON for the mechanism")->required();
        mechanisms->add_option("--profile", p.profile, "profile JSON file")->required();

        derive->get_option("--mechanism")->required();
        derive->get_option("--spec")->required();

        try {
            vector<string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError & e) {
            int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }

        try {
            if (run->parsed())
                return cmd_run(p, trace, out);
            if (check->parsed())
                return cmd_check(p, props, reading, out);
            if (derive->parsed())
                return cmd_derive(p, out);
            if (enumerate->parsed())
                return cmd_enumerate(p, ef, out);
            if (compare->parsed())
                return cmd_compare(p, mode, agent, reading, out);
            if (render_cmd->parsed())
                return cmd_render(p, format, out);
            return cmd_mechanism(p, out);
        }
        catch (const Violated & v) {
            print(out, v.document);
            return 1;
        }
        catch (const InputError & e) {
            err << "lp: " << e.what() << "\n";
            return 2;
        }
        catch (const StructuralError & e) {
            err << "lp: " << e.what() << "\n";
            return 2;
        }
    }
}
