#include <doctest.h>

#include "support.hh"

#include <lpm/io.hh>
#include <lpm/render.hh>

#include <fstream>
#include <random>
#include <sstream>

using namespace lpm;
using io::Json;

namespace
{
    auto slurp(const std::string & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    auto fixture_path(const std::string & name) -> std::string
    {
        return std::string{LPM_TEST_DATA} + "/fixtures/" + name;
    }

    auto golden_path(const std::string & name) -> std::string
    {
        return std::string{LPM_TEST_DATA} + "/golden/" + name;
    }

    auto error_of(const std::function<void()> & f) -> std::string
    {
        try {
            f();
        }
        catch (const InputError & e) {
            return e.what();
        }
        return "";
    }
}

TEST_CASE("assignments survive a JSON round trip")
{
    auto inst = fixture::instance(3, 3);
    std::vector<CompromiserAssignment> all{da_alpha(inst, fixture::da_spec()), ttc_alpha(inst, fixture::ttc_endowment())};
    std::mt19937_64 rng{3};
    for (int k = 0; k < 30; ++k) {
        std::vector<AgentSet> cells(inst.allocation_count());
        for (auto & c : cells)
            if (rng() % 3 == 0)
                c = AgentSet{1 + std::uint32_t(rng() % 7)};
        if (std::all_of(cells.begin(), cells.end(), [](AgentSet s) { return ! s.empty(); }))
            cells[0] = AgentSet{};
        all.push_back(CompromiserAssignment::from_cells(inst, cells));
    }
    for (const auto & alpha : all) {
        auto text = io::to_json(alpha).dump();
        auto back = io::alpha_from_json(io::parse_json(text, "test"));
        CHECK(back == alpha);
        CHECK(back.constraint().same_set(alpha.constraint()));
        CHECK(io::alpha_from_json(io::parse_json(text, "test"), alpha.constraint()) == alpha);
    }
}

TEST_CASE("constraints survive a JSON round trip")
{
    auto inst = fixture::instance(3, 3);
    auto people = fixture::marriage_instance();
    std::vector<Constraint> all{Constraint::house(inst), Constraint::school(inst, {2, 1, 0}), Constraint::social(inst),
        Constraint::one_sided(people), Constraint::two_sided(people, {0, 1, 2}, {3, 4, 5}),
        fixture::constraint(inst, {"aaa", "baa"})};
    for (const auto & c : all) {
        auto back = io::constraint_from_json(io::parse_json(io::to_json(c).dump(), "test"));
        CHECK(back.same_set(c));
        CHECK(back.generator().kind == c.generator().kind);
    }
}

TEST_CASE("profiles and keys round trip")
{
    auto inst = fixture::instance(3, 3);
    auto p = fixture::profile({"cab", "abc", "bca"});
    CHECK(io::profile_from_json(inst, io::to_json(inst, p)) == p);
    for (Code x = 0; x < inst.allocation_count(); ++x)
        CHECK(io::allocation_from_key(inst, io::allocation_key(inst, x)) == x);
    CHECK(io::allocation_key(inst, fixture::code(inst, "aab")) == "a,a,b");
}

TEST_CASE("fixture files match the in-code fixtures")
{
    auto inst = fixture::instance(3, 3);
    auto school = io::constraint_from_json(io::read_json(fixture_path("school.json")));
    CHECK(io::school_from_json(inst, io::read_json(fixture_path("school_spec.json"))).priorities == fixture::da_spec().priorities);
    CHECK(io::alpha_from_json(io::read_json(fixture_path("da_alpha.json")), school) == da_alpha(inst, fixture::da_spec()));
    CHECK(io::endowment_from_json(inst, io::read_json(fixture_path("ttc_endowment.json"))).owned
        == fixture::ttc_endowment().owned);
    CHECK(io::alpha_from_json(io::read_json(fixture_path("ttc_alpha.json"))) == ttc_alpha(inst, fixture::ttc_endowment()));
    CHECK(io::profile_from_json(inst, io::read_json(fixture_path("da_profile.json"))) == fixture::da_profile());
    CHECK(io::profile_from_json(inst, io::read_json(fixture_path("ttc_profile.json"))) == fixture::ttc_profile());
    CHECK(io::school_from_json(inst, io::read_json(fixture_path("ia_spec.json"))).priorities == fixture::ia_spec().priorities);

    auto two = fixture::instance(2, 3);
    CHECK(io::alpha_from_json(io::read_json(fixture_path("nonunique_alpha.json"))) == fixture::nonunique_alpha(two, "12"));
    CHECK(io::constraint_from_json(io::read_json(fixture_path("nonunique.json"))).same_set(fixture::nonunique_constraint(two)));

    auto people = fixture::marriage_instance();
    auto profiles = fixture::marriage_profiles(people);
    for (int k = 0; k < 3; ++k)
        CHECK(io::profile_from_json(people, io::read_json(fixture_path("marriage_profile_" + std::to_string(k + 1) + ".json")))
            == profiles[k]);
}

TEST_CASE("malformed documents name the problem")
{
    auto inst = fixture::instance(3, 3);
    auto house = Constraint::house(inst);
    auto da = io::to_json(da_alpha(inst, fixture::da_spec()));

    CHECK(error_of([] { io::parse_json("{\"agents\": [", "f.json"); }).starts_with("f.json"));
    CHECK(error_of([] { io::read_json("/nonexistent/x.json"); }).find("cannot open") != std::string::npos);

    auto j = da;
    j["cells"]["a,a,q"] = Json::array({"1"});
    CHECK(error_of([&] { io::alpha_from_json(j); }).find("unknown object 'q'") != std::string::npos);

    j = da;
    j["cells"]["a,a,b"] = Json::array({"7"});
    CHECK(error_of([&] { io::alpha_from_json(j); }).find("unknown agent '7'") != std::string::npos);

    j = da;
    j["cells"]["a,a,b"] = Json::array();
    CHECK(error_of([&] { io::alpha_from_json(j); }).find("a,a,b") != std::string::npos);

    j = da;
    j["cells"]["a,b,c"] = Json::array({"1"});
    CHECK(error_of([&] { io::alpha_from_json(j, house); }).find("a,b,c") != std::string::npos);

    j = da;
    j["cells"].erase("a,a,b");
    CHECK(error_of([&] { io::alpha_from_json(j, house); }).find("a,a,b") != std::string::npos);

    CHECK(error_of([&] { io::profile_from_json(inst, Json{{"1", {"a", "b"}}, {"2", {"a", "b", "c"}}, {"3", {"a", "b", "c"}}}); })
        != "");
    CHECK(error_of([&] { io::constraint_from_json(Json{{"agents", {"1"}}, {"objects", {"a"}}, {"kind", "nope"}}); })
        .find("unknown kind") != std::string::npos);
}

TEST_CASE("renders match the checked-in goldens")
{
    auto inst = fixture::instance(3, 3);
    CHECK(render(da_alpha(inst, fixture::da_spec()), RenderFormat::ascii) == slurp(golden_path("da_alpha.txt")));
    CHECK(render(ttc_alpha(inst, fixture::ttc_endowment()), RenderFormat::ascii) == slurp(golden_path("ttc_alpha.txt")));
    CHECK(render(fixture::nonunique_alpha(fixture::instance(2, 3), "12"), RenderFormat::ascii)
        == slurp(golden_path("nonunique_alpha.txt")));
    CHECK(render(Constraint::house(inst), RenderFormat::ascii) == slurp(golden_path("house_constraint.txt")));
    CHECK(render(da_alpha(inst, fixture::da_spec()), RenderFormat::svg) == slurp(golden_path("da_alpha.svg")));
}

TEST_CASE("render layout")
{
    auto inst = fixture::instance(3, 3);
    auto da = da_alpha(inst, fixture::da_spec());
    auto text = render(da, RenderFormat::ascii);
    CHECK(text == render(da, RenderFormat::ascii));

    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    // legend, blank, panel titles, header, three rows
    REQUIRE(lines.size() == 7);
    CHECK(lines[2].find("3 = a") == 0);
    CHECK(lines[2].find("3 = c") != std::string::npos);
    CHECK(lines[4].starts_with("a [1 2]"));

    // a fully feasible constraint shows only dots
    auto open = render(Constraint::everything(inst), RenderFormat::ascii);
    CHECK(open.find('[') == std::string::npos);
    CHECK(open.find("·") != std::string::npos);

    // four agents stack panel rows
    auto four = fixture::instance(4, 4);
    auto t4 = render(Constraint::house(four), RenderFormat::ascii);
    CHECK(t4.find("4 = a") != std::string::npos);
    CHECK(t4.find("4 = b") != std::string::npos);

    CHECK_THROWS_AS(render(Constraint::house(fixture::instance(5, 5)), RenderFormat::ascii), InputError);
    CHECK_THROWS_AS(render(Constraint::everything(fixture::instance(1, 2)), RenderFormat::svg), InputError);

    auto svg = render(da, RenderFormat::svg);
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("#d0d0d0") != std::string::npos);
    CHECK(svg.find(">1 2<") != std::string::npos);
}
