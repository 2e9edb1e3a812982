#include <doctest.h>

#include "cli.hh"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace
{
    struct Result
    {
        int code;
        std::string out, err;

        auto json() const -> nlohmann::json { return nlohmann::json::parse(out); }
    };

    auto fx(const std::string & name) -> std::string
    {
        return std::string{LPM_TEST_DATA} + "/fixtures/" + name;
    }

    auto lp(std::vector<std::string> args) -> Result
    {
        std::ostringstream out, err;
        int code = lpm::cli::cli_main(args, out, err);
        return {code, out.str(), err.str()};
    }

    auto slurp(const std::string & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    auto joined(const nlohmann::json & allocation) -> std::string
    {
        std::string s;
        for (const auto & o : allocation)
            s += o.get<std::string>();
        return s;
    }

    auto scratch(const std::string & name, const std::string & text) -> std::string
    {
        auto path = std::string{LPM_TEST_SCRATCH} + "/" + name;
        std::ofstream(path) << text;
        return path;
    }
}

TEST_CASE("run prints the deferred acceptance trace")
{
    auto r = lp({"run", "--constraint", fx("school.json"), "--alpha", fx("da_alpha.json"), "--profile", fx("da_profile.json"),
        "--trace"});
    REQUIRE(r.code == 0);
    auto j = r.json();
    CHECK(joined(j["allocation"]) == "bca");
    std::vector<std::string> visited;
    for (const auto & s : j["trace"])
        visited.push_back(joined(s["allocation"]));
    CHECK(visited == std::vector<std::string>{"aab", "abb", "aba", "bba", "bca"});
}

TEST_CASE("run prints the top trading cycles trace")
{
    auto r = lp({"run", "--alpha", fx("ttc_alpha.json"), "--profile", fx("ttc_profile.json"), "--trace"});
    REQUIRE(r.code == 0);
    auto j = r.json();
    CHECK(joined(j["allocation"]) == "cba");
    REQUIRE(j["trace"].size() == 2);
    CHECK(joined(j["trace"][0]["allocation"]) == "aba");
    CHECK(j["trace"][0]["compromisers"] == nlohmann::json::array({"1"}));
}

TEST_CASE("run without a trace prints only the outcome")
{
    auto r = lp({"run", "--alpha", fx("ttc_alpha.json"), "--profile", fx("ttc_profile.json")});
    REQUIRE(r.code == 0);
    CHECK(! r.json().contains("trace"));
}

TEST_CASE("immediate acceptance fails invariance with a witness")
{
    auto r = lp({"check", "--mechanism", "ia", "--spec", fx("ia_spec.json"), "--constraint", fx("school.json"), "--props",
        "invariance"});
    CHECK(r.code == 1);
    auto w = r.json()["invariance"];
    CHECK(w["holds"] == false);
    CHECK(joined(w["witness"]["allocations"]["mu"]) == "aab");
    CHECK(w["witness"]["agents"] == nlohmann::json::array({"1"}));

    auto lpr = lp({"check", "--mechanism", "ia", "--spec", fx("ia_spec.json"), "--constraint", fx("school.json"), "--props",
        "local-priority"});
    CHECK(lpr.code == 1);
    CHECK(lpr.json()["local-priority"]["failed"] == "invariance");
}

TEST_CASE("an assignment missing a cell is an input error")
{
    auto r = lp({"run", "--constraint", fx("school.json"), "--alpha", fx("da_alpha_missing_cell.json"), "--profile",
        fx("da_profile.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("a,a,b") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("input errors exit 2 with a location")
{
    auto house = fx("house.json");
    auto bad_object = scratch("bad_object.json", R"({"agents":["1","2"],"objects":["a","b"],"cells":{"a,z":["1"]}})");
    auto feasible_cell = scratch("feasible_cell.json",
        R"({"agents":["1","2"],"objects":["a","b"],"cells":{"a,a":["1"],"b,b":["2"],"a,b":["1"]}})");
    auto empty_cell = scratch("empty_cell.json", R"({"agents":["1","2"],"objects":["a","b"],"cells":{"a,a":[]}})");
    auto malformed = scratch("malformed.json", R"({"agents":["1","2"],)");
    auto two = scratch("two.json", R"({"agents":["1","2"],"objects":["a","b"],"kind":"house"})");
    auto five = scratch("five.json", R"({"agents":["1","2","3","4","5"],"objects":["a","b","c","d","e"],"kind":"house"})");

    auto p = fx("abc_profile.json");
    CHECK(lp({"run", "--alpha", bad_object, "--profile", p}).err.find("unknown object 'z'") != std::string::npos);
    auto r = lp({"run", "--constraint", two, "--alpha", feasible_cell, "--profile", p});
    CHECK(r.code == 2);
    CHECK(r.err.find("a,b") != std::string::npos);
    CHECK(lp({"run", "--alpha", empty_cell, "--profile", p}).code == 2);
    r = lp({"render", "--alpha", malformed});
    CHECK(r.code == 2);
    CHECK(r.err.find("malformed.json") != std::string::npos);
    r = lp({"render", "--constraint", five});
    CHECK(r.code == 2);
    CHECK(r.err.find("2 to 4 agents") != std::string::npos);
    CHECK(lp({"check", "--alpha", fx("da_alpha.json"), "--props", "bogus"}).code == 2);
    CHECK(lp({"nonsense"}).code == 2);
    CHECK(lp({}).code == 2);
    CHECK(lp({"run", "--alpha", fx("da_alpha.json"), "--profile", fx("marriage_profile_1.json")}).code == 2);
    CHECK(lp({"--help"}).code == 0);
}

TEST_CASE("derive reproduces the checked-in assignments")
{
    auto r = lp({"derive", "--constraint", fx("school.json"), "--mechanism", "da", "--spec", fx("school_spec.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(fx("da_alpha.json")));
    r = lp({"derive", "--constraint", fx("house.json"), "--mechanism", "ttc", "--spec", fx("ttc_endowment.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(fx("ttc_alpha.json")));
    r = lp({"derive", "--constraint", fx("house.json"), "--mechanism", "sd", "--spec", fx("sd_order.json")});
    CHECK(r.code == 0);
    CHECK(lp({"derive", "--constraint", fx("house.json"), "--mechanism", "ia", "--spec", fx("ia_spec.json")}).code == 2);
}

TEST_CASE("named mechanisms run directly")
{
    auto r = lp({"mechanisms", "--constraint", fx("school.json"), "--mechanism", "da", "--spec", fx("school_spec.json"),
        "--profile", fx("da_profile.json")});
    REQUIRE(r.code == 0);
    CHECK(joined(r.json()["allocation"]) == "bca");

    r = lp({"mechanisms", "--constraint", fx("house.json"), "--mechanism", "ttc", "--spec", fx("ttc_endowment.json"),
        "--profile", fx("ttc_profile.json")});
    CHECK(joined(r.json()["allocation"]) == "cba");

    // men's partners under each of the three profiles sharing one top vector
    std::vector<std::string> expected{"w1w2w3", "w1w3w2", "w2w3w1"};
    for (int k = 0; k < 3; ++k) {
        r = lp({"mechanisms", "--constraint", fx("marriage.json"), "--mechanism", "marriage", "--spec", fx("marriage_spec.json"),
            "--profile", fx("marriage_profile_" + std::to_string(k + 1) + ".json")});
        REQUIRE(r.code == 0);
        auto a = r.json()["allocation"];
        CHECK(a[0].get<std::string>() + a[1].get<std::string>() + a[2].get<std::string>() == expected[k]);
    }
}

TEST_CASE("check on the canonical assignments")
{
    auto r = lp({"check", "--alpha", fx("ttc_alpha.json"), "--props",
        "forward,backward,implementable,sp,gsp,nonbossy,maskin,pe,unanimity,fixed-compromiser,invariance,local-priority"});
    CHECK(r.code == 0);
    auto all = r.json();
    for (const auto & [k, v] : all.items())
        CHECK_MESSAGE(v["holds"] == true, k);

    r = lp({"check", "--mechanism", "da", "--spec", fx("school_spec.json"), "--constraint", fx("school.json"), "--props",
        "forward,backward,sp,gsp,pe"});
    CHECK(r.code == 1);
    auto j = r.json();
    // these priorities let a student block another without being hurt
    CHECK(j["forward"]["holds"] == true);
    CHECK(j["sp"]["holds"] == true);
    CHECK(j["gsp"]["holds"] == false);
    CHECK(j["pe"]["holds"] == false);

    CHECK(lp({"check", "--mechanism", "ia", "--spec", fx("ia_spec.json"), "--constraint", fx("school.json"), "--props",
        "forward"}).code == 2);
}

TEST_CASE("an exhausting assignment reports the run and fails checks")
{
    auto bad = scratch("exhausting.json",
        R"({"agents":["1","2"],"objects":["a","b"],"cells":{"a,a":["1"],"b,a":["1"]}})");
    auto profile = scratch("ab.json", R"({"1":["a","b"],"2":["a","b"]})");
    auto r = lp({"run", "--alpha", bad, "--profile", profile});
    CHECK(r.code == 1);
    CHECK(r.json()["outcome"] == "exhausted");
    r = lp({"check", "--alpha", bad, "--props", "gsp"});
    CHECK(r.code == 1);
    CHECK(r.json()["implementable"]["holds"] == false);
}

TEST_CASE("compare")
{
    auto r = lp({"compare", "--alpha", fx("da_alpha_loose.json"), "--alpha2", fx("da_alpha.json")});
    CHECK(r.code == 0);
    CHECK(r.json()["holds"] == true);

    r = lp({"compare", "--alpha", fx("comparative_alpha.json"), "--alpha2", fx("comparative_alpha_prime.json")});
    CHECK(r.code == 1);
    CHECK(r.json()["hypotheses_hold"] == false);
    CHECK(r.json()["holds"] == false);

    r = lp({"compare", "--alpha", fx("ttc_alpha.json"), "--alpha2", fx("ttc_alpha.json"), "--mode", "agent", "--agent", "2"});
    CHECK(r.code == 0);
    CHECK(r.json()["agent"] == "2");
    CHECK(lp({"compare", "--alpha", fx("ttc_alpha.json"), "--alpha2", fx("ttc_alpha.json"), "--mode", "agent"}).code == 2);
}

TEST_CASE("the comparative statics outcomes")
{
    auto r = lp({"run", "--alpha", fx("comparative_alpha_prime.json"), "--profile", fx("abc_profile.json")});
    CHECK(joined(r.json()["allocation"]) == "bba");
    r = lp({"run", "--alpha", fx("comparative_alpha.json"), "--profile", fx("abc_profile.json")});
    CHECK(joined(r.json()["allocation"]) == "cbb");
}

TEST_CASE("render matches the goldens")
{
    auto golden = [](const std::string & n) { return slurp(std::string{LPM_TEST_DATA} + "/golden/" + n); };
    CHECK(lp({"render", "--alpha", fx("da_alpha.json")}).out == golden("da_alpha.txt"));
    CHECK(lp({"render", "--alpha", fx("ttc_alpha.json")}).out == golden("ttc_alpha.txt"));
    CHECK(lp({"render", "--alpha", fx("nonunique_alpha.json")}).out == golden("nonunique_alpha.txt"));
    CHECK(lp({"render", "--constraint", fx("house.json")}).out == golden("house_constraint.txt"));
    CHECK(lp({"render", "--alpha", fx("da_alpha.json"), "--format", "svg"}).out == golden("da_alpha.svg"));
    CHECK(lp({"render", "--alpha", fx("da_alpha.json"), "--format", "png"}).code == 2);
}

TEST_CASE("enumerate streams assignments then a summary")
{
    auto r = lp({"enumerate", "--constraint", fx("house.json"), "--quotient", "--dedupe"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::vector<nlohmann::json> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(nlohmann::json::parse(l));
    REQUIRE(! lines.empty());
    auto summary = lines.back()["summary"];
    CHECK(summary["complete"] == true);
    CHECK(lines.size() > 1);
    CHECK(lines.size() - 1 <= summary["mechanism_count"].get<std::size_t>());
    for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
        CHECK(lines[k].contains("cells"));
        CHECK(lines[k]["orbit_size"].get<int>() >= 1);
    }

    auto forward = lp({"enumerate", "--constraint", fx("nonunique.json"), "--forward"});
    auto both = lp({"enumerate", "--constraint", fx("nonunique.json")});
    auto last = [](const std::string & s) {
        auto cut = s.rfind('\n', s.size() - 2);
        return nlohmann::json::parse(s.substr(cut + 1))["summary"];
    };
    CHECK(last(forward.out)["count"].get<int>() > last(both.out)["count"].get<int>());
    CHECK(last(both.out)["count"].get<int>() > 0);

    auto cut = lp({"enumerate", "--constraint", fx("house.json"), "--budget", "10"});
    CHECK(cut.code == 0);
    CHECK(last(cut.out)["complete"] == false);
    CHECK(lp({"enumerate", "--constraint", fx("house.json"), "--budget", "0"}).code == 2);
    CHECK(lp({"enumerate", "--constraint", fx("house.json"), "--reading", "loose"}).code == 2);
}
