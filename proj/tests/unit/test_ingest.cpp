#include <doctest.h>

#include <sstream>

#include "builders.hpp"
#include "ransomrisk/ingest.hpp"

using namespace ransomrisk;
using namespace ransomrisk::ingest;
using testsupport::error_code;

namespace {

std::string line(const std::string& group, const std::string& victim, const std::string& date,
                 const std::string& extra = R"(,"description":"maker of parts","country":"US","sectors":["automotive"],"revenue":100,"employees":10,"org_type":"for-profit")") {
    return R"({"group_name":")" + group + R"(","victim_name":")" + victim + R"(","discovered":")" + date + "\"" +
           extra + "}\n";
}

RawVictimRecord raw(const std::string& group, Date d, std::string description = "desc") {
    RawVictimRecord r;
    r.group_name = group;
    r.victim_name = "V";
    r.discovered = d;
    r.description = std::move(description);
    return r;
}

}  // namespace

TEST_CASE("well-formed JSONL lines parse one record each") {
    std::istringstream in(line("Akira", "A", "2023-01-02") + line("Play", "B", "2023-02-03 10:00:00") +
                          line("Akira", "C", "2023-03-04"));
    auto r = parse_victims(in, InputFormat::jsonl);
    CHECK(r.records.size() == 3);
    CHECK(r.rejections.empty());
    CHECK(r.records[1].discovered == Date{2023, 2, 3});
    CHECK(r.records[0].sectors == std::vector<std::string>{"automotive"});
}

TEST_CASE("a bad date rejects that line and cites its number") {
    std::istringstream in(line("Akira", "A", "2023-01-02") + line("Akira", "B", "2023-13-45"));
    auto r = parse_victims(in, InputFormat::jsonl);
    CHECK(r.records.size() == 1);
    REQUIRE(r.rejections.size() == 1);
    CHECK(r.rejections[0].line_no == 2);
    CHECK(r.rejections[0].reason.find("date") != std::string::npos);
}

TEST_CASE("malformed JSON and missing keys become rejections") {
    std::istringstream in("{not json\n" + line("Akira", "A", "2023-01-02") + R"({"victim_name":"x","discovered":"2023-01-01"})" + "\n");
    auto r = parse_victims(in, InputFormat::jsonl);
    CHECK(r.records.size() == 1);
    REQUIRE(r.rejections.size() == 2);
    CHECK(r.rejections[0].line_no == 1);
    CHECK(r.rejections[1].line_no == 3);
}

TEST_CASE("empty stream gives no records") {
    std::istringstream a(""), b("");
    CHECK(parse_victims(a, InputFormat::jsonl).records.empty());
    CHECK(parse_victims(b, InputFormat::csv).records.empty());
}

TEST_CASE("CSV input with semicolon sectors and blank optionals") {
    std::istringstream in(
        "group_name,victim_name,discovered,description,country,sectors,revenue,employees,org_type\n"
        "Akira,\"Acme, Inc.\",2023-04-01,\"makes things\",US,automotive;manufacturing,100,10,for-profit\n"
        "Akira,Beta,2023-04-02,,,,,,\n"
        "Akira,Gamma,2023-04-03\n");
    auto r = parse_victims(in, InputFormat::csv);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].victim_name == "Acme, Inc.");
    CHECK(r.records[0].sectors->size() == 2);
    CHECK_FALSE(r.records[1].country);
    CHECK(r.records[1].description.empty());
    REQUIRE(r.rejections.size() == 1);
    CHECK(r.rejections[0].line_no == 4);
    CHECK(error_code([] { parse_format("xml"); }) == "UnknownFormat");
}

TEST_CASE("filter drops old, unknown-group and undescribed records") {
    FilterPolicy policy;
    policy.known_adversaries = {"Akira", "alphv"};
    std::vector<RawVictimRecord> in{raw("Akira", {2020, 12, 31}), raw("Akira", {2021, 1, 1}),
                                    raw("Vice Society", {2023, 1, 1}), raw("ALPHV", {2023, 1, 1}),
                                    raw("Akira", {2023, 1, 1}, "  ")};
    auto out = filter_records(in, policy);
    REQUIRE(out.size() == 2);
    CHECK(out[0].discovered == Date{2021, 1, 1});
    CHECK(out[1].group_name == "ALPHV");

    policy.require_description = false;
    CHECK(filter_records(in, policy).size() == 3);
}

TEST_CASE("enrichment fills gaps from the directory") {
    auto r = raw("Akira", {2023, 1, 1});
    r.victim_name = "Acme";
    r.country = "us";
    r.sectors = std::vector<std::string>{"automotive"};
    r.employees = 50;
    r.org_type = "for-profit";

    Directory dir;
    dir.add("ACME", PartialVictim{std::string("DE"), std::nullopt, 999, 1, std::nullopt});
    auto v = enrich_victim(r, dir);
    CHECK(v.revenue() == 999);
    CHECK(v.employees() == 50);  // raw wins
    CHECK(v.country().str() == "US");

    auto bare = raw("Akira", {2023, 1, 1});
    bare.victim_name = "Nobody";
    bare.revenue = 5;
    try {
        enrich_victim(bare, dir);
        FAIL("expected IncompleteProfile");
    } catch (const IncompleteProfile& e) {
        CHECK(e.missing() == std::vector<std::string>{"country", "sectors", "employees", "org_type"});
    }

    r.revenue = 1;
    auto full = enrich_victim(r, Directory{});
    CHECK(full == testsupport::victim("Acme", "US", {"automotive"}, 1, 50, OrgType::for_profit));

    r.sectors = std::vector<std::string>{"underwater-basket-weaving"};
    CHECK(error_code([&] { enrich_victim(r, Directory{}); }) == "UnknownSector");
}

TEST_CASE("directory JSON accepts partial entries") {
    auto d = Directory::from_json(nlohmann::json::parse(R"({"Acme": {"revenue": 10, "sectors": "automotive;retail"}})"));
    REQUIRE(d.find("acme"));
    CHECK(*d.find("acme")->revenue == 10);
    CHECK(d.find("acme")->sectors->size() == 2);
    CHECK_FALSE(d.find("acme")->country);
    CHECK(error_code([] { Directory::from_json(nlohmann::json::array()); }) == "FormatError");
}

TEST_CASE("join resolves aliases and rejects unknown groups") {
    AdversaryIndex index({testsupport::adversary("BlackCat", {"T1486"}, {"ALPHV"}), testsupport::adversary("Akira")});
    auto v = testsupport::victim("A");
    auto out = join_attacks({{v, "alphv", {2023, 1, 1}}, {v, "Akira", {2023, 2, 1}}}, index);
    REQUIRE(out.size() == 2);
    CHECK(out[0].adversary_name == "BlackCat");
    CHECK(out[0].adversary.capability_count() == 1);
    CHECK_FALSE(out[0].ewma);
    CHECK_FALSE(out[0].safe);
    CHECK(join_attacks({}, index).empty());
    CHECK(error_code([&] { join_attacks({{v, "Nobody", {2023, 1, 1}}}, index); }) == "UnknownAdversary");
    CHECK(error_code([] {
              AdversaryIndex({testsupport::adversary("A", {}, {"x"}), testsupport::adversary("B", {}, {"X"})});
          }) == "AmbiguousAlias");
}

TEST_CASE("join keeps one record per event at scale") {
    AdversaryIndex index({testsupport::adversary("G")});
    std::vector<VictimEvent> events;
    for (int i = 0; i < 409; ++i) events.push_back({testsupport::victim("V" + std::to_string(i)), "G", {2023, 1, 1}});
    CHECK(join_attacks(events, index).size() == 409);
}

TEST_CASE("run_ingest reports enrichment failures and keeps the rest") {
    AdversaryIndex index({testsupport::adversary("Akira")});
    std::istringstream in(line("Akira", "A", "2023-01-02") +
                          line("Akira", "B", "2023-01-03", R"(,"description":"d","country":"US")") +
                          line("Akira", "C", "2019-01-01") + "garbage\n");
    auto r = run_ingest(in, InputFormat::jsonl, Directory{}, index, {2021, 1, 1});
    CHECK(r.parsed == 3);
    CHECK(r.retained == 1);
    CHECK(r.attacks.size() == 1);
    REQUIRE(r.rejections.size() == 2);
    CHECK(r.rejections[0].line_no == 4);
    CHECK(r.rejections[1].subject == "B");
    auto j = to_json(r.rejections);
    CHECK(j[1]["victim"] == "B");
}
