#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "builders.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/cti/extract.hpp"
#include "ransomrisk/cti/prompt.hpp"

using namespace ransomrisk;
using namespace ransomrisk::cti;
using nlohmann::json;
using testsupport::error_code;

namespace {

FeatureSpec spec(const std::string& name, const std::string& standard, nlohmann::json answer = "x") {
    return {name, "What " + name + " means.", "Guidance for " + name + ".",
            {{"Sample text for " + name + ".", std::move(answer)}}, {"Read.", "Decide."}, standard};
}

std::vector<FeatureSpec> bundle() {
    return {spec("adversary_name", "Free text", "Rhysida"),
            spec("sophistication", "STIX threat actor sophistication", "intermediate"),
            spec("resource_level", "STIX attack resource level", "organization"),
            spec("target_industry_sectors", "Enumerated STIX Industry Sectors", json::array({"financial-services"})),
            spec("ttps", "MITRE ATT&CK technique IDs", json::array({"T1486"})),
            spec("cves", "CVE identifiers", json::array())};
}

ValidatedFeatures features(const std::string& reply) {
    return validate_features(json::parse(reply), bundle(), StandardRegistry::defaults());
}

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ransomrisk_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

class CountingClient : public ChatClient {
public:
    std::vector<std::string> prompts;
    std::vector<Completion> script;
    std::size_t window = 128000;
    Completion complete(const std::string& prompt) override {
        prompts.push_back(prompt);
        return script.at(prompts.size() - 1);
    }
    std::size_t context_window() const override { return window; }
};

}  // namespace

TEST_CASE("feature spec documents parse from YAML") {
    auto s = parse_feature_spec(R"(
name: target_industry_sectors
intent: Sectors the adversary targets.
guidance: Use the STIX vocabulary.
examples:
  - sample: "The group hit several regional banks."
    answer: [financial-services]
process:
  - Find victims.
  - Map to sectors.
standard: Enumerated STIX Industry Sectors
)");
    CHECK(s.name == "target_industry_sectors");
    REQUIRE(s.examples.size() == 1);
    CHECK(s.examples[0].answer == json::array({"financial-services"}));
    CHECK(s.process.size() == 2);
    CHECK(error_code([] { parse_feature_spec("name: x\n"); }) == "InvalidFeatureSpec");
    CHECK(error_code([] { parse_feature_spec("- a\n- b\n"); }) == "InvalidFeatureSpec");
    CHECK(error_code([] { parse_feature_spec("name: [unclosed\n"); }) == "InvalidFeatureSpec");
}

TEST_CASE("registry and bundle checks") {
    auto r = StandardRegistry::defaults();
    CHECK(r.has("iso 3166-1 ALPHA-2"));
    CHECK(r.get("ISO 3166-1 alpha-2")("us") == "US");
    CHECK(error_code([&] { r.get("Dewey Decimal"); }) == "UnknownStandard");
    CHECK(error_code([&] { check_bundle({spec("a", "Free text"), spec("a", "Free text")}, r); }) == "InvalidFeatureSpec");
    CHECK(error_code([&] { check_bundle({spec("a", "Dewey Decimal")}, r); }) == "InvalidFeatureSpec");

    auto sample = load_prompt_bundle(RANSOMRISK_SAMPLE_DIR "/prompts", r);
    CHECK(sample.size() == 10);
    CHECK(sample.front().name == "adversary_name");
}

TEST_CASE("prompt compilation") {
    auto sectors = spec("target_industry_sectors", "Enumerated STIX Industry Sectors", json::array({"financial-services"}));
    auto p = compile_prompt({sectors}, "The group attacked two banks.");
    CHECK(p.find("financial-services") != std::string::npos);
    CHECK(p.find("rationale") != std::string::npos);
    CHECK(p.find("1. Read.") != std::string::npos);
    CHECK(p.find("Enumerated STIX Industry Sectors") != std::string::npos);

    std::size_t samples = 0;
    for (auto pos = p.find("Sample:"); pos != std::string::npos; pos = p.find("Sample:", pos + 1)) ++samples;
    CHECK(samples == 1);

    auto two = compile_prompt({spec("beta", "Free text"), spec("alpha", "Free text")}, "doc body");
    CHECK(two.find("beta") < two.find("alpha"));
    auto first = two.find("doc body");
    CHECK(first != std::string::npos);
    CHECK(two.find("doc body", first + 1) == std::string::npos);

    CHECK(error_code([] { compile_prompt({}, "x"); }) == "EmptyBundle");
    CHECK(error_code([] { compile_prompt({spec("a", "Free text")}, "  "); }) == "EmptyDocument");
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(continuation_prompt("P", "partial").find("partial") != std::string::npos);
}

TEST_CASE("query follows truncated replies") {
    CountingClient one;
    one.script = {{"{}", FinishReason::complete}};
    auto single = query(one, "prompt");
    REQUIRE(single.size() == 1);
    CHECK(single[0].finish_reason == FinishReason::complete);

    CountingClient three;
    three.script = {{"{\"a\":", FinishReason::length_truncated},
                    {" [1,", FinishReason::length_truncated},
                    {"2]}", FinishReason::complete}};
    auto parts = query(three, "prompt");
    REQUIRE(parts.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(parts[i].part_index == i);
    CHECK(three.prompts[2] == continuation_prompt("prompt", "{\"a\": [1,"));
    CHECK(serialize_responses(parts) == json::parse(R"({"a":[1,2]})"));

    CountingClient endless;
    endless.script.assign(3, {"x", FinishReason::length_truncated});
    CHECK(error_code([&] { query(endless, "p", 2); }) == "PartLimitExceeded");

    CountingClient small;
    small.window = 2;
    CHECK(error_code([&] { query(small, "a prompt longer than eight characters"); }) == "ContextWindowExceeded");
    CHECK(small.prompts.empty());
}

TEST_CASE("fixture client replays multi-part exchanges from disk") {
    auto dir = temp_dir("fixtures");
    write_fixture(dir.string(), "hello",
                  {{0, "{\"k\":", FinishReason::length_truncated}, {1, "1}", FinishReason::complete}});
    FixtureClient client(dir.string());
    CHECK(client.exchange_count() == 1);
    auto parts = query(client, "hello");
    REQUIRE(parts.size() == 2);
    CHECK(serialize_responses(parts)["k"] == 1);
    CHECK(error_code([&] { client.complete("unknown prompt"); }) == "ClientError");
    CHECK(parse_finish_reason("length") == FinishReason::length_truncated);
    CHECK(parse_finish_reason("stop") == FinishReason::complete);
}

TEST_CASE("HTTP client speaks chat completions") {
    httplib::Server server;
    json seen;
    std::string auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        json reply = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "{\"ok\":true}"}}},
                                                 {"finish_reason", "length"}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/broken/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("nope", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpChatClient client("http://127.0.0.1:" + std::to_string(port) + "/v1/", "secret", "test-model");
    auto c = client.complete("hi");
    CHECK(c.text == "{\"ok\":true}");
    CHECK(c.finish_reason == FinishReason::length_truncated);
    CHECK(seen["model"] == "test-model");
    CHECK(seen["messages"][0]["content"] == "hi");
    CHECK(auth == "Bearer secret");

    HttpChatClient broken("http://127.0.0.1:" + std::to_string(port) + "/broken", "", "m");
    CHECK(error_code([&] { broken.complete("hi"); }) == "ClientError");

    server.stop();
    t.join();
}

TEST_CASE("response serialization") {
    CHECK(serialize_responses({{0, "{\"a\": [1,", FinishReason::length_truncated}, {1, "2]}", FinishReason::complete}}) ==
          json::parse(R"({"a":[1,2]})"));
    CHECK(serialize_responses({{0, "[1, 2]", FinishReason::complete}}) == json::array({1, 2}));
    CHECK(serialize_responses({{1, "2]}", FinishReason::complete}, {0, "{\"a\": [1,", FinishReason::length_truncated}}) ==
          json::parse(R"({"a":[1,2]})"));
    CHECK(serialize_responses({{0, "```json\n{\"a\":1}\n```", FinishReason::complete}})["a"] == 1);
    CHECK(error_code([] {
              serialize_responses({{0, "{", FinishReason::length_truncated}, {2, "}", FinishReason::complete}});
          }) == "NonContiguousParts");
    CHECK(error_code([] { serialize_responses({{0, "{\"a\":", FinishReason::complete}}); }) ==
          "UnparseableUnifiedResponse");
}

TEST_CASE("validation keeps valid values and records the rest") {
    auto f = features(R"({
        "adversary_name": {"value": "Rhysida", "rationale": "named in the title"},
        "target_industry_sectors": {"value": ["financial-services", "banking-sector-x", "Financial Services"], "rationale": "banks"},
        "ttps": {"value": ["T1486", "T9999.99"], "rationale": "encryption"},
        "sophistication": "Intermediate",
        "resource_level": {"value": null, "rationale": "not stated"}
    })");
    const auto* sectors = f.find("target_industry_sectors");
    REQUIRE(sectors);
    CHECK(sectors->accepted == std::vector<std::string>{"financial-services"});
    REQUIRE(sectors->rejections.size() == 1);
    CHECK(sectors->rejections[0].first == "banking-sector-x");
    CHECK(sectors->rationale == "banks");
    CHECK(f.values("ttps") == std::vector<std::string>{"T1486"});
    CHECK(f.find("ttps")->rejections[0].second.find("MalformedTechniqueId") != std::string::npos);
    CHECK(f.first("sophistication") == "intermediate");
    CHECK(f.find("cves")->missing);
    CHECK(f.find("cves")->accepted.empty());
    CHECK_FALSE(f.find("resource_level")->missing);
    CHECK(f.find("resource_level")->accepted.empty());
    CHECK(f.to_json()["ttps"]["accepted"] == json::array({"T1486"}));
}

TEST_CASE("STIX synthesis fans out per TTP and CVE") {
    auto small = features(R"({"sophistication": "intermediate", "resource_level": "organization", "ttps": ["T1486"]})");
    auto objs = synthesize_stix(small, "Rhysida");
    REQUIRE(objs.size() == 3);
    CHECK(objs[0].type == StixType::threat_actor);
    CHECK(objs[0].properties["sophistication"] == "intermediate");
    CHECK(objs[1].type == StixType::attack_pattern_ref);
    CHECK(objs[2].type == StixType::relationship);
    CHECK(objs[2].properties["relationship_type"] == "uses");

    auto bare = synthesize_stix(features("{}"), "Nobody");
    CHECK(bare.size() == 1);
    CHECK(bare[0].properties.size() == 1);

    auto two = synthesize_stix(features(R"({"ttps": ["T1486", "T1490"], "cves": ["CVE-2023-4966"]})"), "X");
    std::size_t rels = 0;
    for (const auto& o : two) rels += o.type == StixType::relationship;
    CHECK(rels == 3);

    CHECK(synthesize_stix(features(R"({"adversary_name": "Named"})"), "")[0].properties["name"] == "Named");
    CHECK(error_code([] { synthesize_stix(features("{}"), ""); }) == "MissingCoreIdentity");
    CHECK(objs[0].id == synthesize_stix(small, "Rhysida")[0].id);
    CHECK(objs[0].id != synthesize_stix(small, "Rhysida", 1)[0].id);
    CHECK(objs[0].id.substr(0, 14) == "threat-actor--");
    CHECK(objs[0].id[14 + 14] == '5');
    CHECK(StixObject::from_json(objs[0].to_json()) == objs[0]);
}

TEST_CASE("store: idempotent inserts, merge, queries and persistence") {
    StixStore store;
    std::vector<std::string> ttps;
    for (int i = 0; i < 8; ++i) ttps.push_back("\"T10" + std::to_string(10 + i) + "\"");
    std::string list = "[" + ttps[0];
    for (int i = 1; i < 8; ++i) list += "," + ttps[i];
    list += "]";
    auto objs = synthesize_stix(features(R"({"ttps": )" + list + R"(, "target_industry_sectors": ["healthcare"]})"), "Rhysida");
    store.store_objects(objs);
    auto size = store.size();
    store.store_objects(objs);
    CHECK(store.size() == size);
    CHECK(store.query_adversary("rhysida").capability_count() == 8);
    CHECK(store.query_adversary("Rhysida").ttps().size() == 8);

    auto more = synthesize_stix(features(R"({"ttps": ["T1486"], "target_industry_sectors": ["education"]})"), "Rhysida");
    store.store_objects(more);
    CHECK(store.query_adversary("Rhysida").capability_count() == 9);
    auto actor = store.get(objs[0].id);
    REQUIRE(actor);
    CHECK(actor->properties["targeted_sectors"] == json::array({"education", "healthcare"}));

    CHECK(error_code([&] { store.query_adversary("Akira"); }) == "UnknownAdversary");
    StixObject dangling{"relationship--00000000-0000-5000-8000-000000000000", StixType::relationship,
                        {{"relationship_type", "uses"}, {"source_ref", objs[0].id}, {"target_ref", "attack-pattern-ref--missing"}}};
    CHECK(error_code([&] { store.store_objects({dangling}); }) == "DanglingReference");

    auto dir = temp_dir("store");
    auto path = (dir / "store.json").string();
    store.save(path);
    auto loaded = StixStore::load(path);
    CHECK(loaded.size() == store.size());
    CHECK(loaded.to_json() == store.to_json());
    CHECK(is_stix_bundle(read_json_file(path)));
    CHECK(loaded.adversaries().size() == 1);
}

TEST_CASE("extraction pipeline over replayed fixtures") {
    auto specs = bundle();
    auto registry = StandardRegistry::defaults();
    std::vector<Report> reports{{"alpha", "Alpha attacks banks."}, {"beta", "Beta is also called Alpha Team."},
                                {"gamma", "Gamma report."}};
    std::map<std::string, std::vector<Completion>> ex;
    ex[sha256_hex(compile_prompt(specs, reports[0].text))] = {
        {R"({"ttps": ["T1486", "T9999.99"], "target_industry_sectors": ["financial-services", "banking-sector-x"]})",
         FinishReason::complete}};
    ex[sha256_hex(compile_prompt(specs, reports[1].text))] = {
        {R"({"adversary_name": "ALPHA", "ttps": ["T1490"]})", FinishReason::complete}};
    FixtureClient client(ex);
    StixStore store;
    auto outcomes = run_extraction(reports, specs, registry, client, store);
    REQUIRE(outcomes.size() == 3);
    CHECK(outcomes[0].adversary == "alpha");
    CHECK(outcomes[1].adversary == "alpha");  // merged through the store
    CHECK_FALSE(outcomes[2].error.empty());
    CHECK(store.query_adversary("alpha").capability_count() == 2);

    auto rejects = rejects_to_json(outcomes);
    REQUIRE(rejects.size() == 3);  // the first two still miss features
    CHECK(rejects[0]["rejections"]["ttps"][0]["value"] == "T9999.99");
    CHECK(rejects[0]["missing"].size() == 4);
    CHECK(rejects[2]["report"] == "gamma");
    CHECK(rejects[2].contains("error"));
}
