#include <doctest.h>

#include <filesystem>

#include "builders.hpp"
#include "ransomrisk/app.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/forest/model_io.hpp"

using namespace ransomrisk;
using nlohmann::json;
using testsupport::error_code;

namespace {

const std::string kSample = RANSOMRISK_SAMPLE_DIR;

struct SampleRun {
    std::string out;
    app::PipelineSummary summary;
};

// The sample pipeline takes about a second; run it once for the whole file.
const SampleRun& sample_run() {
    static const SampleRun run = [] {
        auto out = (std::filesystem::temp_directory_path() / "ransomrisk_test_app").string();
        std::filesystem::remove_all(out);
        auto summary = app::run_pipeline(read_json_file(kSample + "/pipeline.json"), kSample, out);
        return SampleRun{out, summary};
    }();
    return run;
}

forest::RiskAssessment assessment(const std::string& group, int level, double confidence) {
    return {group, confidence, level, std::string(forest::risk_label(level)), {}};
}

}  // namespace

TEST_CASE("option parsing rejects unknown keys") {
    auto s = app::synthesis_config_from_json(json::parse(R"({"replicas": 3, "weights": {"ewma": 0.5}})"), 7);
    CHECK(s.replicas == 3);
    CHECK(s.seed == 7);
    CHECK(s.weights.ewma == 0.5);
    CHECK(s.weights.revenue == 0.7);
    CHECK(error_code([] { app::synthesis_config_from_json(json::parse(R"({"replica": 3})"), 1); }) == "UnknownOption");

    auto f = app::forest_config_from_json(json::parse(R"({"n_trees": 5, "max_features": 3})"), 9);
    CHECK(f.n_trees == 5);
    CHECK(f.seed == 9);
    CHECK(*f.max_features == 3);
    CHECK(error_code([] { app::forest_config_from_json(json::parse(R"({"trees": 5})"), 1); }) == "UnknownOption");
    CHECK(error_code([] { app::forest_config_from_json(json::parse(R"({"n_trees": "many"})"), 1); }) == "UnknownOption");
}

TEST_CASE("report ordering and rendering") {
    std::vector<forest::RiskAssessment> a{assessment("Low", 3, 0.35), assessment("B", 9, 0.95),
                                          assessment("A", 9, 0.95), assessment("C", 9, 0.99)};
    app::order_assessments(a);
    CHECK(a[0].group == "C");
    CHECK(a[1].group == "A");
    CHECK(a[2].group == "B");
    CHECK(a[3].group == "Low");

    auto j = app::report_json({assessment("Low", 3, 0.35), assessment("High", 9, 0.97)}, json{{"seed", 42}});
    CHECK(j["schema_version"] == app::kReportSchemaVersion);
    CHECK(j["assessments"][0]["group"] == "High");
    auto md = app::report_markdown(j);
    CHECK(md.find("| High |") < md.find("| Low |"));
    CHECK(md.find("seed") != std::string::npos);
    CHECK(app::report_markdown(json::parse(j.dump())) == md);

    auto empty = app::report_json({}, json());
    CHECK(empty["assessments"].empty());
    CHECK(app::report_markdown(empty).find("No assessments") != std::string::npos);
}

TEST_CASE("config hash ignores key order") {
    CHECK(app::config_hash(json::parse(R"({"a":1,"b":2})")) == app::config_hash(json::parse(R"({"b":2,"a":1})")));
    CHECK(app::config_hash(json::parse(R"({"a":1})")) != app::config_hash(json::parse(R"({"a":2})")));
}

TEST_CASE("sample pipeline writes every artifact") {
    const auto& run = sample_run();
    for (const char* f : {"store.json", "attacks.json", "ewma.json", "dataset.csv", "model.json", "metrics.json",
                          "report.json", "report.md", "rejects.json", "ingest_rejects.json"})
        CHECK_MESSAGE(std::filesystem::exists(run.out + "/" + f), f);
    CHECK(run.summary.metrics.f1 >= 0.95);
    CHECK(run.summary.provenance["adversaries"] == 6);
    CHECK(run.summary.provenance["dataset_unsafe"] == run.summary.provenance["dataset_safe"]);

    auto rejects = read_json_file(run.out + "/ingest_rejects.json");
    bool malformed_line = false;
    for (const auto& r : rejects) malformed_line |= r.contains("line");
    CHECK(malformed_line);
}

TEST_CASE("predictions for the sample company") {
    const auto& run = sample_run();
    auto model = forest::load_model(run.out + "/model.json");
    ingest::AdversaryIndex index(app::load_adversaries(run.out + "/store.json"));
    auto table = activity::EwmaTable::from_json(read_json_file(run.out + "/ewma.json"));
    auto company = victim_from_json(read_json_file(kSample + "/company.json"));
    CHECK(company.employees() == 5000);
    CHECK(company.revenue() == 2100000000);

    auto phobos = app::predict(model, index, table, {company, "Phobos", {2024, 3}});
    CHECK(phobos.level == 9);
    CHECK(phobos.label == "Extremely High");
    CHECK(phobos.top_features.size() == app::kTopFeatures);
    for (std::size_t i = 1; i < phobos.top_features.size(); ++i)
        CHECK(phobos.top_features[i - 1].second >= phobos.top_features[i].second);

    activity::EwmaTable silent;  // no recorded activity: ewma 0 for every group
    auto rhysida = app::predict(model, index, silent, {company, "Rhysida", {2024, 3}});
    CHECK(rhysida.level <= 3);

    CHECK(app::predict(model, index, table, {company, "ALPHV", {2024, 3}}).group == "BlackCat");
    CHECK(error_code([&] { app::predict(model, index, table, {company, "Nobody", {2024, 3}}); }) == "UnknownGroup");

    // predict leaves its inputs untouched
    auto before = forest::serialize_model(model);
    auto table_before = table.to_json();
    app::predict(model, index, table, {company, "Akira", {2024, 3}});
    CHECK(forest::serialize_model(model) == before);
    CHECK(table.to_json() == table_before);
}

TEST_CASE("pipeline failures name the stage and the path") {
    auto config = read_json_file(kSample + "/pipeline.json");
    config["ingest"]["victims"] = "missing_victims.jsonl";
    auto out = (std::filesystem::temp_directory_path() / "ransomrisk_test_app_missing").string();
    try {
        app::run_pipeline(config, kSample, out);
        FAIL("expected an error");
    } catch (const Error& e) {
        std::string what = e.what();
        CHECK(what.find("stage 'ingest'") != std::string::npos);
        CHECK(what.find("missing_victims.jsonl") != std::string::npos);
        CHECK(e.kind() == ErrorKind::data);
    }

    auto bad = read_json_file(kSample + "/pipeline.json");
    bad["colour"] = "blue";
    CHECK(error_code([&] { app::run_pipeline(bad, kSample, out); }) == "UnknownOption");
}

TEST_CASE("adversary files in either layout") {
    auto dir = std::filesystem::temp_directory_path() / "ransomrisk_test_adv";
    std::filesystem::create_directories(dir);
    auto path = (dir / "adv.json").string();
    write_json_file(path, json::array({to_json(testsupport::adversary("G", {"T1486"}, {"Gee"}))}));
    auto list = app::load_adversaries(path);
    REQUIRE(list.size() == 1);
    CHECK(list[0].aliases().count("Gee"));
    write_json_file(path, json{{"not", "a list"}});
    CHECK(error_code([&] { app::load_adversaries(path); }) == "FormatError");
}
