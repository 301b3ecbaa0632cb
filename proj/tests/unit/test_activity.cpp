#include <doctest.h>

#include "builders.hpp"
#include "oracles.hpp"
#include "ransomrisk/activity.hpp"

using namespace ransomrisk;
using namespace ransomrisk::activity;
using testsupport::error_code;

namespace {

MonthlySeries series(std::vector<long> counts) { return {"G", {2023, 1}, std::move(counts)}; }

}  // namespace

TEST_CASE("bucketing counts attacks per month with explicit gaps") {
    auto g = testsupport::adversary("G");
    auto v = testsupport::victim("V");
    std::vector<AttackRecord> attacks{testsupport::attack(v, g, {2023, 5, 1}), testsupport::attack(v, g, {2023, 5, 9}),
                                      testsupport::attack(v, g, {2023, 7, 30}), testsupport::attack(v, g, {2023, 5, 31})};
    auto b = bucket_by_month(attacks);
    REQUIRE(b.size() == 1);
    CHECK(b["G"].start_month == YearMonth{2023, 5});
    CHECK(b["G"].counts == std::vector<long>{3, 0, 1});
    CHECK(b["G"].end_month() == YearMonth{2023, 7});

    auto single = bucket_by_month({testsupport::attack(v, g, {2022, 12, 1})});
    CHECK(single["G"].counts == std::vector<long>{1});
    CHECK(bucket_by_month({}).empty());
}

TEST_CASE("EWMA recursion examples") {
    EwmaParams p;
    CHECK(compute_ewma(series({5}), p)[0] == doctest::Approx(4.0).epsilon(1e-12));
    auto two = compute_ewma(series({5, 0}), p);
    CHECK(two[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(compute_ewma(series({0, 0, 0}), p) == std::vector<double>{0, 0, 0});
    CHECK(error_code([&] { compute_ewma(series({}), p); }) == "EmptySeries");
    CHECK(error_code([] { EwmaParams{1.5}.validate(); }) == "InvalidLambda");
}

TEST_CASE("EWMA matches the closed-form sum") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> count(0, 30);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<long> x(1 + rng() % 36);
        for (auto& c : x) c = count(rng);
        for (double lambda : {0.0, 0.2, 0.5, 0.9}) {
            auto got = compute_ewma(series(x), EwmaParams{lambda});
            auto want = testsupport::ewma_closed_form(x, lambda);
            for (std::size_t t = 0; t < x.size(); ++t) CHECK(got[t] == doctest::Approx(want[t]).epsilon(1e-9));
        }
    }
}

TEST_CASE("table lookups inside, after and before a series") {
    auto g = testsupport::adversary("Phobos");
    auto v = testsupport::victim("V");
    std::vector<AttackRecord> attacks;
    for (int i = 0; i < 5; ++i) attacks.push_back(testsupport::attack(v, g, {2023, 3, 1}));
    auto table = EwmaTable::build(attacks, {});
    CHECK(table.ewma_at("Phobos", {2023, 3}) == doctest::Approx(4.0));
    CHECK(table.ewma_at("phobos", {2023, 5}) == doctest::Approx(4.0 * 0.04));
    CHECK(table.ewma_at("Phobos", {2023, 2}) == 0.0);
    CHECK(error_code([&] { table.ewma_at("Akira", {2023, 3}); }) == "UnknownGroup");

    EwmaTable unit(0.2, {{"G", {{2023, 1}, {1.0}}}});
    CHECK(unit.ewma_at("G", {2023, 3}) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("table JSON round-trip and stamping") {
    auto g = testsupport::adversary("G");
    auto v = testsupport::victim("V");
    std::vector<AttackRecord> attacks{testsupport::attack(v, g, {2023, 1, 1}), testsupport::attack(v, g, {2023, 4, 1})};
    auto table = EwmaTable::build(attacks, {});
    auto back = EwmaTable::from_json(table.to_json());
    CHECK(back.groups().at("G").values == table.groups().at("G").values);
    CHECK(back.to_json() == table.to_json());

    stamp_ewma(attacks, table);
    CHECK(*attacks[0].ewma == doctest::Approx(0.8));
    CHECK(*attacks[1].ewma == table.ewma_at("G", {2023, 4}));

    auto gap = nlohmann::json::parse(R"({"lambda":0.2,"groups":{"G":[{"month":"2023-01","v":1},{"month":"2023-03","v":1}]}})");
    CHECK(error_code([&] { EwmaTable::from_json(gap); }) == "FormatError");
}
