#include <doctest.h>

#include <cmath>

#include "builders.hpp"
#include "oracles.hpp"
#include "ransomrisk/core/vocabulary.hpp"
#include "ransomrisk/synth.hpp"

using namespace ransomrisk;
using namespace ransomrisk::synth;
using testsupport::error_code;

namespace {

std::vector<AttackRecord> stamped(int n, const std::string& group = "G", std::int64_t revenue = 1000) {
    auto g = testsupport::adversary(group, {"T1486"});
    std::vector<AttackRecord> out;
    for (int i = 0; i < n; ++i)
        out.push_back(testsupport::attack(testsupport::victim(group + std::to_string(i), i % 2 ? "US" : "GB",
                                                              {"manufacturing"}, revenue + 10 * i, 50 + i),
                                          g, {2023, 1 + i % 12, 1}, 1.0 + 0.1 * i));
    return out;
}

std::vector<OrgType> all_types() {
    std::vector<OrgType> t;
    for (int i = 0; i < 6; ++i) t.push_back(static_cast<OrgType>(i));
    return t;
}

}  // namespace

TEST_CASE("sample standard deviation uses n - 1") {
    std::vector<double> v{0, 200};
    CHECK(sample_stddev(v) == doctest::Approx(141.4213562373).epsilon(1e-9));
    CHECK(error_code([] { sample_stddev(std::vector<double>{1}); }) == "InsufficientData");
}

TEST_CASE("zero variation falls back to a scale of the mean") {
    auto a = stamped(3);
    for (auto& r : a) r.victim.set_revenue(100);
    auto p = derive_noise_params(a);
    CHECK(p.revenue.fallback);
    CHECK(p.revenue.sigma == doctest::Approx(10.0));
    CHECK_FALSE(p.employees.fallback);
    for (auto& r : a) r.victim.set_revenue(0);
    CHECK(derive_noise_params(a).revenue.sigma == 1.0);
    CHECK(error_code([] { derive_noise_params(stamped(1)); }) == "InsufficientData");
}

TEST_CASE("synthetic victims: count, copied fields and clamping") {
    auto a = stamped(409);
    ingest::AdversaryIndex index({testsupport::adversary("G", {"T1486"})});
    SynthesisConfig cfg;
    auto noise = derive_noise_params(a);
    auto out = generate_synthetic_victims(a, index, cfg, noise);
    CHECK(out.size() == 4090);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& src = a[i / 10];
        CHECK(out[i].victim.country() == src.victim.country());
        CHECK(out[i].victim.sectors() == src.victim.sectors());
        CHECK(out[i].victim.org_type() == src.victim.org_type());
        CHECK(out[i].adversary_name == "G");
        CHECK_FALSE(out[i].safe);
        CHECK(out[i].victim.revenue() >= 0);
        CHECK(*out[i].ewma >= 0);
    }

    NoiseParams huge{{0, 1e9, false}, {0, 1e9, false}, {0, 1e9, false}};
    auto small = stamped(2, "G", 50);
    bool clamped = false;
    for (const auto& r : generate_synthetic_victims(small, index, cfg, huge)) {
        CHECK(r.victim.revenue() >= 0);
        CHECK(r.victim.employees() >= 0);
        clamped |= r.victim.revenue() == 0;
    }
    CHECK(clamped);
}

TEST_CASE("vanishing noise reproduces the source records") {
    auto a = stamped(4);
    ingest::AdversaryIndex index({testsupport::adversary("G", {"T1486"})});
    SynthesisConfig cfg;
    cfg.replicas = 1;
    NoiseParams tiny{{0, 1e-9, false}, {0, 1e-9, false}, {0, 1e-15, false}};
    auto out = generate_synthetic_victims(a, index, cfg, tiny);
    REQUIRE(out.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(out[i].victim == a[i].victim);
        CHECK(*out[i].ewma == doctest::Approx(*a[i].ewma).epsilon(1e-9));
    }
    CHECK(error_code([&] { generate_synthetic_victims(stamped(2, "Other"), index, cfg, tiny); }) == "UnknownAdversary");
}

TEST_CASE("did_permutate covers exactly the permutation feature set") {
    auto a = stamped(1)[0];
    auto b = a;
    CHECK_FALSE(did_permutate(b, a));
    b.stamp_ewma(0.0);
    CHECK(did_permutate(b, a));

    auto c = testsupport::attack(testsupport::victim(a.victim.name(), a.victim.country().str(), {"healthcare"},
                                                     a.victim.revenue(), a.victim.employees()),
                                 a.adversary, a.attack_date, *a.ewma);
    CHECK_FALSE(did_permutate(c, a));
    auto d = a;
    d.victim.set_org_type(OrgType::school);
    CHECK(did_permutate(d, a));
}

TEST_CASE("adjust_numeric always lands outside the band") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t lo = static_cast<std::int64_t>(rng() % 1000), hi = lo + static_cast<std::int64_t>(rng() % 5000);
        std::int64_t orig = lo + (hi > lo ? static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo)) : 0);
        auto v = adjust_numeric(orig, lo, hi, rng, 16);
        CHECK((v < lo || v > hi));
    }
    std::mt19937_64 r2(1);
    CHECK(adjust_numeric(0, 0, 0, r2, 1) > 0);
}

TEST_CASE("forced ewma permutation leaves everything else alone") {
    auto a = stamped(20);
    FeatureWeights w{0, 0, 0, 0, 1.0};
    SynthesisConfig cfg;
    auto out = generate_safe_samples(compute_variant_metrics(a), vocab::countries().values(), all_types(), 3, w, cfg);
    REQUIRE(out.size() == 60);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& src = a[i / 3];
        CHECK(*out[i].ewma == 0.0);
        CHECK(out[i].safe);
        CHECK(out[i].victim == src.victim);
    }
}

TEST_CASE("default weights put ewma at zero about 95% of the time") {
    auto a = stamped(100);
    SynthesisConfig cfg;
    auto out =
        generate_safe_samples(compute_variant_metrics(a), vocab::countries().values(), all_types(), 100, cfg.weights, cfg);
    REQUIRE(out.size() == 10000);
    double zero = 0;
    std::set<std::string> observed{"US", "GB"};
    for (std::size_t i = 0; i < out.size(); ++i) {
        zero += *out[i].ewma == 0.0;
        CHECK(did_permutate(out[i], a[i / 100]));
        if (out[i].victim.country() != a[i / 100].victim.country())
            CHECK_FALSE(observed.count(out[i].victim.country().str()));
    }
    double frac = zero / 10000.0;
    CHECK(frac >= 0.93);
    CHECK(frac <= 0.97);
    CHECK(std::abs(frac - testsupport::safe_ewma_zero_share(cfg.weights, 100000, 3)) < 0.02);
}

TEST_CASE("a variant covering every country keeps its country") {
    auto a = stamped(2);
    std::vector<std::string> pool{"US", "GB"};
    SynthesisConfig cfg;
    FeatureWeights w{1.0, 0, 0, 0, 0.5};
    auto out = generate_safe_samples(compute_variant_metrics(a), pool, all_types(), 50, w, cfg);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].victim.country() == a[i / 50].victim.country());
        CHECK(*out[i].ewma == 0.0);  // the only feature left that can change
    }

    FeatureWeights only_country{1.0, 0, 0, 0, 0};
    CHECK(error_code([&] { generate_safe_samples(compute_variant_metrics(a), pool, all_types(), 1, only_country, cfg); }) ==
          "ExhaustedPool");
}

TEST_CASE("assembly balances, shuffles deterministically and enforces tolerance") {
    auto unsafe = stamped(10);
    auto safe = stamped(10);
    for (auto& s : safe) s.safe = true;
    SynthesisConfig cfg;
    auto d1 = assemble_dataset(unsafe, safe, cfg);
    auto d2 = assemble_dataset(unsafe, safe, cfg);
    CHECK(d1.records.size() == 20);
    CHECK(d1.unsafe_count == 10);
    CHECK(d1.records == d2.records);
    CHECK(error_code([&] { assemble_dataset(unsafe, {}, cfg); }) == "ImbalanceExceeded");
    cfg.imbalance_tolerance = 10;
    CHECK(assemble_dataset(unsafe, {}, cfg).records.size() == 10);
}

TEST_CASE("full synthesis arithmetic") {
    auto a = stamped(409);
    ingest::AdversaryIndex index({testsupport::adversary("G", {"T1486"})});
    SynthesisConfig cfg;
    cfg.include_originals = false;
    auto r = synthesize(a, index, cfg);
    CHECK(r.synthetic_unsafe == 4090);
    CHECK(r.safe == 4090);
    CHECK(r.dataset.records.size() == 8180);

    cfg.include_originals = true;
    auto with = synthesize(a, index, cfg);
    CHECK(with.dataset.unsafe_count == 4499);
    CHECK(with.dataset.safe_count == 4499);
}

TEST_CASE("weights parse strictly") {
    auto w = FeatureWeights::from_json(nlohmann::json::parse(R"({"ewma": 0.5})"));
    CHECK(w.ewma == 0.5);
    CHECK(w.country_of_origin == 0.8);
    CHECK(error_code([] { FeatureWeights::from_json(nlohmann::json::parse(R"({"colour": 1})")); }) == "InvalidWeight");
    CHECK(error_code([] { FeatureWeights::from_json(nlohmann::json::parse(R"({"ewma": 2})")); }) == "InvalidWeight");
    SynthesisConfig cfg;
    cfg.replicas = 0;
    CHECK(error_code([&] { cfg.validate(); }) == "InvalidConfig");
}
