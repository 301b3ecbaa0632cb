#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/core/types.hpp"
#include "ransomrisk/ingest.hpp"

namespace ransomrisk::synth {

/// Zero-mean Gaussian perturbation scale for one numeric feature.
struct NoiseFeature {
    double mu = 0.0;
    double sigma = 1.0;
    bool fallback = false;  // sample std was zero; sigma comes from the mean
};

struct NoiseParams {
    NoiseFeature revenue;
    NoiseFeature employees;
    NoiseFeature ewma;

    /// Throws InvalidNoise unless every mu is 0 and every sigma > 0.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Sample standard deviation (n - 1 denominator). Throws InsufficientData for n < 2.
double sample_stddev(std::span<const double> values);

/// sigma_f = sample std of f over all records; a zero std falls back to
/// 10% of the mean (1.0 when the mean is 0) and sets `fallback`.
/// Throws InsufficientData with fewer than two records.
NoiseParams derive_noise_params(const std::vector<AttackRecord>& attacks);

/// Probability that each feature is pushed out of a variant's victim profile
/// when building a safe sample.
struct FeatureWeights {
    double country_of_origin = 0.8;
    double number_of_employees = 0.3;
    double revenue = 0.7;
    double company_type = 0.3;
    double ewma = 0.95;

    void validate() const;
    nlohmann::json to_json() const;
    /// Keys as in to_json(); absent keys keep their defaults, unknown keys are rejected.
    static FeatureWeights from_json(const nlohmann::json& j);
};

/// Observed victim profile of one ransomware variant.
struct VariantMetrics {
    std::string variant;
    std::vector<AttackRecord> victims;
    std::set<std::string> countries;
    std::set<OrgType> org_types;
    std::int64_t revenue_min = 0, revenue_max = 0;
    std::int64_t employees_min = 0, employees_max = 0;
};

std::map<std::string, VariantMetrics> compute_variant_metrics(const std::vector<AttackRecord>& attacks);

struct SynthesisConfig {
    int replicas = 10;
    std::uint64_t seed = 42;
    FeatureWeights weights;
    std::optional<NoiseParams> noise;       // derived from the data when unset
    bool include_originals = true;
    std::optional<int> safe_per_victim;     // defaults to unsafe records per victim
    int retry_cap = 64;                     // permutation passes before ExhaustedPool
    int numeric_redraw_cap = 16;
    std::size_t imbalance_tolerance = 0;    // allowed |unsafe - safe|

    void validate() const;
    int effective_safe_per_victim() const { return safe_per_victim.value_or(replicas + (include_originals ? 1 : 0)); }
};

/// Independent RNG stream for one generated sample, derived from
/// (seed, stream tag, variant, victim index, replica index).
std::mt19937_64 sample_stream(std::uint64_t seed, std::string_view tag, std::string_view variant,
                              std::size_t victim_index, std::size_t replica_index);

/// Exactly replicas * |attacks| unsafe records. Country, sectors, org type
/// and adversary linkage are copied from the source; revenue, employees and
/// ewma receive Gaussian noise and are clamped at zero.
std::vector<AttackRecord> generate_synthetic_victims(const std::vector<AttackRecord>& attacks,
                                                     const ingest::AdversaryIndex& adversaries,
                                                     const SynthesisConfig& cfg, const NoiseParams& noise);

/// True iff country, org type, revenue, employees or ewma differs.
bool did_permutate(const AttackRecord& sample, const AttackRecord& original);

/// Pushes a numeric value outside [lo, hi] by a random multiplier in
/// [3, 20] or [0.05, 0.33]; widens from the band edge after `redraw_cap`
/// misses.
std::int64_t adjust_numeric(std::int64_t original, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng,
                            int redraw_cap);

/// `n` safe samples per victim of every variant. Each pass permutes each
/// feature independently with its weight; passes repeat until at least one
/// feature changed. Throws ExhaustedPool after cfg.retry_cap barren passes.
std::vector<AttackRecord> generate_safe_samples(const std::map<std::string, VariantMetrics>& variants,
                                                const std::vector<std::string>& country_pool,
                                                const std::vector<OrgType>& company_types_pool, int n,
                                                const FeatureWeights& weights, const SynthesisConfig& cfg);

struct LabeledDataset {
    std::vector<AttackRecord> records;
    std::size_t unsafe_count = 0;
    std::size_t safe_count = 0;
};

/// Concatenate and shuffle under cfg.seed. Throws ImbalanceExceeded when
/// the class counts differ by more than cfg.imbalance_tolerance.
LabeledDataset assemble_dataset(std::vector<AttackRecord> unsafe, std::vector<AttackRecord> safe,
                                const SynthesisConfig& cfg);

struct SynthesisResult {
    LabeledDataset dataset;
    NoiseParams noise;
    std::size_t originals = 0;
    std::size_t synthetic_unsafe = 0;
    std::size_t safe = 0;
};

/// Full augmentation: originals (optional) + Gaussian replicas + safe
/// samples drawn against every ISO country and organization type.
SynthesisResult synthesize(const std::vector<AttackRecord>& attacks, const ingest::AdversaryIndex& adversaries,
                           const SynthesisConfig& cfg);

}  // namespace ransomrisk::synth
