#include "ransomrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::synth {

using nlohmann::json;

namespace {

constexpr double kNumericCeiling = 1e15;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::int64_t clamp_round(double v) {
    if (!(v > 0)) return 0;
    return static_cast<std::int64_t>(std::llround(std::min(v, kNumericCeiling)));
}

void check_weight(double w, const char* name) {
    if (!(w >= 0.0 && w <= 1.0))
        throw Error("InvalidWeight", std::string(name) + " must lie in [0, 1]", ErrorKind::usage);
}

NoiseFeature noise_for(const std::vector<double>& values) {
    double sd = sample_stddev(values);
    if (sd > 0) return {0.0, sd, false};
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return {0.0, mean != 0 ? 0.1 * std::abs(mean) : 1.0, true};
}

}  // namespace

void NoiseParams::validate() const {
    for (const auto* f : {&revenue, &employees, &ewma}) {
        if (f->mu != 0.0) throw Error("InvalidNoise", "noise must be centered at zero", ErrorKind::usage);
        if (!(f->sigma > 0.0) || !std::isfinite(f->sigma))
            throw Error("InvalidNoise", "noise sigma must be positive", ErrorKind::usage);
    }
}

json NoiseParams::to_json() const {
    auto one = [](const NoiseFeature& f) { return json{{"mu", f.mu}, {"sigma", f.sigma}, {"fallback", f.fallback}}; };
    return {{"revenue", one(revenue)}, {"employees", one(employees)}, {"ewma", one(ewma)}};
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) throw Error("InsufficientData", "standard deviation needs at least two values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0));
}

NoiseParams derive_noise_params(const std::vector<AttackRecord>& attacks) {
    if (attacks.size() < 2) throw Error("InsufficientData", "noise estimation needs at least two attack records");
    std::vector<double> rev, emp, ew;
    for (const auto& a : attacks) {
        rev.push_back(static_cast<double>(a.victim.revenue()));
        emp.push_back(static_cast<double>(a.victim.employees()));
        ew.push_back(a.ewma_value());
    }
    return {noise_for(rev), noise_for(emp), noise_for(ew)};
}

void FeatureWeights::validate() const {
    check_weight(country_of_origin, "country_of_origin");
    check_weight(number_of_employees, "number_of_employees");
    check_weight(revenue, "revenue");
    check_weight(company_type, "company_type");
    check_weight(ewma, "ewma");
}

json FeatureWeights::to_json() const {
    return {{"country_of_origin", country_of_origin},
            {"number_of_employees", number_of_employees},
            {"revenue", revenue},
            {"company_type", company_type},
            {"ewma", ewma}};
}

FeatureWeights FeatureWeights::from_json(const json& j) {
    if (!j.is_object()) throw Error("InvalidWeight", "weights must be a JSON object", ErrorKind::usage);
    FeatureWeights w;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw Error("InvalidWeight", key + " must be a number", ErrorKind::usage);
        double v = value.get<double>();
        if (key == "country_of_origin") w.country_of_origin = v;
        else if (key == "number_of_employees") w.number_of_employees = v;
        else if (key == "revenue") w.revenue = v;
        else if (key == "company_type") w.company_type = v;
        else if (key == "ewma") w.ewma = v;
        else throw Error("InvalidWeight", "unknown weight key '" + key + "'", ErrorKind::usage);
    }
    w.validate();
    return w;
}

void SynthesisConfig::validate() const {
    if (replicas < 1) throw Error("InvalidConfig", "replicas must be >= 1", ErrorKind::usage);
    if (safe_per_victim && *safe_per_victim < 1)
        throw Error("InvalidConfig", "safe samples per victim must be >= 1", ErrorKind::usage);
    if (retry_cap < 1 || numeric_redraw_cap < 1)
        throw Error("InvalidConfig", "retry caps must be >= 1", ErrorKind::usage);
    weights.validate();
    if (noise) noise->validate();
}

std::map<std::string, VariantMetrics> compute_variant_metrics(const std::vector<AttackRecord>& attacks) {
    std::map<std::string, VariantMetrics> out;
    for (const auto& a : attacks) {
        auto [it, fresh] = out.try_emplace(a.adversary_name);
        auto& m = it->second;
        const auto& v = a.victim;
        if (fresh) {
            m.variant = a.adversary_name;
            m.revenue_min = m.revenue_max = v.revenue();
            m.employees_min = m.employees_max = v.employees();
        }
        m.victims.push_back(a);
        m.countries.insert(v.country().str());
        m.org_types.insert(v.org_type());
        m.revenue_min = std::min(m.revenue_min, v.revenue());
        m.revenue_max = std::max(m.revenue_max, v.revenue());
        m.employees_min = std::min(m.employees_min, v.employees());
        m.employees_max = std::max(m.employees_max, v.employees());
    }
    return out;
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::string_view tag, std::string_view variant,
                              std::size_t victim_index, std::size_t replica_index) {
    const std::uint64_t t = fnv1a(tag), v = fnv1a(variant);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),         static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t),            static_cast<std::uint32_t>(t >> 32),
                      static_cast<std::uint32_t>(v),            static_cast<std::uint32_t>(v >> 32),
                      static_cast<std::uint32_t>(victim_index), static_cast<std::uint32_t>(replica_index)};
    return std::mt19937_64(seq);
}

std::vector<AttackRecord> generate_synthetic_victims(const std::vector<AttackRecord>& attacks,
                                                     const ingest::AdversaryIndex& adversaries,
                                                     const SynthesisConfig& cfg, const NoiseParams& noise) {
    cfg.validate();
    noise.validate();
    std::vector<AttackRecord> out;
    out.reserve(attacks.size() * static_cast<std::size_t>(cfg.replicas));
    for (std::size_t i = 0; i < attacks.size(); ++i) {
        const auto& v = attacks[i];
        const auto* group = adversaries.find(v.adversary_name);
        if (!group) throw Error("UnknownAdversary", "'" + v.adversary_name + "' is not a known adversary");
        const double base_ewma = v.ewma_value();
        for (int r = 0; r < cfg.replicas; ++r) {
            auto rng = sample_stream(cfg.seed, "unsafe", v.adversary_name, i, static_cast<std::size_t>(r));
            std::normal_distribution<double> rev(noise.revenue.mu, noise.revenue.sigma);
            std::normal_distribution<double> emp(noise.employees.mu, noise.employees.sigma);
            std::normal_distribution<double> ew(noise.ewma.mu, noise.ewma.sigma);

            AttackRecord s = v;
            s.adversary = *group;
            s.adversary_name = group->name();
            s.victim.set_revenue(clamp_round(static_cast<double>(v.victim.revenue()) + rev(rng)));
            s.victim.set_employees(clamp_round(static_cast<double>(v.victim.employees()) + emp(rng)));
            s.stamp_ewma(std::max(0.0, base_ewma + ew(rng)));
            s.safe = false;
            out.push_back(std::move(s));
        }
    }
    return out;
}

bool did_permutate(const AttackRecord& sample, const AttackRecord& original) {
    const auto& a = sample.victim;
    const auto& b = original.victim;
    return a.country() != b.country() || a.org_type() != b.org_type() || a.revenue() != b.revenue() ||
           a.employees() != b.employees() || sample.ewma != original.ewma;
}

std::int64_t adjust_numeric(std::int64_t original, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng,
                            int redraw_cap) {
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> up(3.0, 20.0), down(0.05, 0.33);
    auto outside = [&](std::int64_t v) { return v < lo || v > hi; };
    for (int k = 0; k < redraw_cap; ++k) {
        const double m = coin(rng) ? up(rng) : down(rng);
        auto v = clamp_round(static_cast<double>(original) * m);
        if (outside(v)) return v;
    }
    // widen: scale up from the band's upper edge instead of the original value
    const double base = std::max<double>(static_cast<double>(hi), 1.0);
    return clamp_round(base * up(rng));
}

std::vector<AttackRecord> generate_safe_samples(const std::map<std::string, VariantMetrics>& variants,
                                                const std::vector<std::string>& country_pool,
                                                const std::vector<OrgType>& company_types_pool, int n,
                                                const FeatureWeights& weights, const SynthesisConfig& cfg) {
    cfg.validate();
    weights.validate();
    if (n < 1) throw Error("InvalidConfig", "safe samples per victim must be >= 1", ErrorKind::usage);

    std::vector<AttackRecord> out;
    for (const auto& [name, m] : variants) {
        std::vector<std::string> countries;
        for (const auto& c : country_pool) {
            auto code = validate_country(c).str();
            if (!m.countries.count(code)) countries.push_back(code);
        }
        std::sort(countries.begin(), countries.end());
        countries.erase(std::unique(countries.begin(), countries.end()), countries.end());
        std::vector<OrgType> types;
        for (auto t : company_types_pool)
            if (!m.org_types.count(t) && std::find(types.begin(), types.end(), t) == types.end()) types.push_back(t);

        for (std::size_t j = 0; j < m.victims.size(); ++j) {
            const auto& victim = m.victims[j];
            victim.ewma_value();  // must be stamped
            for (int i = 0; i < n; ++i) {
                auto rng = sample_stream(cfg.seed, "safe", name, j, static_cast<std::size_t>(i));
                std::bernoulli_distribution p_country(weights.country_of_origin), p_type(weights.company_type),
                    p_revenue(weights.revenue), p_employees(weights.number_of_employees), p_ewma(weights.ewma);

                bool accepted = false;
                for (int pass = 0; pass < cfg.retry_cap && !accepted; ++pass) {
                    AttackRecord sample = victim;
                    if (p_country(rng) && !countries.empty()) {
                        std::uniform_int_distribution<std::size_t> pick(0, countries.size() - 1);
                        sample.victim.set_country(validate_country(countries[pick(rng)]));
                    }
                    if (p_type(rng) && !types.empty()) {
                        std::uniform_int_distribution<std::size_t> pick(0, types.size() - 1);
                        sample.victim.set_org_type(types[pick(rng)]);
                    }
                    if (p_revenue(rng))
                        sample.victim.set_revenue(adjust_numeric(victim.victim.revenue(), m.revenue_min, m.revenue_max,
                                                                 rng, cfg.numeric_redraw_cap));
                    if (p_employees(rng))
                        sample.victim.set_employees(adjust_numeric(victim.victim.employees(), m.employees_min,
                                                                   m.employees_max, rng, cfg.numeric_redraw_cap));
                    if (p_ewma(rng)) sample.stamp_ewma(0.0);
                    sample.safe = true;
                    if (did_permutate(sample, victim)) {
                        out.push_back(std::move(sample));
                        accepted = true;
                    }
                }
                if (!accepted)
                    throw Error("ExhaustedPool", "no feature of a '" + name + "' victim could be permuted after " +
                                                     std::to_string(cfg.retry_cap) + " passes");
            }
        }
    }
    return out;
}

LabeledDataset assemble_dataset(std::vector<AttackRecord> unsafe, std::vector<AttackRecord> safe,
                                const SynthesisConfig& cfg) {
    const std::size_t u = unsafe.size(), s = safe.size();
    const std::size_t diff = u > s ? u - s : s - u;
    if (diff > cfg.imbalance_tolerance)
        throw Error("ImbalanceExceeded", std::to_string(u) + " unsafe vs " + std::to_string(s) +
                                             " safe records exceeds tolerance " +
                                             std::to_string(cfg.imbalance_tolerance));
    LabeledDataset ds;
    ds.unsafe_count = u;
    ds.safe_count = s;
    ds.records = std::move(unsafe);
    ds.records.insert(ds.records.end(), std::make_move_iterator(safe.begin()), std::make_move_iterator(safe.end()));
    auto rng = sample_stream(cfg.seed, "shuffle", "", 0, 0);
    std::shuffle(ds.records.begin(), ds.records.end(), rng);
    return ds;
}

SynthesisResult synthesize(const std::vector<AttackRecord>& attacks, const ingest::AdversaryIndex& adversaries,
                           const SynthesisConfig& cfg) {
    cfg.validate();
    SynthesisResult result;
    result.noise = cfg.noise ? *cfg.noise : derive_noise_params(attacks);

    std::vector<AttackRecord> unsafe;
    if (cfg.include_originals) {
        for (const auto& a : attacks) {
            a.ewma_value();
            unsafe.push_back(a);
            unsafe.back().safe = false;
        }
    }
    result.originals = unsafe.size();
    auto synthetic = generate_synthetic_victims(attacks, adversaries, cfg, result.noise);
    result.synthetic_unsafe = synthetic.size();
    unsafe.insert(unsafe.end(), std::make_move_iterator(synthetic.begin()), std::make_move_iterator(synthetic.end()));

    std::vector<OrgType> types;
    for (std::size_t i = 0; i < vocab::org_types().size(); ++i) types.push_back(static_cast<OrgType>(i));
    auto safe = generate_safe_samples(compute_variant_metrics(attacks), vocab::countries().values(), types,
                                      cfg.effective_safe_per_victim(), cfg.weights, cfg);
    result.safe = safe.size();
    result.dataset = assemble_dataset(std::move(unsafe), std::move(safe), cfg);
    return result;
}

}  // namespace ransomrisk::synth
