#pragma once

// Experiment pipeline: generate instances, run the exact and randomized
// solvers on each (with a paired conflict-free variant of the same instance),
// and aggregate summary tables and histogram data. Record lines are fully
// deterministic for a fixed master seed and budget; wall-clock timings live
// in a separate file.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confair/criteria.hpp"
#include "confair/exact.hpp"
#include "confair/generators.hpp"
#include "confair/io.hpp"

namespace confair {

struct ExperimentConfig {
    std::vector<GraphModel> models = {GraphModel::erdos_renyi, GraphModel::barabasi_albert,
                                      GraphModel::watts_strogatz};
    int count_per_model = 200;    // quota per model, as in the generator
    std::uint64_t seed = 0;
    int n_min = 2, n_max = 6;
    int m_cap = 14;
    int value_points = 1000;
    int trials = 1000;            // randomized-allocation trials per instance
    SearchBudget budget;
};

struct ExperimentRecord {
    int instance_id = 0;
    std::string model;
    std::uint64_t seed = 0;
    int n = 0, m = 0, n_edges = 0, max_degree = 0, cc = 0;
    bool quota = false;

    bool mms_timeout = false;     // exact mu or maximin search hit the budget
    bool ef1_timeout = false;
    bool mnw_timeout = false;

    bool ef1_found = false;
    bool mms_exists = false;      // best feasible min_i v_i(A_i)/mu_i >= 1
    Rational mms_best_ratio = 0;

    Rational random_alpha_mms = 0;     // trial averages, conflicts respected
    Rational random_alpha_prop = 0;
    Rational random_alpha_mms_cf = 0;  // same seeds, edges removed (lottery)
    Rational random_alpha_prop_cf = 0;

    bool mnw_is_ef1 = false;
    Rational mnw_alpha_mms = 0;
    std::optional<Rational> mnw_ef1_nw_drop;  // 1 - product ratio, when comparable

    bool mnw_is_ef1_cf = false;
    Rational mnw_alpha_mms_cf = 0;
    std::optional<Rational> mnw_ef1_nw_drop_cf;
};

namespace detail {

// Relative Nash product reduction from enforcing EF1; comparable only when
// the same number of agents stays positive.
inline std::optional<Rational> nw_drop(const NashWelfare& free, const NashWelfare& ef1) {
    if (free.count_positive != ef1.count_positive || free.product == 0) return std::nullopt;
    return Rational(1) - ef1.product / free.product;
}

}  // namespace detail

inline ExperimentRecord evaluate_instance(const GenRecord& gen, int trials,
                                          const SearchBudget& budget) {
    const Instance& inst = gen.inst;
    ExperimentRecord rec;
    rec.instance_id = gen.instance_id;
    rec.model = model_name(gen.model);
    rec.seed = gen.seed;
    rec.n = inst.n_agents;
    rec.m = inst.n_items;
    rec.n_edges = static_cast<int>(inst.edges.size());
    GraphStats st = graph_stats(inst);
    rec.max_degree = st.max_degree;
    rec.cc = st.largest_component;
    rec.quota = gen.counts_quota;

    Instance cf = validate_instance(inst.n_agents, inst.n_items,
                                    std::vector<std::vector<Rational>>(inst.valuations), {});

    std::optional<MmsProfile> mu, mu_cf;
    try {
        mu = mms_profile(inst, budget);
        mu_cf = mms_profile(cf, budget);
    } catch (const BudgetExceeded&) {
        rec.mms_timeout = true;
    }

    std::optional<Allocation> ef1_witness;
    try {
        ef1_witness = ef1_exists(inst, budget);
        rec.ef1_found = ef1_witness.has_value();
    } catch (const BudgetExceeded&) {
        rec.ef1_timeout = true;
    }

    if (mu) {
        try {
            MmsAllocationResult best = mms_allocation_exact(inst, *mu, budget);
            rec.mms_best_ratio = best.ratio;
            rec.mms_exists = best.ratio >= 1;
        } catch (const BudgetExceeded&) {
            rec.mms_timeout = true;
            mu.reset();
        }
    }

    if (mu) {
        Rational mms_sum = 0, prop_sum = 0, mms_cf_sum = 0, prop_cf_sum = 0;
        for (int t = 0; t < trials; ++t) {
            std::uint64_t s = derive_seed(derive_seed(gen.seed, 3), t);
            auto [alloc, trace] = randomized_allocation(inst, s);
            mms_sum += alpha_mms(inst, alloc, *mu);
            prop_sum += prop_ratio(inst, alloc);
            auto [alloc_cf, trace_cf] = randomized_allocation(cf, s);
            mms_cf_sum += alpha_mms(cf, alloc_cf, *mu_cf);
            prop_cf_sum += prop_ratio(cf, alloc_cf);
        }
        rec.random_alpha_mms = mms_sum / trials;
        rec.random_alpha_prop = prop_sum / trials;
        rec.random_alpha_mms_cf = mms_cf_sum / trials;
        rec.random_alpha_prop_cf = prop_cf_sum / trials;
    }

    try {
        MnwResult mnw = mnw_exact(inst, false, budget);
        rec.mnw_is_ef1 = is_ef1(inst, mnw.alloc);
        if (mu) rec.mnw_alpha_mms = alpha_mms(inst, mnw.alloc, *mu);
        if (rec.ef1_found) {
            MnwResult bound = rec.mnw_is_ef1
                                  ? mnw
                                  : mnw_ef1_constrained(inst, budget,
                                                        ef1_witness ? &*ef1_witness : nullptr);
            rec.mnw_ef1_nw_drop = detail::nw_drop(mnw.welfare, bound.welfare);
        }
        MnwResult mnw_cf = mnw_exact(cf, false, budget);
        rec.mnw_is_ef1_cf = is_ef1(cf, mnw_cf.alloc);
        if (mu_cf) rec.mnw_alpha_mms_cf = alpha_mms(cf, mnw_cf.alloc, *mu_cf);
        try {
            MnwResult bound_cf = rec.mnw_is_ef1_cf ? mnw_cf : mnw_ef1_constrained(cf, budget);
            rec.mnw_ef1_nw_drop_cf = detail::nw_drop(mnw_cf.welfare, bound_cf.welfare);
        } catch (const NoEf1Allocation&) {
        }
    } catch (const BudgetExceeded&) {
        rec.mnw_timeout = true;
    }
    return rec;
}

template <typename Progress>
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, Progress&& progress) {
    std::vector<ExperimentRecord> out;
    int next_id = 0;
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        GenConfig gc;
        gc.model = cfg.models[mi];
        gc.target_count = cfg.count_per_model;
        gc.seed = derive_seed(cfg.seed, mi);
        gc.n_min = cfg.n_min;
        gc.n_max = cfg.n_max;
        gc.m_cap = cfg.m_cap;
        gc.value_points = cfg.value_points;
        gen_instances(gc, [&](GenRecord gr) {
            gr.instance_id = next_id++;
            ExperimentRecord rec = evaluate_instance(gr, cfg.trials, cfg.budget);
            progress(rec);
            out.push_back(std::move(rec));
        });
    }
    return out;
}

inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, [](const ExperimentRecord&) {});
}

// record line serialization (JSON object per line, fixed key order)

inline json record_to_json(const ExperimentRecord& r) {
    json j;
    j["instance_id"] = r.instance_id;
    j["model"] = r.model;
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["m"] = r.m;
    j["edges"] = r.n_edges;
    j["max_degree"] = r.max_degree;
    j["cc"] = r.cc;
    j["quota"] = r.quota;
    j["mms_timeout"] = r.mms_timeout;
    j["ef1_timeout"] = r.ef1_timeout;
    j["mnw_timeout"] = r.mnw_timeout;
    j["ef1_found"] = r.ef1_found;
    j["mms_exists"] = r.mms_exists;
    j["mms_best_ratio"] = to_string(r.mms_best_ratio);
    j["random_alpha_mms"] = to_string(r.random_alpha_mms);
    j["random_alpha_prop"] = to_string(r.random_alpha_prop);
    j["random_alpha_mms_cf"] = to_string(r.random_alpha_mms_cf);
    j["random_alpha_prop_cf"] = to_string(r.random_alpha_prop_cf);
    j["mnw_is_ef1"] = r.mnw_is_ef1;
    j["mnw_alpha_mms"] = to_string(r.mnw_alpha_mms);
    j["mnw_ef1_nw_drop"] = r.mnw_ef1_nw_drop ? json(to_string(*r.mnw_ef1_nw_drop)) : json();
    j["mnw_is_ef1_cf"] = r.mnw_is_ef1_cf;
    j["mnw_alpha_mms_cf"] = to_string(r.mnw_alpha_mms_cf);
    j["mnw_ef1_nw_drop_cf"] =
        r.mnw_ef1_nw_drop_cf ? json(to_string(*r.mnw_ef1_nw_drop_cf)) : json();
    return j;
}

inline ExperimentRecord record_from_json(const json& j) {
    ExperimentRecord r;
    r.instance_id = j.at("instance_id").get<int>();
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n = j.at("n").get<int>();
    r.m = j.at("m").get<int>();
    r.n_edges = j.at("edges").get<int>();
    r.max_degree = j.at("max_degree").get<int>();
    r.cc = j.at("cc").get<int>();
    r.quota = j.at("quota").get<bool>();
    r.mms_timeout = j.at("mms_timeout").get<bool>();
    r.ef1_timeout = j.at("ef1_timeout").get<bool>();
    r.mnw_timeout = j.at("mnw_timeout").get<bool>();
    r.ef1_found = j.at("ef1_found").get<bool>();
    r.mms_exists = j.at("mms_exists").get<bool>();
    r.mms_best_ratio = parse_rational(j.at("mms_best_ratio").get<std::string>());
    r.random_alpha_mms = parse_rational(j.at("random_alpha_mms").get<std::string>());
    r.random_alpha_prop = parse_rational(j.at("random_alpha_prop").get<std::string>());
    r.random_alpha_mms_cf = parse_rational(j.at("random_alpha_mms_cf").get<std::string>());
    r.random_alpha_prop_cf = parse_rational(j.at("random_alpha_prop_cf").get<std::string>());
    r.mnw_is_ef1 = j.at("mnw_is_ef1").get<bool>();
    r.mnw_alpha_mms = parse_rational(j.at("mnw_alpha_mms").get<std::string>());
    if (!j.at("mnw_ef1_nw_drop").is_null())
        r.mnw_ef1_nw_drop = parse_rational(j.at("mnw_ef1_nw_drop").get<std::string>());
    r.mnw_is_ef1_cf = j.at("mnw_is_ef1_cf").get<bool>();
    r.mnw_alpha_mms_cf = parse_rational(j.at("mnw_alpha_mms_cf").get<std::string>());
    if (!j.at("mnw_ef1_nw_drop_cf").is_null())
        r.mnw_ef1_nw_drop_cf = parse_rational(j.at("mnw_ef1_nw_drop_cf").get<std::string>());
    return r;
}

inline std::string records_to_lines(const std::vector<ExperimentRecord>& recs) {
    std::string out;
    for (const ExperimentRecord& r : recs) out += record_to_json(r).dump() + "\n";
    return out;
}

inline std::vector<ExperimentRecord> records_from_lines(const std::string& text) {
    std::vector<ExperimentRecord> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(record_from_json(parse_document(line)));
    }
    return out;
}

// histograms: width 0.05 over [0.5, 1.0) plus underflow and overflow bins

struct Histogram {
    std::vector<double> bin_edges;  // left edges, 0.50 .. 0.95
    std::vector<long> counts;
    long underflow = 0;
    long overflow = 0;  // values >= 1 (target attained)

    Histogram() : bin_edges(10), counts(10, 0) {
        for (int b = 0; b < 10; ++b) bin_edges[b] = 0.5 + 0.05 * b;
    }

    void add(const Rational& value) {
        if (value >= 1) { ++overflow; return; }
        if (value < Rational(1, 2)) { ++underflow; return; }
        // bin index from the exact value, no float round-off at the edges
        Rational scaled = (value - Rational(1, 2)) * 20;
        long b = static_cast<long>(numerator(scaled) / denominator(scaled));
        ++counts[static_cast<std::size_t>(b)];
    }

    long total() const {
        long t = underflow + overflow;
        for (long c : counts) t += c;
        return t;
    }
};

inline std::string histogram_to_text(const Histogram& h) {
    char buf[64];
    std::string out = "-inf," + std::to_string(h.underflow) + "\n";
    for (std::size_t b = 0; b < h.bin_edges.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%.2f,%ld\n", h.bin_edges[b], h.counts[b]);
        out += buf;
    }
    out += "1.00," + std::to_string(h.overflow) + "\n";
    return out;
}

struct ModelSummary {
    std::string model;
    long count = 0, quota_count = 0, mms_included = 0, ef1_included = 0, mnw_included = 0;
    double avg_n = 0, avg_m = 0, avg_edges = 0, avg_max_degree = 0, avg_cc = 0;
    double pct_ef1 = 0, pct_mms = 0;
    double mean_random_alpha_mms = 0, mean_random_alpha_prop = 0;
    double mean_random_alpha_mms_cf = 0, mean_random_alpha_prop_cf = 0;
    double pct_mnw_ef1 = 0, mean_mnw_alpha_mms = 0, pct_mnw_attains_mms = 0, mean_nw_drop = 0;
    double pct_mnw_ef1_cf = 0, mean_mnw_alpha_mms_cf = 0;
};

struct ExperimentSummary {
    std::vector<ModelSummary> per_model;  // per model, then a combined "all" row
    Histogram random_alpha_mms, random_alpha_mms_cf;
    Histogram mnw_alpha_mms, mnw_alpha_mms_cf;
};

namespace detail {

inline ModelSummary summarize_group(const std::string& name,
                                    const std::vector<const ExperimentRecord*>& recs) {
    ModelSummary s;
    s.model = name;
    s.count = static_cast<long>(recs.size());
    Rational r_mms = 0, r_prop = 0, r_mms_cf = 0, r_prop_cf = 0, r_mnw = 0, r_mnw_cf = 0,
             r_drop = 0;
    long ef1_yes = 0, mms_yes = 0, mnw_ef1 = 0, mnw_ef1_cf = 0, mnw_attains = 0, drops = 0;
    for (const ExperimentRecord* r : recs) {
        if (r->quota) ++s.quota_count;
        s.avg_n += r->n;
        s.avg_m += r->m;
        s.avg_edges += r->n_edges;
        s.avg_max_degree += r->max_degree;
        s.avg_cc += r->cc;
        if (!r->ef1_timeout) {
            ++s.ef1_included;
            if (r->ef1_found) ++ef1_yes;
        }
        if (!r->mms_timeout) {
            ++s.mms_included;
            if (r->mms_exists) ++mms_yes;
            r_mms += r->random_alpha_mms;
            r_prop += r->random_alpha_prop;
            r_mms_cf += r->random_alpha_mms_cf;
            r_prop_cf += r->random_alpha_prop_cf;
        }
        if (!r->mnw_timeout) {
            ++s.mnw_included;
            if (r->mnw_is_ef1) ++mnw_ef1;
            if (r->mnw_is_ef1_cf) ++mnw_ef1_cf;
            if (!r->mms_timeout) {
                r_mnw += r->mnw_alpha_mms;
                r_mnw_cf += r->mnw_alpha_mms_cf;
                if (r->mnw_alpha_mms >= 1) ++mnw_attains;
            }
            if (r->mnw_ef1_nw_drop) {
                r_drop += *r->mnw_ef1_nw_drop;
                ++drops;
            }
        }
    }
    if (s.count) {
        s.avg_n /= s.count;
        s.avg_m /= s.count;
        s.avg_edges /= s.count;
        s.avg_max_degree /= s.count;
        s.avg_cc /= s.count;
    }
    if (s.ef1_included) s.pct_ef1 = 100.0 * ef1_yes / s.ef1_included;
    if (s.mms_included) {
        s.pct_mms = 100.0 * mms_yes / s.mms_included;
        s.mean_random_alpha_mms = to_double(r_mms / s.mms_included);
        s.mean_random_alpha_prop = to_double(r_prop / s.mms_included);
        s.mean_random_alpha_mms_cf = to_double(r_mms_cf / s.mms_included);
        s.mean_random_alpha_prop_cf = to_double(r_prop_cf / s.mms_included);
    }
    if (s.mnw_included) {
        s.pct_mnw_ef1 = 100.0 * mnw_ef1 / s.mnw_included;
        s.pct_mnw_ef1_cf = 100.0 * mnw_ef1_cf / s.mnw_included;
    }
    long both = 0;
    for (const ExperimentRecord* r : recs)
        if (!r->mnw_timeout && !r->mms_timeout) ++both;
    if (both) {
        s.mean_mnw_alpha_mms = to_double(r_mnw / both);
        s.mean_mnw_alpha_mms_cf = to_double(r_mnw_cf / both);
        s.pct_mnw_attains_mms = 100.0 * mnw_attains / both;
    }
    if (drops) s.mean_nw_drop = to_double(r_drop / drops);
    return s;
}

}  // namespace detail

inline ExperimentSummary summarize(const std::vector<ExperimentRecord>& records) {
    ExperimentSummary sum;
    std::map<std::string, std::vector<const ExperimentRecord*>> groups;
    std::vector<const ExperimentRecord*> all;
    for (const ExperimentRecord& r : records) {
        groups[r.model].push_back(&r);
        all.push_back(&r);
        if (!r.mms_timeout) {
            sum.random_alpha_mms.add(r.random_alpha_mms);
            sum.random_alpha_mms_cf.add(r.random_alpha_mms_cf);
            if (!r.mnw_timeout) {
                sum.mnw_alpha_mms.add(r.mnw_alpha_mms);
                sum.mnw_alpha_mms_cf.add(r.mnw_alpha_mms_cf);
            }
        }
    }
    for (const auto& [name, recs] : groups)
        sum.per_model.push_back(detail::summarize_group(name, recs));
    if (groups.size() > 1) sum.per_model.push_back(detail::summarize_group("all", all));
    return sum;
}

inline std::string summary_to_csv(const ExperimentSummary& sum) {
    std::string out =
        "model,count,quota_count,avg_n,avg_m,avg_edges,avg_max_degree,avg_cc,"
        "pct_ef1,pct_mms,mean_random_alpha_mms,mean_random_alpha_prop,"
        "mean_random_alpha_mms_cf,mean_random_alpha_prop_cf,"
        "pct_mnw_ef1,mean_mnw_alpha_mms,pct_mnw_attains_mms,mean_nw_drop,"
        "pct_mnw_ef1_cf,mean_mnw_alpha_mms_cf\n";
    char buf[512];
    for (const ModelSummary& s : sum.per_model) {
        std::snprintf(buf, sizeof buf,
                      "%s,%ld,%ld,%.4f,%.4f,%.4f,%.4f,%.4f,%.2f,%.2f,%.6f,%.6f,%.6f,%.6f,"
                      "%.2f,%.6f,%.2f,%.6f,%.2f,%.6f\n",
                      s.model.c_str(), s.count, s.quota_count, s.avg_n, s.avg_m, s.avg_edges,
                      s.avg_max_degree, s.avg_cc, s.pct_ef1, s.pct_mms,
                      s.mean_random_alpha_mms, s.mean_random_alpha_prop,
                      s.mean_random_alpha_mms_cf, s.mean_random_alpha_prop_cf, s.pct_mnw_ef1,
                      s.mean_mnw_alpha_mms, s.pct_mnw_attains_mms, s.mean_nw_drop,
                      s.pct_mnw_ef1_cf, s.mean_mnw_alpha_mms_cf);
        out += buf;
    }
    return out;
}

}  // namespace confair
