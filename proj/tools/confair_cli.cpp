// Command line front end: instance generation, allocation checking, solving
// and the full experiment pipeline.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "confair/experiment.hpp"

namespace fs = std::filesystem;
using namespace confair;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInfeasible = 4;

std::string pad_id(int id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05d", id);
    return buf;
}

int cmd_gen(const std::string& model, int count, std::uint64_t seed, const std::string& out) {
    GenConfig cfg;
    cfg.model = parse_model(model);
    cfg.target_count = count;
    cfg.seed = seed;
    fs::create_directories(out);
    std::string manifest;
    gen_instances(cfg, [&](const GenRecord& r) {
        std::string name = "instance_" + pad_id(r.instance_id) + ".json";
        write_file(out + "/" + name, instance_to_text(r.inst));
        json m;
        m["id"] = r.instance_id;
        m["file"] = name;
        m["model"] = model_name(r.model);
        m["seed"] = r.seed;
        m["n"] = r.params.n;
        m["m"] = r.params.m;
        switch (r.model) {
            case GraphModel::erdos_renyi: m["p"] = r.params.p; break;
            case GraphModel::barabasi_albert: m["k"] = r.params.k; break;
            case GraphModel::watts_strogatz:
                m["d"] = r.params.d;
                m["beta"] = r.params.beta;
                break;
        }
        m["quota"] = r.counts_quota;
        manifest += m.dump() + "\n";
    });
    write_file(out + "/manifest.jsonl", manifest);
    std::cout << "wrote instances and manifest to " << out << "\n";
    return kExitOk;
}

int cmd_check(const std::string& instance_path, const std::string& allocation_path,
              const std::string& criterion, const SearchBudget& budget) {
    Instance inst = load_instance(instance_path);
    Allocation alloc = load_allocation(allocation_path);
    if (static_cast<int>(alloc.bundles.size()) != inst.n_agents)
        throw InvalidInstance("allocation has wrong number of bundles");
    for (const ItemSet& b : alloc.bundles)
        for (int j : b)
            if (j < 0 || j >= inst.n_items) throw InvalidInstance("item index out of range");
    if (!alloc.disjoint()) throw InvalidInstance("bundles overlap");

    json out;
    out["feasible"] = is_feasible(inst, alloc);
    out["complete"] = alloc.complete(inst);
    bool ok = true;
    if (criterion.empty() || criterion == "ef1") {
        bool v = is_ef1(inst, alloc);
        out["ef1"] = v;
        if (criterion == "ef1") ok = v;
    }
    if (criterion.empty() || criterion == "prop") {
        Rational v = prop_ratio(inst, alloc);
        out["prop_ratio"] = to_string(v);
        if (criterion == "prop") ok = v >= 1;
    }
    if (criterion.empty() || criterion == "nw") {
        NashWelfare nw = nash_welfare(inst, alloc);
        out["nw_positive_agents"] = nw.count_positive;
        out["nw_product"] = to_string(nw.product);
    }
    if (criterion == "mms") {
        MmsProfile mu = mms_profile(inst, budget);
        if (mu.infeasible) throw InfeasibleInstance();
        Rational v = alpha_mms(inst, alloc, mu);
        out["alpha_mms"] = to_string(v);
        ok = v >= 1;
    }
    std::cout << out.dump(2) << "\n";
    if (!out["feasible"].get<bool>()) return kExitInfeasible;
    return ok ? kExitOk : kExitInfeasible;
}

int cmd_solve(const std::string& instance_path, const std::string& method, std::uint64_t seed,
              int trials, const SearchBudget& budget) {
    Instance inst = load_instance(instance_path);
    Allocation alloc;
    json stats;
    if (method == "mms-exact") {
        MmsProfile mu = mms_profile(inst, budget);
        if (mu.infeasible) throw InfeasibleInstance();
        MmsAllocationResult r = mms_allocation_exact(inst, mu, budget);
        alloc = r.alloc;
        stats["ratio"] = to_string(r.ratio);
        json mus = json::array();
        for (const Rational& x : mu.mu) mus.push_back(to_string(x));
        stats["mu"] = std::move(mus);
    } else if (method == "mnw" || method == "mnw-ef1") {
        MnwResult r = mnw_exact(inst, method == "mnw-ef1", budget);
        alloc = r.alloc;
        stats["nw_positive_agents"] = r.welfare.count_positive;
        stats["nw_product"] = to_string(r.welfare.product);
        stats["ef1"] = is_ef1(inst, r.alloc);
    } else if (method == "mms-approx") {
        MmsApproxResult r = mms_approx_poly(inst);
        alloc = r.alloc;
        stats["alpha_guarantee"] = to_string(r.alpha);
    } else if (method == "random") {
        Rational prop_sum = 0;
        for (int t = 0; t < trials; ++t) {
            auto [a, trace] = randomized_allocation(inst, derive_seed(seed, t));
            if (t == 0) alloc = a;
            prop_sum += prop_ratio(inst, a);
        }
        stats["trials"] = trials;
        stats["mean_prop_ratio"] = to_string(prop_sum / trials);
    } else if (method == "path-ef1") {
        alloc = path_ef1(inst);
        stats["ef1"] = is_ef1(inst, alloc);
    } else if (method == "component-ef1") {
        alloc = component_ef1(inst);
        stats["ef1"] = is_ef1(inst, alloc);
    } else if (method == "construct") {
        MmsProfile mu = mms_profile(inst, budget);
        if (mu.infeasible) throw InfeasibleInstance();
        ConstructResult r = construct_alpha_mms(inst, mu, budget);
        alloc = r.alloc;
        stats["alpha_guarantee"] = to_string(r.guarantee);
        stats["alpha_achieved"] = to_string(r.alpha);
    } else {
        throw PreconditionViolated("unknown method: " + method);
    }
    json out = allocation_to_json(alloc);
    out["stats"] = std::move(stats);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json j = parse_document(read_file(path));
    ExperimentConfig cfg;
    if (j.contains("models")) {
        cfg.models.clear();
        for (const json& m : j.at("models")) cfg.models.push_back(parse_model(m.get<std::string>()));
    }
    if (j.contains("count_per_model")) cfg.count_per_model = j.at("count_per_model").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_min")) cfg.n_min = j.at("n_min").get<int>();
    if (j.contains("n_max")) cfg.n_max = j.at("n_max").get<int>();
    if (j.contains("m_cap")) cfg.m_cap = j.at("m_cap").get<int>();
    if (j.contains("value_points")) cfg.value_points = j.at("value_points").get<int>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("budget_nodes")) cfg.budget.max_nodes = j.at("budget_nodes").get<std::uint64_t>();
    if (j.contains("budget_secs")) cfg.budget.seconds = j.at("budget_secs").get<double>();
    return cfg;
}

int cmd_experiment(const std::string& config_path, const std::string& out) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    fs::create_directories(out);
    std::string timings = "instance_id,seconds\n";
    auto records = run_experiment(cfg, [&](const ExperimentRecord& r) {
        static auto last = std::chrono::steady_clock::now();
        auto now = std::chrono::steady_clock::now();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%d,%.3f\n", r.instance_id,
                      std::chrono::duration<double>(now - last).count());
        timings += buf;
        last = now;
        std::cerr << "instance " << r.instance_id << " (" << r.model << ") done\n";
    });
    write_file(out + "/records.jsonl", records_to_lines(records));
    ExperimentSummary sum = summarize(records);
    write_file(out + "/summary.csv", summary_to_csv(sum));
    write_file(out + "/hist_random_alpha_mms.csv", histogram_to_text(sum.random_alpha_mms));
    write_file(out + "/hist_random_alpha_mms_cf.csv", histogram_to_text(sum.random_alpha_mms_cf));
    write_file(out + "/hist_mnw_alpha_mms.csv", histogram_to_text(sum.mnw_alpha_mms));
    write_file(out + "/hist_mnw_alpha_mms_cf.csv", histogram_to_text(sum.mnw_alpha_mms_cf));
    write_file(out + "/timings.csv", timings);
    std::cout << summary_to_csv(sum);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair allocation of conflicting items: generators, checkers and solvers"};
    app.require_subcommand(1);

    std::string model = "er", out_dir = "out";
    int count = 10;
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen", "generate random instances");
    gen->add_option("--model", model, "graph model")->check(CLI::IsMember({"er", "ba", "ws"}));
    gen->add_option("--count", count, "quota of instances")->required();
    gen->add_option("--seed", seed, "master seed");
    gen->add_option("--out", out_dir, "output directory")->required();

    std::string instance_path, allocation_path, criterion, method;
    std::uint64_t budget_nodes = SearchBudget{}.max_nodes;
    double budget_secs = SearchBudget{}.seconds;
    int trials = 1;
    auto* check = app.add_subcommand("check", "evaluate an allocation");
    check->add_option("--instance", instance_path)->required();
    check->add_option("--allocation", allocation_path)->required();
    check->add_option("--criterion", criterion)
        ->check(CLI::IsMember({"ef1", "prop", "mms", "nw"}));

    auto* solve = app.add_subcommand("solve", "compute an allocation");
    solve->add_option("--instance", instance_path)->required();
    solve->add_option("--method", method)
        ->required()
        ->check(CLI::IsMember({"mms-exact", "mnw", "mnw-ef1", "mms-approx", "random", "path-ef1",
                               "component-ef1", "construct"}));
    solve->add_option("--seed", seed);
    solve->add_option("--budget-nodes", budget_nodes);
    solve->add_option("--budget-secs", budget_secs);
    solve->add_option("--trials", trials);

    std::string config_path;
    auto* experiment = app.add_subcommand("experiment", "run the full pipeline");
    experiment->add_option("--config", config_path)->required();
    experiment->add_option("--out", out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }

    SearchBudget budget{budget_nodes, budget_secs};
    try {
        if (gen->parsed()) return cmd_gen(model, count, seed, out_dir);
        if (check->parsed()) return cmd_check(instance_path, allocation_path, criterion, budget);
        if (solve->parsed()) return cmd_solve(instance_path, method, seed, trials, budget);
        if (experiment->parsed()) return cmd_experiment(config_path, out_dir);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const InfeasibleInstance& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NoEf1Allocation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
