// specmix command-line tool: fixture generation, tester/learner runs,
// phase-diagram sweeps, moment-matched hard pairs, and the verification
// suites. All outputs are machine-readable (JSON, or CSV for sweeps) and echo
// the effective configuration for bitwise reproducibility.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specmix/errors.hpp"
#include "specmix/hard_instance.hpp"
#include "specmix/learner.hpp"
#include "specmix/location.hpp"
#include "specmix/math_util.hpp"
#include "specmix/mixture.hpp"
#include "specmix/sampling.hpp"
#include "specmix/tester.hpp"

using nlohmann::json;
using namespace specmix;

namespace {

struct Global {
    std::uint64_t seed = 1;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::string profile = "practical";
    std::uint64_t budget_cap = 1000000000ULL;
};

void emit(const Global& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(g.out_path);
    if (!f) throw PreconditionError("cannot open output path: " + g.out_path);
    f << text << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw PreconditionError("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    if (out.empty()) throw PreconditionError("empty numeric list: '" + text + "'");
    return out;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
    return out;
}

int thread_count() {
    const char* env = std::getenv("SPECMIX_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

json global_echo(const Global& g) {
    return {{"seed", g.seed},          {"profile", g.profile},
            {"budget_cap", g.budget_cap}, {"format", g.format},
            {"out", g.out_path},       {"config", g.config_path}};
}

// Merges --config JSON into argv: each key becomes a --key=value token placed
// right after the subcommand, so explicit command-line flags (which come
// later and use take-last policy) win. Unknown keys fail CLI11 parsing.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    json cfg = json::parse(read_file(config_path));
    if (!cfg.is_object()) throw PreconditionError("config file must hold a JSON object");

    // The subcommand is the first token that is not a flag or a flag value.
    std::size_t sub = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].rfind("--", 0) == 0) {
            if (args[i].find('=') == std::string::npos) ++i;  // skip its value
            continue;
        }
        sub = i;
        break;
    }
    if (sub == args.size())
        throw PreconditionError("--config given but no subcommand named");

    std::vector<std::string> merged(args.begin(), args.begin() + sub + 1);
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        std::string key = it.key();
        std::replace(key.begin(), key.end(), '_', '-');
        std::string value;
        if (it.value().is_string())
            value = it.value().get<std::string>();
        else if (it.value().is_array()) {
            for (const auto& v : it.value()) {
                if (!value.empty()) value += ",";
                value += v.dump();
            }
        } else
            value = it.value().dump();
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + sub + 1, args.end());
    return merged;
}

json verdict_json(const Verdict& v) {
    return json::parse(v.to_json());
}

// ---------------------------------------------------------------- commands

struct GenerateOpts {
    std::string family = "gaussian";
    int k = 2, d = 1;
    double delta = 1.0, radius = 10.0;
};

void cmd_generate(const Global& g, const GenerateOpts& o) {
    RngStream rng(g.seed, 0);
    MixtureModel model;
    model.family = family_from_name(o.family);
    model.k = o.k;
    model.d = o.d;
    model.means = generate_separated_means(o.k, o.d, o.delta, o.radius, rng);
    model.validate();
    json j = json::parse(model.to_json());
    j["config"] = global_echo(g);
    j["config"]["family"] = o.family;
    j["config"]["k"] = o.k;
    j["config"]["d"] = o.d;
    j["config"]["delta"] = o.delta;
    j["config"]["radius"] = o.radius;
    emit(g, j.dump(2));
}

struct SampleOpts {
    std::string model_path;
    std::uint64_t n = 100;
};

void cmd_sample(const Global& g, const SampleOpts& o) {
    const MixtureModel model = MixtureModel::from_json(read_file(o.model_path));
    RngStream rng(g.seed, 1);
    const Points samples = sample(model, o.n, rng);
    if (g.format == "csv") {
        std::ostringstream ss;
        for (int t = 0; t < model.d; ++t) ss << (t ? "," : "") << "x" << t;
        ss << "\n";
        for (const auto& s : samples) {
            for (int t = 0; t < model.d; ++t) ss << (t ? "," : "") << s[t];
            ss << "\n";
        }
        emit(g, ss.str());
        return;
    }
    json j;
    j["samples"] = samples;
    j["config"] = global_echo(g);
    j["config"]["model"] = o.model_path;
    j["config"]["n"] = o.n;
    emit(g, j.dump(2));
}

struct TestOpts {
    std::string model_path;
    std::string mu_star;
    double delta = 0.0;  // 0 = use the model's separation
    double eps = 0.1;
};

int cmd_test(const Global& g, const TestOpts& o) {
    const MixtureModel model = MixtureModel::from_json(read_file(o.model_path));
    const Vec mu_star = parse_doubles(o.mu_star);
    if (static_cast<int>(mu_star.size()) != model.d)
        throw PreconditionError("--mu-star dimension does not match the model");
    const double delta = o.delta > 0.0 ? o.delta : separation(model.means);
    const Profile profile = profile_from_name(g.profile);

    json j;
    Verdict v;
    if (model.family == FamilyId::gaussian) {
        const TesterParams params =
            select_params(model.k, model.d, delta, o.eps, profile, g.budget_cap);
        v = test(model, mu_star, params, g.seed);
        j["params"] = json::parse(params.to_json());
    } else {
        const GeneralTesterParams params = general_select_params(
            model.k, model.d, delta, o.eps, model.family, profile, g.budget_cap);
        v = general_test(model, mu_star, params, g.seed);
        j["params"] = {{"sigma", params.sigma}, {"M", params.M},
                       {"gamma", params.gamma}, {"theta", params.theta},
                       {"N", params.N},         {"delta_M", params.delta_M}};
    }
    j["verdict"] = verdict_json(v);
    j["config"] = global_echo(g);
    j["config"]["model"] = o.model_path;
    j["config"]["mu_star"] = mu_star;
    j["config"]["delta"] = delta;
    j["config"]["eps"] = o.eps;
    emit(g, j.dump(2));
    return v.accept ? 0 : 1;
}

struct LearnOpts {
    std::string model_path;
    double delta = 0.0;
    double eps = 0.1;
    double vote_multiplier = 0.0;
    double candidate_multiplier = 0.0;
    double call_budget_scale = 0.0;
    std::uint64_t call_budget_floor = 30000;
};

LearnerConfig learner_config(const Global& g, const LearnOpts& o,
                             const MixtureModel& model, double delta) {
    LearnerConfig cfg;
    cfg.k = model.k;
    cfg.d = model.d;
    cfg.delta = delta;
    cfg.eps = o.eps;
    cfg.profile = profile_from_name(g.profile);
    cfg.vote_multiplier = o.vote_multiplier;
    cfg.candidate_multiplier = o.candidate_multiplier;
    cfg.call_budget_scale = o.call_budget_scale;
    cfg.call_budget_floor = o.call_budget_floor;
    cfg.sample_budget_cap = g.budget_cap;
    return cfg;
}

int cmd_learn(const Global& g, const LearnOpts& o) {
    const MixtureModel model = MixtureModel::from_json(read_file(o.model_path));
    const double delta = o.delta > 0.0 ? o.delta : separation(model.means);
    const LearnerConfig cfg = learner_config(g, o, model, delta);
    const LearnResult res = model.family == FamilyId::gaussian
                                ? learn(model, cfg, g.seed)
                                : general_learn(model, cfg, g.seed);
    json j = json::parse(res.to_json());
    const MatchingResult match = epsilon_close(res.means_hat, model.means, o.eps);
    j["truth_comparison"] = {{"eps_close", match.matched},
                             {"bottleneck_distance", match.max_distance}};
    j["config"] = global_echo(g);
    j["config"]["model"] = o.model_path;
    j["config"]["delta"] = delta;
    j["config"]["eps"] = o.eps;
    emit(g, j.dump(2));
    return 0;
}

struct SweepOpts {
    std::string deltas = "1,2";
    std::string dims = "1";
    int k = 3;
    int trials = 5;
    double eps_frac = 0.1;
    double radius_mult = 4.0;
};

void cmd_sweep(const Global& g, const SweepOpts& o) {
    const std::vector<double> deltas = parse_doubles(o.deltas);
    const std::vector<int> dims = parse_ints(o.dims);
    struct Cell {
        double delta;
        int d;
        int successes = 0;
        int errors = 0;
        double mean_samples = 0.0;
        double mean_wall_ms = 0.0;
        std::string status = "ok";
    };
    std::vector<Cell> cells;
    for (double delta : deltas)
        for (int d : dims) cells.push_back({delta, d});

    auto run_cell = [&](Cell& cell, std::size_t index) {
        const double eps = o.eps_frac * cell.delta;
        LearnerConfig cfg;
        cfg.k = o.k;
        cfg.d = cell.d;
        cfg.delta = cell.delta;
        cfg.eps = eps;
        cfg.profile = profile_from_name(g.profile);
        cfg.sample_budget_cap = g.budget_cap;
        LearnPlan plan;
        try {
            plan = plan_learn(cfg);
        } catch (const Error& e) {
            cell.status = "skipped";
            return;
        }
        for (int trial = 0; trial < o.trials; ++trial) {
            const std::uint64_t cell_seed = derive_seed(g.seed, index + 1, trial + 1);
            try {
                RngStream rng(cell_seed, 7);
                MixtureModel model;
                model.k = o.k;
                model.d = cell.d;
                model.means = generate_separated_means(
                    o.k, cell.d, cell.delta, o.radius_mult * cell.delta, rng);
                const LearnResult res = learn(model, cfg, cell_seed);
                cell.mean_samples += static_cast<double>(res.tester_calls) *
                                     static_cast<double>(plan.per_call.N) / o.trials;
                cell.mean_wall_ms += res.wall_time_ms / o.trials;
                if (epsilon_close(res.means_hat, model.means, eps).matched)
                    ++cell.successes;
            } catch (const Error&) {
                ++cell.errors;
            }
        }
    };

    const int workers = std::min<int>(thread_count(), static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(cells[i], i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cells.size(); i = next++)
                    run_cell(cells[i], i);
            });
        for (auto& th : pool) th.join();
    }

    std::ostringstream ss;
    ss << "delta,d,k,trials,successes,errors,success_rate,mean_samples,mean_wall_ms,status\n";
    for (const auto& c : cells) {
        const double rate = c.status == "ok"
                                ? static_cast<double>(c.successes) / o.trials
                                : 0.0;
        ss << c.delta << "," << c.d << "," << o.k << "," << o.trials << ","
           << c.successes << "," << c.errors << "," << rate << ","
           << c.mean_samples << "," << c.mean_wall_ms << "," << c.status << "\n";
    }
    ss << "# seed=" << g.seed << " profile=" << g.profile << " eps_frac=" << o.eps_frac
       << " radius_mult=" << o.radius_mult << "\n";
    emit(g, ss.str());
}

struct HardOpts {
    int n = 6, t = 2;
    double delta = 0.05, radius = 1.0, eps_tail = 1e-3;
};

void cmd_hard_instance(const Global& g, const HardOpts& o) {
    const HardInstancePair pair =
        build_moment_matched_pair(o.n, o.t, o.delta, o.radius, g.seed);
    json j = json::parse(pair.to_json());
    try {
        const TvBound bound = tv_upper_bound(pair, o.eps_tail);
        j["tv_upper_bound"] = {{"value", bound.value},
                               {"l2_sq", bound.l2_sq},
                               {"vacuous", bound.vacuous},
                               {"eps_tail", o.eps_tail}};
    } catch (const PreconditionError& e) {
        // Small t relative to R falls outside the certificate's hypothesis;
        // the numeric TV below still stands on its own.
        j["tv_upper_bound"] = {{"unavailable", e.what()}};
    }
    j["tv_numeric"] = tv_numeric(pair);
    j["config"] = global_echo(g);
    j["config"]["N"] = o.n;
    j["config"]["t"] = o.t;
    j["config"]["delta"] = o.delta;
    j["config"]["R"] = o.radius;
    emit(g, j.dump(2));
}

void cmd_families(const Global& g) {
    json rows = json::array();
    for (const auto& fam : family_registry())
        rows.push_back({{"name", family_name(fam.id)},
                        {"density", fam.density},
                        {"cf", fam.cf},
                        {"reductions", fam.reductions}});
    if (g.format == "csv") {
        std::ostringstream ss;
        ss << "name,density,cf,reductions\n";
        for (const auto& r : rows)
            ss << r["name"].get<std::string>() << ",\"" << r["density"].get<std::string>()
               << "\",\"" << r["cf"].get<std::string>() << "\",\""
               << r["reductions"].get<std::string>() << "\"\n";
        emit(g, ss.str());
        return;
    }
    emit(g, json{{"families", rows}, {"config", global_echo(g)}}.dump(2));
}

// ------------------------------------------------------------ verify suites

struct Check {
    std::string suite, name;
    bool pass;
    double measured, bound;
};

void suite_component_sums(std::uint64_t seed, std::vector<Check>& out) {
    int violations = 0;
    double worst_margin = 1e300;
    RngStream rng(seed, 11);
    for (int it = 0; it < 1000; ++it) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 11);
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const double delta = 0.5 + 4.5 * rng.u01();
        const double mind = std::min(static_cast<double>(d),
                                     std::log(static_cast<double>(k)));
        // sigma chosen so the hypothesis (sigma^2/2 + 1) delta^2 >= 100 min{ln k, d}
        // holds with random slack.
        const double s2p = 100.0 * mind / (delta * delta) * (1.0 + rng.u01());
        const double sigma = std::sqrt(std::max(2.0 * (s2p - 1.0), 0.5));
        const double radius = delta * (2.0 + std::pow(static_cast<double>(k),
                                                      1.0 / static_cast<double>(d)));
        Points means = generate_separated_means(k, d, delta, radius, rng);
        const SBounds b = s_bounds(means, sigma, delta, d, k);
        if (!b.hypothesis_ok || b.s1 > b.s1_bound || b.s2 > b.s2_bound) ++violations;
        worst_margin = std::min({worst_margin, b.s1_bound - b.s1, b.s2_bound - b.s2});
    }
    out.push_back({"component-sums", "tail and count bounds on 1000 fixtures",
                   violations == 0, static_cast<double>(violations), 0.0});
    out.push_back({"component-sums", "worst bound margin", worst_margin >= 0.0,
                   worst_margin, 0.0});
}

void suite_norm_lower_bound(std::uint64_t seed, std::vector<Check>& out) {
    int violations = 0;
    RngStream rng(seed, 12);
    for (int it = 0; it < 1000; ++it) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const int k = 2 + static_cast<int>(rng.next_u64() % 49);
        const double delta = 0.5 + 2.0 * rng.u01();
        const double radius = delta * (1.0 + 2.0 * std::pow(static_cast<double>(k),
                                                            1.0 / static_cast<double>(d)));
        Points means = generate_separated_means(k, d, delta, radius, rng);
        std::vector<double> norms;
        for (const auto& m : means) {
            Vec zero(d, 0.0);
            norms.push_back(l2_distance(m, zero));
        }
        std::sort(norms.begin(), norms.end());
        for (int j = 2; j <= k; ++j)
            if (norms[j - 1] < norm_lower_bound(delta, d, j)) ++violations;
    }
    out.push_back({"norm-lb", "sorted-norm floor on 1000 separated sets",
                   violations == 0, static_cast<double>(violations), 0.0});
}

void suite_chi2(std::vector<Check>& out) {
    int failures = 0;
    for (int d = 1; d <= 10; ++d)
        for (int t = 5 * d; t <= 20 * d; ++t)
            if (!chi_square_tail_check(d, static_cast<double>(t))) ++failures;
    out.push_back({"chi2", "P(chi^2_d >= t) <= e^{-t/5} on the (d, t) grid",
                   failures == 0, static_cast<double>(failures), 0.0});
}

void suite_cf(std::vector<Check>& out) {
    const FamilyId fams[] = {FamilyId::gaussian, FamilyId::cauchy, FamilyId::logistic,
                             FamilyId::laplace, FamilyId::gumbel};
    bool basics = true;
    for (FamilyId f : fams) {
        if (std::abs(cf_evaluate(f, 0.0) - std::complex<double>(1.0, 0.0)) > 1e-12)
            basics = false;
        for (double xi = 0.25; xi <= 8.0; xi += 0.25) {
            if (std::abs(cf_evaluate(f, xi)) > 1.0 + 1e-12) basics = false;
            const auto sym = std::conj(cf_evaluate(f, -xi)) - cf_evaluate(f, xi);
            if (std::abs(sym) > 1e-12) basics = false;
        }
    }
    out.push_back({"cf", "CF(0)=1, |CF|<=1, conjugate symmetry", basics, 0.0, 0.0});
    double worst = 0.0;
    for (double xi = 0.05; xi <= 20.0; xi += 0.05) {
        const double lhs = std::norm(cf_evaluate(FamilyId::gumbel, xi));
        const double pix = 3.1415926535897932384626433832795 * xi;
        const double rhs = pix / std::sinh(pix);
        worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
    }
    out.push_back({"cf", "gumbel modulus identity on (0, 20]", worst <= 1e-10, worst,
                   1e-10});
}

void suite_oracle(std::uint64_t seed, std::vector<Check>& out) {
    MixtureModel model;
    model.k = 3;
    model.d = 1;
    model.means = {{-2.0}, {0.0}, {2.5}};
    TesterParams params;
    params.sigma = 1.5;
    params.M = std::sqrt(5.0 * params.sigma * params.sigma);
    params.N = 200000;
    int ok = 0;
    const int runs = 10;
    for (int r = 0; r < runs; ++r) {
        const Vec mu_star = {0.3};
        const EstimateResult est =
            estimate_T_detailed(model, mu_star, params, seed + r);
        const double truth = analytic_main_term(model.means, mu_star, params.sigma);
        const double tol = 4.0 * est.stderr_re() +
                           truncation_bound(model.means, mu_star, params);
        if (std::fabs(est.value.real() - truth) <= tol) ++ok;
    }
    out.push_back({"oracle", "estimator vs closed-form mean, 10 seeded runs",
                   ok == runs, static_cast<double>(ok), static_cast<double>(runs)});
}

int cmd_verify(const Global& g, const std::string& suite) {
    std::vector<Check> checks;
    const bool all = suite == "all";
    if (all || suite == "component-sums") suite_component_sums(g.seed, checks);
    if (all || suite == "norm-lb") suite_norm_lower_bound(g.seed, checks);
    if (all || suite == "chi2") suite_chi2(checks);
    if (all || suite == "cf") suite_cf(checks);
    if (all || suite == "oracle") suite_oracle(g.seed, checks);
    if (checks.empty())
        throw PreconditionError("unknown suite: " + suite +
                                " (component-sums|norm-lb|chi2|cf|oracle|all)");
    json rows = json::array();
    bool pass = true;
    for (const auto& c : checks) {
        pass = pass && c.pass;
        rows.push_back({{"suite", c.suite},
                        {"check", c.name},
                        {"pass", c.pass},
                        {"measured", c.measured},
                        {"bound", c.bound}});
    }
    json j{{"pass", pass}, {"checks", rows}, {"config", global_echo(g)}};
    j["config"]["suite"] = suite;
    emit(g, j.dump(2));
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    Global g;
    CLI::App app{"specmix: separated-mixture location learning toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true);
    app.add_option("--seed", g.seed, "base RNG seed")->take_last();
    app.add_option("--config", g.config_path, "JSON config file merged under explicit flags")
        ->take_last();
    app.add_option("--out", g.out_path, "output path (default stdout)")->take_last();
    app.add_option("--format", g.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->take_last();
    app.add_option("--profile", g.profile, "paper|practical")
        ->check(CLI::IsMember({"paper", "practical"}))
        ->take_last();
    app.add_option("--budget-cap", g.budget_cap, "max samples per tester call")
        ->take_last();

    GenerateOpts gen;
    auto* c_gen = app.add_subcommand("generate", "generate a separated mixture model");
    c_gen->add_option("--family", gen.family)->take_last();
    c_gen->add_option("--k", gen.k)->take_last();
    c_gen->add_option("--d", gen.d)->take_last();
    c_gen->add_option("--delta", gen.delta)->take_last();
    c_gen->add_option("--radius", gen.radius)->take_last();

    SampleOpts smp;
    auto* c_smp = app.add_subcommand("sample", "draw i.i.d. samples from a model file");
    c_smp->add_option("--model", smp.model_path)->required()->take_last();
    c_smp->add_option("--n", smp.n)->take_last();

    TestOpts tst;
    auto* c_tst = app.add_subcommand("test", "Accept/Reject: is a component near mu*?");
    c_tst->add_option("--model", tst.model_path)->required()->take_last();
    c_tst->add_option("--mu-star", tst.mu_star, "comma-separated coordinates")
        ->required()
        ->take_last();
    c_tst->add_option("--delta", tst.delta)->take_last();
    c_tst->add_option("--eps", tst.eps)->take_last();

    LearnOpts lrn;
    auto* c_lrn = app.add_subcommand("learn", "recover all component locations");
    c_lrn->add_option("--model", lrn.model_path)->required()->take_last();
    c_lrn->add_option("--delta", lrn.delta)->take_last();
    c_lrn->add_option("--eps", lrn.eps)->take_last();
    c_lrn->add_option("--vote-multiplier", lrn.vote_multiplier)->take_last();
    c_lrn->add_option("--candidate-multiplier", lrn.candidate_multiplier)->take_last();
    c_lrn->add_option("--call-budget-scale", lrn.call_budget_scale)->take_last();
    c_lrn->add_option("--call-budget-floor", lrn.call_budget_floor)->take_last();

    SweepOpts swp;
    auto* c_swp = app.add_subcommand("sweep", "success-rate map over a (delta, d) grid");
    c_swp->add_option("--deltas", swp.deltas, "comma-separated separations")->take_last();
    c_swp->add_option("--dims", swp.dims, "comma-separated dimensions")->take_last();
    c_swp->add_option("--k", swp.k)->take_last();
    c_swp->add_option("--trials", swp.trials)->take_last();
    c_swp->add_option("--eps-frac", swp.eps_frac, "eps = eps_frac * delta")->take_last();
    c_swp->add_option("--radius-mult", swp.radius_mult)->take_last();

    HardOpts hrd;
    auto* c_hrd =
        app.add_subcommand("hard-instance", "moment-matched pair + TV certificates");
    c_hrd->add_option("--N", hrd.n)->take_last();
    c_hrd->add_option("--t", hrd.t)->take_last();
    c_hrd->add_option("--delta", hrd.delta)->take_last();
    c_hrd->add_option("--R", hrd.radius)->take_last();
    c_hrd->add_option("--eps-tail", hrd.eps_tail)->take_last();

    auto* c_fam = app.add_subcommand("families", "list the supported location families");

    std::string suite = "all";
    auto* c_ver = app.add_subcommand("verify", "run the invariant verification suites");
    c_ver->add_option("--suite", suite,
                      "component-sums|norm-lb|chi2|cf|oracle|all")
        ->take_last();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_args(args);
        // CLI11 consumes reversed argument vectors.
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (c_gen->parsed()) cmd_generate(g, gen);
        else if (c_smp->parsed()) cmd_sample(g, smp);
        else if (c_tst->parsed()) return cmd_test(g, tst);
        else if (c_lrn->parsed()) return cmd_learn(g, lrn);
        else if (c_swp->parsed()) cmd_sweep(g, swp);
        else if (c_hrd->parsed()) cmd_hard_instance(g, hrd);
        else if (c_fam->parsed()) cmd_families(g);
        else if (c_ver->parsed()) return cmd_verify(g, suite);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
