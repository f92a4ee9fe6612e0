// Command-line front end: sampling, analytics, rejection-sampler inference,
// symmetry testing and the simulation studies, emitting CSV/JSON artifacts.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liebscher/abc.hpp"
#include "liebscher/cl_params.hpp"
#include "liebscher/empirical.hpp"
#include "liebscher/errors.hpp"
#include "liebscher/experiments.hpp"
#include "liebscher/hilbert.hpp"
#include "liebscher/liebscher_spec.hpp"
#include "liebscher/mle.hpp"
#include "liebscher/samplers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace liebscher;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("LIEBSCHER_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SpecParseError("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw SpecParseError(path + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << text;
}

void write_manifest(const fs::path& out, const std::string& command, const json& config,
                    std::uint64_t seed, bool failed = false,
                    const std::string& error = "") {
    json m{{"command", command},
           {"config", config},
           {"seed", seed},
           {"version", kVersion},
           {"timestamp", static_cast<std::uint64_t>(std::time(nullptr))}};
    if (failed) {
        m["failed"] = true;
        m["error"] = error;
    }
    write_text(out / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out(const std::string& out) {
    fs::path p(out);
    fs::create_directories(p);
    return p;
}

// A spec file is either a CL parameter document {"p":[...],"q":[...]} or a
// full spec {"d","K","bases","A"}.
struct ParsedSpec {
    std::optional<CLParams> cl;
    std::optional<LiebscherSpec> spec;
    json raw;
};

ParsedSpec parse_spec_file(const std::string& path) {
    ParsedSpec out;
    out.raw = load_json_file(path);
    if (out.raw.contains("p") && out.raw.contains("q")) {
        out.cl = CLParams::from_json(out.raw);
    } else if (out.raw.contains("bases")) {
        out.spec = LiebscherSpec::from_json(out.raw);
    } else {
        throw SpecParseError(path + ": expected either {\"p\",\"q\"} or {\"d\",\"K\",\"bases\",\"A\"}");
    }
    return out;
}

std::string csv_escape_free(double x) { return format_g17(x); }

// ---------------------------------------------------------------- sample --

int cmd_sample(const std::string& spec_path, std::size_t n,
               std::optional<std::uint64_t> seed_flag, const std::string& out_dir,
               int workers) {
    const std::uint64_t seed = resolve_seed(seed_flag);
    const ParsedSpec parsed = parse_spec_file(spec_path);
    const fs::path out = prepare_out(out_dir);
    Sample s = parsed.cl ? sample_cl(*parsed.cl, n, Seed{seed}, workers)
                         : sample_liebscher(*parsed.spec, n, Seed{seed}, workers);
    write_sample_csv(s, (out / "sample.csv").string());
    write_manifest(out, "sample", json{{"spec", parsed.raw}, {"n", n}, {"workers", workers}},
                   seed);
    return 0;
}

// --------------------------------------------------------------- analyze --

int cmd_analyze(const std::optional<std::string>& spec_path,
                const std::optional<std::string>& sample_path,
                std::optional<std::uint64_t> seed_flag, const std::string& out_dir,
                int workers) {
    if (!spec_path && !sample_path)
        throw SpecParseError("analyze needs --spec and/or --sample");
    const std::uint64_t seed = resolve_seed(seed_flag);
    const fs::path out = prepare_out(out_dir);
    json report;
    json config;

    std::optional<CLParams> cl;
    if (spec_path) {
        const ParsedSpec parsed = parse_spec_file(*spec_path);
        config["spec"] = parsed.raw;
        if (parsed.cl) {
            cl = parsed.cl;
        } else {
            bool all_com = parsed.spec->dim() == 2;
            for (const auto& b : parsed.spec->bases())
                all_com = all_com && b.kind == CopulaKind::Comonotonic;
            if (!all_com)
                throw SpecParseError(
                    "analytic report requires a bivariate comonotonic-based spec");
            cl = CLParams::from_exponent_matrix(parsed.spec->g_exponents());
        }
        report["analytic"] = cl->dependence_report().to_json();
    }

    if (sample_path) {
        const Sample s = read_sample_csv_file(*sample_path);
        if (s.d != 2) throw SpecParseError("empirical report requires d = 2 samples");
        config["sample"] = *sample_path;
        const double tau_hat = kendall_tau(s);
        const double rho_hat = spearman_rho(s);
        const CvmResult cvm = cvm_asymmetry_pvalue(s, 250, Seed{seed}, workers);
        report["empirical"] = {{"n", s.n},
                               {"tau_hat", tau_hat},
                               {"rho_hat", rho_hat},
                               {"cvm_statistic", cvm.statistic},
                               {"cvm_pvalue", cvm.pvalue}};
        const StepFunction k = kendall_distribution(s);
        std::string csv = "t,K\n";
        for (std::size_t i = 0; i < k.x.size(); ++i)
            csv += format_g17(k.x[i]) + "," + format_g17(k.y[i]) + "\n";
        write_text(out / "kendall.csv", csv);

        if (cl) {
            const DependenceReport dep = cl->dependence_report();
            const double nn = static_cast<double>(s.n);
            const double se_tau = std::sqrt(2.0 * (2.0 * nn + 5.0) / (9.0 * nn * (nn - 1.0)));
            report["consistency"] = {
                {"tau_analytic", dep.tau},
                {"tau_abs_err", std::abs(tau_hat - dep.tau)},
                {"tau_3se", 3.0 * se_tau},
                {"pass", std::abs(tau_hat - dep.tau) <= 3.0 * se_tau}};
        }
    }

    write_text(out / "report.json", report.dump(2) + "\n");
    write_manifest(out, "analyze", config, seed);
    return 0;
}

// ------------------------------------------------------------------- abc --

AbcModel parse_model(const json& cfg) {
    const std::string m = cfg.value("model", "cl");
    if (m == "cl") return AbcModel::CL;
    if (m == "liebscher") return AbcModel::Liebscher;
    throw SpecParseError("model must be \"cl\" or \"liebscher\"");
}

PriorSpec parse_prior(const json& cfg) {
    PriorSpec prior;
    const std::string kp = cfg.value("prior", "zipf");
    if (kp == "zipf") {
        prior.k_prior.kind = KPriorSpec::Kind::Zipf;
        prior.k_prior.xi = cfg.value("xi", 2.0);
        prior.k_prior.k_max = cfg.value("K_max", 50);
    } else if (kp == "binomial") {
        prior.k_prior.kind = KPriorSpec::Kind::Binomial;
        prior.k_prior.binom_size = cfg.value("binom_size", 8);
        prior.k_prior.binom_prob = cfg.value("binom_prob", 0.3);
    } else if (kp == "fixed") {
        prior.k_prior.kind = KPriorSpec::Kind::Fixed;
        prior.k_prior.fixed_k = cfg.value("K", 2);
    } else {
        throw SpecParseError("prior must be \"zipf\", \"binomial\" or \"fixed\"");
    }
    if (cfg.contains("bases")) {
        for (const auto& jb : cfg.at("bases")) {
            BaseSpec bs;
            const std::string kind = jb.value("kind", "");
            if (kind == "independence") bs.kind = CopulaKind::Independence;
            else if (kind == "comonotonic") bs.kind = CopulaKind::Comonotonic;
            else if (kind == "clayton") bs.kind = CopulaKind::Clayton;
            else if (kind == "gumbel_barnett") bs.kind = CopulaKind::GumbelBarnett;
            else throw SpecParseError("unknown base kind \"" + kind + "\" in prior");
            if (jb.contains("theta_prior")) {
                bs.theta_random = true;
                bs.theta_lo = jb.at("theta_prior").value("lo", 0.0);
                bs.theta_hi = jb.at("theta_prior").value("hi", 0.0);
            } else if (jb.contains("theta")) {
                bs.theta = jb.at("theta").get<double>();
            }
            prior.bases.push_back(bs);
        }
    }
    return prior;
}

int cmd_abc(const std::string& obs_path, const std::string& config_path,
            std::optional<std::uint64_t> seed_flag, const std::string& out_dir,
            int workers) {
    const json raw = load_json_file(config_path);
    // a manifest written by an earlier run can be passed back directly
    const json cfg_json = raw.contains("command") && raw.contains("config")
                              ? raw.at("config")
                              : raw;
    const Sample obs = read_sample_csv_file(obs_path);
    AbcConfig cfg;
    cfg.m_prime = cfg_json.value("M_prime", 2000);
    cfg.m = cfg_json.value("M", 100);
    cfg.n = cfg_json.value("n", 0);
    cfg.workers = workers;
    const std::uint64_t seed =
        cfg_json.contains("seed") ? cfg_json.at("seed").get<std::uint64_t>()
                                  : resolve_seed(seed_flag);
    cfg.seed = Seed{seed};
    const PriorSpec prior = parse_prior(cfg_json);
    const AbcModel model = parse_model(cfg_json);

    const fs::path out = prepare_out(out_dir);
    const AbcResult result = run_abc(obs, prior, cfg, model);

    // retained draws: one row per draw (K, flattened A row-major, distance)
    std::string csv;
    for (const auto& dr : result.retained) {
        csv += std::to_string(dr.k);
        for (double a : dr.a.data) csv += "," + format_g17(a);
        csv += "," + format_g17(dr.distance) + "\n";
    }
    write_text(out / "retained.csv", csv);

    const PosteriorSummaries ps = posterior_summaries(result);
    json summaries{{"threshold", result.threshold},
                   {"M", cfg.m},
                   {"M_prime", cfg.m_prime},
                   {"n", result.n},
                   {"posterior", ps.to_json()}};
    write_text(out / "summaries.json", summaries.dump(2) + "\n");

    std::string rho_csv = "rho\n";
    for (double r : posterior_rho(result, workers)) rho_csv += format_g17(r) + "\n";
    write_text(out / "posterior_rho.csv", rho_csv);

    write_manifest(out, "abc", cfg_json, seed);
    return 0;
}

// --------------------------------------------------------------- symtest --

int cmd_symtest(const std::string& sample_path, int n_boot,
                std::optional<std::uint64_t> seed_flag, const std::string& out_dir,
                int workers) {
    const std::uint64_t seed = resolve_seed(seed_flag);
    const Sample s = read_sample_csv_file(sample_path);
    const CvmResult res = cvm_asymmetry_pvalue(s, n_boot, Seed{seed}, workers);
    const fs::path out = prepare_out(out_dir);
    write_text(out / "symtest.json",
               json{{"statistic", res.statistic}, {"pvalue", res.pvalue}, {"n_boot", n_boot}}
                   .dump(2) +
                   "\n");
    write_manifest(out, "symtest", json{{"sample", sample_path}, {"n_boot", n_boot}}, seed);
    return 0;
}

// ---------------------------------------------------------------- tables --

ExperimentScale scale_from(const json& cfg, bool paper_scale, int workers) {
    ExperimentScale sc = paper_scale ? ExperimentScale::paper() : ExperimentScale::desk();
    sc.reps = cfg.value("reps", sc.reps);
    sc.m_prime = cfg.value("M_prime", sc.m_prime);
    sc.m = cfg.value("M", sc.m);
    sc.n = cfg.value("n", sc.n);
    sc.n_boot = cfg.value("n_boot", sc.n_boot);
    sc.workers = workers;
    return sc;
}

int cmd_table1(const json& cfg, bool paper_scale, std::optional<std::uint64_t> seed_flag,
               const std::string& out_dir, int workers) {
    const std::uint64_t seed = resolve_seed(seed_flag);
    const ExperimentScale sc = scale_from(cfg, paper_scale, workers);
    std::vector<int> ks = cfg.value("K_list", std::vector<int>{2, 3, 4, 5});
    const fs::path out = prepare_out(out_dir);
    std::vector<ErrorSummary> cols;
    try {
        for (int K : ks) {
            cols.push_back(well_specified_column(K, sc, Seed{seed}));
            std::cerr << "table1: K=" << K << " done\n";
        }
    } catch (const std::exception& e) {
        // preserve partial results
        write_manifest(out, "table1", cfg, seed, true, e.what());
        throw;
    }
    std::string csv = "metric";
    for (std::size_t i = 0; i < cols.size(); ++i)
        csv += ",K" + std::to_string(ks[i]) + ",K" + std::to_string(ks[i]) + "_sd";
    csv += "\n";
    const auto row = [&](const char* name, auto get_mean, auto get_sd) {
        csv += name;
        for (const auto& c : cols)
            csv += "," + format_g17(get_mean(c)) + "," + format_g17(get_sd(c));
        csv += "\n";
    };
    row("eta_K", [](const ErrorSummary& c) { return c.eta_kendall_mean; },
        [](const ErrorSummary& c) { return c.eta_kendall_sd; });
    row("eta_rho", [](const ErrorSummary& c) { return c.eta_rho_mean; },
        [](const ErrorSummary& c) { return c.eta_rho_sd; });
    row("f_test", [](const ErrorSummary& c) { return c.f_test_mean; },
        [](const ErrorSummary& c) { return c.f_test_sd; });
    write_text(out / "table1.csv", csv);
    json config = cfg;
    config["paper_scale"] = paper_scale;
    write_manifest(out, "table1", config, seed);
    return 0;
}

int cmd_table2(const json& cfg, bool paper_scale, std::optional<std::uint64_t> seed_flag,
               const std::string& out_dir, int workers) {
    const std::uint64_t seed = resolve_seed(seed_flag);
    ExperimentScale sc = scale_from(cfg, paper_scale, workers);
    if (paper_scale && !cfg.contains("M_prime")) {
        sc.m_prime = 10000;
        sc.m = 300;
    }
    const std::vector<double> sweep =
        cfg.value("sigma2_list", std::vector<double>{0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1});
    Matrix means(2, 2);
    means(0, 0) = means(0, 1) = 1.0;
    means(1, 0) = cfg.value("mean1", 0.4);
    means(1, 1) = cfg.value("mean2", 0.8);
    const fs::path out = prepare_out(out_dir);
    std::vector<ErrorSummary> cells;
    try {
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            cells.push_back(noisy_cell(means, sweep[i], sc, Seed{seed}.derive(i)));
            std::cerr << "table2: sigma2=" << sweep[i] << " done\n";
        }
    } catch (const std::exception& e) {
        write_manifest(out, "table2", cfg, seed, true, e.what());
        throw;
    }
    std::string csv = "metric";
    for (double s2 : sweep) csv += "," + format_g17(s2);
    csv += "\n";
    csv += "eta_K";
    for (const auto& c : cells) csv += "," + format_g17(c.eta_kendall_mean);
    csv += "\neta_rho";
    for (const auto& c : cells) csv += "," + format_g17(c.eta_rho_mean);
    csv += "\nf_test";
    for (const auto& c : cells) csv += "," + format_g17(c.f_test_mean);
    csv += "\n";
    write_text(out / "table2.csv", csv);
    json config = cfg;
    config["paper_scale"] = paper_scale;
    write_manifest(out, "table2", config, seed);
    return 0;
}

int cmd_compare(const json& cfg, bool paper_scale, std::optional<std::uint64_t> seed_flag,
                const std::string& out_dir, int workers) {
    const std::uint64_t seed = resolve_seed(seed_flag);
    CIParams truth{cfg.value("theta", 5.0), cfg.value("p", 0.3), cfg.value("q", 0.8)};
    const int reps = cfg.value("reps", paper_scale ? 100 : 20);
    const std::vector<std::size_t> n_list =
        cfg.value("n_list", std::vector<std::size_t>{500, 10000});
    const std::size_t m_prime = cfg.value("M_prime", paper_scale ? 10000 : 2000);
    const std::size_t m = cfg.value("M", paper_scale ? 300 : 100);
    const fs::path out = prepare_out(out_dir);
    const auto rows = compare_abc_mle(truth, n_list, reps, m_prime, m, Seed{seed}, workers);
    std::string csv = "rep,n,method,parameter,estimate,runtime_ms\n";
    for (const auto& r : rows)
        csv += std::to_string(r.rep) + "," + std::to_string(r.n) + "," + r.method + "," +
               r.parameter + "," + format_g17(r.estimate) + "," + format_g17(r.runtime_ms) +
               "\n";
    write_text(out / "compare.csv", csv);
    json config = cfg;
    config["paper_scale"] = paper_scale;
    write_manifest(out, "compare", config, seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymmetric (product-construction) copulas: sampling, analytics, "
                 "likelihood-free inference"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = "out";
    int workers = 0;  // 0 = all cores
    bool paper_scale = false;
    std::string config_path;

    app.add_option("--seed", seed_flag, "RNG seed (fallback: env LIEBSCHER_SEED, then 1)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    app.add_flag("--paper-scale", paper_scale, "run at the published protocol scale");
    app.add_option("--config", config_path, "JSON configuration file");

    std::string spec_path, sample_path, obs_path;
    std::size_t n = 1000;
    int n_boot = 250;

    auto* sample_cmd = app.add_subcommand("sample", "draw from a spec file (CSV output)");
    sample_cmd->add_option("spec", spec_path, "spec JSON file")->required();
    sample_cmd->add_option("-n,--n", n, "number of rows");

    auto* analyze_cmd = app.add_subcommand("analyze", "analytic and/or empirical reports");
    analyze_cmd->add_option("--spec", spec_path, "spec JSON file");
    analyze_cmd->add_option("--sample", sample_path, "sample CSV file");

    auto* abc_cmd = app.add_subcommand("abc", "rejection sampler inference");
    abc_cmd->add_option("obs", obs_path, "observed sample CSV")->required();

    auto* symtest_cmd = app.add_subcommand("symtest", "bootstrap symmetry test");
    symtest_cmd->add_option("sample", sample_path, "sample CSV")->required();
    symtest_cmd->add_option("--boot", n_boot, "bootstrap replicates");

    auto* table1_cmd = app.add_subcommand("table1", "well-specified estimation study");
    auto* table2_cmd = app.add_subcommand("table2", "noise-misspecification study");
    auto* compare_cmd = app.add_subcommand("compare", "likelihood vs rejection comparison");
    (void)table1_cmd;
    (void)table2_cmd;
    (void)compare_cmd;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        const json cfg = config_path.empty() ? json::object() : load_json_file(config_path);
        if (sample_cmd->parsed())
            return cmd_sample(spec_path, n, seed_flag, out_dir, workers);
        if (analyze_cmd->parsed())
            return cmd_analyze(
                spec_path.empty() ? std::nullopt : std::optional<std::string>(spec_path),
                sample_path.empty() ? std::nullopt : std::optional<std::string>(sample_path),
                seed_flag, out_dir, workers);
        if (abc_cmd->parsed()) {
            if (config_path.empty())
                throw SpecParseError("abc needs --config with the run manifest");
            return cmd_abc(obs_path, config_path, seed_flag, out_dir, workers);
        }
        if (symtest_cmd->parsed())
            return cmd_symtest(sample_path, n_boot, seed_flag, out_dir, workers);
        if (table1_cmd->parsed())
            return cmd_table1(cfg, paper_scale, seed_flag, out_dir, workers);
        if (table2_cmd->parsed())
            return cmd_table2(cfg, paper_scale, seed_flag, out_dir, workers);
        if (compare_cmd->parsed())
            return cmd_compare(cfg, paper_scale, seed_flag, out_dir, workers);
        return 2;
    } catch (const SpecParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
