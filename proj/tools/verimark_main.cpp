#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "verimark/scenario_config.hpp"
#include "verimark/simnet.hpp"

using namespace verimark;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitInvariantError = 2;

std::string format_double(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file: " + out_path);
    out << content;
}

std::string scenario_summary(const ScenarioReport& report) {
    std::ostringstream out;
    out << "scenario " << report.name << " (threat " << threat_name(report.threat)
        << ", seed " << report.seed << ")\n";
    out << "  outcome:    "
        << (report.prevented ? "prevented" : (report.detected ? "detected" : "no violation"))
        << " via " << report.mechanism << "\n";
    out << "  convicted:  ";
    if (report.convicted.empty())
        out << "nobody";
    else
        for (std::size_t i = 0; i < report.convicted.size(); ++i)
            out << (i ? ", " : "") << report.convicted[i];
    out << "\n";
    out << "  messages:   " << report.messages << " (" << report.wire_bytes
        << " wire bytes, " << report.payload_bytes << " payload bytes)\n";
    out << "  overhead:   signed inputs " << report.signed_inputs << ", per-message "
        << report.signed_input_overhead_min << ".." << report.signed_input_overhead_max
        << " bytes (max any type " << report.max_overhead_any_message << ")\n";
    out << "  ledger:     conserved=" << (report.conservation_ok ? "yes" : "no")
        << " contractor_paid=" << report.contractor_paid
        << " verifier_paid=" << report.verifier_paid << "\n";
    if (report.qos_violations > 0) {
        out << "  qos:        " << report.qos_violations << " violation(s):";
        for (const std::string& kind : report.qos_kinds) out << " " << kind;
        out << "\n";
    }
    if (report.tampered_delivered > 0)
        out << "  tampering:  delivered=" << report.tampered_delivered
            << " rejected_by_signature=" << report.tamper_rejections << "\n";
    return out.str();
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool seed_given,
            std::uint32_t reps, const std::string& out_path, const std::string& format) {
    ScenarioConfig base = scenario_from_json_file(config_path);
    if (seed_given) base.seed = seed_override;

    std::ostringstream records;
    std::ostringstream text;
    SplitMix64 seeder(base.seed);
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
        ScenarioConfig cfg = base;
        if (reps > 1) {
            cfg.seed = seeder.next();
            cfg.name = base.name + "#" + std::to_string(rep);
        }
        ScenarioReport report = run_scenario(cfg);
        records << report.to_record() << "\n";
        text << scenario_summary(report);
    }
    write_output(out_path, format == "records" ? records.str() : text.str());
    return kExitOk;
}

int cmd_threat_matrix(std::uint64_t seed, std::uint32_t reps, std::uint32_t t1_reps,
                      std::uint32_t t1_trials, const std::string& out_path,
                      const std::string& format) {
    ThreatSuiteConfig cfg;
    cfg.seed = seed;
    cfg.repetitions = reps;
    cfg.t1_repetitions = t1_reps;
    cfg.t1_trials = t1_trials;
    std::vector<ThreatSuiteRow> rows = run_threat_suite(cfg);

    std::ostringstream records;
    for (const ThreatSuiteRow& row : rows) records << row.to_record() << "\n";

    std::ostringstream text;
    char line[512];
    std::snprintf(line, sizeof line, "%-3s  %-62s  %-58s  %s\n", "id", "violation",
                  "techniques", "confidence");
    text << line;
    for (const ThreatSuiteRow& row : rows) {
        std::string confidence = format_double(100.0 * row.rate, 1) + "%";
        if (row.threat == ThreatId::T1)
            confidence += " (analytic " + format_double(100.0 * row.analytic, 2) +
                          "%, sampling trials " +
                          format_double(100.0 * row.fast_trial_rate, 2) + "%)";
        if (row.threat == ThreatId::T7)
            confidence += row.honesty_dominant ? " (honesty dominant)" : " (NOT dominant)";
        std::snprintf(line, sizeof line, "%-3s  %-62s  %-58s  %s\n",
                      threat_name(row.threat), row.description.c_str(),
                      row.techniques.c_str(), confidence.c_str());
        text << line;
    }
    write_output(out_path, format == "records" ? records.str() : text.str());
    return kExitOk;
}

int cmd_incentives(double reward, double honest_cost, double dishonest_cost, double q,
                   double fee, double bounty) {
    if (reward < 0) throw ConfigError("reward must be >= 0");
    PayoffMatrix matrix =
        payoff_matrix(reward, CostModel{honest_cost, dishonest_cost, q}, fee, bounty);
    char line[256];
    std::printf("payoff matrix (rows: this participant, columns: counterparty)\n");
    std::snprintf(line, sizeof line, "%-12s %14s %14s", "", "diligent", "dishonest");
    std::printf("%s\n", line);
    std::snprintf(line, sizeof line, "%-12s %14s %14s", "diligent",
                  format_double(matrix.diligent_vs_diligent).c_str(),
                  format_double(matrix.diligent_vs_dishonest).c_str());
    std::printf("%s\n", line);
    std::snprintf(line, sizeof line, "%-12s %14s %14s", "dishonest",
                  format_double(matrix.dishonest_vs_diligent).c_str(),
                  format_double(matrix.dishonest_vs_dishonest).c_str());
    std::printf("%s\n", line);
    std::printf("honesty dominant: %s\n", is_honesty_dominant(matrix) ? "yes" : "no");
    return kExitOk;
}

int cmd_sampling_table(std::vector<double> cheat_rates, std::vector<std::uint64_t> intervals,
                       const std::string& out_path) {
    if (cheat_rates.empty())
        cheat_rates = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    if (intervals.empty()) intervals = {1, 2, 5, 10, 20, 44, 100};
    std::ostringstream out;
    out << "detection probability p = 1 - (1 - c)^i\n";
    out << "c \\ i";
    for (std::uint64_t i : intervals) out << "\t" << i;
    out << "\n";
    for (double c : cheat_rates) {
        out << format_double(c, 2);
        for (std::uint64_t i : intervals)
            out << "\t" << format_double(detection_probability(c, i), 6);
        out << "\n";
    }
    write_output(out_path, out.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification scheme simulator for outsourced computation marketplaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "text";
    std::uint64_t seed = 0;
    std::uint32_t reps = 1;

    CLI::App* run = app.add_subcommand("run", "run scenarios from a config file");
    run->add_option("--config", config_path, "scenario config (JSON)")->required();
    CLI::Option* run_seed = run->add_option("--seed", seed, "override the config seed");
    run->add_option("--reps", reps, "repetitions with derived seeds");
    run->add_option("--out", out_path, "output file (default: stdout)");
    run->add_option("--format", format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    std::uint64_t suite_seed = 42;
    std::uint32_t suite_reps = 100;
    std::uint32_t t1_reps = 0;
    std::uint32_t t1_trials = 10000;
    CLI::App* matrix = app.add_subcommand(
        "threat-matrix", "run the nine threat scenario families and tabulate outcomes");
    matrix->add_option("--seed", suite_seed, "suite seed");
    matrix->add_option("--reps", suite_reps, "repetitions per threat");
    matrix->add_option("--t1-reps", t1_reps, "full-protocol T1 repetitions (0 = --reps)");
    matrix->add_option("--t1-trials", t1_trials, "fast sampling-process trials for T1");
    matrix->add_option("--out", out_path, "output file (default: stdout)");
    matrix->add_option("--format", format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    double reward = 10, honest_cost = 4, dishonest_cost = 1, q = 0.5, fee = 10, bounty = 2;
    CLI::App* incentives =
        app.add_subcommand("incentives", "payoff matrix and dominance verdict");
    incentives->add_option("--reward", reward, "reward per input r");
    incentives->add_option("--honest-cost", honest_cost, "honest computation cost c_h");
    incentives->add_option("--dishonest-cost", dishonest_cost, "cheap computation cost c_d");
    incentives->add_option("--q", q, "success probability of the cheap algorithm");
    incentives->add_option("--fee", fee, "fee f paid when convicted");
    incentives->add_option("--bounty", bounty, "bounty b for the detecting party");

    std::vector<double> rates;
    std::vector<std::uint64_t> interval_counts;
    CLI::App* table = app.add_subcommand(
        "sampling-table", "tabulate detection probability over cheat rates and intervals");
    table->add_option("--cheat-rates", rates, "cheat rates c");
    table->add_option("--intervals", interval_counts, "interval counts i");
    table->add_option("--out", out_path, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, seed, run_seed->count() > 0, reps, out_path, format);
        if (matrix->parsed())
            return cmd_threat_matrix(suite_seed, suite_reps, t1_reps, t1_trials, out_path,
                                     format);
        if (incentives->parsed())
            return cmd_incentives(reward, honest_cost, dishonest_cost, q, fee, bounty);
        if (table->parsed()) return cmd_sampling_table(rates, interval_counts, out_path);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const ScenarioInvariantError& err) {
        std::cerr << "scenario invariant violation: " << err.what() << "\n";
        return kExitInvariantError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "invalid argument: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInvariantError;
    }
    return kExitOk;
}
