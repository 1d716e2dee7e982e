// Command-line front end: load instance files, run the degree-doubling
// engine or the order-by-order oracle, emit reports and schedule ledgers.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bnf/engine.hpp"
#include "bnf/io.hpp"
#include "bnf/schedule.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bnf::InvalidArgument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw bnf::InvalidArgument("cannot write file: " + path);
    out << text;
}

int cmd_run(const std::string& instance_path, int steps,
            const std::string& report_path, std::optional<double> tol,
            std::optional<std::string> mode) {
    bnf::InstanceSpec spec = bnf::parse_instance(read_file(instance_path));
    if (tol) spec.tol = *tol;
    if (mode) {
        if (*mode == "schedule-compliant")
            spec.compliant = true;
        else if (*mode == "free-running")
            spec.compliant = false;
        else
            throw bnf::InvalidArgument("unknown --mode value: " + *mode);
    }

    bnf::QuadraticForm omega(spec.omega);
    bnf::TFSeries H = bnf::instance_hamiltonian(spec);
    bnf::EngineOptions opts;
    opts.compliant = spec.compliant;
    opts.tol = spec.tol;
    opts.rho0 = spec.rho0;
    if (!spec.b.empty()) opts.profile = bnf::NormalFormProfile{omega, spec.b};

    bnf::RunResult result = bnf::run(H, omega, steps, spec.degree_cap, opts);
    bnf::ConstantsSchedule schedule =
        bnf::build_schedule(spec.dim, spec.rho0, std::max(steps + 1, 2));
    write_file(report_path, bnf::format_run_report(result, spec, schedule));

    std::cout << "n  m_n  |R~_n|            |R~_{n+1}|        flags\n";
    for (const auto& s : result.steps) {
        std::cout << s.n << "  " << s.m << "    "
                  << bnf::format_double(s.norm_R_before) << "  "
                  << bnf::format_double(s.norm_R_after) << "  "
                  << (s.flags.all() ? "ok" : "FAIL") << "\n";
    }
    std::cout << "final b:";
    for (double v : result.b) std::cout << " " << bnf::format_double(v);
    std::cout << "\nreport written to " << report_path << "\n";
    return 0;
}

int cmd_oracle(const std::string& instance_path, std::optional<int> degree,
               const std::string& report_path,
               const std::string& run_report_path, std::optional<double> tol) {
    bnf::InstanceSpec spec = bnf::parse_instance(read_file(instance_path));
    if (tol) spec.tol = *tol;
    int cap = degree.value_or(spec.degree_cap);
    if (cap > spec.degree_cap)
        throw bnf::InvalidArgument("--degree exceeds the instance degree_cap");

    bnf::QuadraticForm omega(spec.omega);
    bnf::TFSeries H = bnf::instance_hamiltonian(spec);
    bnf::OracleResult result = bnf::classical_oracle(H, omega, cap, spec.tol);

    std::optional<double> max_diff;
    if (!run_report_path.empty()) {
        nlohmann::json run_doc = nlohmann::json::parse(read_file(run_report_path));
        bnf::TFSeries run_nf(spec.dim, spec.degree_cap);
        for (const auto& t : run_doc.at("normal_form")) {
            bnf::MultiDegree j{t.at("j").get<std::vector<int>>()};
            run_nf.set(j, bnf::WaveVector{std::vector<int>(spec.dim, 0)},
                       bnf::Complex{t.at("re").get<double>(), 0.0});
        }
        double worst = 0.0;
        bnf::TFSeries diff = bnf::sub(result.normal_form, run_nf);
        for (const auto& [key, c] : diff.terms())
            worst = std::max(worst, std::abs(c));
        max_diff = worst;
    }

    write_file(report_path, bnf::format_oracle_report(result, spec, max_diff));
    std::cout << "eliminated " << result.generators.size() << " degrees; "
              << result.normal_form.size() << " normal-form terms\n";
    if (max_diff)
        std::cout << "max diff vs run report: " << bnf::format_double(*max_diff)
                  << "\n";
    std::cout << "report written to " << report_path << "\n";
    return 0;
}

int cmd_schedule(int dim, double rho0, int horizon, const std::string& out_path) {
    bnf::ConstantsSchedule s = bnf::build_schedule(dim, rho0, horizon);
    bnf::ConvergenceLedger ledger = bnf::check_convergence_chain(s);
    std::string text = bnf::format_ledger(ledger, s);
    if (out_path.empty())
        std::cout << text;
    else {
        write_file(out_path, text);
        std::cout << "ledger " << (ledger.all_pass ? "all pass" : "HAS FAILURES")
                  << "; written to " << out_path << "\n";
    }
    return ledger.all_pass ? 0 : 4;
}

int cmd_verify(const std::string& report_path) {
    auto failures = bnf::verify_report(read_file(report_path));
    if (failures.empty()) {
        std::cout << "report identities hold\n";
        return 0;
    }
    for (const auto& f : failures) std::cerr << "verify: " << f << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birkhoff normal forms by degree-doubling Newton iteration"};
    app.require_subcommand(1);

    std::string instance_path, report_path = "report.json";
    std::string run_report_path, out_path;
    int steps = 1, dim = 1, horizon = 30;
    std::optional<int> degree;
    std::optional<double> tol;
    std::optional<std::string> mode;
    double rho0 = 1.0;

    auto* runc = app.add_subcommand("run", "run the Newton engine");
    runc->add_option("instance", instance_path, "instance file")->required();
    runc->add_option("--steps", steps, "number of Newton steps")->required();
    runc->add_option("--report", report_path, "report output path");
    runc->add_option("--tol", tol, "tolerance override");
    runc->add_option("--mode", mode, "free-running | schedule-compliant");

    auto* orc = app.add_subcommand("oracle", "run the order-by-order oracle");
    orc->add_option("instance", instance_path, "instance file")->required();
    orc->add_option("--degree", degree, "degree to normalize through");
    orc->add_option("--report", report_path, "report output path");
    orc->add_option("--run-report", run_report_path,
                    "run report to diff against");
    orc->add_option("--tol", tol, "tolerance override");

    auto* schc = app.add_subcommand("schedule", "emit the constants ledger");
    schc->add_option("--dim", dim, "dimension d")->required();
    schc->add_option("--rho0", rho0, "initial radius in (0,1]")->required();
    schc->add_option("--horizon", horizon, "number of steps to check");
    schc->add_option("--out", out_path, "ledger output path");

    auto* verc = app.add_subcommand("verify", "re-check a report's identities");
    verc->add_option("report", report_path, "report file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (runc->parsed()) return cmd_run(instance_path, steps, report_path, tol, mode);
        if (orc->parsed())
            return cmd_oracle(instance_path, degree, report_path,
                              run_report_path, tol);
        if (schc->parsed()) return cmd_schedule(dim, rho0, horizon, out_path);
        if (verc->parsed()) return cmd_verify(report_path);
    } catch (const bnf::ObstructionDetected& e) {
        std::cerr << "ObstructionDetected: " << e.what() << "\n";
        return 2;
    } catch (const bnf::A3Violation& e) {
        std::cerr << "A3Violation: " << e.what() << "\n";
        return 3;
    } catch (const bnf::ScheduleHypothesisFailure& e) {
        std::cerr << "ScheduleHypothesisFailure: " << e.what() << "\n";
        return 4;
    } catch (const bnf::DegreeBudgetExceeded& e) {
        std::cerr << "DegreeBudgetExceeded: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
