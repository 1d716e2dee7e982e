#ifndef BNF_IO_HPP
#define BNF_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnf/engine.hpp"
#include "bnf/schedule.hpp"
#include "bnf/tf_series.hpp"

namespace bnf {

/// Series round-trip in a structured-text (JSON) document. Coefficients are
/// written with 17 significant digits so the decimal form is bit-exact.
std::string serialize_series(const TFSeries& f);
TFSeries parse_series(const std::string& text);

/// An instance file: the quadratic form, the prescribed b coefficients, and
/// exactly one of {generator, hamiltonian} as a term list.
struct InstanceSpec {
    int dim = 0;
    Eigen::MatrixXd omega;
    std::vector<double> b;
    std::optional<TFSeries> generator;
    std::optional<TFSeries> hamiltonian;
    int degree_cap = 0;
    long long seed = 0;
    bool compliant = false;
    double tol = 1e-9;
    double rho0 = 1.0;
};

/// Throws InvalidArgument naming the offending field on malformed input.
InstanceSpec parse_instance(const std::string& text);

/// Builds the Hamiltonian: either the explicit term list, or
/// N(profile) o X_{-G}^1 from the generator.
TFSeries instance_hamiltonian(const InstanceSpec& spec);

std::string format_run_report(const RunResult& result, const InstanceSpec& spec,
                              const ConstantsSchedule& schedule);

std::string format_oracle_report(const OracleResult& result,
                                 const InstanceSpec& spec,
                                 std::optional<double> max_diff_vs_run);

std::string format_ledger(const ConvergenceLedger& ledger,
                          const ConstantsSchedule& schedule);

/// Re-checks a run report's internal identities (m-sequence, flag/number
/// consistency, C_n bounds). Returns a list of human-readable failures.
std::vector<std::string> verify_report(const std::string& report_text);

/// Fixed-format decimal with 17 significant digits.
std::string format_double(double x);

}  // namespace bnf

#endif
