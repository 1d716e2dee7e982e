#include "bnf/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bnf {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string format_int_list(const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

std::string format_double_list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out + "]";
}

void append_terms(std::string& out, const TFSeries& f, bool with_modes) {
    out += "[";
    bool first = true;
    for (const auto& [key, c] : f.terms()) {
        if (!first) out += ",";
        first = false;
        out += "{\"j\":" + format_int_list(key.j.j);
        if (with_modes) out += ",\"k\":" + format_int_list(key.k.k);
        out += ",\"re\":" + format_double(c.real()) +
               ",\"im\":" + format_double(c.imag()) + "}";
    }
    out += "]";
}

TFSeries parse_terms(const json& arr, int dim, int degree_cap,
                     const std::string& field) {
    if (!arr.is_array())
        throw InvalidArgument("field '" + field + "' must be an array");
    TFSeries out(dim, degree_cap);
    for (const auto& t : arr) {
        if (!t.contains("j") || !t.contains("re"))
            throw InvalidArgument("field '" + field +
                                  "': each term needs 'j' and 're'");
        MultiDegree j{t.at("j").get<std::vector<int>>()};
        std::vector<int> kvec(dim, 0);
        if (t.contains("k")) kvec = t.at("k").get<std::vector<int>>();
        if (static_cast<int>(j.j.size()) != dim ||
            static_cast<int>(kvec.size()) != dim)
            throw InvalidArgument("field '" + field +
                                  "': term key length differs from dim");
        double re = t.at("re").get<double>();
        double im = t.value("im", 0.0);
        TermKey key{j, WaveVector{kvec}};
        out.set(j, WaveVector{std::move(kvec)}, out.coeff(key) + Complex{re, im});
    }
    return out;
}

}  // namespace

std::string serialize_series(const TFSeries& f) {
    std::string out = "{\"dim\":" + std::to_string(f.dim()) +
                      ",\"degree_cap\":" + std::to_string(f.degree_cap()) +
                      ",\"terms\":";
    append_terms(out, f, true);
    out += "}\n";
    return out;
}

TFSeries parse_series(const std::string& text) {
    json doc = json::parse(text);
    int dim = doc.at("dim").get<int>();
    int cap = doc.at("degree_cap").get<int>();
    return parse_terms(doc.at("terms"), dim, cap, "terms");
}

InstanceSpec parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("instance file is not valid JSON: ") +
                              e.what());
    }
    InstanceSpec spec;
    auto need = [&](const char* field) -> const json& {
        if (!doc.contains(field))
            throw InvalidArgument(std::string("missing field '") + field + "'");
        return doc.at(field);
    };
    spec.dim = need("dim").get<int>();
    if (spec.dim < 1) throw InvalidArgument("field 'dim' must be >= 1");
    spec.degree_cap = need("degree_cap").get<int>();
    if (spec.degree_cap < 2)
        throw InvalidArgument("field 'degree_cap' must be >= 2");

    const json& om = need("omega");
    if (!om.is_array() || static_cast<int>(om.size()) != spec.dim)
        throw InvalidArgument("field 'omega' must be a dim x dim array");
    spec.omega.resize(spec.dim, spec.dim);
    for (int r = 0; r < spec.dim; ++r) {
        if (!om[r].is_array() || static_cast<int>(om[r].size()) != spec.dim)
            throw InvalidArgument("field 'omega' must be a dim x dim array");
        for (int c = 0; c < spec.dim; ++c)
            spec.omega(r, c) = om[r][c].get<double>();
    }

    if (doc.contains("b")) spec.b = doc.at("b").get<std::vector<double>>();
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<long long>();
    if (doc.contains("tol")) spec.tol = doc.at("tol").get<double>();
    if (spec.tol <= 0.0) throw InvalidArgument("field 'tol' must be positive");
    if (doc.contains("rho0")) spec.rho0 = doc.at("rho0").get<double>();
    if (!(spec.rho0 > 0.0) || spec.rho0 > 1.0)
        throw InvalidArgument("field 'rho0' must lie in (0, 1]");
    if (doc.contains("mode")) {
        std::string mode = doc.at("mode").get<std::string>();
        if (mode == "schedule-compliant")
            spec.compliant = true;
        else if (mode != "free-running")
            throw InvalidArgument(
                "field 'mode' must be 'free-running' or 'schedule-compliant'");
    }

    bool has_g = doc.contains("generator");
    bool has_h = doc.contains("hamiltonian");
    if (has_g == has_h)
        throw InvalidArgument(
            "exactly one of the fields 'generator' and 'hamiltonian' is "
            "required");
    if (has_g)
        spec.generator =
            parse_terms(doc.at("generator"), spec.dim, spec.degree_cap,
                        "generator");
    else
        spec.hamiltonian =
            parse_terms(doc.at("hamiltonian"), spec.dim, spec.degree_cap,
                        "hamiltonian");
    return spec;
}

TFSeries instance_hamiltonian(const InstanceSpec& spec) {
    if (spec.hamiltonian) return *spec.hamiltonian;
    QuadraticForm omega(spec.omega);
    NormalFormProfile profile{omega, spec.b};
    return make_instance(profile, *spec.generator, spec.degree_cap);
}

std::string format_run_report(const RunResult& result, const InstanceSpec& spec,
                              const ConstantsSchedule& schedule) {
    std::string out = "{\n";
    out += "\"schema\":\"bnf-report-v1\",\n";
    out += "\"dim\":" + std::to_string(spec.dim) + ",\n";
    out += std::string("\"mode\":\"") +
           (spec.compliant ? "schedule-compliant" : "free-running") + "\",\n";
    out += "\"degree_cap\":" + std::to_string(spec.degree_cap) + ",\n";
    out += "\"kappa\":" + std::to_string(schedule.kappa) + ",\n";
    out += "\"rho0\":" + format_double(schedule.rho0) + ",\n";
    out += "\"prescale\":" + format_double(result.prescale) + ",\n";

    std::string mseq = "[2";
    for (const auto& step : result.steps)
        mseq += "," + std::to_string(step.m_next);
    out += "\"m_sequence\":" + mseq + "],\n";

    out += "\"steps\":[\n";
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const NewtonStepReport& s = result.steps[i];
        if (i) out += ",\n";
        out += "{\"n\":" + std::to_string(s.n) + ",\"m\":" + std::to_string(s.m) +
               ",\"m_next\":" + std::to_string(s.m_next);
        out += ",\"delta_n\":" + format_double(schedule.delta[s.n]);
        out += ",\"rho_n\":" + format_double(schedule.rho[s.n]);
        out += ",\"rho_next\":" + format_double(schedule.rho[s.n + 1]);
        out += ",\"norm_R_before\":" + format_double(s.norm_R_before);
        out += ",\"norm_R_after\":" + format_double(s.norm_R_after);
        out += ",\"S\":" + format_double_list(s.S);
        out += ",\"norm_C\":" + format_double(s.norm_C);
        out += ",\"c_bound_formula\":" + format_double(s.c_bound_formula);
        out += ",\"c_bound_schedule\":" + format_double(s.c_bound_schedule);
        out += ",\"coord_deviation\":" + format_double(s.coord_deviation);
        out += ",\"low_degree_defect\":" + format_double(s.low_degree_defect);
        out += ",\"worst_residue\":" + format_double(s.worst_residue);
        out += std::string(",\"flags\":{\"est_N\":") +
               (s.flags.est_N ? "true" : "false") + ",\"est_g\":" +
               (s.flags.est_g ? "true" : "false") + ",\"est_Rn\":" +
               (s.flags.est_Rn ? "true" : "false") + ",\"est_Phi\":" +
               (s.flags.est_Phi ? "true" : "false") + "}";
        out += ",\"b_extracted\":" + format_double_list(s.b_extracted);
        out += ",\"a3_residuals\":[";
        bool first = true;
        for (const auto& [deg, r] : s.a3_residuals) {
            if (!first) out += ",";
            first = false;
            out += "[" + std::to_string(deg) + "," + format_double(r) + "]";
        }
        out += "]}";
    }
    out += "\n],\n";
    out += "\"final_b\":" + format_double_list(result.b) + ",\n";
    out += "\"normal_form\":";
    std::string nf;
    append_terms(nf, result.normal_form, false);
    out += nf + "\n}\n";
    return out;
}

std::string format_oracle_report(const OracleResult& result,
                                 const InstanceSpec& spec,
                                 std::optional<double> max_diff_vs_run) {
    std::string out = "{\n";
    out += "\"schema\":\"bnf-oracle-v1\",\n";
    out += "\"dim\":" + std::to_string(spec.dim) + ",\n";
    out += "\"degree_cap\":" + std::to_string(spec.degree_cap) + ",\n";
    out += "\"generator_count\":" + std::to_string(result.generators.size()) +
           ",\n";
    if (max_diff_vs_run)
        out += "\"max_diff_vs_run\":" + format_double(*max_diff_vs_run) + ",\n";
    out += "\"normal_form\":";
    std::string nf;
    append_terms(nf, result.normal_form, false);
    out += nf + "\n}\n";
    return out;
}

std::string format_ledger(const ConvergenceLedger& ledger,
                          const ConstantsSchedule& schedule) {
    std::string out = "{\n";
    out += "\"schema\":\"bnf-ledger-v1\",\n";
    out += "\"dim\":" + std::to_string(schedule.d) + ",\n";
    out += "\"rho0\":" + format_double(schedule.rho0) + ",\n";
    out += "\"kappa\":" + std::to_string(schedule.kappa) + ",\n";
    out += "\"b\":" + format_double(schedule.b) + ",\n";
    out += "\"horizon\":" + std::to_string(schedule.horizon()) + ",\n";
    out += std::string("\"all_pass\":") + (ledger.all_pass ? "true" : "false") +
           ",\n";
    out += "\"rows\":[\n";
    for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
        const LedgerRow& r = ledger.rows[i];
        if (i) out += ",\n";
        out += "{\"family\":\"" + r.family + "\",\"n\":" + std::to_string(r.n) +
               ",\"lhs\":" + format_double(r.lhs) + ",\"rhs\":" +
               format_double(r.rhs) + ",\"pass\":" + (r.pass ? "true" : "false") +
               "}";
    }
    out += "\n]\n}\n";
    return out;
}

std::vector<std::string> verify_report(const std::string& report_text) {
    std::vector<std::string> failures;
    json doc;
    try {
        doc = json::parse(report_text);
    } catch (const json::exception& e) {
        failures.push_back(std::string("report is not valid JSON: ") + e.what());
        return failures;
    }
    if (doc.value("schema", "") != "bnf-report-v1") {
        failures.push_back("unknown report schema");
        return failures;
    }
    int kappa = doc.at("kappa").get<int>();
    auto mseq = doc.at("m_sequence").get<std::vector<long long>>();
    for (std::size_t i = 0; i < mseq.size(); ++i)
        if (mseq[i] != (1LL << i) + 1)
            failures.push_back("m_sequence[" + std::to_string(i) +
                               "] != 2^n + 1");

    for (const auto& step : doc.at("steps")) {
        int n = step.at("n").get<int>();
        std::string tag = "step " + std::to_string(n) + ": ";
        long long m = step.at("m").get<long long>();
        long long m_next = step.at("m_next").get<long long>();
        if (m_next != 2 * m - 1) failures.push_back(tag + "m_next != 2m - 1");
        if (m != (1LL << n) + 1) failures.push_back(tag + "m != 2^n + 1");

        double delta_n = step.at("delta_n").get<double>();
        double after = step.at("norm_R_after").get<double>();
        bool est_Rn = step.at("flags").at("est_Rn").get<bool>();
        bool expected = after <= std::pow(0.5 * delta_n, kappa);
        if (est_Rn != expected)
            failures.push_back(tag + "est_Rn flag disagrees with norms");

        double norm_C = step.at("norm_C").get<double>();
        double bound = step.at("c_bound_formula").get<double>();
        bool est_g = step.at("flags").at("est_g").get<bool>();
        if (est_g && norm_C > bound * (1.0 + 1e-12) + 1e-300)
            failures.push_back(tag + "norm_C exceeds the S-assembled bound");

        for (const char* key :
             {"norm_R_before", "norm_R_after", "norm_C", "coord_deviation",
              "low_degree_defect", "worst_residue"})
            if (step.at(key).get<double>() < 0.0)
                failures.push_back(tag + std::string(key) + " is negative");
    }
    return failures;
}

}  // namespace bnf
