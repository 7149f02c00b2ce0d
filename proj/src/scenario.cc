#include "qkdsec/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qkdsec/coupling.h"
#include "qkdsec/discrimination.h"
#include "qkdsec/errors.h"
#include "qkdsec/metrics.h"
#include "qkdsec/riskavg.h"
#include "qkdsec/serialize.h"
#include "qkdsec/toysim.h"

namespace qkdsec {

namespace {

using nlohmann::json;

template <typename T>
T param(const json &params, const char *name, T fallback) {
    if (!params.contains(name)) return fallback;
    try {
        return params.at(name).get<T>();
    } catch (const json::exception &e) {
        throw ValidationError(std::string("params.") + name + ": " + e.what());
    }
}

const json &required(const json &params, const char *name) {
    if (!params.contains(name)) throw ValidationError(std::string("params.") + name + ": required field missing");
    return params.at(name);
}

std::string label(double v) { return format_double(v); }

MetricReport run_metrics(const Scenario &s, const Config &cfg) {
    const json &p = s.params;
    MetricReport r;
    if (p.contains("a") || p.contains("b")) {
        r.merge(fvg_bounds(operator_from_json(required(p, "a"), cfg), operator_from_json(required(p, "b"), cfg), cfg),
                "fvg.");
    }
    if (p.contains("state")) {
        const CqState state = cq_state_from_json(p.at("state"), cfg);
        const HermitianOperator sigma = p.contains("sigma") ? operator_from_json(p.at("sigma"), cfg) : sigma_avg(state);
        r.merge(epsilon_decomposition(state, sigma, cfg), "decomp.");
        r.merge(statistical_distance_lb(state, sigma, cfg), "sd.");
        if (param<bool>(p, "chain", true)) r.merge(koashi_chain_check(correctify(state, cfg), sigma, cfg), "chain.");
        const auto restarts = param<std::size_t>(p, "restarts", 4);
        r.merge(min_sigma_trace_distance(state, restarts, s.seed, cfg), "min_sigma.");
    }
    if (r.empty()) throw ValidationError("params: metrics needs 'state' or the pair 'a', 'b'");
    return r;
}

MetricReport run_coupling(const Scenario &s, const Config &cfg) {
    const json &p = s.params;
    MetricReport r;
    if (p.contains("key")) {
        const ClassicalDistribution key = distribution_from_json(p.at("key"), cfg);
        const ClassicalDistribution plain = p.contains("plaintext")
                                                ? distribution_from_json(p.at("plaintext"), cfg)
                                                : ClassicalDistribution::uniform(key.support());
        r.merge(otp_secrecy_check(key, plain), "otp.");
    }
    if (p.contains("p")) {
        const ClassicalDistribution pd = distribution_from_json(p.at("p"), cfg);
        const ClassicalDistribution ud =
            p.contains("u") ? distribution_from_json(p.at("u"), cfg) : ClassicalDistribution::uniform(pd.support());
        r.merge(independent_coupling_check(pd, ud));
        const CouplingTable t = maximal_coupling(pd, ud);
        if (t.size() <= 16) {
            for (std::size_t k = 0; k < t.size(); ++k) {
                for (std::size_t kp = 0; kp < t.size(); ++kp) {
                    r.add("R_" + std::to_string(k) + "_" + std::to_string(kp), t(k, kp),
                          "coupling.maximal_coupling: joint table entry");
                }
            }
        }
    }
    if (r.empty()) throw ValidationError("params: coupling needs 'p' or 'key'");
    return r;
}

MetricReport run_helstrom(const Scenario &s, const Config &cfg) {
    const json &p = s.params;
    const auto priors = param<std::vector<double>>(p, "priors", {0.5, 0.5});
    const json &states = required(p, "states");
    if (!states.is_array() || states.size() != priors.size()) {
        throw ValidationError("params.states: must be an array matching params.priors");
    }
    std::vector<EnsembleItem> items;
    for (std::size_t i = 0; i < priors.size(); ++i) items.push_back({priors[i], operator_from_json(states[i], cfg)});
    return helstrom(Ensemble(std::move(items), cfg), cfg);
}

MetricReport run_guess(const Scenario &s, const Config &cfg) {
    const json &p = s.params;
    if (p.contains("key_bits")) {
        const LogProb eps = p.contains("log2_eps_sec") ? LogProb::from_log2(p.at("log2_eps_sec").get<double>())
                                                       : LogProb::from_prob(param<double>(p, "eps_sec", 0.0));
        return guess_bound(param<uint64_t>(p, "key_bits", 1), eps);
    }
    const CqState state = cq_state_from_json(required(p, "state"), cfg);
    const HermitianOperator sigma = p.contains("sigma") ? operator_from_json(p.at("sigma"), cfg) : sigma_avg(state);
    MetricReport r = guess_bound(state, sigma, cfg);
    r.merge(best_guess_prob(state, cfg), "best.");
    if (p.contains("povm")) {
        const Povm m = povm_from_json(p.at("povm"), cfg);
        r.add("povm_guess", povm_guess_prob(state, m, cfg), "discrimination.povm_guess_prob: supplied POVM");
    }
    return r;
}

Bb84Config bb84_config(const json &p, double q) {
    Bb84Config c;
    c.rounds = param<unsigned>(p, "rounds", 1);
    c.intercept_prob = q;
    c.sift = param<bool>(p, "sift", true);
    const auto pa = param<std::string>(p, "pa_mode", "none");
    if (pa == "none") {
        c.pa_mode = PrivacyAmplification::None;
    } else if (pa == "parity") {
        c.pa_mode = PrivacyAmplification::Parity;
    } else {
        throw ValidationError("params.pa_mode: unknown value '" + pa + "' (expected none or parity)");
    }
    return c;
}

MetricReport run_bb84(const Scenario &s, const Config &cfg) {
    const json &p = s.params;
    const json q = p.contains("intercept_prob") ? p.at("intercept_prob") : json(0.0);
    if (q.is_array()) {
        MetricReport r;
        for (const auto &qi : q) {
            const double v = qi.get<double>();
            r.merge(pipeline_report(bb84_config(p, v), cfg), "q=" + label(v) + ".");
        }
        return r;
    }
    return pipeline_report(bb84_config(p, param<double>(p, "intercept_prob", 0.0)), cfg);
}

MetricReport run_risk(const Scenario &s, const Config &) {
    const json &p = s.params;
    RiskScenario sc{param<double>(p, "key_rate_bits_per_sec", 1e9), param<uint64_t>(p, "key_len_bits", 1000000),
                    param<double>(p, "duration_sec", kSecondsPerYear),
                    p.contains("epsilon_sec") ? LogProb::from_prob(p.at("epsilon_sec").get<double>())
                                              : LogProb::from_log2(param<double>(p, "log2_epsilon_sec", -50.0))};
    MetricReport r = leak_rate(sc);
    const double baseline = fatality_baseline(param<double>(p, "fatalities", 7.5e3), param<double>(p, "fleet", 7.9e7));
    r.add("fatality_baseline", baseline, "riskavg.fatality_baseline: fatalities / fleet");
    r.add("fatality_baseline_2sf", round_sig(baseline, 2), "riskavg.fatality_baseline: two significant figures");
    const double ratio = r.value("expected_leaks") / baseline;
    r.add("leak_to_fatality_ratio", ratio, "riskavg: expected_leaks / fatality_baseline");
    r.add("same_order_of_magnitude", ratio > 0.1 && ratio < 10 ? 1.0 : 0.0, "riskavg: 0.1 < ratio < 10");
    r.merge(log2_compare(LogProb::pow2_neg(static_cast<double>(sc.key_len_bits)), sc.epsilon_sec), "compare.");
    return r;
}

MetricReport run_averaging(const Scenario &s, const Config &) {
    const json &p = s.params;
    MetricReport r;
    if (p.contains("avg_bound")) {
        const double eps = p.at("avg_bound").get<double>();
        const json layers = p.contains("layers") ? p.at("layers") : json(1);
        if (layers.is_array()) {
            for (const auto &m : layers) r.merge(markov_cascade(eps, m.get<unsigned>()), "m=" + m.dump() + ".");
        } else {
            r.merge(markov_cascade(eps, layers.get<unsigned>()), "cascade.");
        }
    }
    if (p.contains("threshold")) {
        const double t = p.at("threshold").get<double>();
        std::vector<double> samples;
        if (p.contains("samples")) {
            samples = p.at("samples").get<std::vector<double>>();
        } else {
            // Uniform on [0, 2 * mean] from the scenario seed.
            const auto n = param<std::size_t>(p, "sample_count", 1000);
            const double mean = param<double>(p, "mean", 0.5 * t);
            CounterRng rng(s.seed, /*stream_id=*/0xa7);
            samples.resize(n);
            for (auto &x : samples) x = rng.uniform(0.0, 2.0 * mean);
        }
        r.merge(markov_tail_demo(samples, t), "tail.");
    }
    if (r.empty()) throw ValidationError("params: averaging needs 'avg_bound' or 'threshold'");
    return r;
}

}  // namespace

const std::vector<std::string> &scenario_kinds() {
    static const std::vector<std::string> kinds{"metrics", "coupling", "helstrom", "guess",
                                                "bb84",    "risk",     "averaging"};
    return kinds;
}

Scenario parse_scenario(const json &doc, bool require_version) {
    if (!doc.is_object()) throw ValidationError("scenario: must be a JSON object");
    if (require_version) {
        if (!doc.contains("version") || doc.at("version") != kSchemaVersion) {
            throw ValidationError("scenario: field 'version' must be \"v1\"");
        }
    }
    Scenario s;
    if (!doc.contains("kind") || !doc.at("kind").is_string()) {
        throw ValidationError("scenario: field 'kind' is required");
    }
    s.kind = doc.at("kind").get<std::string>();
    const auto &kinds = scenario_kinds();
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
        throw ValidationError("scenario: field 'kind' has unknown value '" + s.kind + "'");
    }
    if (doc.contains("params")) {
        if (!doc.at("params").is_object()) throw ValidationError("scenario: field 'params' must be an object");
        s.params = doc.at("params");
    }
    if (doc.contains("seed")) {
        const json &seed = doc.at("seed");
        if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<int64_t>() < 0)) {
            throw ValidationError("scenario: field 'seed' must be a nonnegative integer");
        }
        s.seed = doc.at("seed").get<uint64_t>();
    }
    if (doc.contains("output")) {
        const json &out = doc.at("output");
        if (out.contains("path")) s.output.path = out.at("path").get<std::string>();
        if (out.contains("format")) {
            const auto f = parse_report_format(out.at("format").get<std::string>());
            if (!f) throw ValidationError("scenario: field 'output.format' must be json or csv");
            s.output.format = *f;
        }
    }
    return s;
}

std::vector<Scenario> parse_scenario_document(const json &doc) {
    if (!doc.is_object()) throw ValidationError("scenario document: must be a JSON object");
    if (!doc.contains("version") || doc.at("version") != kSchemaVersion) {
        throw ValidationError("scenario document: field 'version' must be \"v1\"");
    }
    std::vector<Scenario> out;
    if (doc.contains("scenarios")) {
        if (!doc.at("scenarios").is_array()) throw ValidationError("scenario document: 'scenarios' must be an array");
        for (const auto &item : doc.at("scenarios")) out.push_back(parse_scenario(item, false));
    } else {
        out.push_back(parse_scenario(doc, true));
    }
    return out;
}

MetricReport run_scenario(const Scenario &s, const Config &cfg) {
    try {
        if (s.kind == "metrics") return run_metrics(s, cfg);
        if (s.kind == "coupling") return run_coupling(s, cfg);
        if (s.kind == "helstrom") return run_helstrom(s, cfg);
        if (s.kind == "guess") return run_guess(s, cfg);
        if (s.kind == "bb84") return run_bb84(s, cfg);
        if (s.kind == "risk") return run_risk(s, cfg);
        if (s.kind == "averaging") return run_averaging(s, cfg);
    } catch (const json::exception &e) {
        throw ValidationError(std::string("scenario params: ") + e.what());
    }
    throw ValidationError("scenario: field 'kind' has unknown value '" + s.kind + "'");
}

ExitCode exit_code_for_current_exception(std::string &message) {
    try {
        throw;
    } catch (const ValidationError &e) {
        message = std::string("validation error: ") + e.what();
        return ExitCode::Validation;
    } catch (const NumericalError &e) {
        message = std::string("numerical error: ") + e.what();
        return ExitCode::Numerical;
    } catch (const ResourceError &e) {
        message = std::string("resource error: ") + e.what();
        return ExitCode::Resource;
    } catch (const IoError &e) {
        message = std::string("I/O error: ") + e.what();
        return ExitCode::Io;
    } catch (const json::exception &e) {
        message = std::string("validation error: ") + e.what();
        return ExitCode::Validation;
    } catch (const std::exception &e) {
        message = std::string("internal error: ") + e.what();
        return ExitCode::Internal;
    }
}

ExitCode run_batch(const std::vector<Scenario> &scenarios, const Config &cfg, std::string &stdout_text,
                   std::string &error_text) {
    for (const auto &s : scenarios) {
        try {
            const std::string text = emit_report(run_scenario(s, cfg), s.output.format);
            if (s.output.path) {
                std::ofstream f(*s.output.path, std::ios::binary | std::ios::trunc);
                if (!f) throw IoError("cannot open '" + *s.output.path + "' for writing");
                f << text;
                f.flush();
                if (!f) throw IoError("failed writing '" + *s.output.path + "'");
            } else {
                stdout_text += text;
            }
        } catch (...) {
            const ExitCode code = exit_code_for_current_exception(error_text);
            error_text = "scenario '" + s.kind + "': " + error_text;
            return code;
        }
    }
    return ExitCode::Ok;
}

}  // namespace qkdsec
