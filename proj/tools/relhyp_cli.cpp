/**
 * relhyp — command-line front end for the free-product conjugacy toolkit.
 *
 * One binary, subcommand style: nf, eq, classify, dist, ball, csp, oracle,
 * delta, epsilon, bcp, bounds, experiment, check-lemmas.  Every subcommand
 * takes --group (a group config JSON) and supports --json for machine-readable
 * output.  Exit codes: 0 success, 1 domain error, 2 config/usage error.
 */

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "relhyp/constants.hpp"
#include "relhyp/csp_solver.hpp"

namespace {

using nlohmann::ordered_json;
using namespace relhyp;
using namespace relhyp::group_model;

struct CliState {
    std::string group_path;
    std::string constants_path;
    bool json = false;
    std::uint64_t cap = 12;

    // Subcommand-specific inputs.
    std::string word, a_text, b_text, x_text;
    std::string metric = "x";
    std::string out_path;
    int radius = 3;
    int exp_cap = 2;
    int k = 0;
    int kmax = -1;
    std::uint64_t L = 0;
    std::uint64_t trials = 0;
    std::uint64_t lmax = 6;
    std::uint64_t seed = 0;
    int workers = 1;
    bool timing = false;
};

std::uint64_t default_cap_from_env() {
    const char* env = std::getenv("RELHYP_CAP");
    if (env == nullptr || *env == '\0') return 12;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0' || v == 0)
        throw Error(ErrorCode::ConfigError, "RELHYP_CAP must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<std::uint64_t>(v);
}

void emit(const CliState& st, const ordered_json& doc, const std::string& text) {
    if (st.json)
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << text;
}

constants::HypConstants constants_for(const CliState& st) {
    if (!st.constants_path.empty()) return constants::load_constants(st.constants_path);
    constants::HypConstants c;  // zero-delta defaults: exact tree-like regime
    c.validate();
    return c;
}

std::string rat(const Rational& r) { return rational_to_string(r); }

ordered_json outcome_to_json(const GroupSpec& spec, const csp::CspOutcome& o) {
    ordered_json doc;
    doc["outcome"] = csp::outcome_name(o.kind);
    doc["reason"] = csp::reason_name(o.reason);
    if (o.found()) {
        doc["x"] = to_word_string(spec, o.x);
        doc["x_len"] = o.x_len;
    }
    doc["searched_radius"] = o.searched_radius;
    if (o.has_bound) doc["bound"] = o.bound.to_string();
    doc["cap"] = o.cap;
    return doc;
}

std::string outcome_to_text(const GroupSpec& spec, const csp::CspOutcome& o) {
    std::ostringstream out;
    out << csp::outcome_name(o.kind);
    if (o.found()) out << " x=" << to_word_string(spec, o.x) << " len=" << o.x_len;
    if (o.reason != csp::CspOutcome::Reason::None) out << " reason=" << csp::reason_name(o.reason);
    out << " searched=" << o.searched_radius;
    if (o.has_bound) out << " bound=" << o.bound.to_string();
    out << " cap=" << o.cap << "\n";
    return out.str();
}

ordered_json report_to_doc(const geometry::Report& r) {
    ordered_json doc;
    doc["pair_id"] = r.pair_id;
    doc["violations"] = ordered_json::array();
    for (const auto& v : r.violations) {
        ordered_json item;
        item["kind"] = v.kind;
        item["indices"] = v.indices;
        item["details"] = v.details;
        doc["violations"].push_back(item);
    }
    return doc;
}

int run_nf(const CliState& st, const GroupSpec& spec) {
    const NormalForm nf = nf_of(spec, st.word);
    ordered_json doc;
    doc["word"] = to_word_string(spec, nf);
    doc["x_length"] = x_length(nf);
    doc["rel_length"] = rel_length(spec, nf);
    doc["syllables"] = ordered_json::array();
    for (const auto& s : nf.syllables) {
        ordered_json item;
        item["factor"] = spec.factors[s.factor].name;
        item["exponents"] = s.exps;
        doc["syllables"].push_back(item);
    }
    emit(st, doc, to_word_string(spec, nf) + "\n");
    return 0;
}

int run_eq(const CliState& st, const GroupSpec& spec) {
    const bool eq = equal(nf_of(spec, st.a_text), nf_of(spec, st.b_text));
    emit(st, ordered_json{{"equal", eq}}, eq ? "equal\n" : "distinct\n");
    return 0;
}

int run_classify(const CliState& st, const GroupSpec& spec) {
    const Classification c = classify(spec, nf_of(spec, st.word));
    ordered_json doc;
    doc["class"] = classification_name(c.kind);
    std::ostringstream text;
    text << classification_name(c.kind);
    if (c.kind == Classification::Kind::Parabolic) {
        doc["factor"] = spec.factors[c.factor].name;
        doc["representative"] = to_word_string(spec, c.representative);
        doc["conjugator"] = to_word_string(spec, c.conjugator);
        text << " factor=" << spec.factors[c.factor].name
             << " representative=" << to_word_string(spec, c.representative)
             << " conjugator=" << to_word_string(spec, c.conjugator);
    }
    text << "\n";
    emit(st, doc, text.str());
    return 0;
}

int run_dist(const CliState& st, const GroupSpec& spec) {
    const NormalForm a = nf_of(spec, st.a_text);
    const NormalForm b = nf_of(spec, st.b_text);
    const std::uint64_t d = st.metric == "rel" ? cayley::dist_rel(spec, a, b) : cayley::dist_X(spec, a, b);
    emit(st, ordered_json{{"metric", st.metric}, {"distance", d}}, std::to_string(d) + "\n");
    return 0;
}

int run_ball(const CliState& st, const GroupSpec& spec) {
    const cayley::Ball ball = st.metric == "rel"
                                  ? cayley::ball_rel(spec, st.radius, st.exp_cap, static_cast<int>(st.cap))
                                  : cayley::ball_X(spec, st.radius, static_cast<int>(st.cap));
    // JSON lines in both modes: one element per line, for streaming consumers.
    for (std::size_t d = 0; d < ball.shells.size(); ++d) {
        for (const auto& g : ball.shells[d]) {
            ordered_json line;
            line["word"] = to_word_string(spec, g);
            line["length"] = d;
            if (st.metric == "rel") line["x_length"] = x_length(g);
            std::cout << line.dump() << "\n";
        }
    }
    return 0;
}

int run_csp(const CliState& st, const GroupSpec& spec) {
    const auto consts = constants_for(st);
    const csp::CspOutcome o =
        csp::solve_csp(spec, nf_of(spec, st.a_text), nf_of(spec, st.b_text), consts, st.cap);
    emit(st, outcome_to_json(spec, o), outcome_to_text(spec, o));
    return 0;
}

int run_oracle(const CliState& st, const GroupSpec& spec) {
    const csp::CspOutcome o =
        csp::oracle_min_conjugator(spec, nf_of(spec, st.a_text), nf_of(spec, st.b_text), st.cap);
    emit(st, outcome_to_json(spec, o), outcome_to_text(spec, o));
    return 0;
}

int run_delta(const CliState& st, const GroupSpec& spec) {
    const Rational d = constants::estimate_delta(spec, st.radius, st.exp_cap);
    emit(st, ordered_json{{"delta", rat(d)}, {"radius", st.radius}, {"exp_cap", st.exp_cap}},
         "delta " + rat(d) + "\n");
    return 0;
}

int run_epsilon(const CliState& st, const GroupSpec& spec) {
    if (st.kmax >= 0) {
        std::vector<std::pair<std::uint64_t, Rational>> samples;
        ordered_json doc;
        doc["radius"] = st.radius;
        doc["samples"] = ordered_json::array();
        std::ostringstream text;
        for (int k = 0; k <= st.kmax; ++k) {
            const Rational v = constants::estimate_epsilon(spec, k, st.radius);
            samples.emplace_back(static_cast<std::uint64_t>(k), v);
            doc["samples"].push_back(ordered_json{{"k", k}, {"epsilon", rat(v)}});
            text << "k " << k << " epsilon " << rat(v) << "\n";
        }
        const constants::EpsFit fit = constants::fit_eps_coeffs(samples);
        doc["fit"] = ordered_json{{"e0", rat(fit.e0)}, {"e1", rat(fit.e1)}, {"e2", rat(fit.e2)},
                                  {"residual", rat(fit.residual)}};
        text << "fit e0 " << rat(fit.e0) << " e1 " << rat(fit.e1) << " e2 " << rat(fit.e2)
             << " residual " << rat(fit.residual) << "\n";
        emit(st, doc, text.str());
        return 0;
    }
    const Rational v = constants::estimate_epsilon(spec, st.k, st.radius);
    emit(st, ordered_json{{"k", st.k}, {"radius", st.radius}, {"epsilon", rat(v)}}, "epsilon " + rat(v) + "\n");
    return 0;
}

int run_bcp(const CliState& st, const GroupSpec& spec) {
    const Rational c = constants::estimate_bcp(spec, st.radius, st.exp_cap);
    emit(st, ordered_json{{"c_bcp", rat(c)}, {"radius", st.radius}, {"exp_cap", st.exp_cap}},
         "bcp " + rat(c) + "\n");
    return 0;
}

int run_bounds(const CliState& st, const GroupSpec& spec) {
    const auto consts = constants_for(st);
    const auto rel = constants::bound_relative(st.L, consts, spec.x_count());
    const auto hyp = constants::bound_hyperbolic(st.L, consts, spec.x_count());
    const auto par = constants::bound_parabolic(st.L, consts, spec.x_count());
    const auto entry = [&](const constants::BoundValue& b) {
        return ordered_json{{"value", b.to_string()}, {"exceeds_cap", b.exceeds(BigInt(st.cap))}};
    };
    ordered_json doc;
    doc["L"] = st.L;
    doc["x_count"] = spec.x_count();
    doc["relative"] = entry(rel);
    doc["hyperbolic"] = entry(hyp);
    doc["parabolic"] = entry(par);
    std::ostringstream text;
    text << "relative " << rel.to_string() << "\n"
         << "hyperbolic " << hyp.to_string() << "\n"
         << "parabolic " << par.to_string() << "\n";
    emit(st, doc, text.str());
    return 0;
}

int run_experiment(const CliState& st, const GroupSpec& spec) {
    const auto consts = constants_for(st);
    const csp::ExperimentResult result = csp::experiment_growth(spec, consts, st.trials, st.lmax, st.seed,
                                                                st.cap, st.workers, st.timing);
    const std::string csv = result.to_csv();
    if (st.out_path.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream out(st.out_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot open output file '" + st.out_path + "'");
    out << csv;
    out.close();
    if (st.json) {
        ordered_json doc;
        doc["out"] = st.out_path;
        doc["trials"] = st.trials;
        doc["summary"] = result.summary();
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << result.summary();
    }
    return 0;
}

int run_check_lemmas(const CliState& st, const GroupSpec& spec) {
    const auto consts = constants_for(st);
    const NormalForm a = nf_of(spec, st.a_text);
    const NormalForm b = nf_of(spec, st.b_text);
    NormalForm x;
    if (!st.x_text.empty()) {
        x = nf_of(spec, st.x_text);
    } else {
        const csp::CspOutcome o = csp::solve_csp(spec, a, b, consts, st.cap);
        if (!o.found())
            throw Error(ErrorCode::PreconditionViolated,
                        std::string("no conjugator available for the diagram (solver: ") +
                            csp::outcome_name(o.kind) + ")");
        x = o.x;
    }
    const csp::ConjugacyDiagram d = csp::build_diagram(spec, a, x, b);
    const geometry::Report middle = csp::check_lemma_middle(spec, d, consts.delta, "cli");
    const geometry::Report component = csp::check_component_bounds(spec, d, consts, "cli");
    ordered_json doc;
    doc["x"] = to_word_string(spec, x);
    doc["middle"] = report_to_doc(middle);
    doc["component"] = report_to_doc(component);
    std::ostringstream text;
    text << "x " << to_word_string(spec, x) << "\n"
         << "middle_violations " << middle.violations.size() << "\n"
         << "component_violations " << component.violations.size() << "\n";
    for (const auto& v : middle.violations) text << "violation " << v.kind << " " << v.details << "\n";
    for (const auto& v : component.violations) text << "violation " << v.kind << " " << v.details << "\n";
    emit(st, doc, text.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliState st;
    CLI::App app{"relhyp: conjugacy search and hyperbolicity measurements in free products of free abelian groups"};
    app.require_subcommand(1);

    try {
        st.cap = default_cap_from_env();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--group", st.group_path, "group config JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--constants", st.constants_path, "constants fixture JSON")->check(CLI::ExistingFile);
        sub->add_flag("--json", st.json, "emit a JSON document instead of text");
        sub->add_option("--cap", st.cap, "global enumeration cap")->capture_default_str();
        return sub;
    };

    auto* nf = add_common(app.add_subcommand("nf", "normal form of a word"));
    nf->add_option("--word", st.word, "word in the group generators")->required();

    auto* eq = add_common(app.add_subcommand("eq", "test two words for equality in the group"));
    eq->add_option("--a", st.a_text)->required();
    eq->add_option("--b", st.b_text)->required();

    auto* cls = add_common(app.add_subcommand("classify", "identity / parabolic / hyperbolic type"));
    cls->add_option("--word", st.word)->required();

    auto* dist = add_common(app.add_subcommand("dist", "distance between two elements"));
    dist->add_option("--a", st.a_text)->required();
    dist->add_option("--b", st.b_text)->required();
    dist->add_option("--metric", st.metric, "x (word metric) or rel (coned-off)")
        ->check(CLI::IsMember({"x", "rel"}))
        ->capture_default_str();

    auto* ball = add_common(app.add_subcommand("ball", "dump a metric ball as JSON lines"));
    ball->add_option("--radius", st.radius)->required();
    ball->add_option("--metric", st.metric)->check(CLI::IsMember({"x", "rel"}))->capture_default_str();
    ball->add_option("--exp-cap", st.exp_cap, "peripheral exponent truncation (rel only)")->capture_default_str();

    auto* csp_cmd = add_common(app.add_subcommand("csp", "bounded conjugacy search"));
    csp_cmd->add_option("--a", st.a_text)->required();
    csp_cmd->add_option("--b", st.b_text)->required();

    auto* oracle = add_common(app.add_subcommand("oracle", "brute-force minimal conjugator up to --cap"));
    oracle->add_option("--a", st.a_text)->required();
    oracle->add_option("--b", st.b_text)->required();

    auto* delta = add_common(app.add_subcommand("delta", "measure the thin-quadruple constant"));
    delta->add_option("--radius", st.radius)->required();
    delta->add_option("--exp-cap", st.exp_cap)->capture_default_str();

    auto* eps = add_common(app.add_subcommand("epsilon", "measure geodesic phase separation"));
    eps->add_option("--k", st.k, "conjugator length to probe");
    eps->add_option("--kmax", st.kmax, "probe k = 0..kmax and fit quadratic coefficients");
    eps->add_option("--radius", st.radius)->capture_default_str();

    auto* bcp = add_common(app.add_subcommand("bcp", "certify unique relative geodesics / measure coset penetration"));
    bcp->add_option("--radius", st.radius)->capture_default_str();
    bcp->add_option("--exp-cap", st.exp_cap)->capture_default_str();

    auto* bounds = add_common(app.add_subcommand("bounds", "conjugator-length bounds at a given input length"));
    bounds->add_option("--L", st.L, "max word length of the input pair")->required();

    auto* exp_cmd = add_common(app.add_subcommand("experiment", "planted-conjugator growth experiment (CSV)"));
    exp_cmd->add_option("--trials", st.trials)->required();
    exp_cmd->add_option("--lmax", st.lmax)->capture_default_str();
    exp_cmd->add_option("--seed", st.seed)->capture_default_str();
    exp_cmd->add_option("--workers", st.workers)->capture_default_str();
    exp_cmd->add_option("--out", st.out_path, "CSV output path (stdout when omitted)");
    exp_cmd->add_flag("--timing", st.timing, "record per-trial wall-clock millis (breaks byte-stability)");

    auto* check = add_common(app.add_subcommand("check-lemmas", "run the diagram lemma checks on one pair"));
    check->add_option("--a", st.a_text)->required();
    check->add_option("--b", st.b_text)->required();
    check->add_option("--x", st.x_text, "conjugator to use (solver output when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit clean; usage errors are config errors
    }

    try {
        const GroupSpec spec = load_group_spec(st.group_path);
        if (nf->parsed()) return run_nf(st, spec);
        if (eq->parsed()) return run_eq(st, spec);
        if (cls->parsed()) return run_classify(st, spec);
        if (dist->parsed()) return run_dist(st, spec);
        if (ball->parsed()) return run_ball(st, spec);
        if (csp_cmd->parsed()) return run_csp(st, spec);
        if (oracle->parsed()) return run_oracle(st, spec);
        if (delta->parsed()) return run_delta(st, spec);
        if (eps->parsed()) return run_epsilon(st, spec);
        if (bcp->parsed()) return run_bcp(st, spec);
        if (bounds->parsed()) return run_bounds(st, spec);
        if (exp_cmd->parsed()) return run_experiment(st, spec);
        if (check->parsed()) return run_check_lemmas(st, spec);
        throw Error(ErrorCode::ConfigError, "unknown command");
    } catch (const Error& e) {
        if (st.json)
            std::cout << ordered_json{{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}}.dump(2)
                      << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        if (st.json)
            std::cout << ordered_json{{"error", {{"code", "InternalError"}, {"message", e.what()}}}}.dump(2) << "\n";
        else
            std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
