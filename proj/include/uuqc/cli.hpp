#pragma once

// Command line front-end. Every subcommand reads JSON documents (see io.hpp),
// writes a JSON report to --out (default stdout) and a one-line summary to
// the diagnostic stream.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure,
//             3 negative verdict from a certifying subcommand.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uuqc/channels.hpp"
#include "uuqc/densecode.hpp"
#include "uuqc/entanglement.hpp"
#include "uuqc/io.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/qec.hpp"
#include "uuqc/subspace.hpp"
#include "uuqc/unambiguous.hpp"

namespace uuqc::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kNumericalFailure = 2, kNegativeVerdict = 3 };

struct RunConfig {
    double tolerance = kDefaultTolerance;
    std::uint64_t seed = 0;
    std::size_t trials = 100000;
    std::string output;  // empty: standard output

    void validate() const {
        if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
            throw InvalidArgument("--tol: must be a positive number");
        }
        if (trials < 1) {
            throw InvalidArgument("--trials: must be at least 1");
        }
    }
};

struct Options {
    RunConfig run;
    std::vector<std::string> inputs;
    std::string v1_path;
    std::string v2_path;
    std::size_t env_in = 1;
    std::size_t env_out = 1;
    std::vector<std::size_t> dims;
    std::size_t d = 0;
    std::size_t big_d = 0;
    std::vector<double> lambdas2;
};

struct Outcome {
    Json report;
    int code = kOk;
    std::string summary;
};

namespace detail {

inline const std::string &input_at(const Options &o, std::size_t i, const char *what) {
    if (o.inputs.size() <= i) {
        throw FormatError(what, "missing input file (positional argument " + std::to_string(i + 1) + ")");
    }
    return o.inputs[i];
}

inline Matrix read_matrix(const std::string &path, const std::string &field) {
    return matrix_from_json(read_json_file(path, field), field);
}

inline KrausChannel read_channel(const std::string &path, const std::string &field) {
    return channel_from_json(read_json_file(path, field), field);
}

inline SubspaceIsometry subspace_option(const std::string &path, const char *flag, std::size_t ambient, double tol) {
    if (path.empty()) {
        return SubspaceIsometry::full(ambient);
    }
    return isometry_from_json(read_json_file(path, flag), tol, flag);
}

struct Layout {
    SubspaceIsometry v1;
    SubspaceIsometry v2;
    EnvDims env;
};

inline Layout layout_for(const Options &o, std::size_t in_dim, std::size_t out_dim) {
    const EnvDims env{o.env_in, o.env_out};
    if (env.in == 0 || in_dim % env.in != 0) {
        throw InvalidArgument("--env-in: " + std::to_string(env.in) + " does not divide the input dimension " +
                              std::to_string(in_dim));
    }
    if (env.out == 0 || out_dim % env.out != 0) {
        throw InvalidArgument("--env-out: " + std::to_string(env.out) + " does not divide the output dimension " +
                              std::to_string(out_dim));
    }
    return {subspace_option(o.v1_path, "--v1", in_dim / env.in, o.run.tolerance),
            subspace_option(o.v2_path, "--v2", out_dim / env.out, o.run.tolerance), env};
}

inline std::pair<std::size_t, std::size_t> bipartition(const Options &o, std::size_t total) {
    if (!o.dims.empty()) {
        if (o.dims.size() != 2 || o.dims[0] == 0 || o.dims[1] == 0 || o.dims[0] * o.dims[1] != total) {
            throw InvalidArgument("--dims: expected two factors whose product is " + std::to_string(total));
        }
        return {o.dims[0], o.dims[1]};
    }
    const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(total))));
    if (root * root != total) {
        throw InvalidArgument("--dims: required, dimension " + std::to_string(total) + " is not a square");
    }
    return {root, root};
}

inline Json real_list(const RealVector &v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

inline Json uum_json(const UumCertificate &c) {
    Json j;
    j["verdict"] = c.is_uum;
    j["dim"] = c.dim;
    j["probability"] = c.probability;
    j["weight"] = c.weight;
    j["residual"] = c.residual;
    j["unitarity_defect"] = c.unitarity_defect;
    j["leading_value"] = c.leading_value;
    j["second_value"] = c.second_value;
    j["reason"] = c.reason;
    j["unitary"] = matrix_to_json(c.unitary);
    j["env_factor"] = matrix_to_json(c.env_factor);
    return j;
}

inline Json uuqc_json(const UuqcCertificate &c) {
    Json j;
    j["verdict"] = c.is_uuqc;
    j["dim"] = c.dim;
    j["q"] = c.total_probability;
    j["direct_q"] = c.direct_probability;
    j["definition_residual"] = c.definition_residual;
    Json p = Json::array();
    Json contributing = Json::array();
    for (std::size_t k = 0; k < c.per_element.size(); ++k) {
        p.push_back(c.per_element[k].probability);
        contributing.push_back(static_cast<bool>(c.contributing[k]));
    }
    j["p"] = std::move(p);
    j["contributing"] = std::move(contributing);
    j["reason"] = c.reason;
    if (c.conflict) {
        j["conflict"] = {c.conflict->first, c.conflict->second};
    }
    if (c.failing_element) {
        j["failing_element"] = *c.failing_element;
    }
    j["unitary"] = matrix_to_json(c.unitary);
    return j;
}

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

inline Outcome run_check_uum(const Options &o) {
    const Matrix omega = read_matrix(input_at(o, 0, "operator"), "operator");
    const Layout l = layout_for(o, static_cast<std::size_t>(omega.cols()), static_cast<std::size_t>(omega.rows()));
    const UumCertificate c = certify_uum(omega, l.v1, l.v2, l.env, o.run.tolerance);
    Outcome out{uum_json(c), c.is_uum ? kOk : kNegativeVerdict, ""};
    out.summary = c.is_uum ? "UUM with p = " + fmt(c.probability) : "not a UUM: " + c.reason +
                                                                         " (residual " + fmt(c.residual) + ")";
    return out;
}

inline Outcome run_check_uuqc(const Options &o) {
    const KrausChannel ch = read_channel(input_at(o, 0, "channel"), "channel");
    const Layout l = layout_for(o, ch.in_dim(), ch.out_dim());
    UuqcOptions opts;
    opts.seed = o.run.seed;
    const UuqcCertificate c = certify_uuqc(ch, l.v1, l.v2, l.env, o.run.tolerance, opts);
    Outcome out{uuqc_json(c), c.is_uuqc ? kOk : kNegativeVerdict, ""};
    out.summary = c.is_uuqc ? "UUQC with q = " + fmt(c.total_probability) : "not a UUQC: " + c.reason;
    return out;
}

inline Outcome run_refine(const Options &o) {
    const KrausChannel ch = read_channel(input_at(o, 0, "channel"), "channel");
    const Layout l = layout_for(o, ch.in_dim(), ch.out_dim());
    UuqcOptions opts;
    opts.seed = o.run.seed;
    const UuqcCertificate before = certify_uuqc(ch, l.v1, l.v2, l.env, o.run.tolerance, opts);
    if (!before.is_uuqc) {
        Json j;
        j["verdict"] = false;
        j["reason"] = before.reason;
        return {j, kNegativeVerdict, "cannot refine: " + before.reason};
    }
    const KrausChannel refined = refine(ch, l.v1, l.v2, l.env, {}, o.run.tolerance);
    const UuqcCertificate after = certify_uuqc(refined, l.v1, l.v2, l.env, o.run.tolerance, opts);
    Json j;
    j["verdict"] = after.is_uuqc;
    j["q_before"] = before.total_probability;
    j["q_after"] = after.total_probability;
    Json second = Json::array();
    for (const auto &e : after.per_element) {
        second.push_back(e.second_value);
    }
    j["env_second_values"] = std::move(second);
    j["channel"] = channel_to_json(refined);
    return {j, after.is_uuqc ? kOk : kNumericalFailure,
            "refined to " + std::to_string(refined.size()) + " elements, q = " + fmt(after.total_probability)};
}

inline Outcome run_to_ues(const Options &o) {
    const KrausChannel ch = read_channel(input_at(o, 0, "channel"), "channel");
    const Layout l = layout_for(o, ch.in_dim(), ch.out_dim());
    const UesConversion c = uuqc_to_ues(ch, l.v1, l.v2, l.env, o.run.tolerance);
    Json j;
    j["verdict"] = true;
    j["probability"] = c.probability;
    j["purity_defect"] = c.purity_defect;
    j["state"] = matrix_to_json(c.state);
    j["unitary"] = matrix_to_json(c.unitary);
    return {j, kOk, "UES produced with probability " + fmt(c.probability)};
}

inline Outcome run_teleport(const Options &o) {
    const Matrix state = read_matrix(input_at(o, 0, "state"), "state");
    const bool pure = state.cols() == 1;
    if (!pure && state.rows() != state.cols()) {
        throw FormatError("state", "expected a ket (one column) or a square density matrix");
    }
    const auto [da, db] = bipartition(o, static_cast<std::size_t>(state.rows()));
    const std::size_t d = o.d == 0 ? std::min(da, db) : o.d;
    if (d > std::min(da, db)) {
        throw InvalidArgument("--d: exceeds the smaller factor dimension " + std::to_string(std::min(da, db)));
    }
    Json j;
    TeleportCertificate c;
    if (pure) {
        c = teleport_probability_pure(state, da, db, d, o.run.tolerance);
        j["method"] = "pure-exact";
    } else {
        c = sweep_basis_subspaces(state, da, db, d, o.run.tolerance);
        j["method"] = "basis-sweep";
    }
    j["verdict"] = c.nonzero;
    j["d"] = d;
    j["probability"] = c.probability;
    j["schmidt_rank"] = c.schmidt_rank;
    j["purity_defect"] = c.purity_defect;
    if (c.witness) {
        j["witness_a"] = matrix_to_json(c.witness->first.columns());
        j["witness_b"] = matrix_to_json(c.witness->second.columns());
    }
    return {j, c.nonzero ? kOk : kNegativeVerdict,
            c.nonzero ? "teleportation possible, probability " + fmt(c.probability)
                      : "no unambiguous teleportation of dimension " + std::to_string(d)};
}

inline Outcome run_kl_check(const Options &o) {
    const CodeSpec code = code_from_json(read_json_file(input_at(o, 0, "code"), "code"), o.run.tolerance, "code");
    const KrausChannel errors = read_channel(input_at(o, 1, "errors"), "errors");
    const KlReport r = kl_check(code, errors, o.run.tolerance);
    Json j;
    j["verdict"] = r.correctable;
    j["residual"] = r.residual;
    j["h"] = matrix_to_json(r.h);
    if (!r.correctable) {
        return {j, kNegativeVerdict, "not correctable (residual " + fmt(r.residual) + ")"};
    }
    const KrausChannel recovery = build_recovery(code, errors, o.run.tolerance);
    const CorrectionReport cr = verify_correction_uuqc(code, errors, recovery, o.run.tolerance);
    j["q"] = cr.q;
    j["full_correction"] = cr.full_correction;
    j["recovery"] = channel_to_json(recovery);
    if (!cr.full_correction) {
        return {j, kNumericalFailure, "correctable, but the constructed recovery failed verification"};
    }
    return {j, kOk, "correctable, recovery verified with q = " + fmt(cr.q)};
}

inline Outcome run_ec_prob(const Options &o) {
    const CodeSpec code = code_from_json(read_json_file(input_at(o, 0, "code"), "code"), o.run.tolerance, "code");
    const KrausChannel noise = read_channel(input_at(o, 1, "noise"), "noise");
    FilterSearchOptions opts;
    opts.seed = o.run.seed;
    const CorrectionProbability p = unambiguous_correction_probability(code, noise, opts, o.run.tolerance);
    const CertaintyCheck c = certainty_check(code, noise, o.run.tolerance);
    Json j;
    j["probability"] = p.probability;
    j["method"] = to_string(p.method);
    j["choi_trace"] = p.choi_trace;
    j["purity_defect"] = p.purity_defect;
    j["filters_tried"] = p.filters_tried;
    Json cj;
    cj["is_ues"] = c.is_ues;
    cj["trace"] = c.trace;
    cj["purity_defect"] = c.purity_defect;
    cj["uniformity_defect"] = c.uniformity_defect;
    cj["schmidt_coefficients"] = real_list(c.schmidt_coefficients);
    j["certainty"] = std::move(cj);
    return {j, kOk,
            std::string("correction probability ") + fmt(p.probability) + " (" + to_string(p.method) + ")" +
                (c.is_ues ? ", certainty condition holds" : ", certainty condition fails")};
}

inline SharedState shared_state_option(const Options &o) {
    if (o.lambdas2.empty()) {
        throw InvalidArgument("--lambdas2: required");
    }
    if (o.big_d != 0 && o.big_d != o.lambdas2.size()) {
        throw InvalidArgument("--D: " + std::to_string(o.big_d) + " does not match the " +
                              std::to_string(o.lambdas2.size()) + " values of --lambdas2");
    }
    try {
        return SharedState::from_squared(o.lambdas2, std::max(o.run.tolerance, 1e-12));
    } catch (const InvalidArgument &e) {
        throw InvalidArgument(std::string("--lambdas2: ") + e.what());
    }
}

inline Json bound_json(const BoundCheck &b) {
    Json j;
    j["verdict"] = b.verdict();
    j["success"] = b.success;
    j["capacity"] = b.capacity;
    j["form_holds"] = b.form_holds;
    j["form_residual"] = b.form_residual;
    j["within_bound"] = b.within_bound;
    j["trace_condition"] = b.trace_condition;
    j["trace_condition_max"] = b.trace_condition_max;
    j["encoders_valid"] = b.encoders_valid;
    j["bob_valid"] = b.bob_valid;
    return j;
}

inline Outcome run_dense_code(const Options &o) {
    const SharedState state = shared_state_option(o);
    const DenseCodingProtocol protocol = optimal_protocol(state, o.run.tolerance);
    const DenseCodingReport r = simulate(state, protocol, o.run.trials, o.run.seed);
    const double cap = capacity(state);
    const double sigma = std::sqrt(cap * (1.0 - cap) / static_cast<double>(r.trials));
    Json j;
    j["D"] = state.rank();
    j["capacity"] = cap;
    j["trials"] = r.trials;
    j["seed"] = o.run.seed;
    Json per = Json::array();
    const auto rates = r.rates();
    for (std::size_t x = 0; x < r.sent.size(); ++x) {
        Json m;
        m["message"] = x;
        m["sent"] = r.sent[x];
        m["delivered"] = r.delivered[x];
        m["rate"] = rates[x];
        per.push_back(std::move(m));
    }
    j["per_message"] = std::move(per);
    j["pooled_rate"] = r.pooled_rate();
    j["pooled_sigma"] = sigma;
    j["within_3_sigma"] = std::abs(r.pooled_rate() - cap) <= 3.0 * sigma;
    j["filter_failures"] = r.filter_failures;
    j["decode_errors"] = r.decode_errors;
    j["bound_check"] = bound_json(verify_protocol_bound(state, protocol.encoders, bob_operator(protocol),
                                                        o.run.tolerance));
    return {j, kOk,
            "pooled rate " + fmt(r.pooled_rate()) + " vs capacity " + fmt(cap) + ", decode errors " +
                std::to_string(r.decode_errors)};
}

inline Outcome run_verify_dc(const Options &o) {
    const SharedState state = shared_state_option(o);
    std::vector<Matrix> encoders;
    Matrix bob;
    if (o.inputs.empty()) {
        const DenseCodingProtocol p = optimal_protocol(state, o.run.tolerance);
        encoders = p.encoders;
        bob = bob_operator(p);
    } else {
        const Json doc = read_json_file(o.inputs[0], "protocol");
        const Json &enc = ::uuqc::detail::require(doc, "encoders", "protocol");
        if (!enc.is_array()) {
            throw FormatError("protocol.encoders", "expected an array of matrices");
        }
        for (std::size_t x = 0; x < enc.size(); ++x) {
            encoders.push_back(matrix_from_json(enc[x], "protocol.encoders[" + std::to_string(x) + "]"));
        }
        try {
            bob = doc.contains("bob") ? matrix_from_json(doc["bob"], "protocol.bob") : max_form_bob(state, encoders);
        } catch (const DimensionError &e) {
            throw FormatError("protocol.encoders", e.what());
        }
    }
    const BoundCheck b = verify_protocol_bound(state, encoders, bob, o.run.tolerance);
    Json j = bound_json(b);
    j["r"] = {b.r.real(), b.r.imag()};
    return {j, b.verdict() ? kOk : kNegativeVerdict,
            b.verdict() ? "protocol satisfies the bound, success " + fmt(b.success)
                        : std::string("protocol check failed") + (b.form_holds ? "" : ": form does not hold")};
}

inline Outcome run_schmidt(const Options &o) {
    const Matrix psi = read_matrix(input_at(o, 0, "state"), "state");
    if (psi.cols() != 1) {
        throw FormatError("state", "expected a ket (one column)");
    }
    const auto [da, db] = bipartition(o, static_cast<std::size_t>(psi.rows()));
    const SchmidtForm sf = schmidt(psi, da, db, o.run.tolerance);
    Json j;
    j["coefficients"] = real_list(sf.coefficients);
    j["rank"] = sf.rank;
    j["squared_norm"] = sf.squared_norm();
    j["left_basis"] = matrix_to_json(sf.left_basis.columns());
    j["right_basis"] = matrix_to_json(sf.right_basis.columns());
    std::string coeffs;
    for (Index i = 0; i < sf.coefficients.size(); ++i) {
        coeffs += (i == 0 ? "" : ", ") + fmt(sf.coefficients(i));
    }
    return {j, kOk, "Schmidt rank " + std::to_string(sf.rank) + ", coefficients (" + coeffs + ")"};
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Certify unambiguous unitary maps and channels, and run their applications.", "uuqc"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--tol", o.run.tolerance, "Absolute tolerance on Frobenius norms")->capture_default_str();
    app.add_option("--seed", o.run.seed, "Random seed")->capture_default_str();
    app.add_option("--trials", o.run.trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("--out", o.run.output, "Report path (default: standard output)");
    app.add_option("--v1", o.v1_path, "Input subspace isometry (matrix file)");
    app.add_option("--v2", o.v2_path, "Output subspace isometry (matrix file)");
    app.add_option("--env-in", o.env_in, "Input environment dimension")->capture_default_str();
    app.add_option("--env-out", o.env_out, "Output environment dimension")->capture_default_str();
    app.add_option("--dims", o.dims, "Bipartite dimensions a,b")->delimiter(',');
    app.add_option("--d", o.d, "Dimension to teleport");
    app.add_option("--D", o.big_d, "Schmidt rank of the shared state");
    app.add_option("--lambdas2", o.lambdas2, "Squared Schmidt coefficients, descending")->delimiter(',');

    using Runner = std::function<Outcome(const Options &)>;
    const std::vector<std::tuple<const char *, const char *, Runner>> commands = {
        {"check-uum", "Certify one operator as an unambiguous unitary map", detail::run_check_uum},
        {"check-uuqc", "Certify a Kraus channel as an unambiguous unitary channel", detail::run_check_uuqc},
        {"refine", "Rewrite a certified channel with rank-one environment factors", detail::run_refine},
        {"to-ues", "Convert a certified channel into a uniformly entangled state", detail::run_to_ues},
        {"teleport", "Unambiguous teleportation over a shared state", detail::run_teleport},
        {"kl-check", "Knill-Laflamme check and recovery for a code and error set", detail::run_kl_check},
        {"ec-prob", "Probability of unambiguous error correction", detail::run_ec_prob},
        {"dense-code", "Simulate equal-probability unambiguous dense coding", detail::run_dense_code},
        {"verify-dc", "Check a dense coding protocol against the success bound", detail::run_verify_dc},
        {"schmidt", "Schmidt decomposition of a bipartite ket", detail::run_schmidt},
    };
    std::map<const CLI::App *, Runner> runners;
    for (const auto &[name, help, fn] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("inputs", o.inputs, "Input documents");
        runners[sub] = fn;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }
    const CLI::App *chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();

    Outcome result;
    try {
        o.run.validate();
        result = runners.at(chosen)(o);
    } catch (const NotCertifiedError &e) {
        result.report["verdict"] = false;
        result.report["reason"] = e.what();
        result.code = kNegativeVerdict;
        result.summary = e.what();
    } catch (const NumericalError &e) {
        err << name << ": numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::invalid_argument &e) {
        err << name << ": invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const nlohmann::json::exception &e) {
        err << name << ": invalid input: " << e.what() << '\n';
        return kInvalidInput;
    }

    Json doc;
    doc["command"] = name;
    doc["tolerance"] = o.run.tolerance;
    doc["seed"] = o.run.seed;
    for (auto &[key, value] : result.report.items()) {
        doc[key] = value;
    }
    const std::string text = doc.dump(2) + "\n";
    if (o.run.output.empty()) {
        out << text;
    } else {
        std::ofstream file(o.run.output);
        if (!(file << text)) {
            err << name << ": --out: cannot write '" << o.run.output << "'\n";
            return kInvalidInput;
        }
    }
    err << name << ": " << result.summary << '\n';
    return result.code;
}

inline int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return dispatch(args, out, err);
}

}  // namespace uuqc::cli
