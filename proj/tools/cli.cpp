#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpencil/census.hpp"
#include "qpencil/enumerate.hpp"
#include "qpencil/quadric.hpp"
#include "qpencil/quasiparabolic.hpp"

namespace cli {

using nlohmann::json;
using namespace qpencil;

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Field parse_field(const RunConfig& c) {
    const std::string f = trim(c.field);
    if (f.empty() || f == "Q") return Field::rationals();
    std::uint64_t p = 0;
    try {
        std::size_t used = 0;
        p = std::stoull(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
    } catch (const std::exception&) {
        throw UsageError("--q: expected Q or an odd prime, got '" + f + "'");
    }
    try {
        return Field::prime(p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--q: ") + e.what());
    }
}

Field finite_field(const RunConfig& c, const std::string& what) {
    Field f = parse_field(c);
    if (!f.is_finite()) throw UsageError("--q: " + what + " needs a finite field (an odd prime q)");
    return f;
}

std::vector<FieldElement> parse_list(const Field& field, const std::string& text, const std::string& flag) {
    std::vector<FieldElement> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        try {
            out.push_back(field.parse(tok));
        } catch (const std::invalid_argument&) {
            throw UsageError(flag + ": invalid value '" + tok + "'");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<FieldElement> require_lambda(const Field& field, const RunConfig& c) {
    if (!c.lambda) throw UsageError("missing required flag --lambda");
    return parse_list(field, *c.lambda, "--lambda");
}

std::optional<FieldElement> parse_extra(const Field& field, const RunConfig& c) {
    if (!c.lambda_extra) return std::nullopt;
    return parse_list(field, *c.lambda_extra, "--lambda-extra").at(0);
}

std::string read_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw UsageError("missing required flag " + flag);
    std::ifstream in(path);
    if (!in) throw UsageError(flag + ": cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_format(const RunConfig& c) {
    if (c.format != "json" && c.format != "csv" && c.format != "text")
        throw UsageError("--format: expected json, csv or text, got '" + c.format + "'");
}

json base_report(const std::string& name) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["report"] = name;
    return j;
}

std::vector<std::string> strings(const std::vector<FieldElement>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) out.push_back(x.to_string());
    return out;
}

std::string join(const std::vector<FieldElement>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i].to_string();
    return out;
}

std::string render(const RunConfig& c, const json& j, const std::string& text, const std::string& csv) {
    if (c.format == "json") return j.dump(2) + "\n";
    if (c.format == "csv") return csv;
    return text;
}

QPBundle load_bundle(const RunConfig& c) {
    std::string text = read_file(c.bundle_file, "--bundle-file");
    try {
        return parse_bundle(text);
    } catch (const qpencil::ParseError& e) {
        throw UsageError(std::string("--bundle-file: ") + e.what());
    }
}

std::string diagonal_text(const std::vector<FieldElement>& coeffs) {
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].is_zero()) continue;
        out += (first ? "" : " + ") + (coeffs[i].is_one() ? "" : coeffs[i].to_string() + "*") + "x" + std::to_string(i) + "^2";
        first = false;
    }
    return first ? "0" : out;
}

int genus_from_marks(std::size_t r, const std::string& flag) {
    if (r % 2 == 0 || r < 5) throw UsageError(flag + ": expected 2g+1 values with g >= 2, got " + std::to_string(r));
    return static_cast<int>((r - 1) / 2);
}

}  // namespace

Outcome cmd_pencil(const RunConfig& c) {
    check_format(c);
    const Field field = parse_field(c);
    std::vector<FieldElement> lambda = require_lambda(field, c);
    auto extra = parse_extra(field, c);
    std::vector<FieldElement> marks = lambda;
    if (extra) {
        for (const auto& l : lambda)
            if (l == *extra) throw UsageError("--lambda-extra: " + extra->to_string() + " coincides with a mark");
        marks.push_back(*extra);
    }
    QuadricPencil pencil = pencil_from_marks(marks);
    const bool smooth = is_smooth_intersection(pencil);
    const std::vector<FieldElement> ones(marks.size(), field.one());
    const std::string det = pencil_determinant(pencil).to_string();

    json j = base_report("pencil");
    j["field"] = field.name();
    j["lambda"] = strings(lambda);
    j["lambda_extra"] = extra ? json(extra->to_string()) : json(nullptr);
    j["ambient_dimension"] = pencil.ambient_dimension();
    j["first_form"] = strings(ones);
    j["second_form"] = strings(marks);
    j["determinant"] = det;
    j["smooth"] = smooth;

    std::ostringstream text;
    text << "field: " << (field.is_finite() ? "F_" + field.name() : "Q") << "\n"
         << "ambient dimension: " << pencil.ambient_dimension() << "\n"
         << "Q1 = " << diagonal_text(ones) << "\n"
         << "Q2 = " << diagonal_text(marks) << "\n"
         << "det(s Q1 + t Q2) = " << det << "\n"
         << "smooth: " << (smooth ? "true" : "false") << "\n";
    std::string csv = "field,ambient_dimension,smooth\n" + field.name() + "," + std::to_string(pencil.ambient_dimension()) + "," +
                      (smooth ? "true" : "false") + "\n";
    return {kPositive, render(c, j, text.str(), csv)};
}

Outcome cmd_subspaces(const RunConfig& c) {
    check_format(c);
    const Field field = finite_field(c, "subspace enumeration");
    std::vector<FieldElement> lambda = require_lambda(field, c);
    auto extra = parse_extra(field, c);
    QuadricPencil pencil = extra ? lifted_pencil(lambda, *extra) : pencil_from_marks(lambda);
    if (!is_smooth_intersection(pencil)) throw UsageError("--lambda: the pencil is not smooth (marks must be distinct, at least 3)");
    const std::size_t N = pencil.ambient_dimension();
    std::size_t dim = 0;
    if (c.dim) {
        if (*c.dim < 0) throw UsageError("--dim: must be nonnegative");
        dim = static_cast<std::size_t>(*c.dim);
    } else {
        if (N < 3) throw UsageError("--dim: no default for ambient dimension " + std::to_string(N));
        dim = (N - 3) / 2;
    }
    if (dim >= N) throw UsageError("--dim: need dimension < " + std::to_string(N));
    SubspaceList list = enumerate_subspaces(pencil, dim, {c.workers});

    json j = subspaces_to_json(list);
    j["schema_version"] = kSchemaVersion;
    j["report"] = "subspaces";
    j["lambda"] = strings(lambda);
    j["lambda_extra"] = extra ? json(extra->to_string()) : json(nullptr);

    std::ostringstream text;
    write_subspaces_text(list, text);
    std::string csv = "r,N,q,count\n" + std::to_string(dim) + "," + std::to_string(N) + "," + field.name() + "," +
                      std::to_string(list.size()) + "\n";
    return {kPositive, render(c, j, text.str(), csv)};
}

Outcome cmd_stability(const RunConfig& c) {
    check_format(c);
    QPBundle bundle = load_bundle(c);
    StabilityResult res = is_stable(bundle);

    json j = base_report("stability");
    j["bundle"] = serialize_bundle(bundle);
    j["stable"] = res.stable;
    j["witness"] = nullptr;
    std::string text = std::string("stable: ") + (res.stable ? "true" : "false") + "\n";
    std::string csv = "stable,witness_degree,coincidences\n" + std::string(res.stable ? "true" : "false") + ",";
    if (res.witness) {
        const auto& w = *res.witness;
        std::vector<std::size_t> marks;
        for (auto m : w.coincidences) marks.push_back(m + 1);
        j["witness"] = {{"degree", w.degree}, {"f", w.f.to_string()}, {"g", w.g.to_string()}, {"coincidences", marks}};
        text += "destabilizing subbundle: " + describe(w) + "\n";
        csv += std::to_string(w.degree) + ",";
        for (std::size_t i = 0; i < marks.size(); ++i) csv += (i ? ";" : "") + std::to_string(marks[i]);
    } else {
        csv += ",";
    }
    csv += "\n";
    return {res.stable ? kPositive : kNegative, render(c, j, text, csv)};
}

Outcome cmd_transform(const RunConfig& c) {
    check_format(c);
    QPBundle bundle = load_bundle(c);
    ElementaryTransform et = elementary_transform(bundle);

    json j = base_report("transform");
    j["input"] = serialize_bundle(bundle);
    j["output"] = serialize_bundle(et.bundle);
    j["a"] = et.bundle.a();
    j["b"] = et.bundle.b();
    j["inclusion"] = nlohmann::json::array();
    for (const auto& row : et.inclusion) j["inclusion"].push_back(nlohmann::json::array({row[0].to_string(), row[1].to_string()}));
    j["round_trip"] = nullptr;
    std::string text = serialize_bundle(et.bundle);
    std::string csv = "a,b,round_trip\n" + std::to_string(et.bundle.a()) + "," + std::to_string(et.bundle.b()) + ",";
    int code = kPositive;
    if (c.twice) {
        RoundTripCheck rt = check_round_trip(bundle);
        j["round_trip"] = {{"passed", rt.passed()},          {"degree_shift_ok", rt.degree_shift_ok},
                           {"splitting_ok", rt.splitting_ok}, {"divisible", rt.divisible},
                           {"automorphism", rt.automorphism}, {"flags_ok", rt.flags_ok},
                           {"twice", serialize_bundle(rt.twice)}};
        text += std::string("# round trip: ") + (rt.passed() ? "pass" : "fail") + "\n";
        csv += rt.passed() ? "pass" : "fail";
        code = rt.passed() ? kPositive : kNegative;
    }
    csv += "\n";
    return {code, render(c, j, text, csv)};
}

Outcome cmd_census(const RunConfig& c) {
    check_format(c);
    const Field field = finite_field(c, "census");
    std::vector<FieldElement> lambda;
    int g = 0;
    if (c.lambda) {
        lambda = require_lambda(field, c);
        g = genus_from_marks(lambda.size(), "--lambda");
        if (c.g && *c.g != g) throw UsageError("--g: " + std::to_string(*c.g) + " does not match " + std::to_string(lambda.size()) + " marks");
    } else {
        if (!c.g) throw UsageError("missing required flag --lambda (or --g for the default marks 0..2g)");
        g = *c.g;
        if (g < 2) throw UsageError("--g: census needs g >= 2");
        if (static_cast<std::uint64_t>(2 * g + 1) > field.size()) throw UsageError("--q: fewer than 2g+1 elements for the default marks");
        for (int i = 0; i <= 2 * g; ++i) lambda.push_back(field.from_int(i));
    }
    CensusReport rep = compare_theorem(g, lambda, {c.workers});
    std::string csv = CensusReport::csv_header() + "\n" + rep.csv_row() + "\n";
    return {rep.match ? kPositive : kNegative, render(c, rep.to_json(), rep.to_text(), csv)};
}

Outcome cmd_verlinde(const RunConfig& c) {
    check_format(c);
    if (!c.g) throw UsageError("missing required flag --g");
    if (*c.g < 1) throw UsageError("--g: verlinde needs g >= 1");
    const std::string v = verlinde(*c.g).get_str();
    json j = base_report("verlinde");
    j["g"] = *c.g;
    j["value"] = v;
    return {kPositive, render(c, j, v + "\n", "g,value\n" + std::to_string(*c.g) + "," + v + "\n")};
}

Outcome cmd_betti(const RunConfig& c) {
    check_format(c);
    std::string text = read_file(c.counts_file, "--counts-file");
    int dim = 0;
    if (c.dim)
        dim = *c.dim;
    else if (c.g)
        dim = 2 * *c.g - 2;
    else
        throw UsageError("missing required flag --dim (or --g, for dimension 2g-2)");
    if (dim < 0) throw UsageError("--dim: must be nonnegative");

    std::vector<std::pair<std::int64_t, mpz_class>> points;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::string qs, ns, extra;
        if (!(ls >> qs)) continue;
        if (!(ls >> ns) || (ls >> extra))
            throw UsageError("--counts-file: line " + std::to_string(lineno) + " is not '<q> <count>'");
        std::int64_t q = 0;
        mpz_class n;
        try {
            std::size_t used = 0;
            q = std::stoll(qs, &used);
            if (used != qs.size()) throw std::invalid_argument(qs);
        } catch (const std::exception&) {
            throw UsageError("--counts-file: line " + std::to_string(lineno) + ": invalid q '" + qs + "'");
        }
        if (n.set_str(ns, 10) != 0) throw UsageError("--counts-file: line " + std::to_string(lineno) + ": invalid count '" + ns + "'");
        points.emplace_back(q, n);
    }
    BettiFit fit;
    try {
        fit = betti_fit(points, dim);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--counts-file: ") + e.what());
    }

    json j = base_report("betti");
    j["dimension"] = dim;
    j["points"] = json::array();
    for (const auto& [q, n] : points) j["points"].push_back({{"q", q}, {"count", n.get_str()}});
    std::vector<std::string> coeffs;
    for (const auto& x : fit.coefficients) coeffs.push_back(x.get_str());
    j["coefficients"] = coeffs;
    j["degree"] = fit.degree;
    j["integral"] = fit.integral;
    j["nonnegative"] = fit.nonnegative;
    j["palindromic"] = fit.palindromic;
    j["within_dimension"] = fit.within_dimension;
    const bool good = fit.integral && fit.nonnegative && fit.palindromic && fit.within_dimension;

    std::string out = "coefficients (ascending powers of q):";
    for (const auto& s : coeffs) out += " " + s;
    out += "\ndegree: " + std::to_string(fit.degree) + "\nintegral: " + (fit.integral ? "true" : "false") +
           "\nnonnegative: " + (fit.nonnegative ? "true" : "false") + "\npalindromic: " + (fit.palindromic ? "true" : "false") +
           "\nwithin dimension: " + (fit.within_dimension ? "true" : "false") + "\n";
    std::string csv = "degree,coefficients,integral,nonnegative,palindromic,within_dimension\n" + std::to_string(fit.degree) + ",";
    for (std::size_t i = 0; i < coeffs.size(); ++i) csv += (i ? ";" : "") + coeffs[i];
    csv += std::string(",") + (fit.integral ? "true" : "false") + "," + (fit.nonnegative ? "true" : "false") + "," +
           (fit.palindromic ? "true" : "false") + "," + (fit.within_dimension ? "true" : "false") + "\n";
    return {good ? kPositive : kNegative, render(c, j, out, csv)};
}

Outcome cmd_search(const RunConfig& c) {
    check_format(c);
    const Field field = finite_field(c, "search");
    if (!c.g) throw UsageError("missing required flag --g");
    const int g = *c.g;
    if (g < 1) throw UsageError("--g: search needs g >= 1");
    auto survey = survey_configurations(g, field.size(), false, {c.workers});
    const std::uint64_t full = 1ull << (2 * g);

    json j = base_report("search");
    j["g"] = g;
    j["q"] = field.size();
    j["dimension"] = g - 1;
    j["expected_maximum"] = full;
    j["configurations"] = json::array();
    std::uint64_t max_count = 0, split = 0;
    std::string text, csv = "lambda,count,prefilter\n";
    for (const auto& conf : survey) {
        const bool pre = split_prefilter(g, conf.lambdas);
        j["configurations"].push_back({{"lambda", strings(conf.lambdas)}, {"count", conf.maximal_count}, {"prefilter", pre}});
        max_count = std::max(max_count, conf.maximal_count);
        if (conf.maximal_count == full) {
            ++split;
            text += "fully split: (" + join(conf.lambdas, ",") + ")\n";
        }
        csv += join(conf.lambdas, ";") + "," + std::to_string(conf.maximal_count) + "," + (pre ? "true" : "false") + "\n";
    }
    j["fully_split"] = split;
    j["maximum"] = max_count;
    text += "configurations: " + std::to_string(survey.size()) + ", fully split: " + std::to_string(split) +
            ", maximum count: " + std::to_string(max_count) + " (bound " + std::to_string(full) + ")\n";
    return {split > 0 ? kPositive : kNegative, render(c, j, text, csv)};
}

Outcome dispatch(const RunConfig& c) {
    try {
        if (c.command == "pencil") return cmd_pencil(c);
        if (c.command == "subspaces") return cmd_subspaces(c);
        if (c.command == "stability") return cmd_stability(c);
        if (c.command == "transform") return cmd_transform(c);
        if (c.command == "census") return cmd_census(c);
        if (c.command == "verlinde") return cmd_verlinde(c);
        if (c.command == "betti") return cmd_betti(c);
        if (c.command == "search") return cmd_search(c);
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown command '" + c.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pencils of quadrics and quasiparabolic bundles on the marked projective line"};
    app.set_config("--config", "", "Flat 'key = value' file ('#' comments); command-line flags take precedence");
    RunConfig c;
    std::vector<std::string> positional;
    int g = 0, dim = 0;
    std::vector<std::string> lambda;
    std::string extra;
    app.add_option("command", c.command, "pencil | subspaces | stability | transform | census | verlinde | betti | search")
        ->required()
        ->check(CLI::IsMember({"pencil", "subspaces", "stability", "transform", "census", "verlinde", "betti", "search"}));
    app.add_option("args", positional, "g, for verlinde");
    auto* g_opt = app.add_option("--g", g, "Genus: 2g+1 marks, ambient P^(2g)");
    app.add_option("--q", c.field, "Field: Q or an odd prime");
    auto* l_opt = app.add_option("--lambda", lambda, "Comma-separated marks lambda_1,...,lambda_(2g+1)")->delimiter(',');
    auto* e_opt = app.add_option("--lambda-extra", extra, "Extra mark lambda_(2g+2) for the lifted pencil");
    auto* d_opt = app.add_option("--dim", dim, "Subspace dimension (subspaces) or declared dimension (betti)");
    app.add_option("--format", c.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_flag("--deterministic", c.deterministic, "Omit timing so output is byte-identical across runs and worker counts");
    app.add_option("--out", c.out, "Write the report to this file");
    app.add_option("--bundle-file", c.bundle_file, "Quasiparabolic bundle file (stability, transform)");
    app.add_option("--counts-file", c.counts_file, "Lines '<q> <count>' (betti)");
    app.add_flag("--twice", c.twice, "transform: apply twice and run the round-trip check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kPositive;
        }
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    if (g_opt->count()) c.g = g;
    if (d_opt->count()) c.dim = dim;
    if (l_opt->count()) {
        std::string joined;
        for (std::size_t i = 0; i < lambda.size(); ++i) joined += (i ? "," : "") + lambda[i];
        c.lambda = joined;
    }
    if (e_opt->count()) c.lambda_extra = extra;
    if (!positional.empty()) {
        if (c.command != "verlinde" || positional.size() != 1 || c.g) {
            err << "error: unexpected argument '" << positional.front() << "'\n";
            return kInvalid;
        }
        try {
            std::size_t used = 0;
            c.g = std::stoi(positional.front(), &used);
            if (used != positional.front().size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            err << "error: invalid genus '" << positional.front() << "'\n";
            return kInvalid;
        }
    }

    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
        outcome = dispatch(c);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    if (!c.deterministic) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        err << "elapsed: " << secs << " s, workers: " << c.workers << "\n";
    }
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            err << "error: --out: cannot write '" << c.out << "'\n";
            return kInvalid;
        }
        f << outcome.output;
    } else {
        out << outcome.output;
    }
    return outcome.exit_code;
}

}  // namespace cli
