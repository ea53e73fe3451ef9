#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "effergo/effergo.hpp"

using namespace effergo;
using io::Json;

namespace {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kMalformed = 1;
constexpr int kPrecondition = 2;
constexpr int kBudget = 3;
constexpr int kVerificationFailed = 4;

struct Options {
    std::string output;
    std::size_t budget = 0;
    std::size_t depth = 6;
    std::size_t fuel = 16;
    std::size_t k = 1;
    std::size_t n = 64;
    std::string set;
    std::string r;
    std::string s;
    std::string x;
    std::string transform = "shift";
    std::int64_t shift_n = 1;
    std::string alpha = "sqrt2m1";
    std::size_t precision = 8;
    std::string measure;
    std::string point;
    std::vector<std::uint64_t> seeds;
    std::string seed_range;
    std::string shifts;
    std::int64_t step = 0;
    std::string below;
    std::string assume;
    std::string blocks;
    std::string points;
    std::string function = "leading_run";
    std::string stages;
    std::size_t stage = 0;
    std::size_t N = 1;
    std::size_t n_max = 8;
    std::size_t n_budget = std::size_t{1} << 12;
    std::string format = "csv";
    std::string file;
};

Budget budget_of(const Options& o) {
    Budget b;
    if (o.budget > 0) b.max_words = o.budget;
    return b;
}

Json parse_arg(const std::string& text, const std::string& flag) { return io::parse(text, flag); }

ClopenSet read_set(const Options& o) {
    if (o.set.empty()) throw SchemaError("--set is required");
    return io::read_clopen(parse_arg(o.set, "--set"), "--set");
}

Rational read_fraction(const std::string& text, const std::string& flag) {
    if (text.empty()) throw SchemaError(flag + " is required");
    try {
        return parse_rational(text);
    } catch (const SchemaError& e) {
        throw SchemaError(flag + ": " + e.what());
    }
}

MeasureSpec read_measure(const Options& o) {
    if (o.measure.empty()) return MeasureSpec::uniform();
    return io::read_measure(parse_arg(o.measure, "--measure"), "--measure");
}

TransformSpec read_transform(const Options& o) {
    TransformDescriptor d{o.transform, std::nullopt, std::nullopt, std::nullopt};
    if (o.transform == "bidirectional_shift") d.n = o.shift_n;
    if (o.transform == "rotation") {
        d.alpha = o.alpha;
        d.precision = o.precision;
    }
    return io::make_transform(d, budget_of(o));
}

std::vector<std::uint64_t> seed_list(const Options& o) {
    std::vector<std::uint64_t> seeds = o.seeds;
    if (!o.seed_range.empty()) {
        auto dash = o.seed_range.find('-');
        if (dash == std::string::npos) throw SchemaError("--seeds: expected a range 'a-b'");
        try {
            std::uint64_t lo = std::stoull(o.seed_range.substr(0, dash));
            std::uint64_t hi = std::stoull(o.seed_range.substr(dash + 1));
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } catch (const std::logic_error&) {
            throw SchemaError("--seeds: expected a range 'a-b'");
        }
    }
    return seeds;
}

Point read_point(const Options& o) {
    if (!o.point.empty()) return io::read_point(parse_arg(o.point, "--point"), "--point");
    auto seeds = seed_list(o);
    if (seeds.size() == 1) return Point::seeded(seeds.front());
    throw SchemaError("give one point with --point or a single --seed");
}

std::vector<Point> read_points(const Options& o) {
    std::vector<Point> pts;
    if (!o.points.empty()) {
        Json j = parse_arg(o.points, "--points");
        if (!j.is_array()) throw SchemaError("--points: expected an array of points");
        for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(io::read_point(j[i], "--points[" + std::to_string(i) + "]"));
    }
    if (!o.point.empty()) pts.push_back(io::read_point(parse_arg(o.point, "--point"), "--point"));
    for (auto s : seed_list(o)) pts.push_back(Point::seeded(s));
    if (pts.empty()) throw SchemaError("no points given (use --points, --point or --seed)");
    return pts;
}

// "i:b,i:b" with integer i and bit b.
BiAssignment read_assignment(const std::string& text) {
    BiAssignment x;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw SchemaError("--x: expected entries 'index:bit', got '" + item + "'");
        try {
            std::int64_t i = std::stoll(item.substr(0, colon));
            int b = std::stoi(item.substr(colon + 1));
            if (b != 0 && b != 1) throw std::invalid_argument("bit");
            x[i] = b;
        } catch (const std::logic_error&) {
            throw SchemaError("--x: malformed entry '" + item + "'");
        }
    }
    return x;
}

std::vector<std::int64_t> read_shift_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::logic_error&) {
            throw SchemaError("--shifts: malformed entry '" + item + "'");
        }
    }
    return out;
}

std::string decimal(const Rational& q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", to_double(q));
    return buf;
}

void emit(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + o.output + "'");
    out << text;
}

// ---------------------------------------------------------------------------

int finish_certificate(const Options& o, const CoverCertificate& c) {
    emit(o, io::dump(io::write(c)));
    if (c.mode == "assumed") return kOk;
    return c.verified ? kOk : kVerificationFailed;
}

// Kučera, finite-change and prefix-add also accept an enumerated open set via --below/--assume/--fuel.
template <typename Build>
int clopen_cover(const Options& o, Build build) {
    if (!o.below.empty()) {
        auto a = EffOpen::below(io::real_by_name(o.below), read_fraction(o.assume, "--assume"));
        return finish_certificate(o, assume_enumerated(a, o.fuel, build));
    }
    return finish_certificate(o, build(read_set(o), read_fraction(o.r, "--r")));
}

int cmd_cover(const std::string& which, const Options& o) {
    const Budget b = budget_of(o);
    if (which == "kucera") {
        return clopen_cover(o, [&](const ClopenSet& a, const Rational& r) { return kucera_iterate(a, r, o.k, b); });
    }
    if (which == "finite-change") {
        return clopen_cover(o, [&](const ClopenSet& a, const Rational& r) { return finite_change_iterate(a, r, o.k, b); });
    }
    if (which == "prefix-add") {
        Rational s = read_fraction(o.s, "--s");
        return clopen_cover(o, [&](const ClopenSet& a, const Rational& r) {
            return prefix_addition_iterate(a, r, s, o.k, b);
        });
    }
    if (which == "bidirectional") {
        ClopenSet a = read_set(o);
        Rational r = read_fraction(o.r, "--r"), s = read_fraction(o.s, "--s");
        if (!o.x.empty()) return finish_certificate(o, bidirectional_certificate(a, r, s, read_assignment(o.x), std::nullopt, b));
        return finish_certificate(o, bidirectional_iterate(a, r, s, o.k, std::nullopt, b));
    }
    if (which == "enum-shift") {
        ClopenSet a = read_set(o);
        Rational r = read_fraction(o.r, "--r"), s = read_fraction(o.s, "--s");
        std::function<ShiftGenerator()> shifts;
        if (o.step != 0) {
            const std::int64_t step = o.step;
            shifts = [step] {
                return ShiftGenerator([step, v = std::int64_t{0}]() mutable -> std::optional<std::int64_t> { return v += step; });
            };
        } else if (!o.shifts.empty()) {
            auto list = read_shift_list(o.shifts);
            shifts = [list] {
                return ShiftGenerator([list, i = std::size_t{0}]() mutable -> std::optional<std::int64_t> {
                    if (i >= list.size()) return std::nullopt;
                    return list[i++];
                });
            };
        } else {
            throw SchemaError("enum-shift needs --step or --shifts");
        }
        if (!o.x.empty()) {
            return finish_certificate(o, enumerable_shift_certificate(a, r, s, shifts, read_assignment(o.x), std::nullopt, b));
        }
        return finish_certificate(o, enumerable_shift_iterate(a, r, s, o.k, shifts, std::nullopt, b));
    }
    if (which == "ergodic") {
        ClopenSet a = read_set(o);
        Rational r = read_fraction(o.r, "--r");
        ErgodicOptions opts;
        opts.n_budget = o.n_budget;
        opts.budget = b;
        auto t = read_transform(o);
        auto m = read_measure(o);
        if (!o.x.empty()) return finish_certificate(o, ergodic_certificate(t, a, r, Word(o.x), m, opts));
        return finish_certificate(o, ergodic_cover_iterate(t, a, r, o.k, m, opts));
    }
    throw SchemaError("unknown cover construction '" + which + "'");
}

int cmd_transform_check(const Options& o) {
    auto t = read_transform(o);
    auto rep = check_measure_preserving(t, o.depth, read_measure(o));
    Json violations = Json::array();
    for (const auto& v : rep.violations) {
        violations.push_back({{"cylinder", v.cylinder.str()}, {"expected", io::write(v.expected)}, {"actual", io::write(v.actual)}});
    }
    Json j = {{"transform", io::write(t.descriptor())},
              {"depth", rep.depth},
              {"checked", rep.checked},
              {"violations", std::move(violations)},
              {"passed", rep.passed()}};
    emit(o, io::dump(j));
    return rep.passed() ? kOk : kVerificationFailed;
}

int cmd_birkhoff(const std::string& which, const Options& o) {
    if (which == "trace") {
        auto t = read_transform(o);
        auto tr = frequency_trace(t, read_set(o), read_point(o), o.n);
        if (o.format == "json") {
            Json rows = Json::array();
            for (std::size_t k = 1; k <= tr.length(); ++k) rows.push_back(io::write(tr.g(k)));
            emit(o, io::dump({{"transform", tr.transform}, {"point", tr.point}, {"set", io::write(tr.set)}, {"values", rows}}));
            return kOk;
        }
        std::string csv = "k,orbit_prefix,in_set,g_k,g_k_decimal\n";
        for (std::size_t k = 1; k <= tr.length(); ++k) {
            csv += std::to_string(k) + "," + tr.orbit_prefixes[k - 1].str() + "," + (tr.in_set[k - 1] ? "1" : "0") + "," +
                   to_string(tr.g(k)) + "," + decimal(tr.g(k)) + "\n";
        }
        emit(o, csv);
        return kOk;
    }
    if (which == "experiment") {
        auto t = read_transform(o);
        auto pts = read_points(o);
        ExperimentReport rep = !o.set.empty()
                                   ? birkhoff_experiment(t, read_set(o), pts, o.n, read_measure(o))
                                   : birkhoff_experiment(t, ApproximableSet::below(io::real_by_name(o.alpha)), o.precision,
                                                         pts, o.n, read_measure(o));
        Json points = Json::array();
        for (const auto& p : rep.points) {
            Json pj = {{"point", p.point},
                       {"seeded", p.seeded},
                       {"g", io::write(p.g)},
                       {"deviation", io::write(p.deviation)},
                       {"tail_max_deviation", io::write(p.tail_max_deviation)}};
            if (p.g_high) pj["g_high"] = io::write(*p.g_high);
            points.push_back(std::move(pj));
        }
        Json j = {{"transform", rep.transform},
                  {"set", rep.set},
                  {"n", rep.n},
                  {"mu_low", io::write(rep.mu_low)},
                  {"mu_high", io::write(rep.mu_high)},
                  {"points", std::move(points)},
                  {"seeded", rep.seeded},
                  {"mean_abs_deviation", rep.mean_abs_deviation},
                  {"max_abs_deviation", rep.max_abs_deviation},
                  {"tolerance", rep.tolerance},
                  {"within_tolerance", rep.within_tolerance}};
        emit(o, io::dump(j));
        return rep.within_tolerance ? kOk : kVerificationFailed;
    }
    if (which == "gn") {
        auto e = gn_exceed_set(read_transform(o), read_set(o), read_fraction(o.r, "--r"), o.N, o.n_max,
                               read_measure(o), budget_of(o));
        emit(o, io::dump({{"set", io::write(e.set)}, {"measure", io::write(e.measure)}, {"N", o.N}, {"n_max", o.n_max}}));
        return kOk;
    }
    if (which == "lsc") {
        LscFunction f = LscFunction::leading_run();
        if (!o.stages.empty()) {
            Json j = parse_arg(o.stages, "--stages");
            if (!j.is_array()) throw SchemaError("--stages: expected an array of stages");
            std::vector<BasicFunction> stages;
            for (std::size_t i = 0; i < j.size(); ++i) {
                const std::string at = "--stages[" + std::to_string(i) + "]";
                if (!j[i].is_array()) throw SchemaError(at + ": expected an array of [coefficient, word] pairs");
                std::vector<std::pair<Rational, Word>> terms;
                for (std::size_t t = 0; t < j[i].size(); ++t) {
                    const std::string tt = at + "[" + std::to_string(t) + "]";
                    if (!j[i][t].is_array() || j[i][t].size() != 2) throw SchemaError(tt + ": expected [coefficient, word]");
                    terms.emplace_back(io::read_rational(j[i][t][0], tt + "[0]"), io::read_word(j[i][t][1], tt + "[1]"));
                }
                stages.push_back(basic_function(std::move(terms)));
            }
            f = LscFunction::staged(std::move(stages));
        } else if (o.function != "leading_run") {
            throw SchemaError("--function: only 'leading_run' is built in; pass explicit --stages otherwise");
        }
        auto t = read_transform(o);
        Point p = read_point(o);
        auto bad = check_lsc_monotone(f, o.stage + 1, budget_of(o));
        Json averages = Json::array();
        for (std::size_t s = 0; s <= o.stage; ++s) averages.push_back(io::write(lsc_average(f, s, t, p, o.n)));
        Json j = {{"function", f.name},
                  {"stage", o.stage},
                  {"n", o.n},
                  {"point", p.describe()},
                  {"average", averages.back()},
                  {"stage_averages", averages},
                  {"integral", io::write(integral(f.stage(o.stage)))},
                  {"monotone", !bad}};
        if (bad) j["violation"] = {{"stage", bad->stage}, {"cylinder", bad->cylinder.str()}};
        emit(o, io::dump(j));
        return bad ? kVerificationFailed : kOk;
    }
    if (which == "approx") {
        auto x = ApproximableSet::below(io::real_by_name(o.alpha));
        auto f = approximable_frequency(x, o.precision, read_transform(o), read_point(o), o.n);
        emit(o, io::dump({{"set", x.name},
                          {"precision", o.precision},
                          {"n", o.n},
                          {"low", io::write(f.low)},
                          {"high", io::write(f.high)},
                          {"inner_measure", io::write(f.inner_measure)},
                          {"outer_measure", io::write(f.outer_measure)}}));
        return kOk;
    }
    throw SchemaError("unknown birkhoff command '" + which + "'");
}

int cmd_lambalgen(const Options& o) {
    if (o.set.empty()) throw SchemaError("--set is required (an array of {coordinate: word} objects)");
    ProductClopen u = io::read_product(parse_arg(o.set, "--set"), "--set");
    auto pts = read_points(o);
    auto t = read_transform(o);
    const std::size_t search = o.budget > 0 ? o.budget : 64;
    auto rep = lambalgen_construct(u, pts, t, search);
    Json thresholds = Json::array(), sections = Json::array(), v_measures = Json::array();
    for (const auto& st : rep.steps) {
        thresholds.push_back(io::write(st.threshold));
        sections.push_back(io::write(st.complex_measure));
        v_measures.push_back(io::write(st.v_measure));
    }
    Json j = {{"indices", rep.indices()},
              {"thresholds", std::move(thresholds)},
              {"section_measures", std::move(sections)},
              {"v_measures", std::move(v_measures)},
              {"verified", rep.verified}};
    emit(o, io::dump(j));
    return rep.verified ? kOk : kVerificationFailed;
}

int cmd_factorize(const Options& o) {
    if (o.blocks.empty()) throw SchemaError("--blocks is required");
    Json j = parse_arg(o.blocks, "--blocks");
    if (!j.is_array()) throw SchemaError("--blocks: expected an array of words");
    std::vector<Word> blocks;
    for (std::size_t i = 0; i < j.size(); ++i) blocks.push_back(io::read_word(j[i], "--blocks[" + std::to_string(i) + "]"));
    auto f = block_factorization_witness(blocks, read_point(o), o.n);
    Json bj = Json::array();
    for (const auto& b : f.blocks) bj.push_back(b.str());
    Json out = {{"blocks", std::move(bj)}, {"consumed", f.consumed}, {"length", o.n}};
    out["failure_position"] = f.failure_position ? Json(*f.failure_position) : Json(nullptr);
    emit(o, io::dump(out));
    return kOk;
}

int cmd_verify(const Options& o) {
    std::string text;
    if (o.file.empty() || o.file == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(o.file, std::ios::binary);
        if (!in) throw SchemaError("cannot read '" + o.file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    auto rt = io::verify_serialized(text);
    Json j = {{"ok", rt.check.ok}, {"problems", rt.check.problems}, {"byte_identical", rt.byte_identical}};
    emit(o, io::dump(j));
    return rt.check.ok ? kOk : kVerificationFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact covers, certificates and Birkhoff averages on Cantor space"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--output", o.output, "Write the result to this file instead of standard output");
        c->add_option("--budget", o.budget, "Word budget for clopen sets (lambalgen: orbit search length)");
    };
    auto transform_opts = [&](CLI::App* c) {
        c->add_option("--transform,--name", o.transform,
                      "shift | odometer | identity | bidirectional_shift | rotation");
        c->add_option("--n-shift", o.shift_n, "Shift amount for bidirectional_shift");
        c->add_option("--alpha", o.alpha, "Rotation angle or real: sqrt2m1 | golden | n/d");
        c->add_option("--precision", o.precision, "Approximation precision in bits");
        c->add_option("--measure", o.measure, "Measure as JSON, default uniform");
    };
    auto point_opts = [&](CLI::App* c) {
        c->add_option("--point", o.point, "A point as JSON, e.g. {\"kind\":\"periodic\",\"cycle\":\"0\"}");
        c->add_option("--seed", o.seeds, "Seeded point(s)");
        c->add_option("--seeds", o.seed_range, "Seeded points a-b");
    };

    auto* cover = app.add_subcommand("cover", "Build a cover certificate");
    cover->require_subcommand(1);
    for (const char* name : {"kucera", "finite-change", "prefix-add", "bidirectional", "enum-shift", "ergodic"}) {
        auto* c = cover->add_subcommand(name);
        common(c);
        c->add_option("--set", o.set, "Clopen set as a JSON array of words");
        c->add_option("--r", o.r, "Measure bound r");
        c->add_option("--s", o.s, "Target ratio s");
        c->add_option("--k", o.k, "Number of stages");
        c->add_option("--x", o.x, "Single interval: a word, or 'i:b,...' for bidirectional covers");
        c->add_option("--fuel", o.fuel, "Enumeration fuel for --below");
        c->add_option("--below", o.below, "Use the enumerated open set [0, x) for this real");
        c->add_option("--assume", o.assume, "Asserted measure bound for --below");
        c->add_option("--shifts", o.shifts, "Finite shift list, comma separated");
        c->add_option("--step", o.step, "Shifts are the positive multiples of this");
        c->add_option("--n-budget", o.n_budget, "Largest averaging length tried");
        transform_opts(c);
    }

    auto* transform = app.add_subcommand("transform", "Transform checks");
    transform->require_subcommand(1);
    auto* check = transform->add_subcommand("check", "Exact measure preservation up to a depth");
    common(check);
    transform_opts(check);
    check->add_option("--depth", o.depth, "Largest cylinder length checked");

    auto* birkhoff = app.add_subcommand("birkhoff", "Birkhoff averages");
    birkhoff->require_subcommand(1);
    for (const char* name : {"trace", "experiment", "gn", "lsc", "approx"}) {
        auto* c = birkhoff->add_subcommand(name);
        common(c);
        transform_opts(c);
        point_opts(c);
        c->add_option("--set", o.set, "Clopen set as a JSON array of words");
        c->add_option("--n", o.n, "Trace length");
        c->add_option("--points", o.points, "Points as a JSON array");
        c->add_option("--format", o.format, "trace output: csv | json");
        c->add_option("--r", o.r, "Frequency threshold (gn)");
        c->add_option("--N", o.N, "First averaging length (gn)");
        c->add_option("--n-max", o.n_max, "Last averaging length (gn)");
        c->add_option("--function", o.function, "Built-in lsc function (leading_run)");
        c->add_option("--stages", o.stages, "Explicit lsc stages as JSON [[[c, w], ...], ...]");
        c->add_option("--stage", o.stage, "lsc stage index");
    }

    auto* lambalgen = app.add_subcommand("lambalgen", "Product-space construction");
    lambalgen->require_subcommand(1);
    auto* construct = lambalgen->add_subcommand("construct", "Shift each coordinate out of a product set");
    common(construct);
    transform_opts(construct);
    point_opts(construct);
    construct->add_option("--set", o.set, "Product set as a JSON array of {coordinate: word} objects");
    construct->add_option("--points", o.points, "One point per coordinate, as a JSON array");

    auto* factorize = app.add_subcommand("factorize", "Greedy block factorization of a point");
    common(factorize);
    point_opts(factorize);
    factorize->add_option("--blocks", o.blocks, "Prefix-free block set as a JSON array of words");
    factorize->add_option("--n", o.n, "Prefix length to factor");

    auto* verify = app.add_subcommand("verify", "Re-verify a serialized certificate");
    common(verify);
    verify->add_option("file", o.file, "Certificate file, or - for standard input");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kMalformed;
    }

    try {
        for (auto* c : cover->get_subcommands()) return cmd_cover(c->get_name(), o);
        if (transform->parsed()) return cmd_transform_check(o);
        for (auto* c : birkhoff->get_subcommands()) return cmd_birkhoff(c->get_name(), o);
        if (construct->parsed()) return cmd_lambalgen(o);
        if (factorize->parsed()) return cmd_factorize(o);
        if (verify->parsed()) return cmd_verify(o);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMalformed;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return kPrecondition;
    } catch (const BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kBudget;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMalformed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMalformed;
    }
    return kMalformed;
}
