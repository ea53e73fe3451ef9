#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "effergo/birkhoff.hpp"
#include "effergo/covers.hpp"
#include "effergo/lambalgen.hpp"
#include "effergo/transforms.hpp"

namespace effergo::io {

using Json = nlohmann::json;

// Every reader takes the JSON path of its argument so schema errors can say where they happened.

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + ": missing field '" + key + "'");
    return *it;
}

inline std::string read_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path + ": expected a string");
    return j.get<std::string>();
}

inline Rational read_rational(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string()) throw SchemaError(path + ": expected a fraction string \"n/d\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline std::uint64_t read_unsigned(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw SchemaError(path + ": expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

inline std::int64_t read_integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path + ": expected an integer");
    return j.get<std::int64_t>();
}

inline Word read_word(const Json& j, const std::string& path) {
    try {
        return Word(read_string(j, path));
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline Json write(const Rational& q) { return to_string(q); }

inline Json write(const ClopenSet& s) {
    Json out = Json::array();
    for (const auto& w : s.words()) out.push_back(w.str());
    return out;
}

inline ClopenSet read_clopen(const Json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of words");
    std::vector<Word> words;
    for (std::size_t i = 0; i < j.size(); ++i) words.push_back(read_word(j[i], path + "[" + std::to_string(i) + "]"));
    return normalize(std::move(words));
}

// ---------------------------------------------------------------------------

inline Json write(const MeasureSpec& m) {
    return std::visit(
        [](const auto& k) -> Json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Uniform>) {
                return {{"kind", "uniform"}};
            } else if constexpr (std::is_same_v<K, Bernoulli>) {
                return {{"kind", "bernoulli"}, {"p", write(k.p)}};
            } else {
                // Explicit arrays: brace lists of strings would be read as key/value pairs.
                auto pair = [](const Rational& a, const Rational& b) { return Json::array({write(a), write(b)}); };
                Json out = Json::object();
                out["kind"] = "markov";
                out["initial"] = pair(k.initial[0], k.initial[1]);
                out["transition"] = Json::array({pair(k.transition[0][0], k.transition[0][1]),
                                                 pair(k.transition[1][0], k.transition[1][1])});
                return out;
            }
        },
        m.kind());
}

inline MeasureSpec read_measure(const Json& j, const std::string& path) {
    const std::string kind = read_string(field(j, "kind", path), path + ".kind");
    if (kind == "uniform") return MeasureSpec::uniform();
    if (kind == "bernoulli") return MeasureSpec::bernoulli(read_rational(field(j, "p", path), path + ".p"));
    if (kind == "markov") {
        auto pair = [&](const Json& a, const std::string& at) {
            if (!a.is_array() || a.size() != 2) throw SchemaError(at + ": expected two fractions");
            return std::array<Rational, 2>{read_rational(a[0], at + "[0]"), read_rational(a[1], at + "[1]")};
        };
        const Json& tr = field(j, "transition", path);
        if (!tr.is_array() || tr.size() != 2) throw SchemaError(path + ".transition: expected two rows");
        return MeasureSpec::markov(pair(field(j, "initial", path), path + ".initial"),
                                   {pair(tr[0], path + ".transition[0]"), pair(tr[1], path + ".transition[1]")});
    }
    throw SchemaError(path + ".kind: unknown measure '" + kind + "'");
}

inline Json write(const Point& p) {
    return std::visit(
        [](const auto& g) -> Json {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Periodic>) {
                return {{"kind", "periodic"}, {"preamble", g.preamble.str()}, {"cycle", g.cycle.str()}};
            } else if constexpr (std::is_same_v<G, Seeded>) {
                return {{"kind", "seeded"}, {"seed", g.seed}};
            } else {
                return {{"kind", "explicit"}, {"prefix", g.prefix.str()}, {"fill", g.fill}};
            }
        },
        p.generator());
}

inline Point read_point(const Json& j, const std::string& path) {
    const std::string kind = read_string(field(j, "kind", path), path + ".kind");
    if (kind == "periodic") {
        Word pre = j.contains("preamble") ? read_word(j["preamble"], path + ".preamble") : Word();
        return Point::periodic(std::move(pre), read_word(field(j, "cycle", path), path + ".cycle"));
    }
    if (kind == "seeded") return Point::seeded(read_unsigned(field(j, "seed", path), path + ".seed"));
    if (kind == "explicit") {
        Word prefix = j.contains("prefix") ? read_word(j["prefix"], path + ".prefix") : Word();
        int fill = j.contains("fill") ? static_cast<int>(read_unsigned(j["fill"], path + ".fill")) : 0;
        return Point::explicit_fill(std::move(prefix), fill);
    }
    throw SchemaError(path + ".kind: unknown point kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

inline ComputableReal real_by_name(const std::string& name) {
    if (name == "sqrt2m1") return ComputableReal::sqrt2_minus_1();
    if (name == "golden") return ComputableReal::golden_conjugate();
    return ComputableReal::rational(parse_rational(name));
}

inline TransformSpec make_transform(const TransformDescriptor& d, const Budget& budget = {}) {
    if (d.name == "shift") return shift_transform();
    if (d.name == "odometer") return odometer_transform();
    if (d.name == "identity") return identity_transform();
    if (d.name == "bidirectional_shift") {
        if (!d.n) throw SchemaError("bidirectional_shift needs an integer n");
        return bidirectional_shift_transform(*d.n, budget);
    }
    if (d.name == "rotation") {
        return rotation_transform(real_by_name(d.alpha.value_or("sqrt2m1")), d.precision.value_or(8));
    }
    throw SchemaError("unknown transform '" + d.name + "'");
}

inline Json write(const TransformDescriptor& d) {
    Json out = {{"name", d.name}};
    if (d.n) out["n"] = *d.n;
    if (d.alpha) out["alpha"] = *d.alpha;
    if (d.precision) out["precision"] = *d.precision;
    return out;
}

inline TransformDescriptor read_transform(const Json& j, const std::string& path) {
    TransformDescriptor d;
    d.name = read_string(field(j, "name", path), path + ".name");
    if (j.contains("n")) d.n = read_integer(j["n"], path + ".n");
    if (j.contains("alpha")) d.alpha = read_string(j["alpha"], path + ".alpha");
    if (j.contains("precision")) d.precision = read_unsigned(j["precision"], path + ".precision");
    return d;
}

inline Json write(const ProductClopen& u) {
    Json out = Json::array();
    for (const auto& c : u.cylinders()) {
        Json cyl = Json::object();
        for (const auto& [i, w] : c) cyl[std::to_string(i)] = w.str();
        out.push_back(std::move(cyl));
    }
    return out;
}

inline ProductClopen read_product(const Json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of {coordinate: word} objects");
    std::vector<ProductCylinder> cyls;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_object()) throw SchemaError(at + ": expected an object");
        ProductCylinder c;
        for (const auto& [key, value] : j[i].items()) {
            std::size_t coord = 0;
            try {
                std::size_t used = 0;
                coord = std::stoul(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw SchemaError(at + ": coordinate key '" + key + "' is not a nonnegative integer");
            }
            c.emplace(coord, read_word(value, at + "." + key));
        }
        cyls.push_back(std::move(c));
    }
    return ProductClopen(std::move(cyls));
}

// ---------------------------------------------------------------------------
// Certificates

inline Json write(const CoverCertificate& c) {
    Json params = {{"r", write(c.params.r)}, {"a", write(c.params.a)}};
    if (c.params.s) params["s"] = write(*c.params.s);
    if (c.params.k) params["k"] = *c.params.k;
    if (c.params.n) params["n"] = *c.params.n;
    if (c.params.N) params["N"] = *c.params.N;
    if (c.params.fuel) params["fuel"] = *c.params.fuel;
    if (c.params.epsilon) params["epsilon"] = write(*c.params.epsilon);
    if (c.params.k_used) params["k_used"] = *c.params.k_used;
    if (c.params.x) params["x"] = *c.params.x;
    if (c.params.transform) params["transform"] = *c.params.transform;
    if (c.params.certified_by) params["certified_by"] = *c.params.certified_by;
    if (!c.params.shifts.empty()) params["shifts"] = c.params.shifts;

    Json stages = Json::array();
    for (const auto& st : c.stages) {
        stages.push_back({{"set", write(st.set)}, {"measure", write(st.measure)}, {"bound", write(st.bound)}});
    }
    Json checks = Json::array();
    for (const auto& ic : c.identity_checks) checks.push_back({{"n", ic.n}, {"lhs", write(ic.lhs)}, {"rhs", write(ic.rhs)}});

    return {{"construction", c.construction}, {"mode", c.mode},       {"measure", write(c.measure)},
            {"params", std::move(params)},    {"stages", std::move(stages)}, {"identity_checks", std::move(checks)},
            {"verified", c.verified}};
}

inline CoverCertificate read_certificate(const Json& j, const std::string& path = "$") {
    CoverCertificate c;
    c.construction = read_string(field(j, "construction", path), path + ".construction");
    c.mode = read_string(field(j, "mode", path), path + ".mode");
    if (c.mode != "exact" && c.mode != "assumed") throw SchemaError(path + ".mode: expected 'exact' or 'assumed'");
    c.measure = read_measure(field(j, "measure", path), path + ".measure");

    const std::string pp = path + ".params";
    const Json& p = field(j, "params", path);
    c.params.r = read_rational(field(p, "r", pp), pp + ".r");
    c.params.a = read_clopen(field(p, "a", pp), pp + ".a");
    if (p.contains("s")) c.params.s = read_rational(p["s"], pp + ".s");
    if (p.contains("k")) c.params.k = read_unsigned(p["k"], pp + ".k");
    if (p.contains("n")) c.params.n = read_unsigned(p["n"], pp + ".n");
    if (p.contains("N")) c.params.N = read_unsigned(p["N"], pp + ".N");
    if (p.contains("fuel")) c.params.fuel = read_unsigned(p["fuel"], pp + ".fuel");
    if (p.contains("epsilon")) c.params.epsilon = read_rational(p["epsilon"], pp + ".epsilon");
    if (p.contains("k_used")) c.params.k_used = read_unsigned(p["k_used"], pp + ".k_used");
    if (p.contains("x")) c.params.x = read_string(p["x"], pp + ".x");
    if (p.contains("transform")) c.params.transform = read_string(p["transform"], pp + ".transform");
    if (p.contains("certified_by")) c.params.certified_by = read_string(p["certified_by"], pp + ".certified_by");
    if (p.contains("shifts")) {
        const Json& s = p["shifts"];
        if (!s.is_array()) throw SchemaError(pp + ".shifts: expected an array");
        for (std::size_t i = 0; i < s.size(); ++i) {
            c.params.shifts.push_back(read_integer(s[i], pp + ".shifts[" + std::to_string(i) + "]"));
        }
    }

    const Json& stages = field(j, "stages", path);
    if (!stages.is_array()) throw SchemaError(path + ".stages: expected an array");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const std::string at = path + ".stages[" + std::to_string(i) + "]";
        const Json& st = stages[i];
        // Stage sets are taken verbatim so that verification sees exactly what was emitted.
        const Json& set = field(st, "set", at);
        if (!set.is_array()) throw SchemaError(at + ".set: expected an array of words");
        std::vector<Word> words;
        for (std::size_t w = 0; w < set.size(); ++w) words.push_back(read_word(set[w], at + ".set[" + std::to_string(w) + "]"));
        ClopenSet s = normalize(words);
        if (s.words() != words) throw SchemaError(at + ".set: not in canonical form");
        c.stages.push_back({std::move(s), read_rational(field(st, "measure", at), at + ".measure"),
                            read_rational(field(st, "bound", at), at + ".bound")});
    }
    if (j.contains("identity_checks")) {
        const Json& checks = j["identity_checks"];
        if (!checks.is_array()) throw SchemaError(path + ".identity_checks: expected an array");
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const std::string at = path + ".identity_checks[" + std::to_string(i) + "]";
            c.identity_checks.push_back({read_integer(field(checks[i], "n", at), at + ".n"),
                                         read_rational(field(checks[i], "lhs", at), at + ".lhs"),
                                         read_rational(field(checks[i], "rhs", at), at + ".rhs")});
        }
    }
    const Json& v = field(j, "verified", path);
    if (!v.is_boolean()) throw SchemaError(path + ".verified: expected a boolean");
    c.verified = v.get<bool>();
    return c;
}

/// Canonical text form: sorted keys, two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse(const std::string& text, const std::string& what = "input") {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(what + ": malformed JSON: " + e.what());
    }
}

struct RoundTrip {
    CertificateCheck check;
    bool byte_identical = false;
};

/// Parses a serialized certificate, re-verifies it from its stage sets, and re-emits it.
inline RoundTrip verify_serialized(const std::string& text) {
    CoverCertificate c = read_certificate(parse(text, "certificate"));
    RoundTrip rt;
    rt.check = verify_certificate(c);
    rt.byte_identical = dump(write(c)) == text;
    return rt;
}

} // namespace effergo::io
