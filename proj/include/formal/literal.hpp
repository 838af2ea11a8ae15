#pragma once

// Text and JSON encodings of jets, fields, diffeos, forms and curves.
// Grammar (whitespace-insensitive):
//   object := NAME "{" [entry ("," entry)*] "}"
//   entry  := key ("=" | ":") value
//   key    := IDENT ("^" IDENT)* | INT
//   value  := INT | "[" [term ("," term)*] "]" | object
//   term   := "(" INT* ":" RATIONAL ")"

#include <algorithm>
#include <cctype>
#include <memory>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "formal/diffeo.hpp"
#include "formal/forms.hpp"
#include "formal/jet.hpp"
#include "formal/vector_field.hpp"

namespace formal {

using Json = nlohmann::ordered_json;

namespace literal {

using TermList = std::vector<std::pair<std::vector<int>, Rational>>;

struct Record;

struct Value {
    std::variant<long, TermList, std::shared_ptr<Record>> v;
};

struct Record {
    std::string name;
    std::vector<std::pair<std::string, Value>> entries;
};

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Record parse_top()
    {
        Record r = record();
        skip();
        if (i_ != s_.size()) error("trailing characters");
        return r;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(Errc::ParseError, what + " at offset " + std::to_string(i_));
    }
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c)
    {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }
    void expect(char c)
    {
        if (!peek(c)) error(std::string("expected '") + c + "'");
        ++i_;
    }
    bool accept(char c)
    {
        if (!peek(c)) return false;
        ++i_;
        return true;
    }
    std::string ident()
    {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        if (b == i_) error("expected a name");
        return std::string(s_.substr(b, i_ - b));
    }
    long integer()
    {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (b == i_) error("expected an integer");
        if (i_ - b > 9) error("integer too large");
        return std::stol(std::string(s_.substr(b, i_ - b)));
    }

    Record record()
    {
        Record r;
        r.name = ident();
        expect('{');
        if (accept('}')) return r;
        do {
            std::string key = ident();
            while (accept('^')) key += "^" + ident();
            skip();
            if (!accept('=') && !accept(':')) error("expected '=' or ':'");
            r.entries.emplace_back(std::move(key), value());
        } while (accept(','));
        expect('}');
        return r;
    }

    Value value()
    {
        skip();
        if (i_ >= s_.size()) error("unexpected end of input");
        if (std::isdigit(static_cast<unsigned char>(s_[i_]))) return {integer()};
        if (s_[i_] == '-') {
            ++i_;
            return {-integer()};
        }
        if (s_[i_] == '[') return {terms()};
        return {std::make_shared<Record>(record())};
    }

    TermList terms()
    {
        expect('[');
        TermList out;
        if (accept(']')) return out;
        do {
            expect('(');
            std::vector<int> e;
            while (!peek(':')) e.push_back(static_cast<int>(integer()));
            expect(':');
            skip();
            std::size_t b = i_;
            while (i_ < s_.size() && s_[i_] != ')') ++i_;
            if (i_ >= s_.size()) error("unterminated term");
            out.emplace_back(std::move(e), parse_rational(s_.substr(b, i_ - b)));
            ++i_;
        } while (accept(','));
        expect(']');
        return out;
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

inline Jet jet_from_terms(int dim, int trunc, const TermList& terms)
{
    Jet j(dim, trunc);
    std::map<std::vector<int>, bool> seen;
    for (const auto& [e, c] : terms) {
        require(static_cast<int>(e.size()) == dim, Errc::ParseError, "term has the wrong number of exponents");
        int d = 0;
        for (int x : e) d += x;
        require(d <= trunc, Errc::ParseError, "term degree exceeds trunc");
        require(!seen[e], Errc::ParseError, "repeated monomial");
        seen[e] = true;
        j.accumulate(mono::from_exponents(e), c);
    }
    return j;
}

inline std::string terms_text(const Jet& j)
{
    std::string out = "[";
    bool first = true;
    for (const auto& [m, c] : j.terms()) {
        if (!first) out += ", ";
        first = false;
        out += "(";
        auto e = mono::exponents(m, j.dim());
        for (std::size_t i = 0; i < e.size(); ++i) out += (i ? " " : "") + std::to_string(e[i]);
        out += ": " + to_string(c) + ")";
    }
    return out + "]";
}

inline Json terms_json(const Jet& j)
{
    Json arr = Json::array();
    for (const auto& [m, c] : j.terms()) arr.push_back({{"exp", mono::exponents(m, j.dim())}, {"coeff", to_string(c)}});
    return arr;
}

inline TermList terms_from_json(const Json& arr)
{
    require(arr.is_array(), Errc::ParseError, "terms must be an array");
    TermList out;
    for (const auto& t : arr) {
        require(t.is_object() && t.contains("exp") && t.contains("coeff"), Errc::ParseError, "term needs exp and coeff");
        require(t["coeff"].is_string(), Errc::ParseError, "coeff must be a string");
        out.emplace_back(t["exp"].get<std::vector<int>>(), parse_rational(t["coeff"].get<std::string>()));
    }
    return out;
}

/// Header fields shared by every object: dim, trunc and optional reliable.
struct Header {
    std::optional<int> dim, trunc, reliable;
};

inline std::string header_text(int dim, int trunc, int reliable)
{
    std::string h = "dim=" + std::to_string(dim) + ", trunc=" + std::to_string(trunc);
    if (reliable != trunc) h += ", reliable=" + std::to_string(reliable);
    return h;
}

/// Splits a record into its header and the remaining keyed values.
inline std::pair<Header, std::vector<std::pair<std::string, Value>>> split(const Record& r)
{
    Header h;
    std::vector<std::pair<std::string, Value>> rest;
    std::map<std::string, bool> seen;
    for (const auto& [k, v] : r.entries) {
        require(!seen[k], Errc::ParseError, "duplicate key " + k);
        seen[k] = true;
        std::optional<int>* slot = k == "dim" ? &h.dim : k == "trunc" ? &h.trunc : k == "reliable" ? &h.reliable : nullptr;
        if (slot) {
            require(std::holds_alternative<long>(v.v), Errc::ParseError, k + " must be an integer");
            *slot = static_cast<int>(std::get<long>(v.v));
        } else {
            rest.emplace_back(k, v);
        }
    }
    return {h, rest};
}

inline int component_index(const std::string& key, const std::string& prefix, int n)
{
    require(key.rfind(prefix, 0) == 0, Errc::ParseError, "unexpected key " + key);
    std::string tail = key.substr(prefix.size());
    require(!tail.empty() && tail.size() < 4 &&
                std::all_of(tail.begin(), tail.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }),
            Errc::ParseError, "bad index in " + key);
    int i = std::stoi(tail);
    require(i >= 1 && i <= n, Errc::ParseError, "index out of range in " + key);
    return i - 1;
}

inline void check_header(const Header& h, const char* what)
{
    require(h.dim && h.trunc, Errc::ParseError, std::string(what) + " needs dim and trunc");
    require(*h.dim >= 1 && *h.dim <= kMaxDim, Errc::ParseError, "dim out of range");
    require(*h.trunc >= 0 && *h.trunc <= kMaxTrunc, Errc::ParseError, "trunc out of range");
    if (h.reliable) require(*h.reliable >= -1 && *h.reliable <= *h.trunc, Errc::ParseError, "reliable out of range");
}

inline Jet jet_of(const Record& r)
{
    require(r.name == "jet", Errc::ParseError, "expected a jet literal, got " + r.name);
    auto [h, rest] = split(r);
    check_header(h, "jet");
    TermList terms;
    for (const auto& [k, v] : rest) {
        require(k == "terms", Errc::ParseError, "unexpected key " + k);
        require(std::holds_alternative<TermList>(v.v), Errc::ParseError, "terms must be a list");
        terms = std::get<TermList>(v.v);
    }
    Jet j = jet_from_terms(*h.dim, *h.trunc, terms);
    return h.reliable ? j.with_reliable(*h.reliable) : j;
}

/// Components comp1..compN of a vf, diffeo or curve record.
inline std::vector<Jet> components_of(const Record& r, int count, int jet_dim, int trunc, int reliable)
{
    std::vector<Jet> comps(count, Jet(jet_dim, trunc));
    auto [h, rest] = split(r);
    for (const auto& [k, v] : rest) {
        int i = component_index(k, "comp", count);
        require(std::holds_alternative<TermList>(v.v), Errc::ParseError, k + " must be a term list");
        comps[i] = jet_from_terms(jet_dim, trunc, std::get<TermList>(v.v));
    }
    for (auto& c : comps) c = c.with_reliable(reliable);
    return comps;
}

inline std::string components_text(const std::vector<Jet>& comps)
{
    std::string out;
    for (std::size_t i = 0; i < comps.size(); ++i) out += ", comp" + std::to_string(i + 1) + "=" + terms_text(comps[i]);
    return out;
}

inline std::string form_key(const std::vector<int>& idx)
{
    if (idx.empty()) return "1";
    std::string k;
    for (std::size_t i = 0; i < idx.size(); ++i) k += (i ? "^dx" : "dx") + std::to_string(idx[i] + 1);
    return k;
}

inline std::vector<int> form_index(const std::string& key, int degree, int dim)
{
    std::vector<int> idx;
    if (key == "1") {
        require(degree == 0, Errc::ParseError, "key 1 is only valid for 0-forms");
        return idx;
    }
    std::size_t b = 0;
    while (b <= key.size()) {
        std::size_t e = key.find('^', b);
        if (e == std::string::npos) e = key.size();
        idx.push_back(component_index(key.substr(b, e - b), "dx", dim));
        b = e + 1;
    }
    require(static_cast<int>(idx.size()) == degree, Errc::ParseError, "key " + key + " has the wrong degree");
    require(std::is_sorted(idx.begin(), idx.end()) && std::adjacent_find(idx.begin(), idx.end()) == idx.end(),
            Errc::ParseError, "form keys must list increasing distinct indices");
    return idx;
}

} // namespace literal

inline std::string to_literal(const Jet& j)
{
    return "jet{" + literal::header_text(j.dim(), j.trunc(), j.reliable()) + ", terms=" + literal::terms_text(j) + "}";
}
inline std::string to_literal(const VectorField& x)
{
    return "vf{" + literal::header_text(x.dim(), x.trunc(), x.reliable()) + literal::components_text(x.comps()) + "}";
}
inline std::string to_literal(const Diffeo& f)
{
    return "diffeo{" + literal::header_text(f.dim(), f.trunc(), f.reliable()) + literal::components_text(f.comps()) + "}";
}
inline std::string to_literal(const FormJet& w)
{
    std::string out = "form" + std::to_string(w.degree()) + "{" + literal::header_text(w.dim(), w.trunc(), w.reliable());
    for (const auto& [idx, f] : w.coeffs()) out += ", " + literal::form_key(idx) + ": " + literal::terms_text(f);
    return out + "}";
}
inline std::string to_literal(const CurveJet& g)
{
    int rel = g.trunc();
    for (const auto& c : g.components) rel = std::min(rel, c.reliable());
    return "curve{" + literal::header_text(static_cast<int>(g.components.size()), g.trunc(), rel) +
           literal::components_text(g.components) + "}";
}

inline Jet parse_jet(std::string_view s) { return literal::jet_of(literal::Parser(s).parse_top()); }

namespace literal {

inline std::vector<Jet> field_components(const Record& r, const char* name)
{
    require(r.name == name, Errc::ParseError, std::string("expected a ") + name + " literal, got " + r.name);
    auto [h, rest] = split(r);
    check_header(h, name);
    return components_of(r, *h.dim, *h.dim, *h.trunc, h.reliable.value_or(*h.trunc));
}

inline FormJet form_of(const Record& r)
{
    require(r.name.rfind("form", 0) == 0 && r.name.size() == 5 && std::isdigit(static_cast<unsigned char>(r.name[4])),
            Errc::ParseError, "expected a form literal, got " + r.name);
    const int degree = r.name[4] - '0';
    auto [h, rest] = split(r);
    // dim and trunc may come from nested jet literals.
    std::vector<std::pair<std::string, Jet>> nested;
    for (const auto& [k, v] : rest)
        if (auto* p = std::get_if<std::shared_ptr<Record>>(&v.v)) {
            Jet j = jet_of(**p);
            require(!h.dim || *h.dim == j.dim(), Errc::DimensionMismatch, "coefficient dim differs from the form");
            require(!h.trunc || *h.trunc == j.trunc(), Errc::TruncMismatch, "coefficient trunc differs from the form");
            h.dim = j.dim();
            h.trunc = j.trunc();
            nested.emplace_back(k, std::move(j));
        }
    check_header(h, "form");
    require(degree <= *h.dim, Errc::ParseError, "form degree exceeds dim");
    FormJet w(*h.dim, degree, *h.trunc);
    std::map<std::string, bool> seen;
    for (const auto& [k, v] : rest) {
        auto idx = form_index(k, degree, *h.dim);
        require(!seen[form_key(idx)], Errc::ParseError, "duplicate key " + k);
        seen[form_key(idx)] = true;
        if (auto* t = std::get_if<TermList>(&v.v)) {
            w.set(idx, jet_from_terms(*h.dim, *h.trunc, *t));
        } else {
            require(std::holds_alternative<std::shared_ptr<Record>>(v.v), Errc::ParseError, k + " needs a jet");
        }
    }
    for (const auto& [k, j] : nested) w.set(form_index(k, degree, *h.dim), j);
    if (h.reliable) w = w.with_reliable(*h.reliable);
    return w;
}

inline CurveJet curve_of(const Record& r)
{
    require(r.name == "curve", Errc::ParseError, "expected a curve literal, got " + r.name);
    auto [h, rest] = split(r);
    check_header(h, "curve");
    return CurveJet{components_of(r, *h.dim, 1, *h.trunc, h.reliable.value_or(*h.trunc))};
}

} // namespace literal

inline VectorField parse_field(std::string_view s)
{
    return VectorField(literal::field_components(literal::Parser(s).parse_top(), "vf"));
}
inline Diffeo parse_diffeo(std::string_view s)
{
    return Diffeo(literal::field_components(literal::Parser(s).parse_top(), "diffeo"));
}
inline FormJet parse_form(std::string_view s) { return literal::form_of(literal::Parser(s).parse_top()); }
inline CurveJet parse_curve(std::string_view s) { return literal::curve_of(literal::Parser(s).parse_top()); }

using Object = std::variant<Jet, VectorField, Diffeo, FormJet, CurveJet>;

inline Object parse_object(std::string_view s)
{
    literal::Record r = literal::Parser(s).parse_top();
    if (r.name == "jet") return literal::jet_of(r);
    if (r.name == "vf") return VectorField(literal::field_components(r, "vf"));
    if (r.name == "diffeo") return Diffeo(literal::field_components(r, "diffeo"));
    if (r.name == "curve") return literal::curve_of(r);
    return literal::form_of(r);
}

inline std::string to_literal(const Object& o)
{
    return std::visit([](const auto& x) { return to_literal(x); }, o);
}

// JSON mapping: every text literal corresponds to one object with a "type"
// tag, an explicit reliable order and terms as {"exp": [...], "coeff": "p/q"}.

inline Json to_json(const Jet& j)
{
    return {{"type", "jet"}, {"dim", j.dim()}, {"trunc", j.trunc()}, {"reliable", j.reliable()}, {"terms", literal::terms_json(j)}};
}

namespace literal {

inline Json components_json(const char* type, int dim, int trunc, int reliable, const std::vector<Jet>& comps)
{
    Json arr = Json::array();
    for (const auto& c : comps) arr.push_back(terms_json(c));
    return {{"type", type}, {"dim", dim}, {"trunc", trunc}, {"reliable", reliable}, {"components", arr}};
}

inline Header header_from_json(const Json& j)
{
    Header h;
    for (const char* k : {"dim", "trunc", "reliable"}) {
        require(j.contains(k) && j[k].is_number_integer(), Errc::ParseError, std::string("json needs integer ") + k);
        int v = j[k].get<int>();
        (std::string(k) == "dim" ? h.dim : std::string(k) == "trunc" ? h.trunc : h.reliable) = v;
    }
    check_header(h, "json object");
    return h;
}

inline std::vector<Jet> components_from_json(const Json& j, int count, int jet_dim, const Header& h)
{
    require(j.contains("components") && j["components"].is_array() && static_cast<int>(j["components"].size()) == count,
            Errc::ParseError, "json components do not match dim");
    std::vector<Jet> comps;
    for (const auto& c : j["components"]) comps.push_back(jet_from_terms(jet_dim, *h.trunc, terms_from_json(c)).with_reliable(*h.reliable));
    return comps;
}

} // namespace literal

inline Json to_json(const VectorField& x)
{
    return literal::components_json("vf", x.dim(), x.trunc(), x.reliable(), x.comps());
}
inline Json to_json(const Diffeo& f)
{
    return literal::components_json("diffeo", f.dim(), f.trunc(), f.reliable(), f.comps());
}
inline Json to_json(const CurveJet& g)
{
    int rel = g.trunc();
    for (const auto& c : g.components) rel = std::min(rel, c.reliable());
    return literal::components_json("curve", static_cast<int>(g.components.size()), g.trunc(), rel, g.components);
}
inline Json to_json(const FormJet& w)
{
    Json coeffs = Json::array();
    for (const auto& [idx, f] : w.coeffs()) {
        std::vector<int> one;
        for (int i : idx) one.push_back(i + 1);
        coeffs.push_back({{"index", one}, {"terms", literal::terms_json(f)}});
    }
    return {{"type", "form"}, {"degree", w.degree()}, {"dim", w.dim()},   {"trunc", w.trunc()},
            {"reliable", w.reliable()}, {"coeffs", coeffs}};
}
inline Json to_json(const Object& o)
{
    return std::visit([](const auto& x) { return to_json(x); }, o);
}

inline Object object_from_json(const Json& j)
{
    require(j.is_object() && j.contains("type") && j["type"].is_string(), Errc::ParseError, "json object needs a type");
    const std::string type = j["type"];
    literal::Header h = literal::header_from_json(j);
    if (type == "jet") {
        require(j.contains("terms"), Errc::ParseError, "json jet needs terms");
        return literal::jet_from_terms(*h.dim, *h.trunc, literal::terms_from_json(j["terms"])).with_reliable(*h.reliable);
    }
    if (type == "vf") return VectorField(literal::components_from_json(j, *h.dim, *h.dim, h));
    if (type == "diffeo") return Diffeo(literal::components_from_json(j, *h.dim, *h.dim, h));
    if (type == "curve") return CurveJet{literal::components_from_json(j, *h.dim, 1, h)};
    require(type == "form", Errc::ParseError, "unknown json type " + type);
    require(j.contains("degree") && j["degree"].is_number_integer(), Errc::ParseError, "json form needs a degree");
    int degree = j["degree"];
    require(degree >= 0 && degree <= *h.dim, Errc::ParseError, "form degree out of range");
    FormJet w(*h.dim, degree, *h.trunc);
    require(j.contains("coeffs") && j["coeffs"].is_array(), Errc::ParseError, "json form needs coeffs");
    for (const auto& c : j["coeffs"]) {
        require(c.contains("index") && c.contains("terms"), Errc::ParseError, "form coefficient needs index and terms");
        std::vector<int> idx = c["index"].get<std::vector<int>>();
        for (int& i : idx) i -= 1;
        w.set(idx, literal::jet_from_terms(*h.dim, *h.trunc, literal::terms_from_json(c["terms"])));
    }
    return w.with_reliable(*h.reliable);
}

/// Accepts either encoding: JSON when the text starts with '{'.
inline Object read_object(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b != std::string_view::npos && s[b] == '{') {
        try {
            return object_from_json(Json::parse(s));
        } catch (const Json::exception& e) {
            fail(Errc::ParseError, e.what());
        }
    }
    return parse_object(s);
}

} // namespace formal
