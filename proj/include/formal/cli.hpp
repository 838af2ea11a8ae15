#pragma once

// Batch command-line front end. Exit codes: 0 success, 1 usage error,
// 2 domain error (one diagnostic line naming the error code).

#include <algorithm>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "formal/formal.hpp"
#include "formal/literal.hpp"

namespace formal::cli {

inline constexpr int kFormatVersion = 1;

using RationalMatrix = std::vector<std::vector<Rational>>;
using IntMatrix = std::vector<std::vector<long>>;
using Value = std::variant<bool, long, Rational, std::string, Object, std::vector<Rational>, RationalMatrix, IntMatrix,
                           std::vector<std::string>, std::vector<Object>>;

/// Ordered key/value result. Text prints one `key: value` line per entry
/// (object lists spread over `key[i]:` lines); JSON maps each entry to one
/// member of "result".
struct Report {
    std::vector<std::pair<std::string, Value>> entries;
    void add(std::string key, Value v) { entries.emplace_back(std::move(key), std::move(v)); }
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts)
{
    std::string out = "[";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out + "]";
}

template <class T, class F>
std::string join_map(const std::vector<T>& v, F&& f)
{
    std::vector<std::string> parts;
    for (const auto& x : v) parts.push_back(f(x));
    return join(parts);
}

inline std::string rational_text(const Rational& r) { return to_string(r); }
inline std::string long_text(long x) { return std::to_string(x); }
inline std::string plain_text(const std::string& x) { return x; }

inline std::string render_text(const std::string& key, const Value& v)
{
    struct Visitor {
        const std::string& key;
        std::string line(const std::string& body) const { return key + ": " + body + "\n"; }
        std::string operator()(bool b) const { return line(b ? "true" : "false"); }
        std::string operator()(long x) const { return line(std::to_string(x)); }
        std::string operator()(const Rational& x) const { return line(to_string(x)); }
        std::string operator()(const std::string& s) const { return line(s); }
        std::string operator()(const Object& o) const { return line(to_literal(o)); }
        std::string operator()(const std::vector<Rational>& v) const { return line(join_map(v, rational_text)); }
        std::string operator()(const RationalMatrix& m) const
        {
            return line(join_map(m, [](const auto& row) { return join_map(row, rational_text); }));
        }
        std::string operator()(const IntMatrix& m) const
        {
            return line(join_map(m, [](const auto& row) { return join_map(row, long_text); }));
        }
        std::string operator()(const std::vector<std::string>& v) const { return line(join_map(v, plain_text)); }
        std::string operator()(const std::vector<Object>& v) const
        {
            if (v.empty()) return line("[]");
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += key + "[" + std::to_string(i + 1) + "]: " + to_literal(v[i]) + "\n";
            return out;
        }
    };
    return std::visit(Visitor{key}, v);
}

inline Json render_json(const Value& v)
{
    struct Visitor {
        Json operator()(bool b) const { return b; }
        Json operator()(long x) const { return x; }
        Json operator()(const Rational& x) const { return to_string(x); }
        Json operator()(const std::string& s) const { return s; }
        Json operator()(const Object& o) const { return to_json(o); }
        Json operator()(const std::vector<Rational>& v) const
        {
            Json a = Json::array();
            for (const auto& x : v) a.push_back(to_string(x));
            return a;
        }
        Json operator()(const RationalMatrix& m) const
        {
            Json a = Json::array();
            for (const auto& row : m) a.push_back((*this)(row));
            return a;
        }
        Json operator()(const IntMatrix& m) const { return m; }
        Json operator()(const std::vector<std::string>& v) const { return v; }
        Json operator()(const std::vector<Object>& v) const
        {
            Json a = Json::array();
            for (const auto& o : v) a.push_back(to_json(o));
            return a;
        }
    };
    return std::visit(Visitor{}, v);
}

inline RationalMatrix matrix_value(const Matrix& m)
{
    RationalMatrix out(m.rows(), std::vector<Rational>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline std::vector<Rational> rational_list(const std::string& flag, const std::string& text)
{
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_rational(item));
        } catch (const Error&) {
            throw UsageError(flag + ": not a rational list: " + text);
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A literal given inline, or `@path` to read it from a file.
inline std::string literal_text(const std::string& arg)
{
    return !arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg;
}

/// Non-empty, non-comment lines of a file.
inline std::vector<std::string> literal_lines(const std::string& path)
{
    std::stringstream ss(read_file(path));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(ss, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        out.push_back(line);
    }
    return out;
}

/// Shared session: objects must agree with --dim/--trunc and with each other.
struct Session {
    std::optional<int> dim, trunc;

    void check(int d, int t, bool check_dim = true)
    {
        if (check_dim && dim && *dim != d)
            fail(Errc::DimensionMismatch, "object dim " + std::to_string(d) + " differs from session dim " + std::to_string(*dim));
        if (trunc && *trunc != t)
            fail(Errc::TruncMismatch,
                 "object trunc " + std::to_string(t) + " differs from session trunc " + std::to_string(*trunc));
        if (check_dim) dim = d;
        trunc = t;
    }
    template <class T>
    T read(const std::string& flag, const std::string& arg, bool check_dim = true)
    {
        if (arg.empty()) throw UsageError("missing " + flag);
        Object o = read_object(literal_text(arg));
        T* p = std::get_if<T>(&o);
        require(p != nullptr, Errc::ParseError, flag + " has the wrong object type");
        if constexpr (std::is_same_v<T, CurveJet>) {
            check(static_cast<int>(p->components.size()), p->trunc(), check_dim);
        } else {
            check(p->dim(), p->trunc(), check_dim);
        }
        return *p;
    }
};

template <class T>
const T& need(const std::optional<T>& v, const std::string& flag)
{
    if (!v) throw UsageError("missing " + flag);
    return *v;
}

inline std::string removed_text(const RemovedTerm& t)
{
    std::string e;
    for (std::size_t i = 0; i < t.exponents.size(); ++i) e += (i ? " " : "") + std::to_string(t.exponents[i]);
    return "comp" + std::to_string(t.component + 1) + " (" + e + "): " + to_string(t.coefficient);
}

} // namespace detail

struct Options {
    std::string op;
    std::optional<int> dim, trunc;
    std::string out = "text";
    // jet / field
    std::string a, b, x, y, f, phi, psi;
    std::vector<std::string> args;
    std::optional<int> var, k, upto, period;
    // resonance
    std::string lambda;
    std::string mu = "0";
    std::optional<long> bound, p, q;
    // normalize
    std::string field, mode = "dulac";
    // algebra
    std::string gens;
    // forms
    std::string form, form2, den, direction, exponents, ham;
    std::vector<std::string> maps, factors, pair_p, pair_q;
    std::string residues, pair_a, pair_b;
};

inline Report run_jet(const Options& o, detail::Session& s)
{
    Report r;
    auto jet = [&](const std::string& flag, const std::string& v) { return s.read<Jet>(flag, v); };
    if (o.op == "canonical") {
        r.add("result", Object(jet("--a", o.a)));
    } else if (o.op == "add" || o.op == "mul") {
        Jet a = jet("--a", o.a), b = jet("--b", o.b);
        r.add("result", Object(o.op == "add" ? a + b : a * b));
    } else if (o.op == "diff" || o.op == "integrate") {
        Jet a = jet("--a", o.a);
        int v = detail::need(o.var, "--var");
        if (v < 1 || v > a.dim()) throw UsageError("--var: variable index out of range");
        r.add("result", Object(o.op == "diff" ? differentiate(a, v - 1) : integrate(a, v - 1)));
    } else if (o.op == "pow") {
        int k = detail::need(o.k, "--k");
        if (k < 0) throw UsageError("--k: exponent must be non-negative");
        r.add("result", Object(pow(jet("--a", o.a), k)));
    } else if (o.op == "invert") {
        r.add("result", Object(invert_unit(jet("--a", o.a))));
    } else if (o.op == "divide") {
        SeriesDivision d = series_divide(jet("--a", o.a), jet("--b", o.b));
        r.add("quotient", Object(d.quotient));
        r.add("remainder", Object(d.remainder));
    } else if (o.op == "gcd") {
        r.add("result", Object(gcd_poly(jet("--a", o.a), jet("--b", o.b))));
    } else { // compose
        Jet a = jet("--a", o.a);
        if (o.args.empty()) throw UsageError("missing --arg");
        std::vector<Jet> xs;
        for (const auto& t : o.args) xs.push_back(s.read<Jet>("--arg", t, false));
        r.add("result", Object(substitute(a, xs)));
    }
    return r;
}

inline Report run_field(const Options& o, detail::Session& s)
{
    Report r;
    auto vf = [&](const std::string& flag, const std::string& v) { return s.read<VectorField>(flag, v); };
    auto dif = [&](const std::string& flag, const std::string& v) { return s.read<Diffeo>(flag, v); };
    if (o.op == "canonical") {
        r.add("result", Object(vf("--x", o.x)));
    } else if (o.op == "bracket") {
        r.add("result", Object(bracket(vf("--x", o.x), vf("--y", o.y))));
    } else if (o.op == "apply") {
        VectorField x = vf("--x", o.x);
        r.add("result", Object(apply(x, s.read<Jet>("--f", o.f))));
    } else if (o.op == "linear") {
        r.add("linear_part", detail::matrix_value(linear_part(vf("--x", o.x))));
    } else if (o.op == "order") {
        r.add("order", static_cast<long>(vanishing_order(vf("--x", o.x))));
    } else if (o.op == "pushforward") {
        Diffeo f = dif("--phi", o.phi);
        r.add("result", Object(pushforward(f, vf("--x", o.x))));
    } else if (o.op == "inverse") {
        r.add("result", Object(inverse(dif("--phi", o.phi))));
    } else if (o.op == "compose") {
        Diffeo f = dif("--phi", o.phi);
        r.add("result", Object(compose(f, dif("--psi", o.psi))));
    } else { // bochner
        Diffeo f = dif("--phi", o.phi);
        r.add("result", Object(bochner_linearize(f, detail::need(o.period, "--period"))));
    }
    return r;
}

inline Report run_resonance(const Options& o, detail::Session& s)
{
    Report r;
    auto pair_matrix = [](const std::vector<Pair>& v) {
        IntMatrix m;
        for (auto p : v) m.push_back({p[0], p[1]});
        return m;
    };
    if (o.op == "fiber") {
        LatticeRay ray = fiber_decomposition(detail::need(o.p, "--p"), detail::need(o.q, "--q"),
                                             detail::rational_list("--mu", o.mu).front());
        r.add("generator", pair_matrix({ray.base, ray.step}));
        return r;
    }
    if (o.lambda.empty()) throw UsageError("missing --lambda");
    std::vector<Rational> lambda = detail::rational_list("--lambda", o.lambda);
    require(!s.dim || *s.dim == static_cast<int>(lambda.size()), Errc::DimensionMismatch, "--lambda length differs from --dim");
    if (o.op == "nonresonant") {
        r.add("nonresonant", is_nonresonant(lambda));
        return r;
    }
    std::vector<Rational> mu = detail::rational_list("--mu", o.mu);
    if (mu.size() != 1) throw UsageError("--mu: expected one rational");
    ResonanceSet rs = resonant_set({lambda, mu.front(), o.bound});
    r.add("finiteness", std::string(finiteness_name(rs.finiteness)));
    r.add("solutions", pair_matrix(rs.solutions));
    if (rs.generator) r.add("generator", pair_matrix({rs.generator->base, rs.generator->step}));
    return r;
}

inline Report run_normalize(const Options& o, detail::Session& s)
{
    VectorField x = s.read<VectorField>("--field", o.field);
    int upto = detail::need(o.upto, "--upto");
    NormalFormResult nf = o.mode == "linearize" ? linearize_nonresonant(x, upto) : poincare_dulac_normalize(x, upto);
    Report r;
    r.add("normal", Object(nf.normal));
    r.add("conjugator", Object(nf.conjugator));
    std::vector<std::string> removed;
    for (const auto& t : nf.removed) removed.push_back(detail::removed_text(t));
    r.add("removed", removed);
    return r;
}

inline Report run_algebra(const Options& o, detail::Session& s)
{
    if (o.gens.empty()) throw UsageError("missing --gens");
    std::vector<VectorField> gens;
    for (const auto& line : detail::literal_lines(o.gens)) gens.push_back(s.read<VectorField>("--gens", line));
    require(!gens.empty(), Errc::DimensionMismatch, "generator file is empty");
    Report r;
    if (o.op == "first-integral") {
        require(gens.size() == 1, Errc::DimensionMismatch, "first integrals take one field");
        auto f = first_integral_jet(gens.front(), o.upto.value_or(gens.front().trunc()));
        if (f) {
            r.add("first_integral", Object(*f));
        } else {
            r.add("first_integral", std::string("none"));
        }
        return r;
    }
    AlgebraPresentation a = closure_check(gens);
    if (o.op == "closure") {
        r.add("closed", true);
        const auto& st = *a.structure;
        for (int i = 0; i < a.size(); ++i)
            for (int j = i + 1; j < a.size(); ++j)
                r.add("bracket(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")", st[i][j]);
    } else if (o.op == "rank") {
        RankReport rr = generic_rank_report(a);
        r.add("rank", static_cast<long>(rr.rank));
        r.add("decided_to", static_cast<long>(rr.order));
    } else if (o.op == "saturate") {
        Rank1Saturation sat = saturate_rank1(a);
        r.add("director", Object(sat.director));
        std::vector<Object> coeffs(sat.coefficient_space.begin(), sat.coefficient_space.end());
        r.add("coefficients", coeffs);
        r.add("saturable", sat.saturable);
    } else if (o.op == "nilpotent") {
        r.add("nilpotent", is_nilpotent(a));
    } else { // classify
        ClassificationTag tag = a.dim() == 1 ? classify_dim1(a) : classify_abelian_rank2(a);
        r.add("family", family_name(tag.family));
        for (const auto& [k, v] : tag.parameters) r.add("param." + k, v);
        if (tag.series) r.add("series", Object(*tag.series));
        r.add("certificate", Object(tag.certificate));
        std::vector<Object> basis(tag.normal_basis.begin(), tag.normal_basis.end());
        r.add("normal_basis", basis);
        r.add("sound", certificate_sound(a, tag));
    }
    return r;
}

inline Report run_forms(const Options& o, detail::Session& s)
{
    Report r;
    auto form = [&](const std::string& flag, const std::string& v, bool check_dim = true) {
        return s.read<FormJet>(flag, v, check_dim);
    };
    if (o.op == "d") {
        r.add("result", Object(exterior_d(form("--form", o.form))));
    } else if (o.op == "wedge") {
        FormJet a = form("--form", o.form);
        r.add("result", Object(wedge(a, form("--form2", o.form2))));
    } else if (o.op == "contract") {
        VectorField x = s.read<VectorField>("--field", o.field);
        r.add("result", Object(contract(x, form("--form", o.form))));
    } else if (o.op == "dual") {
        r.add("result", Object(dual_field_dim2(form("--form", o.form))));
    } else if (o.op == "integrable") {
        r.add("integrable", is_integrable(form("--form", o.form)));
    } else if (o.op == "pullback") {
        if (o.maps.empty()) throw UsageError("missing --map");
        FormJet w = form("--form", o.form, false);
        std::vector<Jet> f;
        for (const auto& m : o.maps) f.push_back(s.read<Jet>("--map", m, false));
        r.add("result", Object(pullback(f, w)));
    } else if (o.op == "logsynth") {
        LogSpec spec;
        std::vector<Rational> lam;
        if (!o.factors.empty()) lam = detail::rational_list("--residues", o.residues);
        if (lam.size() != o.factors.size()) throw UsageError("--residues: need one residue per --factor");
        for (std::size_t i = 0; i < o.factors.size(); ++i) spec.real_factors.push_back({s.read<Jet>("--factor", o.factors[i]), lam[i]});
        if (o.pair_p.size() != o.pair_q.size()) throw UsageError("--pair-q: need one per --pair-p");
        if (!o.pair_p.empty()) {
            auto pa = detail::rational_list("--pair-a", o.pair_a), pb = detail::rational_list("--pair-b", o.pair_b);
            if (pa.size() != o.pair_p.size() || pb.size() != o.pair_p.size())
                throw UsageError("--pair-a: need one value per --pair-p");
            for (std::size_t i = 0; i < o.pair_p.size(); ++i)
                spec.pair_factors.push_back(
                    {s.read<Jet>("--pair-p", o.pair_p[i]), s.read<Jet>("--pair-q", o.pair_q[i]), pa[i], pb[i]});
        }
        if (!o.ham.empty()) {
            HamPart h{s.read<Jet>("--ham", o.ham), std::vector<int>(spec.real_factors.size() + spec.pair_factors.size(), 0)};
            if (!o.exponents.empty()) {
                auto ex = detail::rational_list("--exponents", o.exponents);
                if (ex.size() != h.exponents.size()) throw UsageError("--exponents: need one per factor");
                for (std::size_t i = 0; i < ex.size(); ++i) {
                    if (ex[i].get_den() != 1 || sgn(ex[i]) < 0) throw UsageError("--exponents: need non-negative integers");
                    h.exponents[i] = static_cast<int>(ex[i].get_num().get_si());
                }
            }
            spec.ham = h;
        }
        MeromorphicForm m = log_synthesize(spec);
        r.add("numerator", Object(m.numerator));
        r.add("denominator", Object(m.denominator));
        r.add("closed", is_closed(m));
    } else if (o.op == "residues") {
        FormJet num = form("--form", o.form);
        MeromorphicForm m(num, s.read<Jet>("--den", o.den));
        std::vector<Jet> fs;
        for (const auto& f : o.factors) fs.push_back(s.read<Jet>("--factor", f));
        r.add("residues", residue_extract(m, fs));
    } else { // separatrix
        FormJet w = form("--form", o.form);
        if (o.direction.empty()) throw UsageError("missing --direction");
        SeparatrixSearch res = separatrix_search(w, detail::rational_list("--direction", o.direction),
                                                 o.upto.value_or(w.reliable()));
        if (res.curve) {
            r.add("curve", Object(*res.curve));
            r.add("solved_to", static_cast<long>(res.solved_to));
        } else {
            r.add("curve", std::string("none"));
            r.add("obstruction_order", static_cast<long>(res.obstruction_order));
        }
    }
    return r;
}

inline void emit(std::ostream& out, const std::string& fmt, const std::string& command, const std::string& op,
                 const Report& r)
{
    if (fmt == "json") {
        Json result = Json::object();
        for (const auto& [k, v] : r.entries) result[k] = detail::render_json(v);
        Json doc = {{"format", kFormatVersion}, {"command", command}, {"op", op}, {"result", result}};
        out << doc.dump(2) << "\n";
        return;
    }
    out << "# formal-cli format=" << kFormatVersion << " command=" << command << " op=" << op << "\n";
    for (const auto& [k, v] : r.entries) out << detail::render_text(k, v);
}

inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Exact formal power series toolkit", "formal"};
    app.require_subcommand(1, 1);
    Options o;
    std::map<std::string, std::string> ops;

    auto common = [&](CLI::App* sub, std::vector<std::string> allowed, std::string def) {
        std::string& op = ops[sub->get_name()] = def;
        sub->add_option("--op", op, "operation")->check(CLI::IsMember(allowed));
        sub->add_option("--dim", o.dim, "ambient dimension (checked against the inputs)");
        sub->add_option("--trunc", o.trunc, "truncation order (checked against the inputs)");
        sub->add_option("--out", o.out, "output encoding")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--upto", o.upto, "order bound");
    };

    CLI::App* jet = app.add_subcommand("jet", "jet arithmetic");
    common(jet, {"canonical", "add", "mul", "diff", "integrate", "pow", "invert", "divide", "gcd", "compose"}, "canonical");
    jet->add_option("--a", o.a, "jet literal or @file");
    jet->add_option("--b", o.b, "jet literal or @file");
    jet->add_option("--arg", o.args, "argument jets for compose, in variable order");
    jet->add_option("--var", o.var, "1-based variable index");
    jet->add_option("--k", o.k, "exponent");

    CLI::App* field = app.add_subcommand("field", "vector fields and diffeomorphisms");
    common(field, {"canonical", "bracket", "apply", "linear", "order", "pushforward", "inverse", "compose", "bochner"},
           "canonical");
    field->add_option("--x", o.x, "vector field literal");
    field->add_option("--y", o.y, "vector field literal");
    field->add_option("--f", o.f, "jet literal");
    field->add_option("--phi", o.phi, "diffeo literal");
    field->add_option("--psi", o.psi, "diffeo literal");
    field->add_option("--period", o.period, "period for bochner");

    CLI::App* res = app.add_subcommand("resonance", "resonance lattices");
    common(res, {"set", "nonresonant", "fiber"}, "set");
    res->add_option("--lambda", o.lambda, "comma-separated eigenvalues");
    res->add_option("--mu", o.mu, "target value");
    res->add_option("--bound", o.bound, "bound on each coordinate");
    res->add_option("--p", o.p, "fiber p");
    res->add_option("--q", o.q, "fiber q");

    CLI::App* norm = app.add_subcommand("normalize", "normal forms");
    common(norm, {"normalize"}, "normalize");
    norm->add_option("--field", o.field, "vector field literal");
    norm->add_option("--mode", o.mode, "dulac or linearize")->check(CLI::IsMember({"dulac", "linearize"}));

    CLI::App* alg = app.add_subcommand("algebra", "Lie algebras of fields");
    common(alg, {"closure", "rank", "saturate", "nilpotent", "classify", "first-integral"}, "closure");
    alg->add_option("--gens", o.gens, "file with one vector field literal per line");

    CLI::App* forms = app.add_subcommand("forms", "differential forms");
    common(forms, {"d", "wedge", "contract", "dual", "integrable", "pullback", "logsynth", "residues", "separatrix"}, "d");
    forms->add_option("--form", o.form, "form literal");
    forms->add_option("--form2", o.form2, "second form literal");
    forms->add_option("--field", o.field, "vector field literal");
    forms->add_option("--map", o.maps, "target coordinate jets for pullback");
    forms->add_option("--factor", o.factors, "factor jets");
    forms->add_option("--residues", o.residues, "comma-separated residues for logsynth");
    forms->add_option("--pair-p", o.pair_p, "pair factor P");
    forms->add_option("--pair-q", o.pair_q, "pair factor Q");
    forms->add_option("--pair-a", o.pair_a, "comma-separated a coefficients");
    forms->add_option("--pair-b", o.pair_b, "comma-separated b coefficients");
    forms->add_option("--ham", o.ham, "exact part numerator H");
    forms->add_option("--exponents", o.exponents, "comma-separated denominator exponents of the exact part");
    forms->add_option("--den", o.den, "denominator jet");
    forms->add_option("--direction", o.direction, "comma-separated tangent direction");

    try {
        if (argv.empty()) throw UsageError("no arguments");
        std::vector<std::string> rev(argv.rbegin(), argv.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    detail::Session s{o.dim, o.trunc};
    o.op = ops[command];
    try {
        Report r;
        if (sub == jet) r = run_jet(o, s);
        else if (sub == field) r = run_field(o, s);
        else if (sub == res) r = run_resonance(o, s);
        else if (sub == norm) r = run_normalize(o, s);
        else if (sub == alg) r = run_algebra(o, s);
        else r = run_forms(o, s);
        emit(out, o.out, command, o.op, r);
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << "\n";
        return 2;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace formal::cli
