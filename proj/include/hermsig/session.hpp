#pragma once

#include "hermsig/spectra.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hermsig {

using Json = nlohmann::ordered_json;

/// Parse or schema error at a position of the session text.
struct ParseError : Error {
    ParseError(std::size_t line, std::size_t column, const std::string& msg)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line),
          column(column)
    {
    }
    std::size_t line, column;
};

// ---------------------------------------------------------------------------
// Element expressions
// ---------------------------------------------------------------------------

/// Parses sums and products of rationals, the field generator and the units
/// i, j, k of the coefficient ring, with parentheses and integer powers.
/// Errors carry the character offset inside the expression.
class ExprParser {
public:
    struct Failure : Error {
        Failure(std::size_t offset, const std::string& msg) : Error(msg), offset(offset) {}
        std::size_t offset;
    };

    ExprParser(std::string_view text, RingPtr ring) : s_(text), ring_(std::move(ring)) {}

    Scalar parse()
    {
        Scalar v = sum();
        skip();
        if (pos_ != s_.size()) throw Failure(pos_, "unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    Scalar constant(const Rational& r) const { return Scalar(ring_, FieldElement(ring_->field, r)); }

    Scalar sum()
    {
        Scalar v = product();
        while (true) {
            if (eat('+')) v = v + product();
            else if (eat('-')) v = v - product();
            else return v;
        }
    }
    Scalar product()
    {
        Scalar v = unary();
        while (true) {
            skip();
            const std::size_t at = pos_;
            if (eat('*')) {
                v = v * unary();
            } else if (eat('/')) {
                const Scalar d = unary();
                if (!d.is_invertible()) throw Failure(at, "division by a non-invertible element");
                v = v * d.inverse();
            } else {
                return v;
            }
        }
    }
    Scalar unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    Scalar power()
    {
        Scalar base = atom();
        if (!eat('^')) return base;
        skip();
        const std::size_t at = pos_;
        bool neg = eat('-');
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw Failure(at, "expected an integer exponent");
        const long e = std::stol(std::string(s_.substr(start, pos_ - start)));
        if (e > 64) throw Failure(at, "exponent too large");
        Scalar r = constant(1);
        for (long k = 0; k < e; ++k) r = r * base;
        if (neg) {
            if (!r.is_invertible()) throw Failure(at, "negative power of a non-invertible element");
            r = r.inverse();
        }
        return r;
    }
    Scalar atom()
    {
        skip();
        if (pos_ >= s_.size()) throw Failure(pos_, "unexpected end of expression");
        const std::size_t at = pos_;
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Scalar v = sum();
            if (!eat(')')) throw Failure(pos_, "expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            try {
                return constant(parse_rational(s_.substr(at, pos_ - at)));
            } catch (const Error& e) {
                throw Failure(at, e.what());
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name(s_.substr(at, pos_ - at));
            if (name == ring_->field->var()) return Scalar(ring_, FieldElement::generator(ring_->field));
            const int unit = name == "i" ? 1 : name == "j" ? 2 : name == "k" ? 3 : 0;
            if (unit > 0 && unit < ring_->dim) return Scalar::basis(ring_, unit);
            throw Failure(at, "unknown symbol '" + name + "'");
        }
        throw Failure(at, "unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    RingPtr ring_;
    std::size_t pos_ = 0;
};

inline std::string format_field(const FieldElement& f) { return f.as_polynomial().to_string(f.field()->var()); }

/// Re-parseable rendering such as "1 + (x + 1)*i - 2*k".
inline std::string format_scalar(const Scalar& s)
{
    static const char* units[] = {"", "i", "j", "k"};
    const int dim = s.ring()->dim;
    if (dim == 1) return format_field(s[0]);
    std::string out;
    for (int u = 0; u < dim; ++u) {
        if (s[u].is_zero()) continue;
        std::string c = format_field(s[u]);
        std::string term;
        if (u == 0) term = c;
        else if (c == "1") term = units[u];
        else if (c == "-1") term = std::string("-") + units[u];
        else if (s[u].is_rational()) term = c + "*" + units[u];
        else term = "(" + c + ")*" + units[u];
        if (!out.empty()) {
            if (term[0] == '-') out += " - " + term.substr(1);
            else out += " + " + term;
        } else {
            out = term;
        }
    }
    return out.empty() ? "0" : out;
}

inline Json format_element(const AlgebraElement& m)
{
    if (m.rows() == 1 && m.cols() == 1) return format_scalar(m(0, 0));
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(format_scalar(m(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Json format_table(const SignatureTable& t)
{
    Json out = Json::array();
    for (const auto& e : t) out.push_back(Json{{"ordering", e.ordering.id()}, {"value", e.value}});
    return out;
}

inline Json format_orderings(const std::vector<Ordering>& os)
{
    Json out = Json::array();
    for (const auto& o : os) out.push_back(o.id());
    return out;
}

// ---------------------------------------------------------------------------
// Source positions of JSON values
// ---------------------------------------------------------------------------

namespace detail {

/// Maps JSON pointers ("/commands/2/form") to byte offsets of the values in
/// a text that is already known to be valid JSON.
class JsonLocator {
public:
    explicit JsonLocator(std::string_view text) : s_(text)
    {
        skip();
        value("");
    }

    std::size_t offset(const std::string& pointer) const
    {
        std::string p = pointer;
        while (true) {
            auto it = at_.find(p);
            if (it != at_.end()) return it->second;
            const auto cut = p.rfind('/');
            if (cut == std::string::npos) return 0;
            p = p.substr(0, cut);
        }
    }

    std::pair<std::size_t, std::size_t> line_column(std::size_t offset) const
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < offset && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    std::string string_token()
    {
        std::string out;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') ++pos_;
            out += s_[pos_++];
        }
        ++pos_;
        return out;
    }
    static std::string escape(const std::string& key)
    {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }
    void value(const std::string& pointer)
    {
        at_[pointer] = pos_;
        const char c = s_[pos_];
        if (c == '{') {
            ++pos_;
            skip();
            if (s_[pos_] == '}') {
                ++pos_;
                return;
            }
            while (true) {
                skip();
                const std::string key = string_token();
                skip();
                ++pos_;  // ':'
                skip();
                value(pointer + "/" + escape(key));
                skip();
                if (s_[pos_++] == '}') return;
            }
        } else if (c == '[') {
            ++pos_;
            skip();
            if (s_[pos_] == ']') {
                ++pos_;
                return;
            }
            for (std::size_t i = 0;; ++i) {
                skip();
                value(pointer + "/" + std::to_string(i));
                skip();
                if (s_[pos_++] == ']') return;
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < s_.size() && !std::strchr(",]} \t\r\n", s_[pos_])) ++pos_;
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::map<std::string, std::size_t> at_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Session documents
// ---------------------------------------------------------------------------

using FormValue = std::variant<QuadraticForm, HermitianForm>;

struct RunOptions {
    int search_height = 3;
    int search_terms = 6;
};

class RunContext;

struct BoundCommand {
    std::string op;
    std::function<Json(RunContext&)> run;
};

struct SessionDocument {
    FieldPtr field;
    std::uint64_t seed = 1;
    std::vector<std::pair<std::string, FieldPtr>> extensions;
    std::vector<std::pair<std::string, AlgebraPtr>> algebras;
    std::vector<std::pair<std::string, FormValue>> forms;
    Json algebra_decls = Json::array();
    Json form_decls = Json::array();
    Json command_decls = Json::array();
    std::vector<BoundCommand> commands;

    template <class T>
    static const T* find(const std::vector<std::pair<std::string, T>>& v, const std::string& name)
    {
        for (const auto& [k, x] : v)
            if (k == name) return &x;
        return nullptr;
    }
};

/// Per-run state: reference forms are computed once per algebra.
class RunContext {
public:
    RunContext(const SessionDocument& doc, RunOptions opts) : doc_(doc), opts_(opts) {}

    const SessionDocument& doc() const { return doc_; }
    const RunOptions& options() const { return opts_; }
    std::size_t index = 0;

    const ReferenceForm& reference(const AlgebraPtr& alg)
    {
        for (const auto& [a, eta] : refs_)
            if (a.get() == alg.get()) return eta;
        refs_.emplace_back(alg, reference_form(alg));
        return refs_.back().second;
    }
    Rng rng() const { return Rng(doc_.seed + 1000003ULL * index); }

private:
    const SessionDocument& doc_;
    RunOptions opts_;
    std::vector<std::pair<AlgebraPtr, ReferenceForm>> refs_;
};

namespace detail {

/// Schema walker with positioned errors.
class SessionParser {
public:
    explicit SessionParser(std::string_view text) : text_(text), loc_(text) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& msg, std::size_t extra = 0) const
    {
        const auto [line, col] = loc_.line_column(loc_.offset(pointer) + extra);
        throw ParseError(line, col, msg + (pointer.empty() ? "" : " (at " + pointer + ")"));
    }

    void allow_keys(const Json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const
    {
        if (!obj.is_object()) fail(ptr, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* k : keys)
                if (it.key() == k) ok = true;
            if (!ok) fail(ptr + "/" + it.key(), "unknown key '" + it.key() + "'");
        }
    }

    const Json& need(const Json& obj, const std::string& ptr, const char* key) const
    {
        if (!obj.contains(key)) fail(ptr, std::string("missing key '") + key + "'");
        return obj.at(key);
    }

    std::string string_at(const Json& v, const std::string& ptr) const
    {
        if (!v.is_string()) fail(ptr, "expected a string");
        return v.get<std::string>();
    }

    Rational rational_at(const Json& v, const std::string& ptr) const
    {
        if (v.is_number_integer()) return Rational(v.dump());
        if (v.is_number_float()) fail(ptr, "write non-integer numbers as exact strings such as \"1/3\" or \"0.25\"");
        try {
            return parse_rational(string_at(v, ptr));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ptr, e.what());
        }
    }

    long integer_at(const Json& v, const std::string& ptr) const
    {
        if (!v.is_number_integer()) fail(ptr, "expected an integer");
        return v.get<long>();
    }

    FieldPtr field_decl(const Json& v, const std::string& ptr) const
    {
        allow_keys(v, ptr, {"min_poly", "var"});
        const Json& mp = need(v, ptr, "min_poly");
        if (!mp.is_array() || mp.empty()) fail(ptr + "/min_poly", "expected a coefficient list, constant term first");
        std::vector<Rational> c;
        for (std::size_t i = 0; i < mp.size(); ++i) c.push_back(rational_at(mp[i], ptr + "/min_poly/" + std::to_string(i)));
        const std::string var = v.contains("var") ? string_at(v["var"], ptr + "/var") : "x";
        if (var.empty() || !std::isalpha(static_cast<unsigned char>(var[0])) || var == "i" || var == "j" || var == "k")
            fail(ptr + "/var", "variable must be an identifier other than i, j, k");
        for (char ch : var)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') fail(ptr + "/var", "variable must be an identifier");
        const Polynomial m(c);
        if (m.degree() < 1) fail(ptr + "/min_poly", "minimal polynomial must have degree at least 1");
        if (m.coeff(m.degree()) != 1) fail(ptr + "/min_poly", "minimal polynomial must be monic");
        try {
            return NumberField::create(m, var);
        } catch (const Error& e) {
            fail(ptr + "/min_poly", e.what());
        }
    }

    Scalar expr_at(const Json& v, const std::string& ptr, const RingPtr& ring) const
    {
        std::string text;
        std::size_t shift = 0;
        if (v.is_number_integer()) text = v.dump();
        else if (v.is_string()) {
            text = v.get<std::string>();
            shift = 1;
        } else {
            fail(ptr, "expected an element expression");
        }
        try {
            return ExprParser(text, ring).parse();
        } catch (const ExprParser::Failure& f) {
            fail(ptr, std::string("in expression: ") + f.what(), shift + f.offset);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ptr, std::string("in expression: ") + e.what());
        }
    }

    FieldElement field_expr_at(const Json& v, const std::string& ptr, const FieldPtr& f) const
    {
        return expr_at(v, ptr, Algebra::split_orth(f, 1)->ring())[0];
    }

    AlgebraElement element_at(const Json& v, const std::string& ptr, const AlgebraPtr& alg) const
    {
        const std::size_t n = alg->n();
        AlgebraElement m = alg->zero();
        if (n == 1 && !v.is_array()) {
            m(0, 0) = expr_at(v, ptr, alg->ring());
            return m;
        }
        if (!v.is_array() || v.size() != n) fail(ptr, "expected a " + std::to_string(n) + " x " + std::to_string(n) + " matrix");
        for (std::size_t i = 0; i < n; ++i) {
            const std::string rp = ptr + "/" + std::to_string(i);
            if (!v[i].is_array() || v[i].size() != n) fail(rp, "expected a row of length " + std::to_string(n));
            for (std::size_t j = 0; j < n; ++j) m(i, j) = expr_at(v[i][j], rp + "/" + std::to_string(j), alg->ring());
        }
        return m;
    }

    std::string_view text_;
    JsonLocator loc_;
};

}  // namespace detail

namespace detail {

/// Binds one command: resolves names and parses expressions now, computes later.
class CommandBinder {
public:
    CommandBinder(const SessionParser& p, const SessionDocument& doc, const Json& cmd, std::string ptr)
        : p_(p), doc_(doc), cmd_(cmd), ptr_(std::move(ptr))
    {
    }

    const Json& arg(const char* key) const { return p_.need(cmd_, ptr_, key); }
    bool has(const char* key) const { return cmd_.contains(key); }
    std::string at(const char* key) const { return ptr_ + "/" + key; }

    AlgebraPtr algebra(const char* key = "algebra") const
    {
        const std::string name = p_.string_at(arg(key), at(key));
        const AlgebraPtr* a = SessionDocument::find(doc_.algebras, name);
        if (!a) p_.fail(at(key), "unresolved algebra '" + name + "'");
        return *a;
    }

    FormValue form(const char* key = "form") const
    {
        const std::string name = p_.string_at(arg(key), at(key));
        const FormValue* f = SessionDocument::find(doc_.forms, name);
        if (!f) p_.fail(at(key), "unresolved form '" + name + "'");
        return *f;
    }

    HermitianForm hermitian(const char* key = "form") const { return hermitian_at(arg(key), at(key)); }

    HermitianForm hermitian_at(const Json& v, const std::string& ptr) const
    {
        const std::string name = p_.string_at(v, ptr);
        const FormValue* f = SessionDocument::find(doc_.forms, name);
        if (!f) p_.fail(ptr, "unresolved form '" + name + "'");
        if (!std::holds_alternative<HermitianForm>(*f)) p_.fail(ptr, "expected a hermitian form");
        return std::get<HermitianForm>(*f);
    }

    QuadraticForm quadratic(const char* key) const
    {
        const FormValue f = form(key);
        if (!std::holds_alternative<QuadraticForm>(f)) p_.fail(at(key), "expected a quadratic form");
        return std::get<QuadraticForm>(f);
    }

    Ordering ordering(const char* key = "ordering", const FieldPtr& f = nullptr) const
    {
        const FieldPtr& field = f ? f : doc_.field;
        return ordering_at(arg(key), at(key), field);
    }

    Ordering ordering_at(const Json& v, const std::string& ptr, const FieldPtr& field) const
    {
        const std::string id = p_.string_at(v, ptr);
        const auto& os = field->orderings();
        if (id.size() >= 2 && id[0] == 'P' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) {
            const std::size_t k = std::stoul(id.substr(1));
            if (k >= 1 && k <= os.size()) return os[k - 1];
        }
        p_.fail(ptr, "unknown ordering '" + id + "' (the field has " + std::to_string(os.size()) + ")");
    }

    std::pair<Ordering, int> cone(const char* key = "cone") const
    {
        const std::string id = p_.string_at(arg(key), at(key));
        if (id.size() < 3 || (id.back() != '+' && id.back() != '-')) p_.fail(at(key), "cone must look like P1+ or P1-");
        return {ordering_at(Json(id.substr(0, id.size() - 1)), at(key), doc_.field), id.back() == '+' ? 1 : -1};
    }

    FieldPtr extension(const char* key = "extension") const
    {
        const std::string name = p_.string_at(arg(key), at(key));
        const FieldPtr* l = SessionDocument::find(doc_.extensions, name);
        if (!l) p_.fail(at(key), "unresolved extension '" + name + "'");
        return *l;
    }

    AlgebraElement element(const char* key, const AlgebraPtr& alg) const { return p_.element_at(arg(key), at(key), alg); }

    std::vector<FieldElement> field_list(const char* key) const
    {
        std::vector<FieldElement> out;
        if (!has(key)) return out;
        const Json& v = cmd_.at(key);
        if (!v.is_array()) p_.fail(at(key), "expected a list");
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(p_.field_expr_at(v[i], at(key) + "/" + std::to_string(i), doc_.field));
        return out;
    }

    long integer(const char* key, long fallback) const { return has(key) ? p_.integer_at(cmd_.at(key), at(key)) : fallback; }

    void allow(std::initializer_list<const char*> keys) const { p_.allow_keys(cmd_, ptr_, keys); }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const { p_.fail(ptr_ + "/" + key, msg); }

    const SessionParser& parser() const { return p_; }
    const Json& raw() const { return cmd_; }

private:
    const SessionParser& p_;
    const SessionDocument& doc_;
    const Json& cmd_;
    std::string ptr_;
};

inline Json form_signature_table(const FormValue& f, RunContext& ctx)
{
    if (const auto* q = std::get_if<QuadraticForm>(&f)) return format_table(total_signature(*q));
    const auto& h = std::get<HermitianForm>(f);
    return format_table(signature_table(h, ctx.reference(h.algebra())));
}

inline Json format_diagonal(const HermitianForm& h)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < h.rank(); ++i) out.push_back(format_element(h.block(i, i)));
    return out;
}

inline Json format_reference(const ReferenceForm& eta)
{
    return Json{{"eta", format_diagonal(eta.eta)}, {"raw_signatures", format_table(eta.certificate)}};
}

inline PositiveCone cone_for(RunContext& ctx, const AlgebraPtr& alg, const std::pair<Ordering, int>& c)
{
    return make_cone(alg, c.first, c.second, ctx.reference(alg));
}

inline Json format_certificate(const SquareCertificate& c)
{
    Json terms = Json::array();
    for (const auto& t : c.terms)
        terms.push_back(Json{{"slot", t.slot}, {"weight", format_field(t.weight)}, {"x", format_element(t.x)}});
    return Json{{"k", c.k}, {"terms", terms}};
}

inline std::vector<AlgebraElement> element_list(const CommandBinder& b, const char* key, const AlgebraPtr& alg)
{
    std::vector<AlgebraElement> out;
    if (!b.has(key)) return out;
    const Json& v = b.raw().at(key);
    if (!v.is_array()) b.fail(key, "expected a list of elements");
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(b.parser().element_at(v[i], b.at(key) + "/" + std::to_string(i), alg));
    return out;
}

inline std::function<Json(RunContext&)> bind_command(const std::string& op, const CommandBinder& b)
{
    if (op == "orderings") {
        b.allow({"op"});
        return [](RunContext& ctx) {
            Json list = Json::array();
            for (const auto& o : ctx.doc().field->orderings()) {
                Json e{{"id", o.id()}, {"interval", Json::array({to_string(o.lo()), to_string(o.hi())})}};
                if (o.exact_root()) e["root"] = to_string(*o.exact_root());
                list.push_back(std::move(e));
            }
            return Json{{"min_poly", ctx.doc().field->min_poly().to_string(ctx.doc().field->var())}, {"orderings", list}};
        };
    }
    if (op == "sign") {
        b.allow({"op", "form", "ordering"});
        const FormValue f = b.form();
        const Ordering p = b.ordering();
        return [f, p](RunContext& ctx) {
            Json out{{"ordering", p.id()}};
            if (const auto* q = std::get_if<QuadraticForm>(&f)) {
                out["signature"] = signature_q(*q, p);
            } else {
                const auto& h = std::get<HermitianForm>(f);
                const auto& eta = ctx.reference(h.algebra());
                out["signature"] = signature(h, p, eta);
                out["nil"] = h.algebra()->is_nil(p);
                out["reference"] = format_diagonal(eta.eta);
            }
            return out;
        };
    }
    if (op == "total-sign") {
        b.allow({"op", "form"});
        const FormValue f = b.form();
        return [f](RunContext& ctx) { return Json{{"table", form_signature_table(f, ctx)}}; };
    }
    if (op == "nil") {
        b.allow({"op", "algebra"});
        const AlgebraPtr alg = b.algebra();
        return [alg](RunContext&) {
            return Json{{"algebra", alg->to_string()},
                        {"nil", format_orderings(alg->nil_orderings())},
                        {"non_nil", format_orderings(alg->tilde_orderings())}};
        };
    }
    if (op == "torsion") {
        b.allow({"op", "form"});
        const FormValue f = b.form();
        return [f](RunContext& ctx) {
            if (const auto* q = std::get_if<QuadraticForm>(&f)) return Json{{"torsion", torsion_test_q(*q)}};
            const auto& h = std::get<HermitianForm>(f);
            return Json{{"torsion", torsion_test_h(h, ctx.reference(h.algebra()))}};
        };
    }
    if (op == "transfer-check") {
        b.allow({"op", "algebra", "extension", "diagonal"});
        const AlgebraPtr base = b.algebra();
        const FieldPtr l = b.extension();
        if (base->field()->degree() != 1) b.fail("algebra", "transfer needs an algebra over Q");
        AlgebraPtr al;
        try {
            al = base->over(l);
        } catch (const Error& e) {
            b.fail("extension", e.what());
        }
        const Json& d = b.arg("diagonal");
        if (!d.is_array() || d.empty()) b.fail("diagonal", "expected a nonempty list of elements");
        std::vector<AlgebraElement> entries;
        for (std::size_t i = 0; i < d.size(); ++i)
            entries.push_back(b.parser().element_at(d[i], b.at("diagonal") + "/" + std::to_string(i), al));
        std::optional<HermitianForm> h;
        try {
            h = HermitianForm::diagonal(al, entries);
        } catch (const Error& e) {
            b.fail("diagonal", e.what());
        }
        return [base, h = *h](RunContext& ctx) {
            const auto r = knebusch_check(h, ctx.reference(base));
            return Json{{"transfer_side", r.transfer_side}, {"sum_side", r.sum_side}, {"holds", r.holds()}};
        };
    }
    if (op == "going-up") {
        b.allow({"op", "form", "extension"});
        const FormValue f = b.form();
        const FieldPtr l = b.extension();
        return [f, l](RunContext& ctx) {
            const FieldPtr& base = ctx.doc().field;
            if (base->degree() != 1) throw Error("going up needs the base field Q");
            Json rows = Json::array();
            bool holds = true;
            if (const auto* q = std::get_if<QuadraticForm>(&f)) {
                std::vector<FieldElement> e;
                for (const auto& x : q->entries()) e.push_back(FieldElement(l, x.rational_part()));
                const QuadraticForm ql(l, e);
                const int below = signature_q(*q, base->orderings().at(0));
                for (const auto& o : l->orderings()) {
                    const int v = signature_q(ql, o);
                    holds = holds && v == below;
                    rows.push_back(Json{{"ordering", o.id()}, {"restricts_to", "P1"}, {"value", v}, {"below", below}});
                }
            } else {
                const auto& h = std::get<HermitianForm>(f);
                const auto& eta = ctx.reference(h.algebra());
                const HermitianForm hl = going_up(h, l);
                const ReferenceForm etal = going_up(eta, l);
                const int below = signature(h, base->orderings().at(0), eta);
                for (const auto& o : l->orderings()) {
                    const int v = signature(hl, o, etal);
                    holds = holds && v == below;
                    rows.push_back(Json{{"ordering", o.id()}, {"restricts_to", "P1"}, {"value", v}, {"below", below}});
                }
            }
            return Json{{"extension", l->min_poly().to_string(l->var())}, {"table", rows}, {"holds", holds}};
        };
    }
    if (op == "reference-form") {
        b.allow({"op", "algebra"});
        const AlgebraPtr alg = b.algebra();
        return [alg](RunContext& ctx) { return format_reference(ctx.reference(alg)); };
    }
    if (op == "cones") {
        b.allow({"op", "algebra"});
        const AlgebraPtr alg = b.algebra();
        return [alg](RunContext& ctx) {
            Json ids = Json::array();
            for (const auto& c : enumerate_positive_cones(alg, ctx.reference(alg))) ids.push_back(c.id());
            return Json{{"cones", ids}, {"count", ids.size()}, {"non_nil_orderings", alg->tilde_orderings().size()}};
        };
    }
    if (op == "cone-member") {
        b.allow({"op", "algebra", "element", "cone"});
        const AlgebraPtr alg = b.algebra();
        const AlgebraElement a = b.element("element", alg);
        const auto c = b.cone();
        return [alg, a, c](RunContext& ctx) {
            const PositiveCone cone = cone_for(ctx, alg, c);
            const Membership m = cone_membership_detail(a, cone);
            Json out{{"cone", cone.id()}, {"member", m.member}};
            if (!m.member && !m.witness.empty()) {
                Json w = Json::array();
                for (const auto& s : m.witness) w.push_back(format_scalar(s));
                out["witness"] = w;
                out["value"] = format_scalar(*m.value);
            }
            return out;
        };
    }
    if (op == "eta-max") {
        b.allow({"op", "algebra", "element", "ordering"});
        const AlgebraPtr alg = b.algebra();
        const AlgebraElement a = b.element("element", alg);
        const Ordering p = b.ordering();
        return [alg, a, p](RunContext& ctx) {
            const auto& eta = ctx.reference(alg);
            return Json{{"ordering", p.id()},
                        {"eta_maximal", eta_maximal(a, p, eta)},
                        {"signature", alg->is_nil(p) ? 0 : signature(rank_one(alg, a), p, eta)},
                        {"maximum", max_rank_one_signature(*alg)}};
        };
    }
    if (op == "sos-find" || op == "sos-verify") {
        if (op == "sos-find") b.allow({"op", "algebra", "u", "a", "b"});
        else b.allow({"op", "algebra", "u", "a", "b", "certificate"});
        const AlgebraPtr alg = b.algebra();
        const AlgebraElement u = b.element("u", alg);
        const AlgebraElement a = b.has("a") ? b.element("a", alg) : alg->one();
        const SosParameters params{a, b.field_list("b")};
        if (op == "sos-find") {
            return [alg, u, params](RunContext& ctx) {
                const SearchBounds bounds{ctx.options().search_height, ctx.options().search_terms};
                const SosResult r = find_sos_certificate(alg, u, params, ctx.reference(alg), bounds);
                Json out;
                switch (r.kind) {
                case SosResult::Kind::Certificate:
                    out["kind"] = "certificate";
                    out["certificate"] = format_certificate(*r.certificate);
                    out["verified"] = verify_certificate(alg, u, params, *r.certificate);
                    break;
                case SosResult::Kind::Refuted: {
                    out["kind"] = "refuted";
                    const auto& ref = *r.refutation;
                    out["ordering"] = ref.ordering.id();
                    out["orientation"] = ref.orientation;
                    Json w = Json::array();
                    for (const auto& s : ref.witness) w.push_back(format_scalar(s));
                    out["witness"] = w;
                    if (ref.value) out["value"] = format_scalar(*ref.value);
                    break;
                }
                default:
                    out["kind"] = "unknown";
                    out["note"] = r.note;
                }
                return out;
            };
        }
        const Json& cj = b.arg("certificate");
        const std::string cp = b.at("certificate");
        b.parser().allow_keys(cj, cp, {"k", "terms"});
        SquareCertificate cert;
        cert.k = static_cast<std::size_t>(cj.contains("k") ? b.parser().integer_at(cj["k"], cp + "/k") : 1);
        const Json& terms = b.parser().need(cj, cp, "terms");
        if (!terms.is_array()) b.parser().fail(cp + "/terms", "expected a list of terms");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string tp = cp + "/terms/" + std::to_string(i);
            b.parser().allow_keys(terms[i], tp, {"slot", "weight", "x"});
            CertificateTerm t;
            const long slot = b.parser().integer_at(b.parser().need(terms[i], tp, "slot"), tp + "/slot");
            if (slot < 0) b.parser().fail(tp + "/slot", "slot must be nonnegative");
            t.slot = static_cast<std::size_t>(slot);
            t.weight = terms[i].contains("weight") ? b.parser().field_expr_at(terms[i]["weight"], tp + "/weight", alg->field())
                                                   : FieldElement(alg->field(), 1);
            t.x = b.parser().element_at(b.parser().need(terms[i], tp, "x"), tp + "/x", alg);
            cert.terms.push_back(std::move(t));
        }
        return [alg, u, params, cert](RunContext&) {
            std::string why;
            const bool ok = verify_certificate(alg, u, params, cert, &why);
            Json out{{"valid", ok}};
            if (!ok) out["reason"] = why;
            return out;
        };
    }
    if (op == "positivity") {
        b.allow({"op", "algebra"});
        const AlgebraPtr alg = b.algebra();
        return [alg](RunContext&) {
            const auto s = positivity_sets(alg);
            return Json{{"x_sigma", format_orderings(s.x_sigma)},
                        {"non_nil", format_orderings(s.tilde)},
                        {"field_orderings", format_orderings(alg->field()->orderings())},
                        {"ps_prime", s.ps_prime},
                        {"formally_real", formally_real(*alg)}};
        };
    }
    if (op == "ideals") {
        b.allow({"op", "algebra", "kind", "ordering", "p", "quadratic", "form", "trials", "generators", "closed"});
        const AlgebraPtr alg = b.algebra();
        const std::string kind = b.parser().string_at(b.arg("kind"), b.at("kind"));
        if (kind != "signature" && kind != "mod-p" && kind != "fundamental")
            b.fail("kind", "kind must be signature, mod-p or fundamental");
        std::optional<Ordering> p;
        if (kind != "fundamental") p = b.ordering();
        const long prime = b.integer("p", 0);
        if (kind == "mod-p" && (prime < 3 || prime % 2 == 0)) b.fail("p", "p must be an odd prime");
        const QuadraticForm q = b.quadratic("quadratic");
        const HermitianForm h = b.hermitian("form");
        if (!h.algebra()->same_as(*alg)) b.fail("form", "form belongs to a different algebra");
        const long trials = b.integer("trials", 20);
        std::vector<HermitianForm> gens;
        if (b.has("generators")) {
            const Json& g = b.raw().at("generators");
            if (!g.is_array()) b.fail("generators", "expected a list of form names");
            for (std::size_t i = 0; i < g.size(); ++i) {
                const std::string gp = b.at("generators") + "/" + std::to_string(i);
                gens.push_back(b.hermitian_at(g[i], gp));
                if (!gens.back().algebra()->same_as(*alg)) b.parser().fail(gp, "generator belongs to a different algebra");
            }
        }
        const bool closed = b.has("closed") ? b.raw().at("closed").get<bool>() : true;
        return [alg, kind, p, prime, q, h, trials, gens, closed](RunContext& ctx) {
            const auto& eta = ctx.reference(alg);
            const PrimeIdealPair pair = kind == "signature" ? PrimeIdealPair::signature_kernel(eta, *p)
                                        : kind == "mod-p"   ? PrimeIdealPair::mod_p_kernel(eta, *p, prime)
                                                            : PrimeIdealPair::fundamental(eta, WittSubmodule{gens, closed});
            const auto [qi, hn] = ideal_membership(q, h, pair);
            Rng rng = ctx.rng();
            const auto s = prime_property_sample(pair, static_cast<std::size_t>(trials), rng);
            Json sample{{"pass", s.pass}, {"trials", s.trials}};
            if (s.counterexample) {
                sample["violation"] = s.counterexample->kind == PrimeViolation::Kind::NotPrime ? "not prime" : "not a submodule";
                sample["trial"] = s.counterexample->trial;
                sample["q"] = s.counterexample->q.to_string();
                sample["h"] = format_diagonal(s.counterexample->h);
            }
            return Json{{"pair", pair.to_string()}, {"q_in_I", qi}, {"h_in_N", hn}, {"prime_sample", sample}};
        };
    }
    if (op == "morphisms") {
        b.allow({"op", "algebra", "first", "second"});
        const AlgebraPtr alg = b.algebra();
        const Ordering p = b.ordering("first"), q = b.ordering("second");
        return [alg, p, q](RunContext& ctx) {
            const Separation s = morphism_distinctness(p, q, ctx.reference(alg));
            Json out{{"first", p.id()},
                     {"second", q.id()},
                     {"equivalent", s.equivalent},
                     {"trivial_first", s.trivial_p},
                     {"trivial_second", s.trivial_q}};
            if (s.witness) out["witness"] = format_diagonal(*s.witness);
            if (s.q_witness) out["quadratic_witness"] = s.q_witness->to_string();
            if (!s.equivalent) {
                out["at_first"] = s.at_p;
                out["at_second"] = s.at_q;
            }
            return out;
        };
    }
    if (op == "topology") {
        b.allow({"op", "algebra", "elements"});
        const AlgebraPtr alg = b.algebra();
        const auto elems = element_list(b, "elements", alg);
        return [alg, elems](RunContext& ctx) {
            const ConeSpace s(alg, ctx.reference(alg));
            Json space = Json::array();
            for (const auto& id : s.ids(s.all())) space.push_back(id);
            Json open = Json::array();
            for (const auto& id : s.ids(s.basic_open(elems))) open.push_back(id);
            return Json{{"space", space},
                        {"basic_open", open},
                        {"generators", s.generators().size()},
                        {"topologies_equal", topology_compare(s)},
                        {"t0", is_t0(s)}};
        };
    }
    if (op == "morita-check") {
        b.allow({"op", "algebra"});
        const AlgebraPtr alg = b.algebra();
        return [alg](RunContext& ctx) {
            Rng rng = ctx.rng();
            const auto& eta = ctx.reference(alg);
            const MoritaConeMap m = morita_cone_maps(alg, eta, rng);
            const auto big = enumerate_positive_cones(alg, eta);
            const auto small = alg->n() == 1 ? big : enumerate_positive_cones(alg->with_degree(1), morita_collapse(eta));
            Json match = Json::array();
            for (std::size_t i = 0; i < m.match.size(); ++i) match.push_back(Json::array({big[i].id(), small[m.match[i]].id()}));
            return Json{{"match", match},
                        {"bijective", m.bijective},
                        {"orientation_preserved", m.orientation_preserved},
                        {"round_trip", m.round_trip},
                        {"continuous", m.continuous},
                        {"open", m.open},
                        {"homeomorphism", m.homeomorphism()}};
        };
    }
    if (op == "decompose") {
        b.allow({"op", "form", "cone"});
        const HermitianForm h = b.hermitian();
        const auto c = b.cone();
        return [h, c](RunContext& ctx) {
            const AlgebraPtr& alg = h.algebra();
            const auto& eta = ctx.reference(alg);
            const HermitianForm h1 = alg->n() == 1 ? h : morita_collapse(h);
            const ReferenceForm eta1 = alg->n() == 1 ? eta : morita_collapse(eta);
            const PositiveCone cone = make_cone(h1.algebra(), c.first, c.second, eta1);
            const Decomposition d = sylvester_decompose(h1, cone);
            Json pos = Json::array(), neg = Json::array();
            for (const auto& s : d.positive) pos.push_back(format_scalar(s));
            for (const auto& s : d.negative) neg.push_back(format_scalar(s));
            const int sig = c.second * signature(h1, c.first, eta1);
            return Json{{"cone", cone.id()},
                        {"t", d.t},
                        {"n_p", d.n_p},
                        {"positive", pos},
                        {"negative", neg},
                        {"signature", d.sign()},
                        {"matches_signature", d.sign() == sig}};
        };
    }
    b.fail("op", "unknown command '" + op + "'");
}

}  // namespace detail

/// Parses and validates a session document; every error is positioned.
inline SessionDocument parse_session(std::string_view text)
{
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        const auto cut = msg.find(": ", msg.find("column"));
        if (cut != std::string::npos) msg = msg.substr(cut + 2);
        throw ParseError(line, col, "syntax error: " + msg);
    }
    detail::SessionParser p(text);
    SessionDocument doc;
    p.allow_keys(root, "", {"field", "seed", "extensions", "algebras", "forms", "commands"});
    doc.field = p.field_decl(p.need(root, "", "field"), "/field");
    if (root.contains("seed")) {
        const long seed = p.integer_at(root["seed"], "/seed");
        if (seed < 0) p.fail("/seed", "seed must be nonnegative");
        doc.seed = static_cast<std::uint64_t>(seed);
    }

    std::vector<std::string> names;
    auto claim = [&](const std::string& name, const std::string& ptr) {
        if (name.empty()) p.fail(ptr, "name must be nonempty");
        if (std::find(names.begin(), names.end(), name) != names.end()) p.fail(ptr, "duplicate name '" + name + "'");
        names.push_back(name);
    };

    if (root.contains("extensions")) {
        const Json& ex = root["extensions"];
        if (!ex.is_object()) p.fail("/extensions", "expected an object of named fields");
        if (doc.field->degree() != 1 && !ex.empty()) p.fail("/extensions", "extensions need the base field Q");
        for (auto it = ex.begin(); it != ex.end(); ++it) {
            const std::string ptr = "/extensions/" + it.key();
            claim(it.key(), ptr);
            doc.extensions.emplace_back(it.key(), p.field_decl(it.value(), ptr));
        }
    }

    if (root.contains("algebras")) {
        const Json& as = root["algebras"];
        if (!as.is_array()) p.fail("/algebras", "expected a list of algebras");
        for (std::size_t i = 0; i < as.size(); ++i) {
            const std::string ptr = "/algebras/" + std::to_string(i);
            const Json& a = as[i];
            if (!a.is_object()) p.fail(ptr, "expected an object");
            const std::string name = p.string_at(p.need(a, ptr, "name"), ptr + "/name");
            const std::string family = p.string_at(p.need(a, ptr, "family"), ptr + "/family");
            const long n = a.contains("n") ? p.integer_at(a["n"], ptr + "/n") : 1;
            if (n < 1 || n > 8) p.fail(ptr + "/n", "n must lie in 1..8");
            Json decl{{"name", name}, {"family", family}, {"n", n}};
            AlgebraPtr alg;
            try {
                if (family == "SplitOrth") {
                    p.allow_keys(a, ptr, {"name", "family", "n"});
                    alg = Algebra::split_orth(doc.field, static_cast<int>(n));
                } else if (family == "Unitary") {
                    p.allow_keys(a, ptr, {"name", "family", "n", "delta"});
                    const FieldElement d = p.field_expr_at(p.need(a, ptr, "delta"), ptr + "/delta", doc.field);
                    decl["delta"] = format_field(d);
                    try {
                        alg = Algebra::unitary(d, static_cast<int>(n));
                    } catch (const Error& e) {
                        p.fail(ptr + "/delta", e.what());
                    }
                } else if (family == "QuatSymp" || family == "QuatSkew") {
                    p.allow_keys(a, ptr, {"name", "family", "n", "a", "b"});
                    const FieldElement qa = p.field_expr_at(p.need(a, ptr, "a"), ptr + "/a", doc.field);
                    const FieldElement qb = p.field_expr_at(p.need(a, ptr, "b"), ptr + "/b", doc.field);
                    decl["a"] = format_field(qa);
                    decl["b"] = format_field(qb);
                    alg = family == "QuatSymp" ? Algebra::quat_symp(qa, qb, static_cast<int>(n))
                                               : Algebra::quat_skew(qa, qb, static_cast<int>(n));
                } else {
                    p.fail(ptr + "/family", "unknown family '" + family +
                                                "' (expected SplitOrth, Unitary, QuatSymp or QuatSkew)");
                }
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                p.fail(ptr, e.what());
            }
            claim(name, ptr + "/name");
            doc.algebras.emplace_back(name, alg);
            doc.algebra_decls.push_back(std::move(decl));
        }
    }

    if (root.contains("forms")) {
        const Json& fs = root["forms"];
        if (!fs.is_array()) p.fail("/forms", "expected a list of forms");
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string ptr = "/forms/" + std::to_string(i);
            const Json& f = fs[i];
            if (!f.is_object()) p.fail(ptr, "expected an object");
            const std::string name = p.string_at(p.need(f, ptr, "name"), ptr + "/name");
            const int kinds = f.contains("quadratic") + f.contains("diagonal") + f.contains("gram");
            if (kinds != 1) p.fail(ptr, "a form needs exactly one of quadratic, diagonal, gram");
            Json decl{{"name", name}};
            if (f.contains("quadratic")) {
                p.allow_keys(f, ptr, {"name", "quadratic"});
                const Json& q = f["quadratic"];
                if (!q.is_array()) p.fail(ptr + "/quadratic", "expected a list of field elements");
                std::vector<FieldElement> e;
                Json out = Json::array();
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const std::string ep = ptr + "/quadratic/" + std::to_string(k);
                    e.push_back(p.field_expr_at(q[k], ep, doc.field));
                    if (e.back().is_zero()) p.fail(ep, "diagonal entries of a quadratic form must be nonzero");
                    out.push_back(format_field(e.back()));
                }
                decl["quadratic"] = out;
                claim(name, ptr + "/name");
                doc.forms.emplace_back(name, QuadraticForm(doc.field, e));
            } else {
                p.allow_keys(f, ptr, {"name", "algebra", "diagonal", "gram"});
                const std::string an = p.string_at(p.need(f, ptr, "algebra"), ptr + "/algebra");
                const AlgebraPtr* alg = SessionDocument::find(doc.algebras, an);
                if (!alg) p.fail(ptr + "/algebra", "unresolved algebra '" + an + "'");
                decl["algebra"] = an;
                std::optional<HermitianForm> h;
                if (f.contains("diagonal")) {
                    const Json& d = f["diagonal"];
                    if (!d.is_array()) p.fail(ptr + "/diagonal", "expected a list of elements");
                    std::vector<AlgebraElement> e;
                    for (std::size_t k = 0; k < d.size(); ++k) {
                        const std::string ep = ptr + "/diagonal/" + std::to_string(k);
                        e.push_back(p.element_at(d[k], ep, *alg));
                        try {
                            HermitianForm::diagonal(*alg, {e.back()});
                        } catch (const Error& err) {
                            p.fail(ep, err.what());
                        }
                    }
                    h = HermitianForm::diagonal(*alg, e);
                    decl["diagonal"] = detail::format_diagonal(*h);
                } else {
                    const Json& g = f["gram"];
                    if (!g.is_array()) p.fail(ptr + "/gram", "expected a square list of rows");
                    std::vector<std::vector<AlgebraElement>> blocks;
                    for (std::size_t r = 0; r < g.size(); ++r) {
                        const std::string rp = ptr + "/gram/" + std::to_string(r);
                        if (!g[r].is_array() || g[r].size() != g.size()) p.fail(rp, "Gram matrix must be square");
                        blocks.emplace_back();
                        for (std::size_t c = 0; c < g.size(); ++c)
                            blocks.back().push_back(p.element_at(g[r][c], rp + "/" + std::to_string(c), *alg));
                    }
                    try {
                        h = HermitianForm::from_blocks(*alg, blocks);
                    } catch (const Error& err) {
                        p.fail(ptr + "/gram", err.what());
                    }
                    Json rows = Json::array();
                    for (std::size_t r = 0; r < h->rank(); ++r) {
                        Json row = Json::array();
                        for (std::size_t c = 0; c < h->rank(); ++c) row.push_back(format_element(h->block(r, c)));
                        rows.push_back(std::move(row));
                    }
                    decl["gram"] = rows;
                }
                claim(name, ptr + "/name");
                doc.forms.emplace_back(name, *h);
            }
            doc.form_decls.push_back(std::move(decl));
        }
    }

    const Json& cs = p.need(root, "", "commands");
    if (!cs.is_array()) p.fail("/commands", "expected a list of commands");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string ptr = "/commands/" + std::to_string(i);
        const Json& c = cs[i];
        if (!c.is_object()) p.fail(ptr, "expected an object");
        const std::string op = p.string_at(p.need(c, ptr, "op"), ptr + "/op");
        const detail::CommandBinder b(p, doc, c, ptr);
        doc.commands.push_back(BoundCommand{op, detail::bind_command(op, b)});
        doc.command_decls.push_back(c);
    }
    return doc;
}

/// Canonical text of a parsed document: declarations re-rendered from the
/// parsed values, commands verbatim.
inline std::string render_session(const SessionDocument& doc)
{
    auto field_json = [](const FieldPtr& f) {
        Json c = Json::array();
        for (const auto& x : f->min_poly().coeffs()) c.push_back(to_string(x));
        return Json{{"min_poly", c}, {"var", f->var()}};
    };
    Json out{{"field", field_json(doc.field)}, {"seed", doc.seed}};
    if (!doc.extensions.empty()) {
        Json ex = Json::object();
        for (const auto& [name, f] : doc.extensions) ex[name] = field_json(f);
        out["extensions"] = ex;
    }
    out["algebras"] = doc.algebra_decls;
    out["forms"] = doc.form_decls;
    out["commands"] = doc.command_decls;
    return out.dump(2) + "\n";
}

struct Report {
    Json document;
    bool ok = true;

    std::string json() const { return document.dump(2) + "\n"; }
    std::string table() const;
};

namespace detail {

inline bool is_leaf(const Json& v)
{
    if (!v.is_array()) return !v.is_object();
    return std::all_of(v.begin(), v.end(), [](const Json& e) { return !e.is_array() && !e.is_object(); });
}

inline std::string leaf_text(const Json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (!v.is_array()) return v.dump();
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + leaf_text(v[i]);
    return s + "]";
}

inline void flatten(const std::string& key, const Json& v, std::vector<std::pair<std::string, std::string>>& out)
{
    if (is_leaf(v)) {
        out.emplace_back(key, leaf_text(v));
    } else if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(key.empty() ? it.key() : key + "." + it.key(), it.value(), out);
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(key + "[" + std::to_string(i) + "]", v[i], out);
    }
}

}  // namespace detail

/// Human rendering of the same records as json().
inline std::string Report::table() const
{
    std::ostringstream os;
    os << "field " << document["field"].get<std::string>() << ", seed " << document["seed"].dump() << "\n";
    for (const auto& r : document["results"]) {
        os << "[" << r["index"].dump() << "] " << r["op"].get<std::string>() << ": " << r["status"].get<std::string>() << "\n";
        std::vector<std::pair<std::string, std::string>> rows;
        if (r.contains("error")) rows.emplace_back("error", r["error"].get<std::string>());
        else detail::flatten("", r["result"], rows);
        std::size_t w = 0;
        for (const auto& [k, v] : rows) w = std::max(w, k.size());
        for (const auto& [k, v] : rows) os << "    " << k << std::string(w - k.size() + 2, ' ') << v << "\n";
    }
    os << "status: " << (ok ? "ok" : "error") << "\n";
    return os.str();
}

/// Runs the commands in order; failures become error records carrying the
/// command index, and later commands still run.
inline Report run_session(const SessionDocument& doc, RunOptions opts = {})
{
    RunContext ctx(doc, opts);
    Report rep;
    Json results = Json::array();
    for (std::size_t i = 0; i < doc.commands.size(); ++i) {
        ctx.index = i;
        Json rec{{"index", i}, {"op", doc.commands[i].op}};
        try {
            rec["status"] = "ok";
            rec["result"] = doc.commands[i].run(ctx);
        } catch (const std::exception& e) {
            rec.erase("result");
            rec["status"] = "error";
            rec["error"] = "command " + std::to_string(i) + " (" + doc.commands[i].op + "): " + e.what();
            rep.ok = false;
        }
        results.push_back(std::move(rec));
    }
    rep.document = Json{{"field", doc.field->min_poly().to_string(doc.field->var())},
                        {"seed", doc.seed},
                        {"status", rep.ok ? "ok" : "error"},
                        {"results", results}};
    return rep;
}

}  // namespace hermsig
