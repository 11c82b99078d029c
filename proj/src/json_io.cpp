#include "ttrace/json_io.hpp"

#include <Eigen/Eigenvalues>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

namespace ttrace {

namespace {

std::string trimmed(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Cursor {
    const std::string& s;
    size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool match(const char* word) {
        skip();
        size_t n = std::strlen(word);
        if (s.compare(i, n, word) == 0) {
            i += n;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        throw std::invalid_argument("symbol expression: expected " + expected + " at position " +
                                    std::to_string(i) + " in \"" + s + "\"");
    }
    double number(const char* what) {
        skip();
        const char* begin = s.c_str() + i;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail(what);
        i += static_cast<size_t>(end - begin);
        return v;
    }
    long integer(const char* what) {
        double v = number(what);
        long n = std::lround(v);
        if (std::abs(v - n) > 1e-9) fail(what);
        return n;
    }
};

// a | a+bi | a-bi | bi | i | -i
cd parse_complex(Cursor& c) {
    c.skip();
    if (c.eat('i')) return cd(0.0, 1.0);
    if (c.s.compare(c.i, 2, "-i") == 0) {
        c.i += 2;
        return cd(0.0, -1.0);
    }
    double first = c.number("coefficient value");
    if (c.peek() == 'i') {
        ++c.i;
        return cd(0.0, first);
    }
    if (c.peek() == '+' || c.peek() == '-') {
        size_t save = c.i;
        double second = c.number("imaginary part");
        if (c.peek() == 'i') {
            ++c.i;
            return cd(first, second);
        }
        c.i = save;  // the sign starts the next term; not ours
    }
    return cd(first, 0.0);
}

// Signed sum of coeff*z^k terms, ascending coefficient vector out.
std::vector<cd> parse_poly(Cursor& c) {
    std::vector<cd> coef;
    auto add = [&](long k, double v) {
        if (static_cast<long>(coef.size()) <= k) coef.resize(k + 1, cd(0, 0));
        coef[k] += v;
    };
    bool first = true;
    for (;;) {
        c.skip();
        double sign = 1.0;
        if (c.eat('+')) {
        } else if (c.eat('-')) {
            sign = -1.0;
        } else if (!first) {
            break;
        }
        c.skip();
        double v = 1.0;
        bool have_num = false;
        char ch = c.peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            v = c.number("coefficient");
            have_num = true;
        }
        bool star = have_num && c.eat('*');
        if (c.peek() == 'z') {
            ++c.i;
            long k = 1;
            if (c.eat('^')) {
                k = c.integer("nonnegative integer exponent");
                if (k < 0) c.fail("nonnegative integer exponent");
            }
            add(k, sign * v);
        } else if (star || !have_num) {
            c.fail("polynomial term");
        } else {
            add(0, sign * v);
        }
        first = false;
    }
    while (coef.size() > 1 && std::abs(coef.back()) == 0.0) coef.pop_back();
    bool all_zero = true;
    for (const cd& v : coef)
        if (std::abs(v) != 0.0) all_zero = false;
    if (coef.empty() || all_zero) c.fail("nonzero polynomial");
    return coef;
}

using Factors = std::vector<std::pair<cd, int>>;

struct Product {
    cd scalar{1.0, 0.0};
    long twist = 0;
    std::vector<std::pair<std::vector<cd>, long>> polys;        // signed integer exponents
    std::optional<std::pair<std::vector<cd>, double>> frac;     // one fractional power
    std::optional<std::map<int, cd>> coeffs;
};

void parse_factor(Cursor& c, Product& out, int dir) {
    c.skip();
    if (c.match("coeffs{")) {
        std::map<int, cd> mp;
        if (!c.eat('}')) {
            for (;;) {
                long n = c.integer("coefficient index");
                if (!c.eat(':')) c.fail("':'");
                mp[static_cast<int>(n)] += parse_complex(c);
                if (c.eat(',')) continue;
                if (c.eat('}')) break;
                c.fail("',' or '}'");
            }
        }
        bool all_zero = true;
        for (const auto& [n, v] : mp)
            if (std::abs(v) != 0.0) all_zero = false;
        if (mp.empty() || all_zero) c.fail("a nonzero coefficient list");
        if (out.coeffs) c.fail("a single coeffs{...} factor");
        out.coeffs = std::move(mp);
        return;
    }
    if (c.peek() == 'z') {
        ++c.i;
        long e = 1;
        if (c.eat('^')) e = c.integer("integer exponent");
        out.twist += dir * e;
        return;
    }
    if (c.eat('(')) {
        auto poly = parse_poly(c);
        if (!c.eat(')')) c.fail("')'");
        double e = 1.0;
        if (c.eat('^')) e = c.number("exponent");
        long ei = std::lround(e);
        if (std::abs(e - ei) <= 1e-9) {
            if (ei != 0) out.polys.emplace_back(std::move(poly), dir * ei);
        } else {
            if (dir < 0) c.fail("a fractional power outside a denominator");
            if (out.frac) c.fail("a single fractional-power factor");
            out.frac = {std::move(poly), e};
        }
        return;
    }
    double v = c.number("a factor (z, parenthesized polynomial, coeffs{...}, or number)");
    if (dir > 0) {
        out.scalar *= v;
    } else {
        if (v == 0.0) c.fail("a nonzero divisor");
        out.scalar /= v;
    }
}

Product parse_product(Cursor& c) {
    Product prod;
    parse_factor(c, prod, +1);
    for (;;) {
        if (c.eat('*')) {
            parse_factor(c, prod, +1);
        } else if (c.eat('/')) {
            parse_factor(c, prod, -1);
        } else {
            break;
        }
    }
    if (!c.done()) c.fail("'*', '/' or end of input");
    return prod;
}

// Roots of the ascending-coefficient polynomial via its companion matrix,
// clustered so repeated roots come back with their multiplicity instead of
// as an eigenvalue splatter.
Factors clustered_roots(const std::vector<cd>& coef) {
    int d = static_cast<int>(coef.size()) - 1;
    if (d <= 0) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) C(i + 1, i) = cd(1.0, 0.0);
    for (int i = 0; i < d; ++i) C(i, d - 1) = -coef[i] / coef[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(C);
    if (ces.info() != Eigen::Success)
        throw std::runtime_error("polynomial root solve failed");

    std::vector<cd> roots(ces.eigenvalues().data(), ces.eigenvalues().data() + d);
    std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    Factors out;
    std::vector<cd> sums;
    for (cd r : roots) {
        bool merged = false;
        for (size_t k = 0; k < out.size(); ++k) {
            cd centroid = sums[k] / static_cast<double>(out[k].second);
            if (std::abs(r - centroid) < 1e-6 * (1.0 + std::abs(r))) {
                sums[k] += r;
                ++out[k].second;
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back({r, 1});
            sums.push_back(r);
        }
    }
    for (size_t k = 0; k < out.size(); ++k) {
        cd r = sums[k] / static_cast<double>(out[k].second);
        if (std::abs(r.imag()) < 1e-10 * (1.0 + std::abs(r.real()))) r = cd(r.real(), 0.0);
        double mod = std::abs(r);
        if (mod > 0.0 && std::abs(mod - 1.0) < 1e-8) r /= mod;  // exact circle zeros
        out[k].first = r;
    }
    return out;
}

void merge_into(Factors& acc, const Factors& add) {
    for (const auto& [r, m] : add) {
        bool merged = false;
        for (auto& [q, k] : acc)
            if (std::abs(q - r) < 1e-9 * (1.0 + std::abs(r))) {
                k += m;
                merged = true;
                break;
            }
        if (!merged) acc.push_back({r, m});
    }
}

FourierSymbol assemble(const Product& p, int degree) {
    if (p.coeffs) {
        if (p.twist != 0 || !p.polys.empty() || p.frac || p.scalar != cd(1.0, 0.0))
            throw std::invalid_argument("symbol expression: coeffs{...} must stand alone");
        return from_coefficients(*p.coeffs);
    }
    if (p.frac) {
        if (!p.polys.empty() || std::abs(p.scalar - cd(1.0, 0.0)) > 1e-12)
            throw std::invalid_argument(
                "symbol expression: a fractional power combines only with a z^n prefactor");
        const auto& poly = p.frac->first;
        bool is_one_plus_z = poly.size() == 2 && std::abs(poly[0] - cd(1, 0)) <= 1e-12 &&
                             std::abs(poly[1] - cd(1, 0)) <= 1e-12;
        if (!is_one_plus_z)
            throw std::invalid_argument(
                "symbol expression: fractional exponents are only supported on (1 + z)");
        double alpha = p.frac->second;
        if (alpha <= 0.0)
            throw std::invalid_argument("symbol expression: fractional exponent must be positive");
        return from_family(
            std::make_shared<TwistedPowerFamily>(static_cast<int>(p.twist), alpha), degree);
    }
    if (p.polys.empty()) {
        if (std::abs(p.scalar) == 0.0)
            throw std::invalid_argument("symbol expression: the zero symbol is not allowed");
        return from_coefficients({{static_cast<int>(p.twist), p.scalar}});
    }

    cd scale = p.scalar;
    Factors zeros, poles;
    if (p.twist > 0) zeros.push_back({cd(0, 0), static_cast<int>(p.twist)});
    if (p.twist < 0) poles.push_back({cd(0, 0), static_cast<int>(-p.twist)});
    for (const auto& [poly, e] : p.polys) {
        auto roots = clustered_roots(poly);
        cd lead = poly.back();
        long mult = std::labs(e);
        cd lead_pow = std::pow(lead, static_cast<double>(mult));
        Factors scaled;
        for (const auto& [r, m] : roots) scaled.push_back({r, static_cast<int>(m * mult)});
        if (e > 0) {
            scale *= lead_pow;
            merge_into(zeros, scaled);
        } else {
            scale /= lead_pow;
            merge_into(poles, scaled);
        }
    }
    // cancel shared zero/pole locations
    for (auto& [z, mz] : zeros)
        for (auto& [q, mq] : poles)
            if (mz > 0 && mq > 0 && std::abs(z - q) < 1e-9 * (1.0 + std::abs(z))) {
                int k = std::min(mz, mq);
                mz -= k;
                mq -= k;
            }
    auto drop_spent = [](Factors& v) {
        v.erase(std::remove_if(v.begin(), v.end(), [](const auto& e) { return e.second == 0; }),
                v.end());
    };
    drop_spent(zeros);
    drop_spent(poles);
    for (const auto& [q, m] : poles)
        if (std::abs(std::abs(q) - 1.0) < 1e-9)
            throw std::invalid_argument("symbol expression: pole on the unit circle");

    if (zeros.empty() && poles.empty()) return from_coefficients({{0, scale}});
    int eff = degree;
    bool pole_only_at_zero = true;
    int p0 = 0;
    for (const auto& [q, m] : poles) {
        if (std::abs(q) == 0.0)
            p0 += m;
        else
            pole_only_at_zero = false;
    }
    if (pole_only_at_zero) {  // z^{-p0} * polynomial: Fourier support is exact
        int zm = 0;
        for (const auto& [z, m] : zeros) zm += m;
        eff = std::max(p0, zm - p0);
    }
    return from_family(std::make_shared<RationalFamily>(scale, zeros, poles),
                       std::max(eff, 1));
}

cd read_complex(const json& v) {
    if (v.is_number()) return cd(v.get<double>(), 0.0);
    if (v.is_array() && (v.size() == 1 || v.size() == 2)) {
        double re = v[0].get<double>();
        double im = v.size() == 2 ? v[1].get<double>() : 0.0;
        return cd(re, im);
    }
    throw std::invalid_argument("complex values are numbers or [re, im] pairs");
}

json write_complex(cd v) { return json::array({v.real(), v.imag()}); }

Factors read_factors(const json& v, const char* what) {
    if (!v.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    Factors out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument(std::string(what) + " entries are [[re, im], mult]");
        out.push_back({read_complex(e[0]), e[1].get<int>()});
    }
    return out;
}

json write_factors(const Factors& v) {
    json out = json::array();
    for (const auto& [r, m] : v) out.push_back(json::array({write_complex(r), m}));
    return out;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx) {
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw std::invalid_argument(std::string("unknown ") + ctx + " key: " + k);
    }
}

}  // namespace

FourierSymbol parse_symbol_expression(const std::string& text, int degree) {
    if (degree < 1 || degree > 1 << 18)
        throw std::invalid_argument("symbol truncation degree out of range");
    try {
        Cursor c{text};
        return assemble(parse_product(c), degree);
    } catch (const std::invalid_argument& primary) {
        // retry as a bare polynomial so "1+z" needs no parentheses
        try {
            Cursor c{text};
            auto poly = parse_poly(c);
            if (!c.done()) throw primary;
            Product p;
            p.polys.emplace_back(std::move(poly), 1L);
            return assemble(p, degree);
        } catch (const std::invalid_argument&) {
            throw primary;
        }
    }
}

FourierSymbol symbol_from_json(const json& j, int degree) {
    if (!j.is_object()) throw std::invalid_argument("symbol JSON must be an object");
    require_keys(j, {"coeffs", "family", "degree"}, "symbol");
    int deg = j.contains("degree") ? j.at("degree").get<int>() : degree;
    if (deg < 1 || deg > 1 << 18) throw std::invalid_argument("symbol degree out of range");
    if (j.contains("coeffs") == j.contains("family"))
        throw std::invalid_argument("symbol JSON needs exactly one of coeffs / family");
    if (j.contains("coeffs")) {
        const json& cj = j.at("coeffs");
        if (!cj.is_object()) throw std::invalid_argument("coeffs must map index -> value");
        std::map<int, cd> mp;
        for (const auto& [k, v] : cj.items()) {
            size_t used = 0;
            int n = std::stoi(k, &used);
            if (used != k.size()) throw std::invalid_argument("coefficient index: " + k);
            mp[n] = read_complex(v);
        }
        if (mp.empty()) throw std::invalid_argument("coeffs must be nonempty");
        return from_coefficients(mp);
    }
    const json& fj = j.at("family");
    if (!fj.is_object() || !fj.contains("kind"))
        throw std::invalid_argument("family needs a kind");
    std::string kind = fj.at("kind").get<std::string>();
    if (kind == "rational") {
        require_keys(fj, {"kind", "scale", "zeros", "poles"}, "rational family");
        cd scale = fj.contains("scale") ? read_complex(fj.at("scale")) : cd(1, 0);
        Factors zeros, poles;
        if (fj.contains("zeros")) zeros = read_factors(fj.at("zeros"), "zeros");
        if (fj.contains("poles")) poles = read_factors(fj.at("poles"), "poles");
        return from_family(std::make_shared<RationalFamily>(scale, zeros, poles), deg);
    }
    if (kind == "twisted_power") {
        require_keys(fj, {"kind", "n", "alpha"}, "twisted_power family");
        return from_family(std::make_shared<TwistedPowerFamily>(fj.at("n").get<int>(),
                                                                fj.at("alpha").get<double>()),
                           deg);
    }
    if (kind == "log_power") {
        require_keys(fj, {"kind", "alpha", "C", "reciprocal"}, "log_power family");
        return from_family(
            std::make_shared<LogPowerFamily>(fj.at("alpha").get<double>(),
                                             fj.at("C").get<double>(),
                                             fj.at("reciprocal").get<bool>()),
            deg);
    }
    if (kind == "shift_sum") {
        require_keys(fj, {"kind", "n"}, "shift_sum family");
        return from_family(std::make_shared<ShiftSumFamily>(fj.at("n").get<int>()), deg);
    }
    if (kind == "shift_plus") {
        require_keys(fj, {"kind", "a"}, "shift_plus family");
        return from_family(std::make_shared<ShiftPlusFamily>(fj.at("a").get<double>()), deg);
    }
    throw std::invalid_argument("unknown family kind: " + kind);
}

json symbol_to_json(const FourierSymbol& f) {
    json j;
    if (f.has_family()) {
        const Family* fam = f.family();
        json fj;
        fj["kind"] = fam->variant();
        if (const auto* r = dynamic_cast<const RationalFamily*>(fam)) {
            fj["scale"] = write_complex(r->scale());
            fj["zeros"] = write_factors(r->zeros());
            fj["poles"] = write_factors(r->poles());
        } else if (const auto* t = dynamic_cast<const TwistedPowerFamily*>(fam)) {
            fj["n"] = t->twist();
            fj["alpha"] = t->alpha();
        } else if (const auto* l = dynamic_cast<const LogPowerFamily*>(fam)) {
            fj["alpha"] = l->alpha();
            fj["C"] = l->C();
            fj["reciprocal"] = l->reciprocal();
        } else if (const auto* ss = dynamic_cast<const ShiftSumFamily*>(fam)) {
            fj["n"] = ss->n();
        } else if (const auto* sp = dynamic_cast<const ShiftPlusFamily*>(fam)) {
            fj["a"] = sp->a();
        } else {
            throw std::logic_error("unserializable family variant: " + fam->variant());
        }
        j["family"] = fj;
        j["degree"] = f.degree();
    } else {
        json cj = json::object();
        for (int n = -f.degree(); n <= f.degree(); ++n) {
            cd c = f.coeff(n);
            if (std::abs(c) != 0.0) cj[std::to_string(n)] = write_complex(c);
        }
        j["coeffs"] = cj;
    }
    return j;
}

FourierSymbol symbol_from_spec(const json& spec, int degree) {
    if (spec.is_object()) return symbol_from_json(spec, degree);
    if (spec.is_string()) {
        std::string s = trimmed(spec.get<std::string>());
        if (s.empty()) throw std::invalid_argument("empty symbol spec");
        if (s[0] == '@') {
            std::ifstream in(s.substr(1));
            if (!in) throw std::invalid_argument("cannot read symbol file: " + s.substr(1));
            json j = json::parse(in);
            return symbol_from_json(j, degree);
        }
        if (s[0] == '{') return symbol_from_json(json::parse(s), degree);
        return parse_symbol_expression(s, degree);
    }
    throw std::invalid_argument("symbol spec must be a string or a JSON object");
}

ScalarFunction parse_scalar_function(const std::string& text) {
    std::string s = trimmed(text);
    if (s.empty()) throw std::invalid_argument("empty function spec");
    if (s == "x") return ScalarFunction::polynomial({0.0, 1.0});

    auto one_arg = [&](const char* head) -> std::optional<double> {
        size_t n = std::strlen(head);
        if (s.compare(0, n, head) != 0 || s.back() != ')') return std::nullopt;
        std::string body = s.substr(n, s.size() - n - 1);
        size_t used = 0;
        double v = std::stod(body, &used);
        if (trimmed(body.substr(used)).size())
            throw std::invalid_argument("bad function argument: " + s);
        return v;
    };
    if (auto q = one_arg("power(")) {
        if (*q <= 0.0) throw std::invalid_argument("power exponent must be positive");
        return ScalarFunction::power(*q);
    }
    if (auto v = one_arg("exp_heat(")) {
        if (*v <= 0.0) throw std::invalid_argument("heat parameter must be positive");
        return ScalarFunction::exp_heat(*v);
    }
    if (auto v = one_arg("resolvent(")) {
        if (*v <= 0.0) throw std::invalid_argument("resolvent shift must be positive");
        return ScalarFunction::resolvent(*v);
    }
    if (s.rfind("poly{", 0) == 0 && s.back() == '}') {
        std::string body = s.substr(5, s.size() - 6);
        std::vector<double> coeffs;
        size_t pos = 0;
        while (pos < body.size()) {
            size_t used = 0;
            coeffs.push_back(std::stod(body.substr(pos), &used));
            pos += used;
            while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
            if (pos < body.size()) {
                if (body[pos] != ',') throw std::invalid_argument("bad poly{...} spec: " + s);
                ++pos;
            }
        }
        if (coeffs.empty()) throw std::invalid_argument("poly{...} needs coefficients");
        return ScalarFunction::polynomial(coeffs);
    }
    if (s.rfind("x^", 0) == 0) {
        size_t used = 0;
        double q = std::stod(s.substr(2), &used);
        if (used != s.size() - 2) throw std::invalid_argument("bad exponent in: " + s);
        long k = std::lround(q);
        if (std::abs(q - k) <= 1e-12 && k >= 0 && k <= 60) {
            std::vector<double> coeffs(k + 1, 0.0);
            coeffs[k] = 1.0;
            return ScalarFunction::polynomial(coeffs);
        }
        if (q <= 0.0) throw std::invalid_argument("power exponent must be positive");
        return ScalarFunction::power(q);
    }
    throw std::invalid_argument(
        "unrecognized function spec \"" + s +
        "\"; known forms: x, x^k, power(q), exp_heat(s), resolvent(lambda), poly{c0,c1,...}");
}

json settings_to_json(const QuadratureSettings& s) {
    json j;
    j["circle_nodes"] = s.circle_nodes;
    j["rings"] = s.rings;
    j["eps0_fraction"] = s.eps0_fraction;
    j["pv_levels"] = s.pv_levels;
    return j;
}

QuadratureSettings settings_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    require_keys(j, {"circle_nodes", "rings", "eps0_fraction", "pv_levels"}, "config");
    QuadratureSettings s;
    if (j.contains("circle_nodes")) s.circle_nodes = j.at("circle_nodes").get<int>();
    if (j.contains("rings")) s.rings = j.at("rings").get<int>();
    if (j.contains("eps0_fraction")) s.eps0_fraction = j.at("eps0_fraction").get<double>();
    if (j.contains("pv_levels")) s.pv_levels = j.at("pv_levels").get<int>();
    if (s.circle_nodes < 16 || s.rings < 1 || s.pv_levels < 1 || s.pv_levels > 48 ||
        !(s.eps0_fraction > 0.0 && s.eps0_fraction < 1.0))
        throw std::invalid_argument("config values out of range");
    return s;
}

json jobspec_to_json(const JobSpec& job) {
    json j;
    j["command"] = job.command;
    if (!job.symbol.is_null()) j["symbol"] = job.symbol;
    if (!job.phi.empty()) j["phi"] = job.phi;
    if (!job.example.empty()) j["example"] = job.example;
    if (job.command == "dump-matrix") j["which"] = job.which;
    if (job.command == "ssf") j["route"] = job.route;
    if (!job.s_list.empty()) j["s"] = job.s_list;
    if (job.p) j["p"] = *job.p;
    if (job.n) j["n"] = *job.n;
    if (job.m) j["m"] = *job.m;
    if (job.a) j["a"] = *job.a;
    if (!job.h.empty()) j["h"] = job.h;
    if (job.grid != 0) j["grid"] = job.grid;
    j["degree"] = job.degree;
    j["size"] = job.size;
    j["seed"] = job.seed;
    j["format"] = job.format;
    if (!job.out.empty()) j["out"] = job.out;
    j["config"] = settings_to_json(job.settings);
    return j;
}

JobSpec jobspec_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("job spec must be a JSON object");
    JobSpec out;
    for (const auto& [k, v] : j.items()) {
        if (k == "command") {
            out.command = v.get<std::string>();
        } else if (k == "symbol") {
            out.symbol = v;
        } else if (k == "phi") {
            out.phi = v.get<std::string>();
        } else if (k == "example") {
            out.example = v.get<std::string>();
        } else if (k == "which") {
            out.which = v.get<std::string>();
        } else if (k == "route") {
            out.route = v.get<std::string>();
        } else if (k == "s") {
            if (v.is_array())
                out.s_list = v.get<std::vector<double>>();
            else
                out.s_list = {v.get<double>()};
        } else if (k == "p") {
            out.p = v.get<double>();
        } else if (k == "n") {
            out.n = v.get<int>();
        } else if (k == "m") {
            out.m = v.get<int>();
        } else if (k == "a") {
            out.a = v.get<double>();
        } else if (k == "h") {
            out.h = v.get<std::string>();
        } else if (k == "grid") {
            out.grid = v.get<int>();
        } else if (k == "degree") {
            out.degree = v.get<int>();
        } else if (k == "size") {
            out.size = v.get<int>();
        } else if (k == "seed") {
            out.seed = v.get<long>();
        } else if (k == "format") {
            out.format = v.get<std::string>();
        } else if (k == "out") {
            out.out = v.get<std::string>();
        } else if (k == "config") {
            out.settings = settings_from_json(v);
        } else {
            throw std::invalid_argument("unknown job key: " + k);
        }
    }
    if (out.command.empty()) throw std::invalid_argument("job spec missing command");
    return out;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace ttrace
