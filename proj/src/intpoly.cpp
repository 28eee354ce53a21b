#include "expid/intpoly.hpp"

#include <algorithm>
#include <sstream>

#include "expid/field.hpp"

namespace expid {

Monomial Monomial::variable(std::uint32_t var, std::uint32_t exponent) {
    Monomial m;
    if (exponent > 0) {
        m.factors_.emplace_back(var, exponent);
    }
    return m;
}

std::uint64_t Monomial::total_degree() const {
    std::uint64_t d = 0;
    for (const auto& [var, exp] : factors_) {
        (void)var;
        d += exp;
    }
    return d;
}

std::uint32_t Monomial::exponent_of(std::uint32_t var) const {
    for (const auto& [v, e] : factors_) {
        if (v == var) {
            return e;
        }
    }
    return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial out;
    auto it = factors_.begin();
    auto jt = other.factors_.begin();
    while (it != factors_.end() || jt != other.factors_.end()) {
        if (jt == other.factors_.end() || (it != factors_.end() && it->first < jt->first)) {
            out.factors_.push_back(*it++);
        } else if (it == factors_.end() || jt->first < it->first) {
            out.factors_.push_back(*jt++);
        } else {
            out.factors_.emplace_back(it->first, it->second + jt->second);
            ++it;
            ++jt;
        }
    }
    return out;
}

bool GradedLexGreater::operator()(const Monomial& a, const Monomial& b) const {
    const std::uint64_t da = a.total_degree();
    const std::uint64_t db = b.total_degree();
    if (da != db) {
        return da > db;
    }
    // Equal degree: compare exponents variable by variable, smallest index
    // first; the monomial with the larger exponent there is the larger one.
    auto it = a.factors().begin();
    auto jt = b.factors().begin();
    while (it != a.factors().end() && jt != b.factors().end()) {
        if (it->first != jt->first) {
            // The side holding the smaller variable index has a positive
            // exponent where the other has zero.
            return it->first < jt->first;
        }
        if (it->second != jt->second) {
            return it->second > jt->second;
        }
        ++it;
        ++jt;
    }
    return it != a.factors().end();
}

SparsePoly SparsePoly::constant(std::uint32_t num_vars, mpz_class value) {
    SparsePoly p(num_vars);
    p.add_term(Monomial{}, value);
    return p;
}

SparsePoly SparsePoly::variable(std::uint32_t num_vars, std::uint32_t var) {
    SparsePoly p(num_vars);
    p.add_term(Monomial::variable(var), 1);
    return p;
}

void SparsePoly::add_term(const Monomial& m, const mpz_class& coefficient) {
    if (coefficient == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, coefficient);
    if (!inserted) {
        it->second += coefficient;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

void SparsePoly::require_same_vars(const SparsePoly& other) const {
    if (num_vars_ != other.num_vars_) {
        throw VarCountMismatch("polynomials over " + std::to_string(num_vars_) + " and " +
                               std::to_string(other.num_vars_) + " variables");
    }
}

SparsePoly SparsePoly::operator+(const SparsePoly& other) const {
    require_same_vars(other);
    SparsePoly out = *this;
    for (const auto& [m, c] : other.terms_) {
        out.add_term(m, c);
    }
    return out;
}

SparsePoly SparsePoly::operator-(const SparsePoly& other) const {
    require_same_vars(other);
    SparsePoly out = *this;
    for (const auto& [m, c] : other.terms_) {
        out.add_term(m, -c);
    }
    return out;
}

SparsePoly SparsePoly::operator*(const SparsePoly& other) const {
    require_same_vars(other);
    SparsePoly out(num_vars_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : other.terms_) {
            out.add_term(ma * mb, ca * cb);
        }
    }
    return out;
}

SparsePoly SparsePoly::negate() const {
    SparsePoly out(num_vars_);
    for (const auto& [m, c] : terms_) {
        out.terms_.emplace(m, -c);
    }
    return out;
}

mpz_class SparsePoly::eval_int(const std::vector<mpz_class>& point) const {
    if (point.size() != num_vars_) {
        throw ArityMismatch("eval_int: point has " + std::to_string(point.size()) +
                            " coordinates, polynomial has " + std::to_string(num_vars_));
    }
    mpz_class sum = 0;
    mpz_class term;
    mpz_class power;
    for (const auto& [m, c] : terms_) {
        term = c;
        for (const auto& [var, exp] : m.factors()) {
            mpz_pow_ui(power.get_mpz_t(), point[var].get_mpz_t(), exp);
            term *= power;
        }
        sum += term;
    }
    return sum;
}

std::uint64_t SparsePoly::eval_mod(const std::vector<std::uint64_t>& point, std::uint64_t m) const {
    if (point.size() != num_vars_) {
        throw ArityMismatch("eval_mod: point has " + std::to_string(point.size()) +
                            " coordinates, polynomial has " + std::to_string(num_vars_));
    }
    std::uint64_t sum = 0;
    for (const auto& [mono, c] : terms_) {
        // Sign-correct reduction: floor remainder is non-negative.
        std::uint64_t term = mpz_fdiv_ui(c.get_mpz_t(), m);
        for (const auto& [var, exp] : mono.factors()) {
            term = mod_mul(term, mod_pow(point[var] % m, exp, m), m);
        }
        sum = (sum + term) % m;
    }
    return sum;
}

std::uint64_t SparsePoly::degree() const {
    std::uint64_t d = 0;
    for (const auto& [m, c] : terms_) {
        (void)c;
        d = std::max(d, m.total_degree());
    }
    return d;
}

mpz_class SparsePoly::weight() const {
    mpz_class w = 0;
    for (const auto& [m, c] : terms_) {
        (void)m;
        mpz_class a = abs(c);
        if (a > w) {
            w = a;
        }
    }
    return w;
}

std::string SparsePoly::to_string() const {
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) {
            out << " + ";
        }
        first = false;
        out << c.get_str();
        for (const auto& [var, exp] : m.factors()) {
            out << "*x" << (var + 1) << "^" << exp;
        }
    }
    return out.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

SparsePoly SparsePoly::parse(const std::string& text, std::uint32_t num_vars) {
    SparsePoly out(num_vars);
    const std::string body = trim(text);
    if (body.empty()) {
        throw PolyParseError("empty polynomial text");
    }
    if (body == "0") {
        return out;
    }
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t next = body.find(" + ", pos);
        const std::string term_text =
            trim(next == std::string::npos ? body.substr(pos) : body.substr(pos, next - pos));
        pos = next == std::string::npos ? body.size() : next + 3;
        if (term_text.empty()) {
            throw PolyParseError("empty term in polynomial");
        }
        std::vector<std::string> parts;
        std::size_t fpos = 0;
        while (fpos <= term_text.size()) {
            std::size_t star = term_text.find('*', fpos);
            parts.push_back(term_text.substr(fpos, star == std::string::npos ? std::string::npos
                                                                             : star - fpos));
            if (star == std::string::npos) {
                break;
            }
            fpos = star + 1;
        }
        mpz_class coefficient;
        if (mpz_set_str(coefficient.get_mpz_t(), parts[0].c_str(), 10) != 0) {
            throw PolyParseError("bad coefficient '" + parts[0] + "'");
        }
        Monomial mono;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const std::string& f = parts[i];
            const std::size_t caret = f.find('^');
            if (f.empty() || f[0] != 'x' || caret == std::string::npos) {
                throw PolyParseError("bad factor '" + f + "'");
            }
            unsigned long var = 0;
            unsigned long exp = 0;
            try {
                var = std::stoul(f.substr(1, caret - 1));
                exp = std::stoul(f.substr(caret + 1));
            } catch (const std::exception&) {
                throw PolyParseError("bad factor '" + f + "'");
            }
            if (var == 0 || var > num_vars) {
                throw PolyParseError("variable x" + std::to_string(var) + " out of range");
            }
            if (exp == 0) {
                throw PolyParseError("explicit zero exponent in '" + f + "'");
            }
            mono = mono * Monomial::variable(static_cast<std::uint32_t>(var - 1),
                                             static_cast<std::uint32_t>(exp));
        }
        out.add_term(mono, coefficient);
    }
    return out;
}

} // namespace expid
