#include "expid/exppoly.hpp"

#include <algorithm>
#include <sstream>

namespace expid {

ExpPoly ExpPoly::from_poly(const SparsePoly& f) {
    ExpPoly out(f.num_vars());
    if (!f.is_zero()) {
        out.terms_.push_back(ExpTerm{f, SparsePoly(f.num_vars()),
                                     SparsePoly::constant(f.num_vars(), 1)});
    }
    return out;
}

ExpPoly ExpPoly::single(SparsePoly f, SparsePoly g, SparsePoly h) {
    ExpPoly out(f.num_vars());
    out.append(ExpTerm{std::move(f), std::move(g), std::move(h)});
    return out;
}

void ExpPoly::append(ExpTerm term) {
    if (term.f.num_vars() != num_vars_ || term.g.num_vars() != num_vars_ ||
        term.h.num_vars() != num_vars_) {
        throw VarCountMismatch("ExpTerm variable count does not match ExpPoly");
    }
    terms_.push_back(std::move(term));
}

ExpPoly::Metrics ExpPoly::metrics() const {
    Metrics m;
    m.width = terms_.size();
    m.weight = 0;
    for (const ExpTerm& t : terms_) {
        m.degree = std::max({m.degree, t.f.degree(), t.g.degree(), t.h.degree()});
        for (const SparsePoly* p : {&t.f, &t.g, &t.h}) {
            mpz_class w = p->weight();
            if (w > m.weight) {
                m.weight = w;
            }
        }
    }
    return m;
}

bool ExpPoly::has_zero_denominator() const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const ExpTerm& t) { return t.h.is_zero(); });
}

ExpPoly ExpPoly::condense() const {
    if (has_zero_denominator()) {
        throw EmptyDomainError("condense: a term has the zero polynomial as denominator");
    }
    struct Group {
        std::size_t representative;
        SparsePoly coefficient_sum;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const ExpTerm& t = terms_[i];
        bool placed = false;
        for (Group& group : groups) {
            const ExpTerm& rep = terms_[group.representative];
            // Same exponent fraction iff g_i*h_rep - g_rep*h_i is the zero
            // polynomial; transitive because all h are nonzero.
            if ((t.g * rep.h - rep.g * t.h).is_zero()) {
                group.coefficient_sum = group.coefficient_sum + t.f;
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back(Group{i, t.f});
        }
    }
    ExpPoly out(num_vars_);
    for (const Group& group : groups) {
        if (!group.coefficient_sum.is_zero()) {
            const ExpTerm& rep = terms_[group.representative];
            out.terms_.push_back(ExpTerm{group.coefficient_sum, rep.g, rep.h});
        }
    }
    return out;
}

std::optional<std::uint64_t> ExpPoly::eval_finite(const std::vector<std::uint64_t>& u,
                                                  const std::vector<std::uint64_t>& v,
                                                  const FieldParams& params) const {
    if (u.size() != num_vars_ || v.size() != num_vars_) {
        throw ArityMismatch("eval_finite: point length does not match variable count");
    }
    const std::uint64_t p = params.p;
    const std::uint64_t q = params.q;
    std::uint64_t sum = 0;
    for (const ExpTerm& t : terms_) {
        const std::uint64_t hv = t.h.eval_mod(v, q);
        if (hv == 0) {
            return std::nullopt;
        }
        const std::uint64_t gv = t.g.eval_mod(v, q);
        const std::uint64_t exponent = mod_mul(gv, mod_inv(hv, q), q);
        const std::uint64_t coeff = t.f.eval_mod(u, p);
        sum = (sum + mod_mul(coeff, mod_pow(params.a, exponent, p), p)) % p;
    }
    return sum;
}

SignClass ExpPoly::rational_sign_class(const std::vector<mpz_class>& point) const {
    if (point.size() != num_vars_) {
        throw ArityMismatch("rational_sign_class: point length does not match variable count");
    }
    struct Group {
        mpz_class g_value;
        mpz_class h_value;
        mpz_class coefficient_sum;
    };
    std::vector<Group> groups;
    for (const ExpTerm& t : terms_) {
        mpz_class hx = t.h.eval_int(point);
        if (hx == 0) {
            return SignClass::Undefined;
        }
        mpz_class gx = t.g.eval_int(point);
        mpz_class fx = t.f.eval_int(point);
        bool placed = false;
        for (Group& group : groups) {
            if (gx * group.h_value == group.g_value * hx) {
                group.coefficient_sum += fx;
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back(Group{std::move(gx), std::move(hx), std::move(fx)});
        }
    }
    // Lindemann-Weierstrass: exponentials of distinct rationals are linearly
    // independent, so the value is zero iff every group cancels.
    for (const Group& group : groups) {
        if (group.coefficient_sum != 0) {
            return SignClass::NonZero;
        }
    }
    return SignClass::Zero;
}

bool ExpPoly::is_trivial_poly() const {
    const SparsePoly one = SparsePoly::constant(num_vars_, 1);
    return std::all_of(terms_.begin(), terms_.end(), [&](const ExpTerm& t) {
        return t.g.is_zero() && t.h == one;
    });
}

SparsePoly ExpPoly::to_sparse_poly() const {
    if (!is_trivial_poly()) {
        throw PreconditionViolation("to_sparse_poly: exponent fractions are not all 0/1");
    }
    SparsePoly sum(num_vars_);
    for (const ExpTerm& t : terms_) {
        sum = sum + t.f;
    }
    return sum;
}

bool ExpPoly::operator==(const ExpPoly& other) const {
    if (num_vars_ != other.num_vars_ || terms_.size() != other.terms_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!(terms_[i].f == other.terms_[i].f) || !(terms_[i].g == other.terms_[i].g) ||
            !(terms_[i].h == other.terms_[i].h)) {
            return false;
        }
    }
    return true;
}

std::string ExpPoly::to_string() const {
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream out;
    bool first = true;
    for (const ExpTerm& t : terms_) {
        if (!first) {
            out << " + ";
        }
        first = false;
        out << "[" << t.f.to_string() << "] * EXP( [" << t.g.to_string() << "] / ["
            << t.h.to_string() << "] )";
    }
    return out.str();
}

ExpPoly ExpPoly::parse(const std::string& text, std::uint32_t num_vars) {
    ExpPoly out(num_vars);
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            ++pos;
        }
    };
    auto expect = [&](const std::string& token) {
        skip_ws();
        if (text.compare(pos, token.size(), token) != 0) {
            throw PolyParseError("expected '" + token + "' at offset " + std::to_string(pos));
        }
        pos += token.size();
    };
    auto bracketed = [&]() -> std::string {
        expect("[");
        const std::size_t close = text.find(']', pos);
        if (close == std::string::npos) {
            throw PolyParseError("unterminated '[' in exponential polynomial");
        }
        std::string inner = text.substr(pos, close - pos);
        pos = close + 1;
        return inner;
    };
    skip_ws();
    if (text.compare(pos, 1, "0") == 0 && pos + 1 >= text.size()) {
        return out;
    }
    for (;;) {
        SparsePoly f = SparsePoly::parse(bracketed(), num_vars);
        expect("*");
        expect("EXP(");
        SparsePoly g = SparsePoly::parse(bracketed(), num_vars);
        expect("/");
        SparsePoly h = SparsePoly::parse(bracketed(), num_vars);
        expect(")");
        out.append(ExpTerm{std::move(f), std::move(g), std::move(h)});
        skip_ws();
        if (pos >= text.size()) {
            break;
        }
        expect("+");
    }
    return out;
}

ExpPoly ep_add(const ExpPoly& a, const ExpPoly& b) {
    if (a.num_vars() != b.num_vars()) {
        throw VarCountMismatch("ep_add: variable counts differ");
    }
    ExpPoly out(a.num_vars());
    for (const ExpTerm& t : a.terms()) {
        out.append(t);
    }
    for (const ExpTerm& t : b.terms()) {
        out.append(t);
    }
    return out;
}

ExpPoly ep_mul(const ExpPoly& a, const ExpPoly& b) {
    if (a.num_vars() != b.num_vars()) {
        throw VarCountMismatch("ep_mul: variable counts differ");
    }
    ExpPoly out(a.num_vars());
    for (const ExpTerm& s : a.terms()) {
        for (const ExpTerm& t : b.terms()) {
            out.append(ExpTerm{s.f * t.f, s.g * t.h + t.g * s.h, s.h * t.h});
        }
    }
    return out;
}

} // namespace expid
