#include "expid/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <json.hpp>

namespace expid {

namespace {

const char* kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::Input: return "input";
        case GateKind::Const: return "const";
        case GateKind::Add: return "add";
        case GateKind::Mul: return "mul";
        case GateKind::Div: return "div";
        case GateKind::Exp: return "exp";
    }
    return "?";
}

} // namespace

ValidationResult Circuit::validate() const {
    auto fail = [](ValidationErrorKind kind, std::string message,
                   std::vector<std::uint32_t> path = {}) {
        return ValidationResult{ValidationError{kind, std::move(message), std::move(path)}};
    };

    if (!gates_.count(output_)) {
        return fail(ValidationErrorKind::DanglingReference,
                    "output gate " + std::to_string(output_) + " does not exist");
    }
    for (const auto& [id, gate] : gates_) {
        for (std::uint32_t child : gate.children) {
            if (!gates_.count(child)) {
                return fail(ValidationErrorKind::DanglingReference,
                            "gate " + std::to_string(id) + " references missing gate " +
                                std::to_string(child));
            }
        }
        const std::size_t fan_in = gate.children.size();
        bool ok = true;
        switch (gate.kind) {
            case GateKind::Input:
                ok = fan_in == 0;
                if (ok && gate.var >= num_inputs_) {
                    return fail(ValidationErrorKind::DanglingReference,
                                "gate " + std::to_string(id) + " reads input variable " +
                                    std::to_string(gate.var) + " but the circuit has " +
                                    std::to_string(num_inputs_) + " inputs");
                }
                break;
            case GateKind::Const: ok = fan_in == 0; break;
            case GateKind::Add:
            case GateKind::Mul: ok = fan_in >= 1; break;
            case GateKind::Div: ok = fan_in == 2; break;
            case GateKind::Exp: ok = fan_in == 1; break;
        }
        if (!ok) {
            return fail(ValidationErrorKind::FanInViolation,
                        std::string(kind_name(gate.kind)) + " gate " + std::to_string(id) +
                            " has fan-in " + std::to_string(fan_in));
        }
    }

    // Kahn topological pass; leftovers mean a cycle.
    std::map<std::uint32_t, std::uint32_t> pending;
    std::map<std::uint32_t, std::vector<std::uint32_t>> parents;
    std::deque<std::uint32_t> ready;
    for (const auto& [id, gate] : gates_) {
        pending[id] = static_cast<std::uint32_t>(gate.children.size());
        if (gate.children.empty()) {
            ready.push_back(id);
        }
        for (std::uint32_t child : gate.children) {
            parents[child].push_back(id);
        }
    }
    std::vector<std::uint32_t> order;
    while (!ready.empty()) {
        const std::uint32_t id = ready.front();
        ready.pop_front();
        order.push_back(id);
        auto it = parents.find(id);
        if (it == parents.end()) {
            continue;
        }
        for (std::uint32_t parent : it->second) {
            if (--pending[parent] == 0) {
                ready.push_back(parent);
            }
        }
    }
    if (order.size() != gates_.size()) {
        return fail(ValidationErrorKind::CyclicGraph, "circuit graph contains a cycle");
    }

    // Max number of Exp gates on any path ending at each node.
    std::map<std::uint32_t, std::uint32_t> exp_depth;
    for (std::uint32_t id : order) {
        const Gate& gate = gates_.at(id);
        std::uint32_t below = 0;
        for (std::uint32_t child : gate.children) {
            below = std::max(below, exp_depth[child]);
        }
        if (gate.kind == GateKind::Exp && below >= 1) {
            // Witness: walk down through a child chain that still contains an
            // Exp gate.
            std::vector<std::uint32_t> path{id};
            std::uint32_t cursor = id;
            for (;;) {
                const Gate& g = gates_.at(cursor);
                std::uint32_t next = 0;
                bool found = false;
                for (std::uint32_t child : g.children) {
                    if (exp_depth[child] >= 1) {
                        next = child;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    break;
                }
                path.push_back(next);
                cursor = next;
                if (gates_.at(cursor).kind == GateKind::Exp) {
                    break;
                }
            }
            return fail(ValidationErrorKind::NestedExponentiation,
                        "two exponentiation gates on the path through gate " + std::to_string(id),
                        std::move(path));
        }
        exp_depth[id] = below + (gate.kind == GateKind::Exp ? 1 : 0);
    }
    return ValidationResult{};
}

std::vector<std::uint32_t> Circuit::topological_order() const {
    std::map<std::uint32_t, std::uint32_t> pending;
    std::map<std::uint32_t, std::vector<std::uint32_t>> parents;
    std::deque<std::uint32_t> ready;
    for (const auto& [id, gate] : gates_) {
        pending[id] = static_cast<std::uint32_t>(gate.children.size());
        if (gate.children.empty()) {
            ready.push_back(id);
        }
        for (std::uint32_t child : gate.children) {
            parents[child].push_back(id);
        }
    }
    std::vector<std::uint32_t> order;
    while (!ready.empty()) {
        const std::uint32_t id = ready.front();
        ready.pop_front();
        order.push_back(id);
        auto it = parents.find(id);
        if (it == parents.end()) {
            continue;
        }
        for (std::uint32_t parent : it->second) {
            if (--pending[parent] == 0) {
                ready.push_back(parent);
            }
        }
    }
    if (order.size() != gates_.size()) {
        throw PreconditionViolation("topological_order: circuit graph contains a cycle");
    }
    return order;
}

std::optional<std::uint64_t> Circuit::eval_finite(const std::vector<std::uint64_t>& u,
                                                  const std::vector<std::uint64_t>& v,
                                                  const FieldParams& params) const {
    if (u.size() != num_inputs_ || v.size() != num_inputs_) {
        throw ArityMismatch("eval_finite: input vectors must have length " +
                            std::to_string(num_inputs_));
    }
    const std::uint64_t p = params.p;
    const std::uint64_t q = params.q;
    std::map<std::uint32_t, DualValue> values;

    auto divide = [](std::optional<std::uint64_t> x, std::optional<std::uint64_t> y,
                     std::uint64_t m) -> std::optional<std::uint64_t> {
        if (!x || !y || *y == 0) {
            return std::nullopt;
        }
        return mod_mul(*x, mod_inv(*y, m), m);
    };

    for (std::uint32_t id : topological_order()) {
        const Gate& gate = gates_.at(id);
        DualValue out;
        switch (gate.kind) {
            case GateKind::Input:
                out.num = u[gate.var] % p;
                out.exp = v[gate.var] % q;
                break;
            case GateKind::Const:
                out.num = mpz_fdiv_ui(gate.value.get_mpz_t(), p);
                out.exp = mpz_fdiv_ui(gate.value.get_mpz_t(), q);
                break;
            case GateKind::Add: {
                std::uint64_t sp = 0, sq = 0;
                bool dp = true, dq = true;
                for (std::uint32_t child : gate.children) {
                    const DualValue& cv = values.at(child);
                    if (cv.num) {
                        sp = (sp + *cv.num) % p;
                    } else {
                        dp = false;
                    }
                    if (cv.exp) {
                        sq = (sq + *cv.exp) % q;
                    } else {
                        dq = false;
                    }
                }
                if (dp) out.num = sp;
                if (dq) out.exp = sq;
                break;
            }
            case GateKind::Mul: {
                std::uint64_t sp = 1 % p, sq = 1 % q;
                bool dp = true, dq = true;
                for (std::uint32_t child : gate.children) {
                    const DualValue& cv = values.at(child);
                    if (cv.num) {
                        sp = mod_mul(sp, *cv.num, p);
                    } else {
                        dp = false;
                    }
                    if (cv.exp) {
                        sq = mod_mul(sq, *cv.exp, q);
                    } else {
                        dq = false;
                    }
                }
                if (dp) out.num = sp;
                if (dq) out.exp = sq;
                break;
            }
            case GateKind::Div: {
                const DualValue& x = values.at(gate.children[0]);
                const DualValue& y = values.at(gate.children[1]);
                out.num = divide(x.num, y.num, p);
                out.exp = divide(x.exp, y.exp, q);
                break;
            }
            case GateKind::Exp: {
                const DualValue& x = values.at(gate.children[0]);
                if (x.exp) {
                    // The exponent is read as an integer in {0, ..., q-1}.
                    out.num = mod_pow(params.a, *x.exp, p);
                }
                out.exp = std::nullopt;
                break;
            }
        }
        values[id] = out;
    }
    return values.at(output_).num;
}

std::optional<Circuit::Fraction> Circuit::to_fraction(std::uint64_t term_cap) const {
    std::map<std::uint32_t, Fraction> memo;
    const SparsePoly one = SparsePoly::constant(num_inputs_, 1);
    const ExpPoly one_ep = ExpPoly::from_poly(one);

    auto capped = [term_cap](const ExpPoly& p) { return p.width() > term_cap; };

    for (std::uint32_t id : topological_order()) {
        const Gate& gate = gates_.at(id);
        Fraction fr{ExpPoly(num_inputs_), ExpPoly(num_inputs_)};
        switch (gate.kind) {
            case GateKind::Input:
                fr.num = ExpPoly::from_poly(SparsePoly::variable(num_inputs_, gate.var));
                fr.den = one_ep;
                break;
            case GateKind::Const:
                fr.num = ExpPoly::from_poly(SparsePoly::constant(num_inputs_, gate.value));
                fr.den = one_ep;
                break;
            case GateKind::Add: {
                // num = sum_i P_i * prod_{j != i} P'_j; den = prod_i P'_i.
                ExpPoly num(num_inputs_);
                ExpPoly den = one_ep;
                for (std::uint32_t child : gate.children) {
                    den = ep_mul(den, memo.at(child).den);
                    if (capped(den)) {
                        return std::nullopt;
                    }
                }
                for (std::uint32_t child : gate.children) {
                    ExpPoly part = memo.at(child).num;
                    for (std::uint32_t other : gate.children) {
                        if (other == child) {
                            continue;
                        }
                        part = ep_mul(part, memo.at(other).den);
                        if (capped(part)) {
                            return std::nullopt;
                        }
                    }
                    num = ep_add(num, part);
                    if (capped(num)) {
                        return std::nullopt;
                    }
                }
                fr.num = std::move(num);
                fr.den = std::move(den);
                break;
            }
            case GateKind::Mul: {
                ExpPoly num = one_ep;
                ExpPoly den = one_ep;
                for (std::uint32_t child : gate.children) {
                    num = ep_mul(num, memo.at(child).num);
                    den = ep_mul(den, memo.at(child).den);
                    if (capped(num) || capped(den)) {
                        return std::nullopt;
                    }
                }
                fr.num = std::move(num);
                fr.den = std::move(den);
                break;
            }
            case GateKind::Div: {
                const Fraction& x = memo.at(gate.children[0]);
                const Fraction& y = memo.at(gate.children[1]);
                fr.num = ep_mul(x.num, y.den);
                fr.den = ep_mul(y.num, x.den);
                if (capped(fr.num) || capped(fr.den)) {
                    return std::nullopt;
                }
                break;
            }
            case GateKind::Exp: {
                // The subtree below an Exp gate is exponentiation-free, so its
                // fraction is a pair of plain polynomials.
                const Fraction& x = memo.at(gate.children[0]);
                fr.num = ExpPoly::single(one, x.num.to_sparse_poly(), x.den.to_sparse_poly());
                fr.den = one_ep;
                break;
            }
        }
        memo[id] = std::move(fr);
    }
    return memo.at(output_);
}

std::uint32_t CircuitBuilder::push(Gate gate) {
    const std::uint32_t id = next_id_++;
    gates_.emplace(id, std::move(gate));
    return id;
}

std::uint32_t CircuitBuilder::input(std::uint32_t var) {
    Gate g;
    g.kind = GateKind::Input;
    g.var = var;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::constant(mpz_class value) {
    Gate g;
    g.kind = GateKind::Const;
    g.value = std::move(value);
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::add(std::vector<std::uint32_t> children) {
    Gate g;
    g.kind = GateKind::Add;
    g.children = std::move(children);
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::mul(std::vector<std::uint32_t> children) {
    Gate g;
    g.kind = GateKind::Mul;
    g.children = std::move(children);
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::div(std::uint32_t numerator, std::uint32_t denominator) {
    Gate g;
    g.kind = GateKind::Div;
    g.children = {numerator, denominator};
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::exp(std::uint32_t child) {
    Gate g;
    g.kind = GateKind::Exp;
    g.children = {child};
    return push(std::move(g));
}

Circuit CircuitBuilder::build(std::uint32_t output_id) const {
    return Circuit(gates_, output_id, num_inputs_);
}

namespace {

Circuit build_softmax(std::uint32_t n, std::uint32_t coord) {
    CircuitBuilder b(n);
    std::vector<std::uint32_t> exps;
    for (std::uint32_t i = 0; i < n; ++i) {
        exps.push_back(b.exp(b.input(i)));
    }
    const std::uint32_t den = b.add(exps);
    return b.build(b.div(exps[coord], den));
}

// GLU(x, W, V)_i = (x * V)_i / (1 + exp(-(x * W)_i)) with x in R^n and
// W, V in R^(n x m). Input layout: x, then W row-major, then V row-major.
Circuit build_glu(std::uint32_t n, std::uint32_t m, std::uint32_t coord) {
    CircuitBuilder b(n + 2 * n * m);
    auto x_var = [&](std::uint32_t j) { return j; };
    auto w_var = [&](std::uint32_t j, std::uint32_t i) { return n + j * m + i; };
    auto v_var = [&](std::uint32_t j, std::uint32_t i) { return n + n * m + j * m + i; };

    std::vector<std::uint32_t> xv_terms, xw_terms;
    for (std::uint32_t j = 0; j < n; ++j) {
        xv_terms.push_back(b.mul({b.input(x_var(j)), b.input(v_var(j, coord))}));
        xw_terms.push_back(b.mul({b.input(x_var(j)), b.input(w_var(j, coord))}));
    }
    const std::uint32_t xv = b.add(xv_terms);
    const std::uint32_t xw = b.add(xw_terms);
    const std::uint32_t neg_xw = b.mul({b.constant(-1), xw});
    const std::uint32_t den = b.add({b.constant(1), b.exp(neg_xw)});
    return b.build(b.div(xv, den));
}

// Attention(Q, K, V)_(i,c) with Q in R^(m x d_k), K in R^(n x d_k),
// V in R^(n x d_v). Input layout: Q row-major, K row-major, V row-major.
Circuit build_attention(std::uint32_t m, std::uint32_t n, std::uint32_t d_k, std::uint32_t d_v,
                        std::uint32_t row, std::uint32_t col, std::uint32_t sqrt_dk) {
    CircuitBuilder b(m * d_k + n * d_k + n * d_v);
    auto q_var = [&](std::uint32_t i, std::uint32_t l) { return i * d_k + l; };
    auto k_var = [&](std::uint32_t j, std::uint32_t l) { return m * d_k + j * d_k + l; };
    auto v_var = [&](std::uint32_t j, std::uint32_t c) { return m * d_k + n * d_k + j * d_v + c; };

    std::vector<std::uint32_t> num_terms, den_terms;
    for (std::uint32_t j = 0; j < n; ++j) {
        std::vector<std::uint32_t> dot_terms;
        for (std::uint32_t l = 0; l < d_k; ++l) {
            dot_terms.push_back(b.mul({b.input(q_var(row, l)), b.input(k_var(j, l))}));
        }
        const std::uint32_t scaled = b.div(b.add(dot_terms), b.constant(sqrt_dk));
        const std::uint32_t e = b.exp(scaled);
        num_terms.push_back(b.mul({b.input(v_var(j, col)), e}));
        den_terms.push_back(e);
    }
    return b.build(b.div(b.add(num_terms), b.add(den_terms)));
}

} // namespace

std::vector<Circuit> build_example(ExampleKind kind, const ExampleDims& dims) {
    std::vector<Circuit> out;
    switch (kind) {
        case ExampleKind::Softmax: {
            if (dims.n == 0) {
                throw InvalidDims("softmax requires n >= 1");
            }
            for (std::uint32_t j = 0; j < dims.n; ++j) {
                out.push_back(build_softmax(dims.n, j));
            }
            break;
        }
        case ExampleKind::Glu: {
            if (dims.n == 0 || dims.m == 0) {
                throw InvalidDims("glu requires n >= 1 and m >= 1");
            }
            for (std::uint32_t i = 0; i < dims.m; ++i) {
                out.push_back(build_glu(dims.n, dims.m, i));
            }
            break;
        }
        case ExampleKind::Attention: {
            if (dims.n == 0 || dims.m == 0 || dims.d_k == 0 || dims.d_v == 0) {
                throw InvalidDims("attention requires m, n, d_k, d_v >= 1");
            }
            const auto root = static_cast<std::uint32_t>(std::llround(std::sqrt(double(dims.d_k))));
            if (root * root != dims.d_k) {
                throw InvalidDims("attention requires d_k to be a perfect square");
            }
            for (std::uint32_t i = 0; i < dims.m; ++i) {
                for (std::uint32_t c = 0; c < dims.d_v; ++c) {
                    out.push_back(build_attention(dims.m, dims.n, dims.d_k, dims.d_v, i, c, root));
                }
            }
            break;
        }
    }
    return out;
}

Circuit difference_circuit(const Circuit& c1, const Circuit& c2) {
    if (c1.num_inputs() != c2.num_inputs()) {
        throw ArityMismatch("difference_circuit: circuits have different input counts");
    }
    std::map<std::uint32_t, Gate> gates;
    std::uint32_t next = 0;

    auto import = [&gates, &next](const Circuit& c) {
        std::map<std::uint32_t, std::uint32_t> remap;
        for (const auto& [id, gate] : c.gates()) {
            remap[id] = next++;
        }
        for (const auto& [id, gate] : c.gates()) {
            Gate copy = gate;
            for (std::uint32_t& child : copy.children) {
                child = remap.at(child);
            }
            gates.emplace(remap.at(id), std::move(copy));
        }
        return remap.at(c.output());
    };

    const std::uint32_t out1 = import(c1);
    const std::uint32_t out2 = import(c2);
    const std::uint32_t minus_one = next++;
    Gate neg;
    neg.kind = GateKind::Const;
    neg.value = -1;
    gates.emplace(minus_one, std::move(neg));

    const std::uint32_t negated = next++;
    Gate mul;
    mul.kind = GateKind::Mul;
    mul.children = {minus_one, out2};
    gates.emplace(negated, std::move(mul));

    const std::uint32_t sum = next++;
    Gate add;
    add.kind = GateKind::Add;
    add.children = {out1, negated};
    gates.emplace(sum, std::move(add));

    return Circuit(std::move(gates), sum, c1.num_inputs());
}

std::string Circuit::to_json() const {
    nlohmann::json doc;
    doc["num_inputs"] = num_inputs_;
    doc["output"] = output_;
    nlohmann::json gate_list = nlohmann::json::array();
    for (const auto& [id, gate] : gates_) {
        nlohmann::json g;
        g["id"] = id;
        g["kind"] = kind_name(gate.kind);
        switch (gate.kind) {
            case GateKind::Input: g["var"] = gate.var; break;
            case GateKind::Const: g["value"] = gate.value.get_str(); break;
            default: g["children"] = gate.children; break;
        }
        gate_list.push_back(std::move(g));
    }
    doc["gates"] = std::move(gate_list);
    return doc.dump(2) + "\n";
}

Circuit Circuit::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CircuitParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw CircuitParseError("top-level value must be an object");
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "num_inputs" && key != "output" && key != "gates") {
            throw CircuitParseError("unknown field '" + key + "'");
        }
    }
    if (!doc.contains("num_inputs") || !doc.contains("output") || !doc.contains("gates")) {
        throw CircuitParseError("missing required field (num_inputs, output, gates)");
    }
    if (!doc["num_inputs"].is_number_unsigned() || !doc["output"].is_number_unsigned() ||
        !doc["gates"].is_array()) {
        throw CircuitParseError("bad field type");
    }
    const auto num_inputs = doc["num_inputs"].get<std::uint32_t>();
    const auto output = doc["output"].get<std::uint32_t>();

    std::map<std::uint32_t, Gate> gates;
    for (const auto& g : doc["gates"]) {
        if (!g.is_object()) {
            throw CircuitParseError("gate entries must be objects");
        }
        if (!g.contains("id") || !g["id"].is_number_unsigned() || !g.contains("kind") ||
            !g["kind"].is_string()) {
            throw CircuitParseError("gate requires unsigned 'id' and string 'kind'");
        }
        const auto id = g["id"].get<std::uint32_t>();
        const std::string kind = g["kind"].get<std::string>();
        Gate gate;
        std::set<std::string> allowed{"id", "kind"};
        if (kind == "input") {
            gate.kind = GateKind::Input;
            allowed.insert("var");
            if (!g.contains("var") || !g["var"].is_number_unsigned()) {
                throw CircuitParseError("input gate requires unsigned 'var'");
            }
            gate.var = g["var"].get<std::uint32_t>();
        } else if (kind == "const") {
            gate.kind = GateKind::Const;
            allowed.insert("value");
            if (!g.contains("value") || !g["value"].is_string()) {
                throw CircuitParseError("const gate requires decimal string 'value'");
            }
            const std::string value = g["value"].get<std::string>();
            if (mpz_set_str(gate.value.get_mpz_t(), value.c_str(), 10) != 0) {
                throw CircuitParseError("bad integer literal '" + value + "'");
            }
        } else {
            if (kind == "add") {
                gate.kind = GateKind::Add;
            } else if (kind == "mul") {
                gate.kind = GateKind::Mul;
            } else if (kind == "div") {
                gate.kind = GateKind::Div;
            } else if (kind == "exp") {
                gate.kind = GateKind::Exp;
            } else {
                throw CircuitParseError("unknown gate kind '" + kind + "'");
            }
            allowed.insert("children");
            if (!g.contains("children") || !g["children"].is_array()) {
                throw CircuitParseError(kind + " gate requires 'children' array");
            }
            for (const auto& child : g["children"]) {
                if (!child.is_number_unsigned()) {
                    throw CircuitParseError("gate children must be unsigned ids");
                }
                gate.children.push_back(child.get<std::uint32_t>());
            }
        }
        for (const auto& [key, value] : g.items()) {
            (void)value;
            if (!allowed.count(key)) {
                throw CircuitParseError("unknown gate field '" + key + "'");
            }
        }
        if (!gates.emplace(id, std::move(gate)).second) {
            throw CircuitParseError("duplicate gate id " + std::to_string(id));
        }
    }
    return Circuit(std::move(gates), output, num_inputs);
}

} // namespace expid
