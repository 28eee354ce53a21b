#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expid/exppoly.hpp"
#include "expid/field.hpp"
#include "expid/intpoly.hpp"

namespace expid {

inline constexpr std::uint64_t kDefaultTermCap = 4096;

enum class GateKind { Input, Const, Add, Mul, Div, Exp };

struct Gate {
    GateKind kind = GateKind::Const;
    std::vector<std::uint32_t> children;
    mpz_class value;       // Const only
    std::uint32_t var = 0; // Input only
};

/// A wire value during dual-track evaluation: an F_p element (or undefined)
/// under the exponent and an F_q element (or undefined) over it.
struct DualValue {
    std::optional<std::uint64_t> num;
    std::optional<std::uint64_t> exp;
};

enum class ValidationErrorKind {
    CyclicGraph,
    FanInViolation,
    NestedExponentiation,
    DanglingReference,
};

struct ValidationError {
    ValidationErrorKind kind;
    std::string message;
    /// For NestedExponentiation: a gate path from an outer Exp down to an
    /// inner Exp.
    std::vector<std::uint32_t> witness_path;
};

struct ValidationResult {
    std::optional<ValidationError> error;
    bool ok() const { return !error.has_value(); }
};

/// Arithmetic circuit over constant/add/mul/div gates plus fan-in-1
/// exponentiation gates, with at most one exponentiation gate on any path
/// from an input to the output.
class Circuit {
public:
    Circuit() = default;
    Circuit(std::map<std::uint32_t, Gate> gates, std::uint32_t output, std::uint32_t num_inputs)
        : gates_(std::move(gates)), output_(output), num_inputs_(num_inputs) {}

    const std::map<std::uint32_t, Gate>& gates() const { return gates_; }
    std::uint32_t output() const { return output_; }
    std::uint32_t num_inputs() const { return num_inputs_; }

    ValidationResult validate() const;

    /// Gate ids in an order where children precede parents. Requires a valid
    /// DAG.
    std::vector<std::uint32_t> topological_order() const;

    /// Gate-by-gate dual-track evaluation. Inputs carry (u_i, v_i), constants
    /// (b mod p, b mod q); add/mul/div act coordinate-wise with an undefined
    /// mark absorbing through each coordinate; exp maps (t, e) to
    /// (a^e mod p, undefined). Returns the num coordinate of the output gate.
    std::optional<std::uint64_t> eval_finite(const std::vector<std::uint64_t>& u,
                                             const std::vector<std::uint64_t>& v,
                                             const FieldParams& params) const;

    struct Fraction {
        ExpPoly num;
        ExpPoly den;
    };

    /// Structural conversion to a fraction of exponential polynomials; returns
    /// nullopt when any intermediate exceeds term_cap terms.
    std::optional<Fraction> to_fraction(std::uint64_t term_cap = kDefaultTermCap) const;

    std::string to_json() const;
    static Circuit from_json(const std::string& text);

private:
    std::map<std::uint32_t, Gate> gates_;
    std::uint32_t output_ = 0;
    std::uint32_t num_inputs_ = 0;
};

/// Incremental construction helper; ids are assigned sequentially.
class CircuitBuilder {
public:
    explicit CircuitBuilder(std::uint32_t num_inputs) : num_inputs_(num_inputs) {}

    std::uint32_t input(std::uint32_t var);
    std::uint32_t constant(mpz_class value);
    std::uint32_t add(std::vector<std::uint32_t> children);
    std::uint32_t mul(std::vector<std::uint32_t> children);
    std::uint32_t div(std::uint32_t numerator, std::uint32_t denominator);
    std::uint32_t exp(std::uint32_t child);

    Circuit build(std::uint32_t output_id) const;

private:
    std::uint32_t push(Gate gate);

    std::uint32_t num_inputs_;
    std::map<std::uint32_t, Gate> gates_;
    std::uint32_t next_id_ = 0;
};

enum class ExampleKind { Softmax, Glu, Attention };

struct ExampleDims {
    std::uint32_t n = 0;   // softmax/glu/attention column count
    std::uint32_t m = 0;   // glu output count / attention row count
    std::uint32_t d_k = 0; // attention key dimension (perfect square)
    std::uint32_t d_v = 0; // attention value dimension
};

/// One single-output circuit per output coordinate of the named component.
std::vector<Circuit> build_example(ExampleKind kind, const ExampleDims& dims);

/// Add(c1, -1 * c2) over merged gate lists; both circuits must have the same
/// input count.
Circuit difference_circuit(const Circuit& c1, const Circuit& c2);

} // namespace expid
