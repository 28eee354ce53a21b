#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expid/circuit.hpp"
#include "expid/field.hpp"

namespace expid {

/// Width/degree/weight bounds for the exponential-polynomial fraction of the
/// circuit under test.
struct Bounds {
    std::uint64_t width = 1;
    std::uint64_t degree = 0;
    mpz_class weight = 1;
};

struct TestPlan {
    FieldParams params;
    std::uint64_t repetitions = 1;
    std::uint64_t seed = 0;
    Bounds bounds;
    double epsilon = 0.0; // single-trial false-accept bound
    double delta = 0.0;   // requested overall error
};

enum class Decision { AcceptZero, RejectNonZero, EmptyDomain, Inconclusive };

struct AlgebraicWitness {
    std::vector<std::uint64_t> u;
    std::vector<std::uint64_t> v;
    std::uint64_t a = 0;
    std::uint64_t value = 0;
};

struct Verdict {
    Decision decision = Decision::Inconclusive;
    std::uint64_t trials_executed = 0;
    std::uint64_t seed = 0;
    std::optional<AlgebraicWitness> witness;
    std::optional<std::vector<std::uint64_t>> real_point;
    std::string reason;
};

/// Single-trial probability bound for accepting a nonzero circuit:
/// 8*d*k^4/q + q^(-1/(k^2-1)); the subgroup-root term vanishes for k <= 1.
double single_trial_error_bound(std::uint64_t k, std::uint64_t d, std::uint64_t q);

/// ceil(ln(1/delta) / ln(1/epsilon)), at least 1.
std::uint64_t repetitions_for(double epsilon, double delta);

/// Smallest prime exceeding 2*(k*w)^2, the theorem precondition on q.
std::uint64_t min_theorem_q(std::uint64_t k, const mpz_class& w);

/// Picks the smallest admissible q (theorem precondition plus epsilon < 1),
/// the matching p, an order-q element, and the repetition count for delta.
TestPlan select_params(const Bounds& bounds, double delta, std::uint64_t seed);

/// Same, but with a caller-chosen q; validates the TestPlan invariants.
TestPlan select_params_with_q(const Bounds& bounds, double delta, std::uint64_t seed,
                              std::uint64_t q);

/// Repeated randomized zero test in the algebraic query model. Each trial
/// draws (u, v, a) from a substream derived from (plan.seed, trial index),
/// so the transcript is reproducible for any thread count.
Verdict test_zero(const Circuit& circuit, const TestPlan& plan, unsigned threads = 1);

/// Zero test of the difference circuit c1 - c2.
Verdict test_equiv(const Circuit& c1, const Circuit& c2, const TestPlan& plan,
                   unsigned threads = 1);

enum class OracleOutcome { Zero, NonZero, EmptyDomain, Inconclusive };

/// Exact decision through the fraction form: convert, condense, and report
/// whether the numerator vanishes identically on the domain.
OracleOutcome exact_zero_oracle(const Circuit& circuit,
                                std::uint64_t term_cap = kDefaultTermCap);

/// Randomized test in the real query model: exact sign classification of both
/// fraction sides at integer points drawn from {1, ..., 20*d*k^2}^n.
Verdict real_model_test(const Circuit& circuit, std::uint64_t trials, std::uint64_t seed,
                        std::uint64_t term_cap = kDefaultTermCap);

Bounds fraction_bounds(const Circuit::Fraction& fraction);

const char* decision_name(Decision decision);
const char* oracle_outcome_name(OracleOutcome outcome);

/// Verdict as JSON; byte-identical for identical inputs.
std::string verdict_to_json(const Verdict& verdict, const TestPlan* plan);
std::string plan_to_json(const TestPlan& plan);

} // namespace expid
