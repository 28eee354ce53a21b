#include "expid/pit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "expid/rng.hpp"

namespace expid {

double single_trial_error_bound(std::uint64_t k, std::uint64_t d, std::uint64_t q) {
    const double kd = static_cast<double>(k);
    const double sz = 8.0 * static_cast<double>(d) * kd * kd * kd * kd / static_cast<double>(q);
    if (k <= 1) {
        return sz;
    }
    const double root_term = std::pow(static_cast<double>(q), -1.0 / (kd * kd - 1.0));
    return sz + root_term;
}

std::uint64_t repetitions_for(double epsilon, double delta) {
    if (delta <= 0.0 || delta >= 1.0) {
        throw PreconditionViolation("repetitions_for: delta must be in (0, 1)");
    }
    if (epsilon >= 1.0) {
        throw PreconditionViolation("repetitions_for: epsilon must be < 1");
    }
    if (epsilon <= 0.0) {
        return 1;
    }
    const double r = std::ceil(std::log(1.0 / delta) / std::log(1.0 / epsilon));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(r));
}

namespace {

// 2*(k*w)^2 as an exact integer; throws past the modulus cap.
std::uint64_t theorem_threshold(std::uint64_t k, const mpz_class& w) {
    mpz_class t = mpz_class(k) * w;
    t = 2 * t * t;
    if (t >= mpz_class(kMaxModulus)) {
        throw SearchExhausted("q threshold 2*(k*w)^2 exceeds the 2^62 modulus cap");
    }
    return t.get_ui();
}

} // namespace

std::uint64_t min_theorem_q(std::uint64_t k, const mpz_class& w) {
    return next_prime_at_least(theorem_threshold(k, w) + 1);
}

TestPlan select_params(const Bounds& bounds, double delta, std::uint64_t seed) {
    if (bounds.width < 1 || bounds.weight < 1) {
        throw PreconditionViolation("select_params: bounds require k >= 1 and w >= 1");
    }
    const std::uint64_t threshold = theorem_threshold(bounds.width, bounds.weight);

    // epsilon(q) is strictly decreasing, so bisect for the smallest q with
    // epsilon < 1, then move up to the next prime.
    std::uint64_t lo = threshold + 1;
    if (lo < 3) {
        lo = 3;
    }
    if (single_trial_error_bound(bounds.width, bounds.degree, lo) >= 1.0) {
        std::uint64_t hi = lo;
        while (single_trial_error_bound(bounds.width, bounds.degree, hi) >= 1.0) {
            if (hi >= kMaxModulus) {
                throw SearchExhausted("select_params: epsilon < 1 needs q above the 2^62 cap");
            }
            hi = std::min(kMaxModulus, hi * 2);
        }
        while (lo + 1 < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (single_trial_error_bound(bounds.width, bounds.degree, mid) >= 1.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo = hi;
    }
    return select_params_with_q(bounds, delta, seed, next_prime_at_least(lo));
}

TestPlan select_params_with_q(const Bounds& bounds, double delta, std::uint64_t seed,
                              std::uint64_t q) {
    if (!is_prime(q)) {
        throw PreconditionViolation("q = " + std::to_string(q) + " is not prime");
    }
    if (q <= theorem_threshold(bounds.width, bounds.weight)) {
        throw PreconditionViolation("q = " + std::to_string(q) +
                                    " violates the precondition q > 2*(k*w)^2");
    }
    const double epsilon = single_trial_error_bound(bounds.width, bounds.degree, q);
    if (epsilon >= 1.0) {
        throw PreconditionViolation("q = " + std::to_string(q) +
                                    " gives a vacuous single-trial bound (epsilon >= 1)");
    }
    TestPlan plan;
    const PrimePair pair = generate_prime_pair(q);
    plan.params = FieldParams{pair.p, pair.q, find_subgroup_element(pair.p, pair.q, seed)};
    plan.bounds = bounds;
    plan.seed = seed;
    plan.delta = delta;
    plan.epsilon = epsilon;
    plan.repetitions = repetitions_for(epsilon, delta);
    return plan;
}

namespace {

struct Trial {
    std::vector<std::uint64_t> u;
    std::vector<std::uint64_t> v;
    std::uint64_t a = 0;
    std::optional<std::uint64_t> value;
};

Trial run_trial(const Circuit& circuit, const TestPlan& plan, std::uint64_t index) {
    const std::uint32_t n = circuit.num_inputs();
    Rng rng(plan.seed, index);
    Trial trial;
    trial.u.reserve(n);
    trial.v.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        trial.u.push_back(rng.below(plan.params.p));
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        trial.v.push_back(rng.below(plan.params.q));
    }
    // Uniform over the subgroup: the exponent map j -> a^j is a bijection on
    // {0, ..., q-1}.
    const std::uint64_t j = rng.below(plan.params.q);
    trial.a = mod_pow(plan.params.a, j, plan.params.p);
    trial.value =
        circuit.eval_finite(trial.u, trial.v, FieldParams{plan.params.p, plan.params.q, trial.a});
    return trial;
}

bool rejecting(const Trial& trial) { return trial.value.has_value() && *trial.value != 0; }

} // namespace

Verdict test_zero(const Circuit& circuit, const TestPlan& plan, unsigned threads) {
    const std::uint64_t r = plan.repetitions;
    std::uint64_t first_reject = r;

    if (threads <= 1 || r < 2) {
        for (std::uint64_t i = 0; i < r; ++i) {
            if (rejecting(run_trial(circuit, plan, i))) {
                first_reject = i;
                break;
            }
        }
    } else {
        const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, r));
        std::atomic<std::uint64_t> best{r};
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (r + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::uint64_t begin = w * chunk;
                const std::uint64_t end = std::min(r, begin + chunk);
                for (std::uint64_t i = begin; i < end && i < best.load(); ++i) {
                    if (rejecting(run_trial(circuit, plan, i))) {
                        std::uint64_t seen = best.load();
                        while (i < seen && !best.compare_exchange_weak(seen, i)) {
                        }
                        break;
                    }
                }
            });
        }
        for (std::thread& t : pool) {
            t.join();
        }
        first_reject = best.load();
    }

    Verdict verdict;
    verdict.seed = plan.seed;
    if (first_reject < r) {
        const Trial trial = run_trial(circuit, plan, first_reject);
        verdict.decision = Decision::RejectNonZero;
        verdict.trials_executed = first_reject + 1;
        verdict.witness = AlgebraicWitness{trial.u, trial.v, trial.a, *trial.value};
    } else {
        verdict.decision = Decision::AcceptZero;
        verdict.trials_executed = r;
    }
    return verdict;
}

Verdict test_equiv(const Circuit& c1, const Circuit& c2, const TestPlan& plan, unsigned threads) {
    return test_zero(difference_circuit(c1, c2), plan, threads);
}

OracleOutcome exact_zero_oracle(const Circuit& circuit, std::uint64_t term_cap) {
    const auto fraction = circuit.to_fraction(term_cap);
    if (!fraction) {
        return OracleOutcome::Inconclusive;
    }
    if (fraction->num.has_zero_denominator() || fraction->den.has_zero_denominator()) {
        return OracleOutcome::EmptyDomain;
    }
    if (fraction->den.condense().empty()) {
        // The denominator vanishes identically, so the circuit has an empty
        // domain; vacuously zero but reported as such.
        return OracleOutcome::EmptyDomain;
    }
    return fraction->num.condense().empty() ? OracleOutcome::Zero : OracleOutcome::NonZero;
}

Bounds fraction_bounds(const Circuit::Fraction& fraction) {
    const ExpPoly::Metrics mn = fraction.num.metrics();
    const ExpPoly::Metrics md = fraction.den.metrics();
    Bounds bounds;
    bounds.width = std::max<std::uint64_t>({mn.width, md.width, 1});
    bounds.degree = std::max(mn.degree, md.degree);
    bounds.weight = std::max(std::max(mn.weight, md.weight), mpz_class(1));
    return bounds;
}

Verdict real_model_test(const Circuit& circuit, std::uint64_t trials, std::uint64_t seed,
                        std::uint64_t term_cap) {
    Verdict verdict;
    verdict.seed = seed;
    const auto fraction = circuit.to_fraction(term_cap);
    if (!fraction) {
        verdict.decision = Decision::Inconclusive;
        verdict.reason = "term cap exceeded during fraction conversion";
        return verdict;
    }
    if (fraction->num.has_zero_denominator() || fraction->den.has_zero_denominator()) {
        verdict.decision = Decision::EmptyDomain;
        return verdict;
    }
    const Bounds bounds = fraction_bounds(*fraction);
    const unsigned __int128 wide = static_cast<unsigned __int128>(20) * bounds.degree *
                                   bounds.width * bounds.width;
    if (wide > (std::uint64_t{1} << 62)) {
        verdict.decision = Decision::Inconclusive;
        verdict.reason = "sample bound 20*d*k^2 overflows";
        return verdict;
    }
    const std::uint64_t sample_bound = std::max<std::uint64_t>(20, static_cast<std::uint64_t>(wide));

    const std::uint32_t n = circuit.num_inputs();
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng(seed, i);
        std::vector<std::uint64_t> raw(n);
        std::vector<mpz_class> point(n);
        for (std::uint32_t j = 0; j < n; ++j) {
            raw[j] = 1 + rng.below(sample_bound);
            point[j] = static_cast<unsigned long>(raw[j]);
        }
        const SignClass top = fraction->num.rational_sign_class(point);
        const SignClass bottom = fraction->den.rational_sign_class(point);
        if (top == SignClass::NonZero && bottom == SignClass::NonZero) {
            verdict.decision = Decision::RejectNonZero;
            verdict.trials_executed = i + 1;
            verdict.real_point = std::move(raw);
            return verdict;
        }
    }
    verdict.decision = Decision::AcceptZero;
    verdict.trials_executed = trials;
    return verdict;
}

const char* decision_name(Decision decision) {
    switch (decision) {
        case Decision::AcceptZero: return "accept_zero";
        case Decision::RejectNonZero: return "reject_nonzero";
        case Decision::EmptyDomain: return "empty_domain";
        case Decision::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* oracle_outcome_name(OracleOutcome outcome) {
    switch (outcome) {
        case OracleOutcome::Zero: return "zero";
        case OracleOutcome::NonZero: return "nonzero";
        case OracleOutcome::EmptyDomain: return "empty_domain";
        case OracleOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string verdict_to_json(const Verdict& verdict, const TestPlan* plan) {
    nlohmann::json doc;
    doc["decision"] = decision_name(verdict.decision);
    doc["trials"] = verdict.trials_executed;
    doc["seed"] = verdict.seed;
    if (plan != nullptr) {
        doc["params"] = {{"p", plan->params.p}, {"q", plan->params.q}, {"a", plan->params.a}};
    }
    if (verdict.witness) {
        doc["witness"] = {{"u", verdict.witness->u},
                          {"v", verdict.witness->v},
                          {"a", verdict.witness->a},
                          {"value", verdict.witness->value}};
    }
    if (verdict.real_point) {
        doc["real_point"] = *verdict.real_point;
    }
    if (!verdict.reason.empty()) {
        doc["reason"] = verdict.reason;
    }
    return doc.dump(2) + "\n";
}

std::string plan_to_json(const TestPlan& plan) {
    nlohmann::json doc;
    doc["p"] = plan.params.p;
    doc["q"] = plan.params.q;
    doc["a"] = plan.params.a;
    doc["epsilon"] = plan.epsilon;
    doc["repetitions"] = plan.repetitions;
    doc["delta"] = plan.delta;
    doc["bounds"] = {{"k", plan.bounds.width},
                     {"d", plan.bounds.degree},
                     {"w", plan.bounds.weight.get_str()}};
    return doc.dump(2) + "\n";
}

} // namespace expid
