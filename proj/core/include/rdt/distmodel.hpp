#pragma once

// Stage-indexed primitive distributions over finite action sets, their
// cardinality laws and generating functions, and the analytic condition
// checkers built on them (stochastic dominance, the recurrence threshold
// for maximal branching kernels, moments).

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdt/rng.hpp"

namespace rdt {

using action_t = std::uint64_t;
using stage_t = std::uint64_t;

/// Euler-Mascheroni constant, and the recurrence threshold e^{-gamma} used
/// by the tail-criterion check. Stored to full double precision so the
/// threshold is bit-stable across runs.
inline constexpr double kEulerGamma = 0.57721566490153286061;
double exp_neg_euler_gamma();

/// Non-empty finite set of action labels. Contiguous runs {lo..hi} are kept
/// in O(1) range form; anything else stores the sorted elements. Sets of at
/// most 16 elements are canonicalized to explicit form so equality and
/// serialization are representation-independent.
class ActionSet {
  public:
    static ActionSet range(action_t lo, action_t hi);
    static ActionSet of(std::vector<action_t> elems);
    static ActionSet singleton(action_t a) { return of({a}); }

    std::uint64_t size() const;
    action_t min() const;
    action_t max() const;
    action_t at(std::uint64_t index) const;  // index-th smallest element
    bool contains(action_t a) const;
    bool is_contiguous() const { return contiguous_; }

    bool operator==(const ActionSet& other) const;
    bool operator<(const ActionSet& other) const;  // lexicographic on elements

    std::string to_string() const;                 // canonical text form
    static ActionSet parse(const std::string& text);

    std::uint64_t digest() const;

  private:
    ActionSet() = default;
    bool contiguous_ = false;
    action_t lo_ = 0, hi_ = 0;          // used when contiguous_
    std::vector<action_t> elems_;       // used otherwise; strictly sorted
};

/// One stage's law over action sets. Masses are strictly positive and sum
/// to 1 - tail_mass_bound; countable supports are truncated so the residual
/// stays below 1e-12 and the residual is carried explicitly.
struct PrimitiveDistribution {
    std::vector<std::pair<ActionSet, double>> support;
    double tail_mass_bound = 0.0;

    void validate() const;  // throws std::invalid_argument on violations

    /// Mass of an exact set (0 if absent from the listed support).
    double mass_of(const ActionSet& a) const;

    /// Draw one action set.
    const ActionSet& sample(Rng& rng) const;

    /// Cumulative masses, built lazily on first sample.
    const std::vector<double>& cdf() const;

  private:
    mutable std::vector<double> cdf_;
};

/// Stage-indexed family p_0, p_1, ... The generator must be a pure function
/// of the stage index; values are immutable after construction and safe to
/// share across threads.
struct DistributionFamily {
    std::string name;
    std::function<PrimitiveDistribution(stage_t)> generator;
    bool time_invariant = false;

    PrimitiveDistribution at(stage_t t) const { return generator(t); }

    /// The same family with the first `t` stages cut off.
    DistributionFamily advanced(stage_t t) const;
};

/// Law of a positive-integer (or, after composition, capped) cardinality.
/// Atom positions are kept as exact doubles; every built-in family uses
/// dyadic positions, which doubles represent exactly far beyond 2^53.
struct CardinalityLaw {
    std::vector<std::pair<double, double>> pmf;  // (value, mass), values ascending
    double tail_mass_bound = 0.0;

    void validate(bool allow_zero = false) const;
    double mass_at(double value) const;
    double total_mass() const;
    void sort_and_merge();
};

/// Law of #A under p (sizes of the supported sets).
CardinalityLaw cardinality_law(const PrimitiveDistribution& p);

/// Probability generating function sum_n q(n) x^n evaluated at x in [0,1].
double pgf_eval(const CardinalityLaw& q, double x);

/// Law of the generation-m population of the branching process whose stage-k
/// offspring is the cardinality law of family stage t+k. Support is capped
/// at n_max; mass pushed beyond the cap is accumulated into tail_mass_bound.
/// m = 0 yields the unit mass at 1.
struct ComposeResult {
    CardinalityLaw law;
    bool cap_overflow_warning = false;  // set when lost mass exceeds 1e-6
};
ComposeResult compose_cardinality(const DistributionFamily& family, stage_t t,
                                  std::uint32_t m, std::uint32_t n_max = 4096);

/// First-order stochastic dominance: q dominates r iff F_q(n) <= F_r(n) for
/// all n, within the laws' combined tail slack.
bool dominates(const CardinalityLaw& q, const CardinalityLaw& r);

struct LampertiReport {
    double sup_estimate = 0.0;
    bool verdict = false;
    bool window_edge_warning = false;  // sup attained at the probe boundary
    double threshold = 0.0;            // e^{-gamma}
};

/// Probe of limsup_n n(1 - F_q(n)) over the window [n_probe/2, n_probe],
/// compared against e^{-gamma}. Finite evidence for an asymptotic quantity;
/// the window-edge warning flags non-settled behavior.
LampertiReport lamperti_check(const CardinalityLaw& q, std::uint64_t n_probe);

struct LawMoments {
    double mean = 0.0;
    double variance = 0.0;
    bool mean_finite = true;
    bool variance_finite = true;
};

/// Mean/variance of the truncated pmf with a Cauchy-style divergence flag:
/// if the partial sums over the generated support keep growing at the tail,
/// the moment is reported as non-finite.
LawMoments law_moments(const CardinalityLaw& q);

}  // namespace rdt
