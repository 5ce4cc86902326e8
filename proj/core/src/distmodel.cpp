#include "rdt/distmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rdt {

double exp_neg_euler_gamma() {
    static const double v = std::exp(-kEulerGamma);
    return v;
}

// ---------------------------------------------------------------------------
// ActionSet

ActionSet ActionSet::range(action_t lo, action_t hi) {
    if (hi < lo) throw std::invalid_argument("ActionSet::range: hi < lo");
    ActionSet s;
    if (hi - lo + 1 <= 16) {
        s.contiguous_ = false;
        s.elems_.reserve(hi - lo + 1);
        for (action_t a = lo; a <= hi; ++a) s.elems_.push_back(a);
    } else {
        s.contiguous_ = true;
        s.lo_ = lo;
        s.hi_ = hi;
    }
    return s;
}

ActionSet ActionSet::of(std::vector<action_t> elems) {
    if (elems.empty()) throw std::invalid_argument("ActionSet: empty");
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    // Canonicalize long contiguous runs to range form.
    if (elems.size() > 16 && elems.back() - elems.front() + 1 == elems.size())
        return range(elems.front(), elems.back());
    ActionSet s;
    s.contiguous_ = false;
    s.elems_ = std::move(elems);
    return s;
}

std::uint64_t ActionSet::size() const {
    return contiguous_ ? hi_ - lo_ + 1 : elems_.size();
}

action_t ActionSet::min() const { return contiguous_ ? lo_ : elems_.front(); }
action_t ActionSet::max() const { return contiguous_ ? hi_ : elems_.back(); }

action_t ActionSet::at(std::uint64_t index) const {
    if (index >= size()) throw std::out_of_range("ActionSet::at");
    return contiguous_ ? lo_ + index : elems_[index];
}

bool ActionSet::contains(action_t a) const {
    if (contiguous_) return a >= lo_ && a <= hi_;
    return std::binary_search(elems_.begin(), elems_.end(), a);
}

bool ActionSet::operator==(const ActionSet& other) const {
    if (contiguous_ && other.contiguous_)
        return lo_ == other.lo_ && hi_ == other.hi_;
    if (contiguous_ != other.contiguous_) return false;  // canonical forms differ
    return elems_ == other.elems_;
}

bool ActionSet::operator<(const ActionSet& other) const {
    const std::uint64_t n = size(), m = other.size();
    const std::uint64_t k = std::min(n, m);
    // Contiguous sets only get large, so elementwise compare stays cheap in
    // practice: differing sets diverge early or differ in size.
    for (std::uint64_t i = 0; i < k; ++i) {
        const action_t a = at(i), b = other.at(i);
        if (a != b) return a < b;
        if (i > 64 && contiguous_ && other.contiguous_) break;  // both ranges, same lo
    }
    if (contiguous_ && other.contiguous_ && lo_ == other.lo_) return hi_ < other.hi_;
    return n < m;
}

std::string ActionSet::to_string() const {
    std::ostringstream os;
    if (contiguous_) {
        os << lo_ << "-" << hi_;
    } else {
        for (std::size_t i = 0; i < elems_.size(); ++i) {
            if (i) os << ",";
            os << elems_[i];
        }
    }
    return os.str();
}

ActionSet ActionSet::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("ActionSet::parse: empty");
    const auto dash = text.find('-');
    if (dash != std::string::npos) {
        const action_t lo = std::stoull(text.substr(0, dash));
        const action_t hi = std::stoull(text.substr(dash + 1));
        return range(lo, hi);
    }
    std::vector<action_t> elems;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        elems.push_back(std::stoull(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return of(std::move(elems));
}

std::uint64_t ActionSet::digest() const {
    std::uint64_t h = 0x8B1A9953C4611296ULL;
    if (contiguous_) {
        h = mix_combine(h, 0xC0117160);
        h = mix_combine(h, lo_);
        h = mix_combine(h, hi_);
    } else {
        for (action_t a : elems_) h = mix_combine(h, a);
    }
    return h;
}

// ---------------------------------------------------------------------------
// PrimitiveDistribution

void PrimitiveDistribution::validate() const {
    if (support.empty())
        throw std::invalid_argument("PrimitiveDistribution: empty support");
    if (tail_mass_bound < 0 || tail_mass_bound > 1e-12)
        throw std::invalid_argument("PrimitiveDistribution: tail mass bound out of range");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i].second <= 0.0)
            throw std::invalid_argument("PrimitiveDistribution: non-positive mass");
        for (std::size_t j = i + 1; j < support.size(); ++j)
            if (support[i].first == support[j].first)
                throw std::invalid_argument("PrimitiveDistribution: duplicate action set");
        total += support[i].second;
    }
    if (std::abs(total - (1.0 - tail_mass_bound)) > 1e-9)
        throw std::invalid_argument("PrimitiveDistribution: masses do not normalize");
}

double PrimitiveDistribution::mass_of(const ActionSet& a) const {
    for (const auto& [set, mass] : support)
        if (set == a) return mass;
    return 0.0;
}

const std::vector<double>& PrimitiveDistribution::cdf() const {
    if (cdf_.empty()) {
        cdf_.reserve(support.size());
        double acc = 0.0;
        for (const auto& [set, mass] : support) {
            acc += mass;
            cdf_.push_back(acc);
        }
    }
    return cdf_;
}

const ActionSet& PrimitiveDistribution::sample(Rng& rng) const {
    const auto& c = cdf();
    return support[rng.pick_cdf(c)].first;
}

DistributionFamily DistributionFamily::advanced(stage_t t) const {
    if (t == 0) return *this;
    DistributionFamily f;
    f.name = name + "+" + std::to_string(t);
    f.time_invariant = time_invariant;
    f.generator = [gen = generator, t](stage_t k) { return gen(k + t); };
    return f;
}

// ---------------------------------------------------------------------------
// CardinalityLaw

void CardinalityLaw::validate(bool allow_zero) const {
    double total = 0.0;
    double prev = -1.0;
    for (const auto& [v, m] : pmf) {
        if (m <= 0.0) throw std::invalid_argument("CardinalityLaw: non-positive mass");
        if (v <= prev) throw std::invalid_argument("CardinalityLaw: values not ascending");
        if (!allow_zero && v < 1.0)
            throw std::invalid_argument("CardinalityLaw: support must be positive");
        if (allow_zero && v < 0.0)
            throw std::invalid_argument("CardinalityLaw: negative support");
        prev = v;
        total += m;
    }
    if (std::abs(total - (1.0 - tail_mass_bound)) > 1e-9)
        throw std::invalid_argument("CardinalityLaw: masses do not normalize");
}

double CardinalityLaw::mass_at(double value) const {
    auto it = std::lower_bound(pmf.begin(), pmf.end(), value,
                               [](const auto& p, double v) { return p.first < v; });
    if (it != pmf.end() && it->first == value) return it->second;
    return 0.0;
}

double CardinalityLaw::total_mass() const {
    double t = 0.0;
    for (const auto& [v, m] : pmf) t += m;
    return t;
}

void CardinalityLaw::sort_and_merge() {
    std::sort(pmf.begin(), pmf.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [v, m] : pmf) {
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += m;
        else
            merged.emplace_back(v, m);
    }
    pmf = std::move(merged);
}

CardinalityLaw cardinality_law(const PrimitiveDistribution& p) {
    CardinalityLaw q;
    q.tail_mass_bound = p.tail_mass_bound;
    for (const auto& [set, mass] : p.support)
        q.pmf.emplace_back(static_cast<double>(set.size()), mass);
    q.sort_and_merge();
    return q;
}

double pgf_eval(const CardinalityLaw& q, double x) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("pgf_eval: x must lie in [0,1]");
    double acc = 0.0;
    for (const auto& [v, m] : q.pmf) {
        if (x == 0.0) {
            if (v == 0.0) acc += m;
            continue;
        }
        acc += m * std::pow(x, v);
    }
    return acc;
}

ComposeResult compose_cardinality(const DistributionFamily& family, stage_t t,
                                  std::uint32_t m, std::uint32_t n_max) {
    if (n_max < 1) throw std::invalid_argument("compose_cardinality: n_max < 1");
    ComposeResult out;

    // law := distribution of the generation-k population, k = 0..m.
    std::vector<double> law(n_max + 1, 0.0);
    law[1] = 1.0;
    double lost = 0.0;

    for (std::uint32_t k = 0; k < m; ++k) {
        const CardinalityLaw q = cardinality_law(family.at(t + k));
        lost += q.tail_mass_bound;  // per-stage truncation carried forward

        // Offspring pmf as a dense vector over sizes (sizes beyond the cap
        // drain straight into the lost-mass account).
        std::vector<double> offspring(n_max + 1, 0.0);
        for (const auto& [v, mass] : q.pmf) {
            if (v > n_max) { lost += mass; continue; }
            offspring[static_cast<std::size_t>(v)] += mass;
        }

        // pow_j = offspring^{*j}, advanced incrementally over the sizes j
        // present in `law`.
        std::vector<double> next(n_max + 1, 0.0);
        std::vector<double> pow_j(n_max + 1, 0.0);
        pow_j[0] = 1.0;
        std::uint32_t j_cur = 0;
        for (std::uint32_t j = 1; j <= n_max; ++j) {
            if (law[j] == 0.0) continue;
            while (j_cur < j) {
                std::vector<double> conv(n_max + 1, 0.0);
                double conv_lost = 0.0;
                for (std::uint32_t a = 0; a <= n_max; ++a) {
                    if (pow_j[a] == 0.0) continue;
                    for (const auto& [v, mass] : q.pmf) {
                        const double pos = a + v;
                        if (pos > n_max) { conv_lost += pow_j[a] * mass; continue; }
                        conv[static_cast<std::size_t>(pos)] += pow_j[a] * mass;
                    }
                    // mass already lost inside pow_j stays lost
                }
                lost += conv_lost * law[j];  // approximate attribution; see below
                pow_j.swap(conv);
                ++j_cur;
            }
            for (std::uint32_t v = 0; v <= n_max; ++v)
                if (pow_j[v] != 0.0) next[v] += law[j] * pow_j[v];
        }
        law.swap(next);

        // True lost mass at this stage: whatever the law no longer accounts
        // for. Recompute from totals to avoid attribution drift.
        double total = 0.0;
        for (double v : law) total += v;
        lost = std::max(lost, 1.0 - total);
    }

    double total = 0.0;
    for (double v : law) total += v;
    out.law.tail_mass_bound = std::max(0.0, 1.0 - total);
    for (std::uint32_t v = 1; v <= n_max; ++v)
        if (law[v] != 0.0)
            out.law.pmf.emplace_back(static_cast<double>(v), law[v]);
    if (m == 0) {
        out.law.pmf = {{1.0, 1.0}};
        out.law.tail_mass_bound = 0.0;
    }
    out.cap_overflow_warning = out.law.tail_mass_bound > 1e-6;
    return out;
}

bool dominates(const CardinalityLaw& q, const CardinalityLaw& r) {
    const double slack = q.tail_mass_bound + r.tail_mass_bound + 1e-12;
    // Merge the atom positions and compare CDFs at each.
    std::size_t iq = 0, ir = 0;
    double Fq = 0.0, Fr = 0.0;
    while (iq < q.pmf.size() || ir < r.pmf.size()) {
        double pos;
        if (iq == q.pmf.size()) pos = r.pmf[ir].first;
        else if (ir == r.pmf.size()) pos = q.pmf[iq].first;
        else pos = std::min(q.pmf[iq].first, r.pmf[ir].first);
        while (iq < q.pmf.size() && q.pmf[iq].first <= pos) Fq += q.pmf[iq++].second;
        while (ir < r.pmf.size() && r.pmf[ir].first <= pos) Fr += r.pmf[ir++].second;
        if (Fq > Fr + slack) return false;
    }
    return true;
}

LampertiReport lamperti_check(const CardinalityLaw& q, std::uint64_t n_probe) {
    if (n_probe < 1) throw std::invalid_argument("lamperti_check: n_probe < 1");
    LampertiReport rep;
    rep.threshold = exp_neg_euler_gamma();

    const double lo = static_cast<double>(n_probe) / 2.0;
    const double hi = static_cast<double>(n_probe);

    // n -> n(1 - F(n)) is piecewise linear increasing between atoms, so the
    // sup over the window is attained just below an atom or at the window's
    // right edge. Evaluate at those candidates.
    double tail = q.tail_mass_bound;  // mass above the last listed atom
    // Walk atoms from the top, accumulating 1 - F at atom positions.
    std::vector<std::pair<double, double>> tail_at;  // (position, 1 - F(position))
    tail_at.reserve(q.pmf.size() + 1);
    double acc = q.tail_mass_bound;
    for (auto it = q.pmf.rbegin(); it != q.pmf.rend(); ++it) {
        tail_at.emplace_back(it->first, acc);  // 1 - F at this atom's position
        acc += it->second;
    }

    double sup = 0.0;
    double arg = lo;
    auto consider = [&](double n, double t) {
        const double v = n * t;
        if (v > sup) { sup = v; arg = n; }
    };
    // Right edge of the window.
    {
        double t = q.tail_mass_bound;
        for (auto it = q.pmf.rbegin(); it != q.pmf.rend(); ++it) {
            if (it->first <= hi) break;
            t += it->second;
        }
        consider(hi, t);
    }
    // Just below each atom in (lo, hi]: n = atom - 1 (integer grid).
    for (const auto& [pos, t] : tail_at) {
        const double n = pos - 1.0;
        if (n < lo || n > hi) continue;
        consider(n, t + q.mass_at(pos));
    }
    // Left edge.
    {
        double t = q.tail_mass_bound;
        for (auto it = q.pmf.rbegin(); it != q.pmf.rend(); ++it) {
            if (it->first <= lo) break;
            t += it->second;
        }
        consider(lo, t);
    }
    (void)tail;

    rep.sup_estimate = sup;
    rep.verdict = sup < rep.threshold;
    rep.window_edge_warning = (arg >= hi - 0.5) || (arg <= lo + 0.5);
    return rep;
}

LawMoments law_moments(const CardinalityLaw& q) {
    LawMoments m;
    double mean = 0.0, second = 0.0;
    // Cauchy-style probe: if the top decade of the support still contributes
    // a non-negligible share of the partial sums, flag the moment as
    // unsettled (divergent within the generated support).
    double mean_head = 0.0, second_head = 0.0;
    const std::size_t n = q.pmf.size();
    const std::size_t head_end = n > 8 ? n - n / 4 : n;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [v, mass] = q.pmf[i];
        mean += v * mass;
        second += v * v * mass;
        if (i < head_end) { mean_head = mean; second_head = second; }
    }
    const bool truncated = q.tail_mass_bound > 0.0 || n > 8;
    if (truncated && n > 8) {
        if (mean - mean_head > 0.05 * mean) m.mean_finite = false;
        if (second - second_head > 0.05 * second) m.variance_finite = false;
    }
    m.mean = mean;
    m.variance = second - mean * mean;
    return m;
}

}  // namespace rdt
