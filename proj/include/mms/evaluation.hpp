#ifndef MMS_EVALUATION_HPP
#define MMS_EVALUATION_HPP

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mms/enumerate.hpp"
#include "mms/instance.hpp"

namespace mms {

/// Low-dimensional household type label.
using TypeLabel = Vec;

/// Probability map over type labels. Ordered so reports are deterministic.
using TypeDistribution = std::map<TypeLabel, double>;

/// Total mapping from column index to type label. Blocks being compared must
/// share one column universe.
struct TypeProjection {
    std::vector<TypeLabel> labels;  // labels[i] for column i

    const TypeLabel& label_of(int i) const {
        if (i < 0 || i >= static_cast<int>(labels.size()))
            throw Error("projection: column index " + std::to_string(i) + " unmapped");
        return labels[i];
    }
};

/// Each column is its own type.
inline TypeProjection identity_projection(const Instance& inst) {
    TypeProjection proj;
    proj.labels = inst.columns;
    return proj;
}

/// Project columns onto their first `keep` coordinates. With instances in
/// the Census-style layout (person counts first, indicator blocks after),
/// this recovers the usual low-dimensional household type.
inline TypeProjection leading_projection(const Instance& inst, int keep) {
    if (keep < 1 || keep > inst.dim) throw ValidationError("projection: bad prefix length");
    TypeProjection proj;
    proj.labels.reserve(inst.num_types);
    for (const Vec& col : inst.columns)
        proj.labels.emplace_back(col.begin(), col.begin() + keep);
    return proj;
}

/// Collapse every column to a single type.
inline TypeProjection all_to_one_projection(const Instance& inst) {
    TypeProjection proj;
    proj.labels.assign(inst.num_types, TypeLabel{0});
    return proj;
}

namespace detail {

inline long long block_household_count(const Instance& inst, const Solution& any_exact) {
    return inst.count_coord ? inst.target[*inst.count_coord] : sum(any_exact);
}

}  // namespace detail

/// Expected household-type frequencies of the sampled microdata: each
/// block contributes its expected type counts E_pi[X[i]] over a full
/// enumeration of X, and the family total is normalized by the total
/// household count. Blocks whose X cannot be enumerated completely are an
/// error; use empirical frequencies instead.
inline TypeDistribution expected_frequencies_q(const std::vector<const Instance*>& blocks,
                                               const TypeProjection& projection,
                                               long long enumeration_limit = 1'000'000) {
    if (blocks.empty()) throw Error("expected_frequencies_q: no blocks");
    std::map<TypeLabel, KahanSum> counts;
    double total_households = 0.0;
    for (const Instance* block : blocks) {
        SolutionSet xs = enumerate_exact(*block, enumeration_limit);
        if (!xs.complete)
            throw BudgetError("expected_frequencies_q: enumeration incomplete for a block");
        if (xs.solutions.empty())
            throw Error("expected_frequencies_q: a block has no exact solutions");
        std::vector<double> lw(xs.solutions.size());
        for (size_t s = 0; s < xs.solutions.size(); ++s)
            lw[s] = log_f(*block, xs.solutions[s]).value;
        double mx = *std::max_element(lw.begin(), lw.end());
        double norm = 0.0;
        for (double v : lw) norm += std::exp(v - mx);
        for (size_t s = 0; s < xs.solutions.size(); ++s) {
            double pi = std::exp(lw[s] - mx) / norm;
            const Solution& x = xs.solutions[s];
            for (int i = 0; i < block->num_types; ++i)
                if (x[i] > 0) counts[projection.label_of(i)].add(pi * x[i]);
        }
        total_households +=
            static_cast<double>(detail::block_household_count(*block, xs.solutions.front()));
    }
    TypeDistribution q;
    for (const auto& [label, acc] : counts) q[label] = acc.value() / total_households;
    return q;
}

/// Empirical analogue of the expected frequencies: one sampled solution per
/// block, counted and normalized by total households.
inline TypeDistribution empirical_frequencies_qhat(
    const std::vector<std::pair<const Instance*, Solution>>& sampled,
    const TypeProjection& projection) {
    if (sampled.empty()) throw Error("empirical_frequencies_qhat: no samples");
    std::map<TypeLabel, KahanSum> counts;
    double total_households = 0.0;
    for (const auto& [block, x] : sampled) {
        if (!is_exact(*block, x))
            throw Error("empirical_frequencies_qhat: solution is not exact for its block");
        for (int i = 0; i < block->num_types; ++i)
            if (x[i] > 0) counts[projection.label_of(i)].add(static_cast<double>(x[i]));
        total_households += static_cast<double>(detail::block_household_count(*block, x));
    }
    TypeDistribution qhat;
    for (const auto& [label, acc] : counts) qhat[label] = acc.value() / total_households;
    return qhat;
}

/// Source-distribution frequencies: base probabilities summed within each
/// type label.
inline TypeDistribution pums_frequencies_p(const Instance& inst,
                                           const TypeProjection& projection) {
    std::map<TypeLabel, KahanSum> mass;
    for (int i = 0; i < inst.num_types; ++i) mass[projection.label_of(i)].add(inst.probs[i]);
    TypeDistribution p;
    for (const auto& [label, acc] : mass) p[label] = acc.value();
    return p;
}

/// Total variation distance, with missing labels treated as zero mass.
inline double tvd(const TypeDistribution& a, const TypeDistribution& b) {
    KahanSum s;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            s.add(std::abs(ia->second));
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            s.add(std::abs(ib->second));
            ++ib;
        } else {
            s.add(std::abs(ia->second - ib->second));
            ++ia;
            ++ib;
        }
    }
    return 0.5 * s.value();
}

inline double mass_of(const TypeDistribution& d, const TypeLabel& label) {
    auto it = d.find(label);
    return it == d.end() ? 0.0 : it->second;
}

/// Smoothing-ratio reweighting of the base distribution:
/// new_probs[i] proportional to probs[i] * (p[l_i] + lambda) / (qhat[l_i] + lambda).
inline std::vector<double> reweight_lambda(const Instance& inst,
                                           const TypeProjection& projection,
                                           const TypeDistribution& p,
                                           const TypeDistribution& qhat, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("reweight_lambda: lambda must be positive");
    std::vector<double> w(inst.num_types);
    double total = 0.0;
    for (int i = 0; i < inst.num_types; ++i) {
        const TypeLabel& label = projection.label_of(i);
        w[i] = inst.probs[i] * (mass_of(p, label) + lambda) / (mass_of(qhat, label) + lambda);
        total += w[i];
    }
    for (double& v : w) v /= total;
    double again = 0.0;
    for (double v : w) again += v;
    for (double& v : w) v /= again;
    return w;
}

/// Maps a type label to its partition class.
using Partition = std::function<TypeLabel(const TypeLabel&)>;

/// Class-ratio adjustment of p toward qhat: scale every label's mass by
/// (qhat mass of its class) / (p mass of its class). The result matches
/// qhat's class masses exactly.
inline TypeDistribution reweight_partition(const TypeDistribution& p,
                                           const TypeDistribution& qhat,
                                           const Partition& partition) {
    std::map<TypeLabel, double> class_p, class_q;
    for (const auto& [label, mass] : p) class_p[partition(label)] += mass;
    for (const auto& [label, mass] : qhat) class_q[partition(label)] += mass;
    for (const auto& [cls, qmass] : class_q)
        if (qmass > 0.0 && !(class_p.count(cls) && class_p[cls] > 0.0))
            throw Error("reweight_partition: class with positive target mass has zero p mass");
    TypeDistribution out;
    for (const auto& [label, mass] : p) {
        TypeLabel cls = partition(label);
        double denom = class_p[cls];
        double num = class_q.count(cls) ? class_q[cls] : 0.0;
        out[label] = denom > 0.0 ? mass * num / denom : 0.0;
    }
    return out;
}

}  // namespace mms

#endif  // MMS_EVALUATION_HPP
