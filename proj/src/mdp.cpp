#include "sata/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace sata {

std::vector<double> normalize_state(const StateVector& raw, const NormalizationScales& scales) {
    return {raw.sum_inter_rate / scales.rate, raw.uplink_rate / scales.rate, raw.sum_capability / scales.capability,
            raw.ready_workload / scales.workload, raw.queued_workload / scales.workload};
}

RewardTerms reward_terms(const RewardInputs& in, const RewardParams& params) {
    if (!(in.workload > 0.0)) throw RewardError("reward is undefined for zero-workload tasks");
    RewardTerms t;
    t.utility = params.beta * std::log2(in.workload);
    t.duration = params.psi * (in.max_arrival + in.queue_delay + in.exec) / in.workload;
    const double lateness = params.clamp_penalty ? std::max(0.0, in.finish - in.lct) : in.finish - in.lct;
    t.penalty = params.eta * lateness / in.workload;
    return t;
}

std::size_t ActionMask::valid_count() const {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), true));
}

}  // namespace sata
