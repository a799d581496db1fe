#pragma once

// Finite MDP model, occupancy measures, stationary policies and the
// conversions between them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace divplan {

/// Nonzero entry of a transition row P(.|s,a).
struct Successor {
    std::uint32_t state;
    double prob;
};

/// Finite MDP (S, A, P, r). Transition probabilities are stored densely as
/// [s][a][s'] alongside a sparse successor list per (s,a). r(s,a) is the
/// expected one-step reward; when built from a per-transition reward
/// R(s,a,s') the expectation is taken at construction.
///
/// The constructor checks shapes only. Use validate_mdp() for the
/// stochasticity invariants.
class MdpModel {
public:
    MdpModel(std::size_t num_states, std::size_t num_actions, std::vector<double> transition,
             std::vector<double> reward, std::vector<std::string> labels = {});

    /// Builds r(s,a) = sum_s' P(s'|s,a) R(s,a,s') and keeps R.
    static MdpModel from_transition_rewards(std::size_t num_states, std::size_t num_actions,
                                            std::vector<double> transition,
                                            std::vector<double> raw_reward,
                                            std::vector<std::string> labels = {});

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t num_pairs() const { return num_states_ * num_actions_; }
    std::size_t index(std::size_t s, std::size_t a) const { return s * num_actions_ + a; }

    double transition(std::size_t s, std::size_t a, std::size_t next) const {
        return transition_[(s * num_actions_ + a) * num_states_ + next];
    }
    std::span<const double> transition_row(std::size_t s, std::size_t a) const;
    std::span<const double> transitions() const { return transition_; }
    std::span<const Successor> successors(std::size_t s, std::size_t a) const;

    double reward(std::size_t s, std::size_t a) const { return reward_[index(s, a)]; }
    /// Flat r(s,a), indexed by index(s,a).
    std::span<const double> rewards() const { return reward_; }
    const std::optional<std::vector<double>>& raw_reward() const { return raw_reward_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<double> transition_;
    std::vector<double> reward_;
    std::optional<std::vector<double>> raw_reward_;
    std::vector<std::string> labels_;
    std::vector<Successor> successors_;
    std::vector<std::size_t> successor_offsets_;
};

struct Violation {
    enum class Kind { kRowSum, kProbabilityRange, kRewardMismatch, kNonFinite };
    Kind kind;
    std::size_t state;
    std::size_t action;
    std::size_t next_state; // meaningful for kProbabilityRange / kNonFinite
    double value;
    std::string describe() const;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline constexpr double kRowSumTolerance = 1e-9;

ValidationReport validate_mdp(const MdpModel& m);

struct AccessibilityReport {
    bool weakly_accessible;
    /// States lying on no cycle of the support graph, or outside the
    /// recurrent component.
    std::vector<std::size_t> transient;
};

/// Sufficient check for weak accessibility on the support digraph
/// s -> s' iff max_a P(s'|s,a) > 0.
AccessibilityReport check_weak_accessibility(const MdpModel& m);

class OccupancyMeasure {
public:
    OccupancyMeasure(std::size_t num_states, std::size_t num_actions, std::vector<double> values);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t size() const { return values_.size(); }
    double operator()(std::size_t s, std::size_t a) const { return values_[s * num_actions_ + a]; }
    std::span<const double> values() const { return values_; }

    /// Copy with entries in [-tol, 0) set to zero.
    OccupancyMeasure clamped(double tol = 1e-9) const;

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<double> values_;
};

struct OccupancyResiduals {
    double min_value;
    double mass_error;       // |sum - 1|
    double balance_residual; // max_s |inflow - outflow|
    bool feasible(double value_tol = 1e-9, double mass_tol = 1e-8, double balance_tol = 1e-7) const {
        return min_value >= -value_tol && mass_error <= mass_tol && balance_residual <= balance_tol;
    }
};

OccupancyResiduals occupancy_residuals(std::span<const double> values, const MdpModel& m);
inline OccupancyResiduals occupancy_residuals(const OccupancyMeasure& rho, const MdpModel& m) {
    return occupancy_residuals(rho.values(), m);
}

class StationaryPolicy {
public:
    StationaryPolicy(std::size_t num_states, std::size_t num_actions, std::vector<double> probs);

    static StationaryPolicy uniform(std::size_t num_states, std::size_t num_actions);
    static StationaryPolicy deterministic(std::size_t num_actions, std::span<const std::size_t> choice);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    double operator()(std::size_t s, std::size_t a) const { return probs_[s * num_actions_ + a]; }
    std::span<const double> probs() const { return probs_; }

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<double> probs_;
};

/// Ordered collection of occupancy measures over one MDP.
class OccupancySet {
public:
    explicit OccupancySet(std::vector<OccupancyMeasure> members);

    std::size_t size() const { return members_.size(); }
    const OccupancyMeasure& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<OccupancyMeasure>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

private:
    std::vector<OccupancyMeasure> members_;
};

/// Threshold below which a state's marginal counts as zero.
inline constexpr double kTransientMass = 1e-12;

/// Stationary state distribution of the chain induced by pi. Direct solve
/// up to this many states, power iteration beyond.
inline constexpr std::size_t kDirectSolveLimit = 2000;

std::vector<double> stationary_distribution(const MdpModel& m, const StationaryPolicy& pi);

OccupancyMeasure policy_to_occupancy(const MdpModel& m, const StationaryPolicy& pi);
StationaryPolicy occupancy_to_policy(const OccupancyMeasure& rho);
double average_reward(const OccupancyMeasure& rho, const MdpModel& m);
std::vector<double> state_occupancy(const OccupancyMeasure& rho);

} // namespace divplan
