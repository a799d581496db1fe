#include "divplan/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "divplan/error.hpp"
#include "divplan/simd/kernels.hpp"
#include "graph.hpp"

namespace divplan {

MdpModel::MdpModel(std::size_t num_states, std::size_t num_actions, std::vector<double> transition,
                   std::vector<double> reward, std::vector<std::string> labels)
    : num_states_(num_states),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      labels_(std::move(labels)) {
    if (num_states_ == 0 || num_actions_ == 0) {
        throw DimensionMismatch("MDP needs at least one state and one action");
    }
    if (transition_.size() != num_states_ * num_actions_ * num_states_) {
        throw DimensionMismatch("transition tensor must have S*A*S entries");
    }
    if (reward_.size() != num_states_ * num_actions_) {
        throw DimensionMismatch("reward must have S*A entries");
    }
    if (!labels_.empty() && labels_.size() != num_states_) {
        throw DimensionMismatch("labels must have one entry per state");
    }
    successor_offsets_.reserve(num_pairs() + 1);
    successor_offsets_.push_back(0);
    for (std::size_t sa = 0; sa < num_pairs(); ++sa) {
        const double* row = transition_.data() + sa * num_states_;
        for (std::size_t next = 0; next < num_states_; ++next) {
            if (row[next] != 0.0) {
                successors_.push_back({static_cast<std::uint32_t>(next), row[next]});
            }
        }
        successor_offsets_.push_back(successors_.size());
    }
}

MdpModel MdpModel::from_transition_rewards(std::size_t num_states, std::size_t num_actions,
                                           std::vector<double> transition,
                                           std::vector<double> raw_reward,
                                           std::vector<std::string> labels) {
    if (raw_reward.size() != num_states * num_actions * num_states ||
        transition.size() != raw_reward.size()) {
        throw DimensionMismatch("per-transition reward must have S*A*S entries");
    }
    std::vector<double> reward(num_states * num_actions, 0.0);
    for (std::size_t sa = 0; sa < reward.size(); ++sa) {
        reward[sa] = simd::scalar_kernels().dot(transition.data() + sa * num_states,
                                                raw_reward.data() + sa * num_states, num_states);
    }
    MdpModel m(num_states, num_actions, std::move(transition), std::move(reward), std::move(labels));
    m.raw_reward_ = std::move(raw_reward);
    return m;
}

std::span<const double> MdpModel::transition_row(std::size_t s, std::size_t a) const {
    return std::span<const double>(transition_).subspan(index(s, a) * num_states_, num_states_);
}

std::span<const Successor> MdpModel::successors(std::size_t s, std::size_t a) const {
    const auto sa = index(s, a);
    return std::span<const Successor>(successors_)
        .subspan(successor_offsets_[sa], successor_offsets_[sa + 1] - successor_offsets_[sa]);
}

std::string Violation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::kRowSum:
            os << "row sum of P(.|" << state << "," << action << ") is " << value;
            break;
        case Kind::kProbabilityRange:
            os << "P(" << next_state << "|" << state << "," << action << ") = " << value
               << " outside [0,1]";
            break;
        case Kind::kRewardMismatch:
            os << "r(" << state << "," << action << ") differs from expected R by " << value;
            break;
        case Kind::kNonFinite:
            os << "non-finite entry at (" << state << "," << action << "," << next_state << ")";
            break;
    }
    return os.str();
}

ValidationReport validate_mdp(const MdpModel& m) {
    ValidationReport report;
    const auto n = m.num_states();
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const auto row = m.transition_row(s, a);
            double total = 0.0;
            bool finite = true;
            for (std::size_t next = 0; next < n; ++next) {
                const double p = row[next];
                if (!std::isfinite(p)) {
                    report.violations.push_back({Violation::Kind::kNonFinite, s, a, next, p});
                    finite = false;
                    continue;
                }
                if (p < 0.0 || p > 1.0) {
                    report.violations.push_back({Violation::Kind::kProbabilityRange, s, a, next, p});
                }
                total += p;
            }
            if (finite && std::abs(total - 1.0) > kRowSumTolerance) {
                report.violations.push_back({Violation::Kind::kRowSum, s, a, 0, total});
            }
            if (!std::isfinite(m.reward(s, a))) {
                report.violations.push_back({Violation::Kind::kNonFinite, s, a, 0, m.reward(s, a)});
            }
            if (m.raw_reward()) {
                const double* raw = m.raw_reward()->data() + m.index(s, a) * n;
                double expected = 0.0;
                for (std::size_t next = 0; next < n; ++next) expected += row[next] * raw[next];
                const double diff = std::abs(expected - m.reward(s, a));
                if (!(diff <= 1e-9)) {
                    report.violations.push_back({Violation::Kind::kRewardMismatch, s, a, 0, diff});
                }
            }
        }
    }
    return report;
}

namespace {

detail::Digraph support_graph(const MdpModel& m) {
    detail::Digraph g(m.num_states());
    std::vector<bool> seen(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        std::fill(seen.begin(), seen.end(), false);
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            for (const auto& succ : m.successors(s, a)) {
                if (succ.prob > 0.0 && !seen[succ.state]) {
                    seen[succ.state] = true;
                    g[s].push_back(succ.state);
                }
            }
        }
    }
    return g;
}

detail::Digraph policy_graph(const MdpModel& m, const StationaryPolicy& pi) {
    detail::Digraph g(m.num_states());
    std::vector<bool> seen(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        std::fill(seen.begin(), seen.end(), false);
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            if (pi(s, a) <= 0.0) continue;
            for (const auto& succ : m.successors(s, a)) {
                if (succ.prob > 0.0 && !seen[succ.state]) {
                    seen[succ.state] = true;
                    g[s].push_back(succ.state);
                }
            }
        }
    }
    return g;
}

void check_shape(const MdpModel& m, std::size_t states, std::size_t actions, const char* what) {
    if (states != m.num_states() || actions != m.num_actions()) {
        throw DimensionMismatch(std::string(what) + " does not match the MDP dimensions");
    }
}

} // namespace

AccessibilityReport check_weak_accessibility(const MdpModel& m) {
    const auto g = support_graph(m);
    const auto comps = detail::strongly_connected_components(g);
    std::vector<std::size_t> comp_size(comps.count, 0);
    for (auto id : comps.id) ++comp_size[id];

    std::vector<bool> on_cycle(g.size(), false);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (comp_size[comps.id[v]] > 1 ||
            std::find(g[v].begin(), g[v].end(), static_cast<std::uint32_t>(v)) != g[v].end()) {
            on_cycle[v] = true;
        }
    }

    std::vector<std::uint32_t> cyclic_components;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (on_cycle[v] && std::find(cyclic_components.begin(), cyclic_components.end(),
                                     comps.id[v]) == cyclic_components.end()) {
            cyclic_components.push_back(comps.id[v]);
        }
    }

    AccessibilityReport report{false, {}};
    if (cyclic_components.size() == 1) {
        const auto reach = detail::can_reach(g, on_cycle);
        report.weakly_accessible = std::all_of(reach.begin(), reach.end(), [](bool b) { return b; });
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!on_cycle[v]) report.transient.push_back(v);
    }
    return report;
}

OccupancyMeasure::OccupancyMeasure(std::size_t num_states, std::size_t num_actions,
                                   std::vector<double> values)
    : num_states_(num_states), num_actions_(num_actions), values_(std::move(values)) {
    if (values_.size() != num_states_ * num_actions_) {
        throw DimensionMismatch("occupancy measure must have S*A entries");
    }
}

OccupancyMeasure OccupancyMeasure::clamped(double tol) const {
    auto v = values_;
    for (auto& x : v) {
        if (x < 0.0 && x >= -tol) x = 0.0;
    }
    return OccupancyMeasure(num_states_, num_actions_, std::move(v));
}

OccupancyResiduals occupancy_residuals(std::span<const double> values, const MdpModel& m) {
    if (values.size() != m.num_pairs()) {
        throw DimensionMismatch("occupancy vector does not match the MDP dimensions");
    }
    OccupancyResiduals r{0.0, 0.0, 0.0};
    r.min_value = values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    r.mass_error = std::abs(total - 1.0);

    std::vector<double> balance(m.num_states(), 0.0);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const double x = values[m.index(s, a)];
            balance[s] += x;
            for (const auto& succ : m.successors(s, a)) balance[succ.state] -= succ.prob * x;
        }
    }
    for (double b : balance) r.balance_residual = std::max(r.balance_residual, std::abs(b));
    return r;
}

StationaryPolicy::StationaryPolicy(std::size_t num_states, std::size_t num_actions,
                                   std::vector<double> probs)
    : num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
    if (probs_.size() != num_states_ * num_actions_) {
        throw DimensionMismatch("policy must have S*A entries");
    }
    for (std::size_t s = 0; s < num_states_; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < num_actions_; ++a) {
            const double p = probs_[s * num_actions_ + a];
            if (!(p >= 0.0 && p <= 1.0)) throw DomainError("policy probability outside [0,1]");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw DomainError("policy row " + std::to_string(s) + " does not sum to one");
        }
    }
}

StationaryPolicy StationaryPolicy::uniform(std::size_t num_states, std::size_t num_actions) {
    return StationaryPolicy(num_states, num_actions,
                            std::vector<double>(num_states * num_actions, 1.0 / num_actions));
}

StationaryPolicy StationaryPolicy::deterministic(std::size_t num_actions,
                                                 std::span<const std::size_t> choice) {
    std::vector<double> probs(choice.size() * num_actions, 0.0);
    for (std::size_t s = 0; s < choice.size(); ++s) {
        if (choice[s] >= num_actions) throw DomainError("action index out of range");
        probs[s * num_actions + choice[s]] = 1.0;
    }
    return StationaryPolicy(choice.size(), num_actions, std::move(probs));
}

OccupancySet::OccupancySet(std::vector<OccupancyMeasure> members) : members_(std::move(members)) {
    for (const auto& m : members_) {
        if (m.num_states() != members_.front().num_states() ||
            m.num_actions() != members_.front().num_actions()) {
            throw DimensionMismatch("occupancy set members have different shapes");
        }
    }
}

namespace {

std::vector<double> stationary_direct(const MdpModel& m, const StationaryPolicy& pi) {
    const auto n = static_cast<Eigen::Index>(m.num_states());
    // Rows: (P_pi^T - I) d = 0 with the last balance equation replaced by sum(d) = 1.
    Eigen::MatrixXd system = -Eigen::MatrixXd::Identity(n, n);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const double w = pi(s, a);
            if (w == 0.0) continue;
            for (const auto& succ : m.successors(s, a)) {
                system(succ.state, static_cast<Eigen::Index>(s)) += w * succ.prob;
            }
        }
    }
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd d = system.partialPivLu().solve(rhs);
    return std::vector<double>(d.data(), d.data() + n);
}

std::vector<double> stationary_power(const MdpModel& m, const StationaryPolicy& pi) {
    // Lazy chain (I + P_pi)/2 shares the stationary law and is aperiodic.
    const auto n = m.num_states();
    std::vector<double> d(n, 1.0 / static_cast<double>(n)), next(n);
    for (int iter = 0; iter < 1000000; ++iter) {
        for (std::size_t s = 0; s < n; ++s) next[s] = 0.5 * d[s];
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < m.num_actions(); ++a) {
                const double w = 0.5 * d[s] * pi(s, a);
                if (w == 0.0) continue;
                for (const auto& succ : m.successors(s, a)) next[succ.state] += w * succ.prob;
            }
        }
        double diff = 0.0;
        for (std::size_t s = 0; s < n; ++s) diff += std::abs(next[s] - d[s]);
        d.swap(next);
        if (diff < 1e-12) break;
    }
    return d;
}

} // namespace

std::vector<double> stationary_distribution(const MdpModel& m, const StationaryPolicy& pi) {
    check_shape(m, pi.num_states(), pi.num_actions(), "policy");
    const auto g = policy_graph(m, pi);
    const auto comps = detail::strongly_connected_components(g);
    const auto closed = detail::closed_components(g, comps);
    const auto recurrent = std::count(closed.begin(), closed.end(), true);
    if (recurrent != 1) {
        throw MultichainError("induced chain has " + std::to_string(recurrent) +
                              " recurrent classes");
    }

    auto d = m.num_states() <= kDirectSolveLimit ? stationary_direct(m, pi) : stationary_power(m, pi);
    // Transient states carry zero mass; clear rounding noise and renormalize.
    double total = 0.0;
    for (std::size_t s = 0; s < d.size(); ++s) {
        if (!closed[comps.id[s]] || d[s] < 0.0) d[s] = 0.0;
        total += d[s];
    }
    for (auto& x : d) x /= total;
    return d;
}

OccupancyMeasure policy_to_occupancy(const MdpModel& m, const StationaryPolicy& pi) {
    const auto d = stationary_distribution(m, pi);
    std::vector<double> rho(m.num_pairs());
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) rho[m.index(s, a)] = d[s] * pi(s, a);
    }
    return OccupancyMeasure(m.num_states(), m.num_actions(), std::move(rho));
}

StationaryPolicy occupancy_to_policy(const OccupancyMeasure& rho) {
    const auto na = rho.num_actions();
    std::vector<double> probs(rho.size());
    for (std::size_t s = 0; s < rho.num_states(); ++s) {
        double mass = 0.0;
        for (std::size_t a = 0; a < na; ++a) mass += std::max(rho(s, a), 0.0);
        for (std::size_t a = 0; a < na; ++a) {
            probs[s * na + a] = mass > kTransientMass ? std::max(rho(s, a), 0.0) / mass
                                                      : 1.0 / static_cast<double>(na);
        }
    }
    return StationaryPolicy(rho.num_states(), na, std::move(probs));
}

double average_reward(const OccupancyMeasure& rho, const MdpModel& m) {
    check_shape(m, rho.num_states(), rho.num_actions(), "occupancy measure");
    return simd::dot(rho.values(), m.rewards());
}

std::vector<double> state_occupancy(const OccupancyMeasure& rho) {
    std::vector<double> marginal(rho.num_states(), 0.0);
    for (std::size_t s = 0; s < rho.num_states(); ++s) {
        for (std::size_t a = 0; a < rho.num_actions(); ++a) marginal[s] += rho(s, a);
    }
    return marginal;
}

} // namespace divplan
