#include "pomg/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace pomg {

FiniteWindowPolicy::FiniteWindowPolicy(int horizon, int num_actions, int num_obs, int window_len)
    : horizon_(horizon), num_actions_(num_actions), codec_(num_actions, num_obs, window_len) {
  if (horizon < 1 || num_actions < 1) throw std::invalid_argument("FiniteWindowPolicy: bad dimensions");
  rows_.assign(static_cast<std::size_t>(horizon),
               std::vector<double>(static_cast<std::size_t>(codec_.total()) * num_actions_,
                                   1.0 / num_actions_));
}

void FiniteWindowPolicy::set_row(int h, int window, std::span<const double> row) {
  if (static_cast<int>(row.size()) != num_actions_)
    throw std::invalid_argument("set_row: wrong arity");
  double sum = 0.0;
  for (double p : row) {
    if (std::isnan(p) || p < 0.0) throw std::invalid_argument("set_row: negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("set_row: row does not sum to 1");
  auto* dst = rows_[static_cast<std::size_t>(h)].data() + static_cast<std::size_t>(window * num_actions_);
  for (int a = 0; a < num_actions_; ++a) dst[a] = row[static_cast<std::size_t>(a)];
}

bool FiniteWindowPolicy::rows_are_distributions() const {
  for (const auto& t : rows_) {
    for (std::size_t w = 0; w * num_actions_ < t.size(); ++w) {
      double sum = 0.0;
      for (int a = 0; a < num_actions_; ++a) {
        const double p = t[w * num_actions_ + static_cast<std::size_t>(a)];
        if (std::isnan(p) || p < 0.0) return false;
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) return false;
    }
  }
  return true;
}

FiniteWindowPolicy mix_exploration(const FiniteWindowPolicy& policy, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("mix_exploration: eps outside [0,1]");
  FiniteWindowPolicy mixed = policy;
  const double floor = eps / policy.num_actions();
  for (int h = 0; h < policy.horizon(); ++h)
    for (double& p : mixed.table(h)) p = floor + (1.0 - eps) * p;
  return mixed;
}

PolicyProfile mix_exploration(const PolicyProfile& profile, double eps) {
  PolicyProfile mixed{profile.window_len, {}};
  mixed.players.reserve(profile.players.size());
  for (const auto& p : profile.players) mixed.players.push_back(mix_exploration(p, eps));
  return mixed;
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k)
    if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) best = k;
  return best;
}

std::vector<double> soft_update(std::span<const double> policy_row, std::span<const double> q_row,
                                double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("soft_update: eta outside (0,1)");
  if (policy_row.size() != q_row.size()) throw std::invalid_argument("soft_update: arity mismatch");
  for (double q : q_row)
    if (std::isnan(q)) throw std::invalid_argument("soft_update: NaN in q_row");
  const int greedy = argmax_lowest(q_row);
  std::vector<double> out(policy_row.size());
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a] = (1.0 - eta) * policy_row[a] + (static_cast<int>(a) == greedy ? eta : 0.0);
  return out;
}

FiniteWindowPolicy random_policy(int horizon, int num_actions, int num_obs, int window_len,
                                 SeededRng& rng) {
  FiniteWindowPolicy policy(horizon, num_actions, num_obs, window_len);
  std::vector<double> row(static_cast<std::size_t>(num_actions));
  for (int h = 0; h < horizon; ++h) {
    for (int w = 0; w < policy.codec().total(); ++w) {
      double sum = 0.0;
      for (auto& p : row) {
        p = 1e-3 + rng.next_double();  // keep rows bounded away from degenerate
        sum += p;
      }
      for (auto& p : row) p /= sum;
      // exact renormalization so stored rows pass the 1e-12 gate
      double check = 0.0;
      for (std::size_t a = 0; a + 1 < row.size(); ++a) check += row[a];
      row.back() = 1.0 - check;
      policy.set_row(h, w, row);
    }
  }
  return policy;
}

}  // namespace pomg
