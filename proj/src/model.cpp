#include "pomg/model.hpp"

#include <cmath>
#include <sstream>

namespace pomg {

namespace {

constexpr double kRowTol = 1e-12;

void check_rows(const std::vector<double>& table, int rows, int cols, const std::string& where,
                std::vector<ValidationIssue>& out) {
  if (static_cast<int>(table.size()) != rows * cols) {
    out.push_back({where, "table has " + std::to_string(table.size()) + " entries, expected " +
                              std::to_string(rows * cols)});
    return;
  }
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    bool in_range = true;
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r * cols + c)];
      if (!(p >= 0.0 && p <= 1.0 + kRowTol) || std::isnan(p)) in_range = false;
      sum += p;
    }
    if (!in_range) out.push_back({where + " row=" + std::to_string(r), "entry outside [0,1]"});
    if (std::abs(sum - 1.0) > kRowTol)
      out.push_back({where + " row=" + std::to_string(r), "row sums to " + std::to_string(sum)});
  }
}

}  // namespace

std::vector<ValidationIssue> validate_model(const PomgModel& m) {
  std::vector<ValidationIssue> issues;
  const int N = m.num_players;
  const int H = m.horizon;
  if (N < 1) issues.push_back({"model", "num_players < 1"});
  if (H < 1) issues.push_back({"model", "horizon < 1"});
  auto dims_ok = [&](const auto& v, const std::string& name) {
    if (static_cast<int>(v.size()) != N) {
      issues.push_back({name, "expected " + std::to_string(N) + " player entries"});
      return false;
    }
    return true;
  };
  if (!dims_ok(m.state_sizes, "state_sizes") || !dims_ok(m.action_sizes, "action_sizes") ||
      !dims_ok(m.obs_sizes, "obs_sizes") || !dims_ok(m.transition, "transition") ||
      !dims_ok(m.observation, "observation") || !dims_ok(m.reward, "reward") ||
      !dims_ok(m.init, "init"))
    return issues;
  for (int i = 0; i < N; ++i)
    if (m.state_sizes[static_cast<std::size_t>(i)] < 1 || m.action_sizes[static_cast<std::size_t>(i)] < 1 ||
        m.obs_sizes[static_cast<std::size_t>(i)] < 1) {
      issues.push_back({"spaces player=" + std::to_string(i), "size < 1"});
      return issues;
    }

  std::int64_t joint_sa = 1;
  for (int i = 0; i < N; ++i)
    joint_sa *= static_cast<std::int64_t>(m.state_sizes[static_cast<std::size_t>(i)]) *
                m.action_sizes[static_cast<std::size_t>(i)];

  for (int i = 0; i < N; ++i) {
    const int S = m.state_sizes[static_cast<std::size_t>(i)];
    const int A = m.action_sizes[static_cast<std::size_t>(i)];
    const int O = m.obs_sizes[static_cast<std::size_t>(i)];
    const std::string pi = " player=" + std::to_string(i);
    if (static_cast<int>(m.transition[static_cast<std::size_t>(i)].size()) != H ||
        static_cast<int>(m.observation[static_cast<std::size_t>(i)].size()) != H ||
        static_cast<int>(m.reward[static_cast<std::size_t>(i)].size()) != H) {
      issues.push_back({"kernels" + pi, "expected " + std::to_string(H) + " steps"});
      continue;
    }
    for (int h = 0; h < H; ++h) {
      const std::string ph = pi + " step=" + std::to_string(h);
      check_rows(m.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)], S * A, S,
                 "transition" + ph, issues);
      check_rows(m.observation[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)], S, O,
                 "observation" + ph, issues);
      const auto& r = m.reward[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      if (static_cast<std::int64_t>(r.size()) != joint_sa) {
        issues.push_back({"reward" + ph, "table has " + std::to_string(r.size()) + " entries, expected " +
                                             std::to_string(joint_sa)});
        continue;
      }
      for (std::size_t k = 0; k < r.size(); ++k)
        if (!(r[k] >= -kRowTol && r[k] <= 1.0 + kRowTol) || std::isnan(r[k])) {
          issues.push_back({"reward" + ph + " cell=" + std::to_string(k),
                            "value " + std::to_string(r[k]) + " outside [0,1]"});
          break;
        }
    }
    check_rows(m.init[static_cast<std::size_t>(i)], 1, S, "init" + pi, issues);
  }
  return issues;
}

void require_valid(const PomgModel& model) {
  const auto issues = validate_model(model);
  if (issues.empty()) return;
  std::ostringstream oss;
  oss << "invalid model:";
  for (std::size_t k = 0; k < issues.size() && k < 4; ++k)
    oss << " [" << issues[k].where << ": " << issues[k].what << "]";
  if (issues.size() > 4) oss << " (+" << issues.size() - 4 << " more)";
  throw std::invalid_argument(oss.str());
}

}  // namespace pomg
