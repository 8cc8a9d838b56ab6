#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pomg {

/// One action-observation pair of a local history window.
struct WindowPair {
  int action = 0;
  int obs = 0;
  friend bool operator==(const WindowPair&, const WindowPair&) = default;
};

/**
 * Mixed-radix bijection between action-observation windows of length
 * 0..max_len and a contiguous integer range.
 *
 * Lengths occupy disjoint offset blocks (empty window is index 0), and
 * within a block the oldest pair is the most significant digit, so the
 * whole window set of one player is enumerable as [0, total()).
 */
class WindowCodec {
 public:
  WindowCodec() = default;

  WindowCodec(int num_actions, int num_obs, int max_len)
      : num_actions_(num_actions), num_obs_(num_obs), max_len_(max_len) {
    if (num_actions < 1 || num_obs < 1 || max_len < 0)
      throw std::invalid_argument("WindowCodec: bad dimensions");
    offsets_.resize(static_cast<std::size_t>(max_len) + 2);
    offsets_[0] = 0;
    std::int64_t block = 1;
    for (int len = 0; len <= max_len; ++len) {
      offsets_[static_cast<std::size_t>(len) + 1] = offsets_[len] + block;
      block *= base();
      if (offsets_[static_cast<std::size_t>(len) + 1] > (1LL << 30))
        throw std::invalid_argument("WindowCodec: window space too large");
    }
  }

  int base() const { return num_actions_ * num_obs_; }
  int max_len() const { return max_len_; }
  int num_actions() const { return num_actions_; }
  int num_obs() const { return num_obs_; }

  /// Total number of windows of all lengths 0..max_len.
  int total() const { return static_cast<int>(offsets_.back()); }

  /// First index of the length-`len` block.
  int offset(int len) const { return static_cast<int>(offsets_.at(static_cast<std::size_t>(len))); }

  /// Number of windows of exactly length `len`.
  int count(int len) const { return offset(len + 1) - offset(len); }

  int length_of(int index) const {
    if (index < 0 || index >= total()) throw std::invalid_argument("WindowCodec: index out of range");
    int len = 0;
    while (index >= offset(len + 1)) ++len;
    return len;
  }

  int encode(const std::vector<WindowPair>& pairs) const {
    const int len = static_cast<int>(pairs.size());
    if (len > max_len_) throw std::invalid_argument("WindowCodec: window longer than max_len");
    std::int64_t code = 0;
    for (const auto& p : pairs) {
      if (p.action < 0 || p.action >= num_actions_ || p.obs < 0 || p.obs >= num_obs_)
        throw std::invalid_argument("WindowCodec: pair component out of range");
      code = code * base() + digit(p);
    }
    return offset(len) + static_cast<int>(code);
  }

  std::vector<WindowPair> decode(int index) const {
    const int len = length_of(index);
    int code = index - offset(len);
    std::vector<WindowPair> pairs(static_cast<std::size_t>(len));
    for (int k = len - 1; k >= 0; --k) {
      const int d = code % base();
      pairs[static_cast<std::size_t>(k)] = {d / num_obs_, d % num_obs_};
      code /= base();
    }
    return pairs;
  }

  /// Index of truncate_m(w ∘ (a, o)): appends the new pair and drops the
  /// oldest one when the window is already full. O(1).
  int extend(int index, int action, int obs) const {
    if (action < 0 || action >= num_actions_ || obs < 0 || obs >= num_obs_)
      throw std::invalid_argument("WindowCodec: pair component out of range");
    const int len = length_of(index);
    const int d = digit({action, obs});
    if (max_len_ == 0) return 0;
    int code = index - offset(len);
    if (len < max_len_) return offset(len + 1) + code * base() + d;
    const int head = count(max_len_) / base();  // base^(m-1)
    return offset(max_len_) + (code % head) * base() + d;
  }

  /// Window length used when acting at (0-based) step h.
  static int length_at_step(int h, int m) { return h < m ? h : m; }

  friend bool operator==(const WindowCodec&, const WindowCodec&) = default;

 private:
  int digit(const WindowPair& p) const { return p.action * num_obs_ + p.obs; }

  int num_actions_ = 1;
  int num_obs_ = 1;
  int max_len_ = 0;
  std::vector<std::int64_t> offsets_{0, 1};
};

}  // namespace pomg
