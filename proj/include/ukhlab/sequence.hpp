#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ukh {

// Integer sequence on Z that is periodic outside a finite core.
//
// Indices core_start .. core_start + core.size() - 1 read from `core`. To the
// right the sequence repeats `right_period` starting at index core_end(); to
// the left it repeats `left_period` so that left_period.back() sits at
// core_start - 1. An empty period means the tail is identically zero.
struct EventuallyPeriodicSequence {
  std::vector<std::int64_t> core;
  std::int64_t core_start = 0;
  std::vector<std::int64_t> left_period;
  std::vector<std::int64_t> right_period;

  static EventuallyPeriodicSequence constant(std::int64_t value);
  static EventuallyPeriodicSequence delta(std::int64_t index, std::int64_t value = 1);
  // Two-sided periodic sequence with period[0] at index 0.
  static EventuallyPeriodicSequence periodic(std::vector<std::int64_t> period);

  std::int64_t core_end() const { return core_start + static_cast<std::int64_t>(core.size()); }
  std::int64_t at(std::int64_t n) const;
  // Result r with r(n) = at(n - k); k = 1 is the right shift.
  EventuallyPeriodicSequence shifted(std::int64_t k) const;
  // Zero outside [lo, infinity).
  EventuallyPeriodicSequence restricted_from(std::int64_t lo) const;
  // Primitive periods, zero periods dropped, core trimmed where a tail
  // already predicts the value.
  EventuallyPeriodicSequence normalized() const;
  bool is_zero() const;
  std::int64_t sup_abs() const;
};

EventuallyPeriodicSequence operator+(const EventuallyPeriodicSequence& a,
                                     const EventuallyPeriodicSequence& b);
EventuallyPeriodicSequence operator-(const EventuallyPeriodicSequence& a);
EventuallyPeriodicSequence operator-(const EventuallyPeriodicSequence& a,
                                     const EventuallyPeriodicSequence& b);
EventuallyPeriodicSequence operator*(std::int64_t k, const EventuallyPeriodicSequence& a);
bool operator==(const EventuallyPeriodicSequence& a, const EventuallyPeriodicSequence& b);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  static Rational make(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Side { Left, Right, Both };
const char* to_string(Side side) noexcept;

// F(n) = sum_{core_start <= k < n} b_k for n >= core_start and
// -sum_{n <= k < core_start} b_k otherwise, so interval sums are differences.
std::int64_t partial_sum(const EventuallyPeriodicSequence& seq, std::int64_t n);

struct PartialSumWitness {
  std::int64_t index = 0;
  std::int64_t value = 0;
};

struct SummabilityResult {
  bool in_s = false;
  // When in_s: sup |F(n)| over the requested side, or sup F - inf F for both
  // sides (which bounds every interval sum).
  std::int64_t bound = 0;
  // When !in_s: the first offending side and its period drift.
  std::optional<Side> unbounded_side;
  Rational drift;
};

SummabilityResult in_s(const EventuallyPeriodicSequence& seq, Side side);

// Index whose partial sum exceeds `candidate` in absolute value on a side
// with nonzero drift.
PartialSumWitness witness_exceeding(const EventuallyPeriodicSequence& seq, Side side,
                                    std::int64_t candidate);

// True iff (I - S)b = 0, i.e. b is constant.
bool shift_kernel_check(const EventuallyPeriodicSequence& seq);

}  // namespace ukh
