#include "ukhlab/sequence.hpp"

#include <algorithm>
#include <numeric>

#include "ukhlab/error.hpp"

namespace ukh {

namespace {

constexpr std::int64_t kMaxPeriod = std::int64_t{1} << 20;

std::int64_t mod(std::int64_t a, std::int64_t m) {
  auto r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t sum(const std::vector<std::int64_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

std::int64_t combined_period(std::size_t a, std::size_t b) {
  if (a == 0) return static_cast<std::int64_t>(b);
  if (b == 0) return static_cast<std::int64_t>(a);
  const auto l = std::lcm(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
  if (l > kMaxPeriod) fail(ErrorCode::Unsupported, "combined period is too long");
  return l;
}

std::vector<std::int64_t> primitive(std::vector<std::int64_t> p) {
  if (std::all_of(p.begin(), p.end(), [](std::int64_t x) { return x == 0; })) return {};
  const auto n = p.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = p[i] == p[i - d];
    if (ok) {
      p.resize(d);
      break;
    }
  }
  return p;
}

}  // namespace

EventuallyPeriodicSequence EventuallyPeriodicSequence::constant(std::int64_t value) {
  if (value == 0) return {};
  return {{}, 0, {value}, {value}};
}

EventuallyPeriodicSequence EventuallyPeriodicSequence::delta(std::int64_t index,
                                                             std::int64_t value) {
  return {{value}, index, {}, {}};
}

EventuallyPeriodicSequence EventuallyPeriodicSequence::periodic(std::vector<std::int64_t> period) {
  require(!period.empty(), "periodic sequence needs a nonempty period");
  return {{}, 0, period, period};
}

std::int64_t EventuallyPeriodicSequence::at(std::int64_t n) const {
  if (n >= core_start && n < core_end()) return core[static_cast<std::size_t>(n - core_start)];
  if (n >= core_end()) {
    if (right_period.empty()) return 0;
    const auto len = static_cast<std::int64_t>(right_period.size());
    return right_period[static_cast<std::size_t>(mod(n - core_end(), len))];
  }
  if (left_period.empty()) return 0;
  const auto len = static_cast<std::int64_t>(left_period.size());
  return left_period[static_cast<std::size_t>(mod(n - core_start, len))];
}

EventuallyPeriodicSequence EventuallyPeriodicSequence::shifted(std::int64_t k) const {
  auto out = *this;
  out.core_start += k;
  return out;
}

EventuallyPeriodicSequence EventuallyPeriodicSequence::restricted_from(std::int64_t lo) const {
  EventuallyPeriodicSequence out;
  out.core_start = lo;
  out.right_period = right_period;
  const auto hi = std::max(lo, core_end());
  for (auto n = lo; n < hi; ++n) out.core.push_back(at(n));
  if (lo > core_end() && !right_period.empty()) {
    // Realign the right period to start at lo.
    const auto len = static_cast<std::int64_t>(right_period.size());
    std::vector<std::int64_t> p(right_period.size());
    for (std::int64_t i = 0; i < len; ++i) p[static_cast<std::size_t>(i)] = at(lo + i);
    out.right_period = std::move(p);
  }
  return out.normalized();
}

EventuallyPeriodicSequence EventuallyPeriodicSequence::normalized() const {
  auto out = *this;
  out.left_period = primitive(out.left_period);
  out.right_period = primitive(out.right_period);
  while (!out.core.empty()) {
    const auto predicted = out.right_period.empty() ? 0 : out.right_period.back();
    if (out.core.back() != predicted) break;
    out.core.pop_back();
    if (!out.right_period.empty())
      std::rotate(out.right_period.rbegin(), out.right_period.rbegin() + 1,
                  out.right_period.rend());
  }
  while (!out.core.empty()) {
    const auto predicted = out.left_period.empty() ? 0 : out.left_period.front();
    if (out.core.front() != predicted) break;
    out.core.erase(out.core.begin());
    ++out.core_start;
    if (!out.left_period.empty())
      std::rotate(out.left_period.begin(), out.left_period.begin() + 1, out.left_period.end());
  }
  if (out.core.empty() && out.left_period.empty() && out.right_period.empty()) out.core_start = 0;
  return out;
}

bool EventuallyPeriodicSequence::is_zero() const {
  auto zero = [](const std::vector<std::int64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
  };
  return zero(core) && zero(left_period) && zero(right_period);
}

std::int64_t EventuallyPeriodicSequence::sup_abs() const {
  std::int64_t m = 0;
  for (const auto* v : {&core, &left_period, &right_period}) {
    for (auto x : *v) m = std::max(m, x < 0 ? -x : x);
  }
  return m;
}

EventuallyPeriodicSequence operator+(const EventuallyPeriodicSequence& a,
                                     const EventuallyPeriodicSequence& b) {
  EventuallyPeriodicSequence out;
  const auto lo = std::min(a.core_start, b.core_start);
  const auto hi = std::max(a.core_end(), b.core_end());
  out.core_start = lo;
  for (auto n = lo; n < hi; ++n) out.core.push_back(a.at(n) + b.at(n));
  const auto left = combined_period(a.left_period.size(), b.left_period.size());
  for (auto n = lo - left; n < lo; ++n) out.left_period.push_back(a.at(n) + b.at(n));
  const auto right = combined_period(a.right_period.size(), b.right_period.size());
  for (auto n = hi; n < hi + right; ++n) out.right_period.push_back(a.at(n) + b.at(n));
  return out.normalized();
}

EventuallyPeriodicSequence operator*(std::int64_t k, const EventuallyPeriodicSequence& a) {
  auto out = a;
  for (auto* v : {&out.core, &out.left_period, &out.right_period}) {
    for (auto& x : *v) x *= k;
  }
  return out.normalized();
}

EventuallyPeriodicSequence operator-(const EventuallyPeriodicSequence& a) { return -1 * a; }

EventuallyPeriodicSequence operator-(const EventuallyPeriodicSequence& a,
                                     const EventuallyPeriodicSequence& b) {
  return a + (-b);
}

bool operator==(const EventuallyPeriodicSequence& a, const EventuallyPeriodicSequence& b) {
  return (a - b).is_zero();
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  require(den != 0, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

const char* to_string(Side side) noexcept {
  switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Both: return "both";
  }
  return "unknown";
}

std::int64_t partial_sum(const EventuallyPeriodicSequence& seq, std::int64_t n) {
  const auto s = seq.core_start;
  const auto e = seq.core_end();
  if (n >= s) {
    std::int64_t total = 0;
    for (auto k = s; k < std::min(n, e); ++k) total += seq.core[static_cast<std::size_t>(k - s)];
    if (n > e && !seq.right_period.empty()) {
      const auto len = static_cast<std::int64_t>(seq.right_period.size());
      const auto q = (n - e) / len;
      const auto r = (n - e) % len;
      total += q * sum(seq.right_period);
      for (std::int64_t i = 0; i < r; ++i) total += seq.right_period[static_cast<std::size_t>(i)];
    }
    return total;
  }
  if (seq.left_period.empty()) return 0;
  const auto len = static_cast<std::int64_t>(seq.left_period.size());
  const auto m = s - n;
  const auto q = m / len;
  const auto r = m % len;
  std::int64_t total = q * sum(seq.left_period);
  for (auto i = len - r; i < len; ++i) total += seq.left_period[static_cast<std::size_t>(i)];
  return -total;
}

SummabilityResult in_s(const EventuallyPeriodicSequence& seq, Side side) {
  SummabilityResult out;
  const auto left_sum = sum(seq.left_period);
  const auto right_sum = sum(seq.right_period);
  const bool check_left = side != Side::Right;
  const bool check_right = side != Side::Left;
  if (check_right && right_sum != 0) {
    out.unbounded_side = Side::Right;
    out.drift = Rational::make(right_sum, static_cast<std::int64_t>(seq.right_period.size()));
    return out;
  }
  if (check_left && left_sum != 0) {
    out.unbounded_side = Side::Left;
    out.drift = Rational::make(left_sum, static_cast<std::int64_t>(seq.left_period.size()));
    return out;
  }
  out.in_s = true;
  const auto s = seq.core_start;
  const auto lo = check_left ? s - static_cast<std::int64_t>(seq.left_period.size()) : s;
  const auto hi =
      check_right ? seq.core_end() + static_cast<std::int64_t>(seq.right_period.size()) : s;
  std::int64_t max_f = 0, min_f = 0, max_abs = 0;
  for (auto n = lo; n <= hi; ++n) {
    const auto f = partial_sum(seq, n);
    max_f = std::max(max_f, f);
    min_f = std::min(min_f, f);
    max_abs = std::max(max_abs, f < 0 ? -f : f);
  }
  out.bound = side == Side::Both ? max_f - min_f : max_abs;
  return out;
}

PartialSumWitness witness_exceeding(const EventuallyPeriodicSequence& seq, Side side,
                                    std::int64_t candidate) {
  require(candidate >= 0, "candidate bound must be nonnegative");
  const auto right_sum = sum(seq.right_period);
  const auto left_sum = sum(seq.left_period);
  auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
  if (side != Side::Left && right_sum != 0) {
    const auto e = seq.core_end();
    const auto fe = partial_sum(seq, e);
    const auto step = right_sum < 0 ? -right_sum : right_sum;
    const auto q = ceil_div(candidate + (fe < 0 ? -fe : fe) + 1, step);
    const auto n = e + q * static_cast<std::int64_t>(seq.right_period.size());
    return {n, partial_sum(seq, n)};
  }
  if (side != Side::Right && left_sum != 0) {
    const auto step = left_sum < 0 ? -left_sum : left_sum;
    const auto q = ceil_div(candidate + 1, step);
    const auto n = seq.core_start - q * static_cast<std::int64_t>(seq.left_period.size());
    return {n, partial_sum(seq, n)};
  }
  fail(ErrorCode::InvalidInput, "partial sums are bounded on the requested side");
}

bool shift_kernel_check(const EventuallyPeriodicSequence& seq) {
  return (seq - seq.shifted(1)).is_zero();
}

}  // namespace ukh
