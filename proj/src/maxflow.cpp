#include "ukhlab/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "ukhlab/error.hpp"

namespace ukh {

MaxFlow::MaxFlow(std::size_t node_count) : out_(node_count) {}

std::size_t MaxFlow::add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
  require(from < out_.size() && to < out_.size(), "flow arc endpoint out of range");
  require(capacity >= 0, "flow capacity must be nonnegative");
  const auto id = arcs_.size();
  arcs_.push_back({to, capacity, capacity});
  out_[from].push_back(id);
  arcs_.push_back({from, 0, 0});
  out_[to].push_back(id + 1);
  return id;
}

bool MaxFlow::levels(std::size_t source, std::size_t sink) {
  level_.assign(out_.size(), -1);
  level_[source] = 0;
  std::deque<std::size_t> queue{source};
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto id : out_[v]) {
      const auto& a = arcs_[id];
      if (a.capacity > 0 && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        queue.push_back(a.to);
      }
    }
  }
  return level_[sink] >= 0;
}

std::int64_t MaxFlow::push(std::size_t v, std::size_t sink, std::int64_t limit) {
  if (v == sink) return limit;
  for (; next_[v] < out_[v].size(); ++next_[v]) {
    const auto id = out_[v][next_[v]];
    auto& a = arcs_[id];
    if (a.capacity <= 0 || level_[a.to] != level_[v] + 1) continue;
    const auto pushed = push(a.to, sink, std::min(limit, a.capacity));
    if (pushed > 0) {
      arcs_[id].capacity -= pushed;
      arcs_[id ^ 1].capacity += pushed;
      return pushed;
    }
  }
  return 0;
}

std::int64_t MaxFlow::run(std::size_t source, std::size_t sink) {
  require(source < out_.size() && sink < out_.size() && source != sink,
          "invalid flow terminals");
  std::int64_t total = 0;
  while (levels(source, sink)) {
    next_.assign(out_.size(), 0);
    while (auto f = push(source, sink, std::numeric_limits<std::int64_t>::max())) total += f;
  }
  return total;
}

std::int64_t MaxFlow::flow(std::size_t arc) const {
  require(arc < arcs_.size() && arc % 2 == 0, "unknown flow arc");
  return arcs_[arc].original - arcs_[arc].capacity;
}

}  // namespace ukh
