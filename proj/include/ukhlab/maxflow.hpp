#pragma once

#include <cstdint>
#include <vector>

namespace ukh {

// Dinic max-flow on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t node_count);

  // Returns an arc id usable with flow().
  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity);
  std::int64_t run(std::size_t source, std::size_t sink);
  std::int64_t flow(std::size_t arc) const;

 private:
  struct Arc {
    std::size_t to;
    std::int64_t capacity;
    std::int64_t original;
  };
  bool levels(std::size_t source, std::size_t sink);
  std::int64_t push(std::size_t v, std::size_t sink, std::int64_t limit);

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::int64_t> level_;
  std::vector<std::size_t> next_;
};

}  // namespace ukh
