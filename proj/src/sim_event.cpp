#include <algorithm>
#include <stdexcept>

#include "gictk/sim.hpp"

namespace gictk::sim {

namespace {

// Min-heap order: earliest time first, then earliest insertion.
struct Later {
  bool operator()(const auto& a, const auto& b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.seq > b.seq;
  }
};

}  // namespace

void EventQueue::schedule(TimeNs at, std::string label, Handler fn) {
  if (now_ != std::numeric_limits<TimeNs>::min() && at < now_) {
    throw std::invalid_argument("event scheduled in the past");
  }
  heap_.push_back(Pending{at, next_seq_++, std::move(label), std::move(fn)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

std::vector<TraceEntry> EventQueue::run() {
  std::vector<TraceEntry> trace;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Pending ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.at;
    trace.push_back(TraceEntry{ev.at, ev.seq, ev.label});
    if (ev.fn) ev.fn();
  }
  return trace;
}

std::string format_trace(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const TraceEntry& e : trace) {
    out += format_seconds(e.at);
    out += ' ';
    out += std::to_string(e.seq);
    out += ' ';
    out += e.label;
    out += '\n';
  }
  return out;
}

}  // namespace gictk::sim
