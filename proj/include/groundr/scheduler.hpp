#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "groundr/catalog.hpp"
#include "groundr/dependence.hpp"
#include "groundr/dsl.hpp"
#include "groundr/layout.hpp"

namespace groundr {

/// Events at the same instant are ordered pop, push, start (causal order).
enum class EventKind { pop, push, start };
std::string to_string(EventKind k);

struct TraceEvent {
  std::int64_t t_us = 0;
  EventKind kind = EventKind::push;
  std::string protocol;
  std::string op;
  std::string op_class;
  std::string resource;  // device that ran the operation
};

/// Lifecycle of one operation instance (one capability step).
struct OpRecord {
  std::string protocol;
  std::string op;
  std::string op_class;
  std::string device;
  std::int64_t push_us = 0;
  std::int64_t start_us = 0;
  std::int64_t pop_us = 0;
};

/// One robot hop carrying an operation's input between devices.
struct Transfer {
  std::string robot;
  std::int64_t begin_us = 0;
  std::int64_t end_us = 0;
  std::string protocol;
  std::string op;
  std::string from;
  std::string to;
};

struct DeviceSlot {
  std::string id;
  int capacity = 1;
};

struct ScheduleTrace {
  std::vector<TraceEvent> events;  // sorted by (t, kind, protocol, step)
  std::vector<OpRecord> ops;       // by (protocol name, step)
  std::vector<Transfer> transfers;
  std::vector<DeviceSlot> devices;  // every layout device, idle ones included
  std::int64_t horizon_us = 0;
};

/// op_type[pre|post] with both resource lists sorted.
std::string op_instance_class(const Operation& op);

struct SimulationOptions {
  /// FCFS breaks every tie explicitly, so the seed does not change its
  /// outcome; it is carried for other dispatch strategies.
  std::uint64_t seed = 0;
  /// Protocols admitted concurrently (name order); 0 = unlimited.
  std::size_t max_parallel = 0;
  ExecOptions exec;
};

/// Discrete-event FCFS execution of `protocols` on `l`. An operation is
/// pushed when all its producers have popped; ready operations claim the
/// earliest-freed capable device in push order, ties by (protocol name,
/// step); inputs crossing an associated connection ride the robot, which
/// carries one transfer at a time. Throws InfeasibleError if the corpus is
/// not executable on `l`.
ScheduleTrace simulate(const Layout& l, const Corpus& protocols, const Catalog& cat,
                       const SimulationOptions& opt = {});

inline double to_seconds(std::int64_t us) { return static_cast<double>(us) / 1e6; }
std::int64_t to_microseconds(double seconds);

double makespan(const ScheduleTrace& tr);
/// Push plus pop events with timestamp in [0, window].
double throughput(const ScheduleTrace& tr, double window_s);
/// Mean pop - push over operation instances, seconds; 0 for an empty trace.
double response_time(const ScheduleTrace& tr);
/// Mean over devices of occupied slot-time within [0, window] divided by
/// capacity * window.
double resource_utilization(const ScheduleTrace& tr, double window_s);
/// Time-averaged share of operation classes whose active queue is empty
/// within [0, window].
double empty_active_fraction(const ScheduleTrace& tr, double window_s);

std::string trace_to_jsonl(const ScheduleTrace& tr);

/// One instance of the cheapest type per required capability (instances
/// shared when capabilities resolve to the same type), with a grouped
/// connection for every cross-device dependency direction in `c`.
Layout minimal_layout(const Corpus& c, const Catalog& cat);

/// Medoids of m clusters over normalized op-type frequency vectors (L1),
/// seeded initialization, swap refinement; ties by protocol name. Returned
/// in name order.
Corpus sample_representatives(const Corpus& c, std::size_t m, std::uint64_t seed);

}  // namespace groundr
