#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcoord/dynamics.hpp"
#include "pcoord/priority.hpp"

namespace pcoord {

inline constexpr int kTraceSchemaVersion = 1;

enum class Regime { kControlled, kBraking };
enum class RobotStatus { kQueued, kRequested, kAccepted, kExited };

std::string to_string(Regime r);
std::string to_string(RobotStatus s);

// Malformed trace input.
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TracePath {
  std::string id;
  double x_entry = 0.0;
  double x_exit = 0.0;
};

struct TraceHeader {
  int schema_version = kTraceSchemaVersion;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string name;
  int n_sub = 16;
  double footprint = 1.0;
  Kinodynamics kin;
  std::optional<int> drain_after;
  std::vector<TracePath> paths;
};

// State at the start of the slot and the control applied during it. Exited
// robots get one final record without control.
struct RobotRecord {
  RobotId id{};
  std::string path;
  double x = 0.0;
  double v = 0.0;
  std::optional<double> u;
  Regime regime = Regime::kControlled;
  RobotStatus status = RobotStatus::kQueued;
};

struct TraceEvent {
  std::string type;  // spawn, request, accept, reject, exit
  RobotId robot{};
};

struct SlotRecord {
  int slot = 0;
  // Priority graph in force during the slot, sorted.
  std::vector<PriorityGraph::Edge> edges;
  std::vector<TraceEvent> events;
  std::vector<RobotRecord> robots;  // sorted by id
};

struct TraceFooter {
  int slots = 0;
  std::string status = "ok";  // ok, violation, liveness
  std::string diagnostic;
};

// Receives a run as it happens.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_header(const TraceHeader& h) = 0;
  virtual void on_slot(const SlotRecord& s) = 0;
  virtual void on_footer(const TraceFooter& f) = 0;
};

struct Trace {
  TraceHeader header;
  std::vector<SlotRecord> slots;
  TraceFooter footer;
};

class TraceCollector : public TraceSink {
 public:
  void on_header(const TraceHeader& h) override { trace_.header = h; }
  void on_slot(const SlotRecord& s) override { trace_.slots.push_back(s); }
  void on_footer(const TraceFooter& f) override { trace_.footer = f; }
  const Trace& trace() const { return trace_; }
  Trace release() { return std::move(trace_); }

 private:
  Trace trace_;
};

// One JSON object per line: header, then per slot a slot line followed by
// its robot lines, then the footer.
class JsonlTraceWriter : public TraceSink {
 public:
  explicit JsonlTraceWriter(std::ostream& out) : out_(out) {}
  void on_header(const TraceHeader& h) override;
  void on_slot(const SlotRecord& s) override;
  void on_footer(const TraceFooter& f) override;

 private:
  std::ostream& out_;
};

// Forwards to several sinks in order.
class TeeSink : public TraceSink {
 public:
  explicit TeeSink(std::vector<TraceSink*> sinks) : sinks_(std::move(sinks)) {}
  void on_header(const TraceHeader& h) override;
  void on_slot(const SlotRecord& s) override;
  void on_footer(const TraceFooter& f) override;

 private:
  std::vector<TraceSink*> sinks_;
};

// Streams a JSONL trace into `sink`. Throws TraceError on schema mismatch.
void read_trace(std::istream& in, TraceSink& sink);
Trace read_trace(std::istream& in);

}  // namespace pcoord
