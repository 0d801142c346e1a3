#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcoord/trace.hpp"

namespace pcoord {

struct Distribution {
  long count = 0;
  double mean = 0.0;
  double min = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;

  static Distribution of(std::vector<double> values);
};

struct QueueStats {
  std::string path;
  int max = 0;
  double mean = 0.0;
  std::vector<int> series;  // waiting robots per slot
};

struct Metrics {
  std::string name;
  std::uint64_t seed = 0;
  std::string status;
  int slots = 0;
  long spawned = 0;
  long accepted = 0;
  long exited = 0;
  long requests = 0;
  long rejections = 0;
  double throughput = 0.0;  // exits per slot
  Distribution travel_time;  // slots from x_entry to exit
  Distribution acceptance_latency;  // slots from first request to accept
  std::vector<QueueStats> queues;
  // Controls of accepted robots between x_entry and x_exit.
  long in_area_controls = 0;
  long in_area_full_throttle = 0;
  std::vector<int> occupancy;  // accepted robots per slot

  double full_throttle_fraction() const;
};

// Pure function of the record stream.
class MetricsCollector : public TraceSink {
 public:
  void on_header(const TraceHeader& h) override;
  void on_slot(const SlotRecord& s) override;
  void on_footer(const TraceFooter& f) override;
  const Metrics& metrics() const { return metrics_; }

 private:
  TraceHeader header_;
  std::map<std::string, std::size_t> path_index_;
  std::map<RobotId, int> entered_;
  std::map<RobotId, int> requested_;
  std::vector<double> travel_;
  std::vector<double> latency_;
  Metrics metrics_;
};

nlohmann::ordered_json metrics_to_json(const Metrics& m);
// Human-readable summary; `chart` appends a per-slot occupancy and queue
// chart.
std::string summary_text(const Metrics& m, bool chart);

}  // namespace pcoord
