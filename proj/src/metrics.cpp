#include "pcoord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace pcoord {

Distribution Distribution::of(std::vector<double> values) {
  Distribution d;
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const std::size_t i = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())) - 1);
    return values[std::min(i, values.size() - 1)];
  };
  d.count = static_cast<long>(values.size());
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  d.min = values.front();
  d.max = values.back();
  d.p50 = quantile(0.5);
  d.p95 = quantile(0.95);
  return d;
}

double Metrics::full_throttle_fraction() const {
  if (in_area_controls == 0) return 1.0;
  return static_cast<double>(in_area_full_throttle) /
         static_cast<double>(in_area_controls);
}

void MetricsCollector::on_header(const TraceHeader& h) {
  header_ = h;
  metrics_ = Metrics{};
  metrics_.name = h.name;
  metrics_.seed = h.seed;
  for (std::size_t i = 0; i < h.paths.size(); ++i) {
    path_index_[h.paths[i].id] = i;
    metrics_.queues.push_back({h.paths[i].id, 0, 0.0, {}});
  }
}

void MetricsCollector::on_slot(const SlotRecord& s) {
  for (const TraceEvent& e : s.events) {
    if (e.type == "spawn") ++metrics_.spawned;
    if (e.type == "request") {
      ++metrics_.requests;
      requested_[e.robot] = s.slot;
    }
    if (e.type == "reject") ++metrics_.rejections;
    if (e.type == "accept") {
      ++metrics_.accepted;
      const auto it = requested_.find(e.robot);
      if (it != requested_.end()) latency_.push_back(s.slot - it->second);
    }
  }
  std::vector<int> waiting(metrics_.queues.size(), 0);
  int occupancy = 0;
  for (const RobotRecord& r : s.robots) {
    const auto pi = path_index_.find(r.path);
    if (pi == path_index_.end()) continue;
    const TracePath& path = header_.paths[pi->second];
    switch (r.status) {
      case RobotStatus::kQueued:
      case RobotStatus::kRequested:
        ++waiting[pi->second];
        break;
      case RobotStatus::kAccepted:
        ++occupancy;
        if (r.x >= path.x_entry && entered_.count(r.id) == 0) {
          entered_[r.id] = s.slot;
        }
        if (r.u && r.x >= path.x_entry && r.x <= path.x_exit) {
          ++metrics_.in_area_controls;
          if (*r.u == header_.kin.u_max) ++metrics_.in_area_full_throttle;
        }
        break;
      case RobotStatus::kExited: {
        ++metrics_.exited;
        const auto it = entered_.find(r.id);
        if (it != entered_.end()) {
          travel_.push_back(s.slot - it->second);
          entered_.erase(it);
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < waiting.size(); ++i) {
    metrics_.queues[i].series.push_back(waiting[i]);
  }
  metrics_.occupancy.push_back(occupancy);
}

void MetricsCollector::on_footer(const TraceFooter& f) {
  metrics_.status = f.status;
  metrics_.slots = f.slots;
  metrics_.throughput =
      f.slots > 0 ? static_cast<double>(metrics_.exited) / f.slots : 0.0;
  metrics_.travel_time = Distribution::of(travel_);
  metrics_.acceptance_latency = Distribution::of(latency_);
  for (QueueStats& q : metrics_.queues) {
    if (q.series.empty()) continue;
    q.max = *std::max_element(q.series.begin(), q.series.end());
    q.mean = std::accumulate(q.series.begin(), q.series.end(), 0.0) /
             static_cast<double>(q.series.size());
  }
}

namespace {

nlohmann::ordered_json to_json(const Distribution& d) {
  return {{"count", d.count}, {"mean", d.mean}, {"min", d.min},
          {"p50", d.p50},     {"p95", d.p95},   {"max", d.max}};
}

}  // namespace

nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = kTraceSchemaVersion;
  j["name"] = m.name;
  j["seed"] = m.seed;
  j["status"] = m.status;
  j["slots"] = m.slots;
  j["spawned"] = m.spawned;
  j["accepted"] = m.accepted;
  j["exited"] = m.exited;
  j["requests"] = m.requests;
  j["rejections"] = m.rejections;
  j["throughput"] = m.throughput;
  j["travel_time"] = to_json(m.travel_time);
  j["acceptance_latency"] = to_json(m.acceptance_latency);
  nlohmann::ordered_json queues = nlohmann::ordered_json::array();
  for (const QueueStats& q : m.queues) {
    queues.push_back({{"path", q.path}, {"max", q.max}, {"mean", q.mean}});
  }
  j["queues"] = std::move(queues);
  j["in_area_controls"] = m.in_area_controls;
  j["full_throttle_fraction"] = m.full_throttle_fraction();
  return j;
}

std::string summary_text(const Metrics& m, bool chart) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "scenario " << m.name << " seed " << m.seed << ": " << m.slots
      << " slots, status " << m.status << '\n';
  out << "robots: " << m.spawned << " spawned, " << m.accepted
      << " accepted, " << m.exited << " exited\n";
  out << "requests: " << m.requests << ", rejections: " << m.rejections
      << '\n';
  out << "throughput: " << m.throughput << " robots/slot\n";
  out << "travel time (slots): mean " << m.travel_time.mean << ", p50 "
      << m.travel_time.p50 << ", p95 " << m.travel_time.p95 << ", max "
      << m.travel_time.max << " (n=" << m.travel_time.count << ")\n";
  out << "acceptance latency (slots): mean " << m.acceptance_latency.mean
      << ", p95 " << m.acceptance_latency.p95 << ", max "
      << m.acceptance_latency.max << '\n';
  out << "full throttle in area: " << m.full_throttle_fraction() << " of "
      << m.in_area_controls << " controls\n";
  for (const QueueStats& q : m.queues) {
    out << "queue " << q.path << ": max " << q.max << ", mean " << q.mean
        << '\n';
  }
  if (chart && !m.occupancy.empty()) {
    constexpr std::size_t kRows = 60;
    const std::size_t bucket =
        std::max<std::size_t>(1, (m.occupancy.size() + kRows - 1) / kRows);
    out << "\nslot      accepted | waiting (max per bucket)\n";
    for (std::size_t b = 0; b < m.occupancy.size(); b += bucket) {
      const std::size_t e = std::min(m.occupancy.size(), b + bucket);
      const int occ =
          *std::max_element(m.occupancy.begin() + b, m.occupancy.begin() + e);
      int wait = 0;
      for (std::size_t k = b; k < e; ++k) {
        int total = 0;
        for (const QueueStats& q : m.queues) total += q.series[k];
        wait = std::max(wait, total);
      }
      out << std::setw(6) << b << "  " << std::setw(4) << occ << ' '
          << std::string(static_cast<std::size_t>(occ), '#') << " | "
          << std::string(static_cast<std::size_t>(wait), '.') << '\n';
    }
  }
  return out.str();
}

}  // namespace pcoord
