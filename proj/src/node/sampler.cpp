#include "bdl/node/sampler.hpp"

#include "bdl/core/validate.hpp"

namespace bdl::node {

CycleResult sample_cycle(const std::string& node_id, std::span<const std::unique_ptr<SensorDriver>> drivers,
                         Timestamp now) {
  CycleResult out;
  out.record.id = make_record_id(node_id, now);
  for (const auto& driver : drivers) {
    if (!driver->active()) continue;
    const auto& spec = driver->spec();
    std::optional<double> value;
    try {
      double v = driver->read(now);
      if (auto why = check_reading(spec, v)) {
        out.errors.push_back(sensor_fault(node_id, now, spec.name, *why));
      } else {
        value = v;
      }
    } catch (const std::exception& e) {
      out.errors.push_back(sensor_fault(node_id, now, spec.name, e.what()));
    }
    out.record.readings.insert_or_assign(spec.name, value);
  }
  if (out.record.readings.empty()) throw ValidationError("sample cycle needs at least one active sensor");
  return out;
}

}  // namespace bdl::node
