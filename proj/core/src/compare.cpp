#include "trtrom/compare.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

FieldHistory FieldHistory::from(const RunRecord& record) {
  return FieldHistory{record.times, record.temperature, record.energy};
}

std::size_t ErrorReport::nearest(double t) const {
  if (times.empty()) throw DomainError("error report is empty");
  std::size_t best = 0;
  for (std::size_t n = 1; n < times.size(); ++n)
    if (std::abs(times[n] - t) < std::abs(times[best] - t)) best = n;
  return best;
}

double ErrorReport::temperature_at(double t) const { return temperature[nearest(t)]; }
double ErrorReport::energy_at(double t) const { return energy[nearest(t)]; }

ErrorReport compare_runs(const FieldHistory& run, const FieldHistory& reference) {
  const std::size_t n = reference.times.size();
  if (run.times.size() != n || run.temperature.size() != n || run.energy.size() != n ||
      reference.temperature.size() != n || reference.energy.size() != n)
    throw LayoutError("compare: runs have " + std::to_string(run.times.size()) + " and " + std::to_string(n) +
                      " output times");
  ErrorReport out;
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = std::max(1.0, std::abs(reference.times[k]));
    if (std::abs(run.times[k] - reference.times[k]) > 1e-9 * scale)
      throw LayoutError("compare: output time " + std::to_string(k) + " differs between runs");
    const double et = relative_error(run.temperature[k], reference.temperature[k]);
    const double ee = relative_error(run.energy[k], reference.energy[k]);
    out.times.push_back(reference.times[k]);
    out.temperature.push_back(et);
    out.energy.push_back(ee);
    out.max_temperature = std::max(out.max_temperature, et);
    out.max_energy = std::max(out.max_energy, ee);
    if (k > 0) {
      const double dt = reference.times[k] - reference.times[k - 1];
      out.integrated_temperature += dt * et;
      out.integrated_energy += dt * ee;
    }
  }
  return out;
}

ErrorReport compare_runs(const RunRecord& run, const RunRecord& reference) {
  return compare_runs(FieldHistory::from(run), FieldHistory::from(reference));
}

}  // namespace trtrom
