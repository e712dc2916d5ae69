#include "dertrack/devices.hpp"

#include <cmath>
#include <set>

namespace dertrack {

RenewableBounds renewable_bounds(const DeviceSpec& dev, double p_av,
                                 double p_av_dot) {
  if (p_av < 0.0) {
    throw NegativeAvailablePower("available power is negative at node " +
                                 std::to_string(dev.node));
  }
  const double tan_theta =
      std::tan(std::acos(std::clamp(dev.cos_theta, 1e-12, 1.0)));
  RenewableBounds b;
  b.p_lo = 0.0;
  b.p_hi = p_av;
  b.q_hi = p_av * tan_theta;
  b.q_lo = -b.q_hi;
  b.p_hi_rate = p_av_dot;
  b.q_hi_rate = p_av_dot * tan_theta;
  b.q_lo_rate = -b.q_hi_rate;
  return b;
}

std::pair<double, double> ess_bounds(const EssParams& ess, double w0) {
  if (w0 < ess.w_min - 1e-12 || w0 > ess.w_max + 1e-12) {
    throw SocOutOfRange("state of charge outside [w_min, w_max]");
  }
  const double h = ess.horizon_h;
  const double lo = std::max(-ess.p_ch_max, -(ess.w_max - w0) / (ess.eta_c * h));
  const double hi = std::min(ess.p_dis_max, ess.eta_d * (w0 - ess.w_min) / h);
  return {lo, hi};
}

double ess_soc_step(const EssParams& ess, double w0, double p_g,
                    double tau_s) {
  const double hours = tau_s / 3600.0;
  double w = p_g >= 0.0 ? w0 - (p_g / ess.eta_d) * hours
                        : w0 - ess.eta_c * p_g * hours;
  return std::clamp(w, ess.w_min, ess.w_max);
}

ControlBox assemble_box(std::span<const DeviceSpec> devices, int node_count,
                        std::span<const DeviceSignal> signals,
                        std::span<const double> soc) {
  if (signals.size() != devices.size() || soc.size() != devices.size()) {
    throw DimensionMismatch("per-device signal/soc arrays must align");
  }
  const int n = node_count;
  ControlBox box;
  box.u_min = Eigen::VectorXd::Zero(2 * n);
  box.u_max = Eigen::VectorXd::Zero(2 * n);
  box.du_min = Eigen::VectorXd::Zero(2 * n);
  box.du_max = Eigen::VectorXd::Zero(2 * n);

  std::set<int> used;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const DeviceSpec& dev = devices[i];
    if (dev.node < 1 || dev.node > n) {
      throw UnknownNode("device node out of range: " +
                        std::to_string(dev.node));
    }
    if (!used.insert(dev.node).second) {
      throw DuplicateDeviceNode("two devices at node " +
                                std::to_string(dev.node));
    }
    const Eigen::Index ip = dev.node - 1;      // P entry
    const Eigen::Index iq = n + dev.node - 1;  // Q entry
    if (dev.kind == DeviceKind::ess) {
      if (!dev.ess) throw ScenarioError("storage device without parameters");
      const auto [lo, hi] = ess_bounds(*dev.ess, soc[i]);
      box.u_min[ip] = lo;
      box.u_max[ip] = hi;
      // Q stays pinned at zero; SOC is frozen within a step, so rates are 0.
    } else {
      const RenewableBounds rb =
          renewable_bounds(dev, signals[i].p_av, signals[i].p_av_dot);
      box.u_min[ip] = rb.p_lo;
      box.u_max[ip] = rb.p_hi;
      box.du_min[ip] = rb.p_lo_rate;
      box.du_max[ip] = rb.p_hi_rate;
      box.u_min[iq] = rb.q_lo;
      box.u_max[iq] = rb.q_hi;
      box.du_min[iq] = rb.q_lo_rate;
      box.du_max[iq] = rb.q_hi_rate;
    }
  }
  return box;
}

}  // namespace dertrack
