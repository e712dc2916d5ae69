#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "dertrack/errors.hpp"

namespace dertrack {

enum class DeviceKind { pv, wt, ess };

// Storage parameters in per-unit power and per-unit-hour energy.
// horizon_h is the energy-constraint lookahead used to convert the SOC
// headroom into a power bound.
struct EssParams {
  double p_ch_max = 0.0;   // max charging magnitude (pu)
  double p_dis_max = 0.0;  // max discharging (pu)
  double eta_c = 1.0;
  double eta_d = 1.0;
  double w_min = 0.0;  // pu*h
  double w_max = 0.0;
  double w_init = 0.0;
  double horizon_h = 1.0;
};

struct DeviceSpec {
  int node = 0;  // 1..n
  DeviceKind kind = DeviceKind::pv;
  double c_p = 3.0;
  double c_q = 1.0;
  double cos_theta = 0.85;  // renewable power-factor limit
  std::optional<EssParams> ess;
};

// Instantaneous availability sample for a renewable (ignored for storage).
struct DeviceSignal {
  double p_av = 0.0;
  double p_av_dot = 0.0;
};

struct RenewableBounds {
  double p_lo = 0.0, p_hi = 0.0;
  double q_lo = 0.0, q_hi = 0.0;
  double p_lo_rate = 0.0, p_hi_rate = 0.0;
  double q_lo_rate = 0.0, q_hi_rate = 0.0;
};

// p in [0, P_av], |q| <= P_av * tan(theta). Bound rates follow dP_av/dt.
RenewableBounds renewable_bounds(const DeviceSpec& dev, double p_av,
                                 double p_av_dot);

// Power box induced by SOC headroom over the configured horizon:
// discharge limit eta_d (W0 - Wmin)/h, charge limit (Wmax - W0)/(eta_c h).
std::pair<double, double> ess_bounds(const EssParams& ess, double w0);

// SOC after holding setpoint p_g for tau_s seconds, clamped to [Wmin, Wmax].
// Discharge (p_g > 0) drains W0 - (p_g/eta_d) tau/3600; charge fills with
// efficiency eta_c.
double ess_soc_step(const EssParams& ess, double w0, double p_g, double tau_s);

// Stacked setpoint box for u = [P_g; Q_g]. Raw bounds: nodes without a
// device have u_min = u_max = 0. Degenerate faces are widened where the box
// is consumed into a problem instance, not here.
struct ControlBox {
  Eigen::VectorXd u_min, u_max;
  Eigen::VectorXd du_min, du_max;
};

// signals[i] pairs with devices[i]; soc[i] likewise (only read for storage).
ControlBox assemble_box(std::span<const DeviceSpec> devices, int node_count,
                        std::span<const DeviceSignal> signals,
                        std::span<const double> soc);

}  // namespace dertrack
