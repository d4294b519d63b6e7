// Linear car-following controller, its equilibrium and linearized gains.
#pragma once

namespace avwave {

/// Constant-time-gap feedback controller with first-order actuation lag:
///   u = k_s (spacing - tau v_self - s_0) + k_v (v_lead - v_self)
///   da/dt = (u - a) / phi
struct ControllerSpec {
    double k_s = 1.0;  ///< spacing gain [1/s^2]
    double k_v = 1.0;  ///< speed-deviation gain [1/s]
    double tau = 1.2;  ///< desired time gap [s]
    double phi = 0.1;  ///< actuation time-lag [s]
    double s_0 = 2.0;  ///< standstill spacing [m]

    /// Throws std::invalid_argument unless k_s > 0, k_v >= 0, tau > 0,
    /// phi > 0, s_0 >= 0 (and all finite).
    void validate() const;
};

/// Linearized feedback gains, all stored as positive magnitudes. The
/// characteristic polynomial is phi s^3 + s^2 + f_self s + f_p and the
/// numerator f_p + f_lead s.
struct LinearGains {
    double f_p = 0.0;     ///< spacing-deviation gain [1/s^2]
    double f_self = 0.0;  ///< self-speed gain [1/s]
    double f_lead = 0.0;  ///< leader-speed gain [1/s]
    double phi = 0.0;     ///< actuation time-lag [s]

    void validate() const;
};

struct Equilibrium {
    double v_e = 15.0;     ///< equilibrium speed [m/s]
    double v_free = 30.0;  ///< free-flow speed limit [m/s]

    /// Requires 0 < v_e < v_free.
    void validate() const;
};

/// s_e = v_e tau + s_0. Throws std::invalid_argument for negative v_e.
double equilibrium_spacing(const ControllerSpec& spec, double v_e);

/// Requires spacing > 0.
double desired_accel(const ControllerSpec& spec, double spacing, double v_self, double v_lead);

/// Exact for the linear controller: f_p = k_s, f_self = k_v + k_s tau,
/// f_lead = k_v.
LinearGains linearize(const ControllerSpec& spec);

}  // namespace avwave
