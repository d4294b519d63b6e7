#include "avwave/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace avwave {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ControllerSpec::validate() const {
    require(std::isfinite(k_s) && k_s > 0.0, "controller: k_s must be > 0");
    require(std::isfinite(k_v) && k_v >= 0.0, "controller: k_v must be >= 0");
    require(std::isfinite(tau) && tau > 0.0, "controller: tau must be > 0");
    require(std::isfinite(phi) && phi > 0.0, "controller: phi must be > 0");
    require(std::isfinite(s_0) && s_0 >= 0.0, "controller: s_0 must be >= 0");
}

void LinearGains::validate() const {
    require(std::isfinite(f_p) && f_p > 0.0, "gains: f_p must be > 0");
    require(std::isfinite(f_self), "gains: f_self must be finite");
    require(std::isfinite(f_lead), "gains: f_lead must be finite");
    require(std::isfinite(phi) && phi > 0.0, "gains: phi must be > 0");
}

void Equilibrium::validate() const {
    require(std::isfinite(v_e) && v_e > 0.0, "equilibrium: v_e must be > 0");
    require(std::isfinite(v_free) && v_free > v_e, "equilibrium: v_free must exceed v_e");
}

double equilibrium_spacing(const ControllerSpec& spec, double v_e) {
    if (!(v_e >= 0.0)) {
        throw std::invalid_argument("equilibrium_spacing: v_e must be >= 0");
    }
    return v_e * spec.tau + spec.s_0;
}

double desired_accel(const ControllerSpec& spec, double spacing, double v_self, double v_lead) {
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("desired_accel: spacing must be > 0");
    }
    return spec.k_s * (spacing - spec.tau * v_self - spec.s_0) + spec.k_v * (v_lead - v_self);
}

LinearGains linearize(const ControllerSpec& spec) {
    spec.validate();
    return LinearGains{
        .f_p = spec.k_s,
        .f_self = spec.k_v + spec.k_s * spec.tau,
        .f_lead = spec.k_v,
        .phi = spec.phi,
    };
}

}  // namespace avwave
