/*
 Copyright 2026 The dsopf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef DSOPF_UNITS_HPP
#define DSOPF_UNITS_HPP

namespace dsopf {

// Per-unit system of a single-phase-equivalent feeder.
//   power:      MW, MVar       / s_base
//   voltage^2:  kV^2           / v_base^2
//   impedance:  Ohm            / (v_base^2 / s_base)
//   current^2:  kA^2           / (s_base / v_base)^2
struct PerUnitBase {
  double s_base_mva = 1.0;
  double v_base_kv = 1.0;

  double impedance_base() const { return v_base_kv * v_base_kv / s_base_mva; }
  double current_base() const { return s_base_mva / v_base_kv; }

  double power_to_pu(double mw) const { return mw / s_base_mva; }
  double power_from_pu(double pu) const { return pu * s_base_mva; }

  double voltage_sq_to_pu(double kv2) const { return kv2 / (v_base_kv * v_base_kv); }
  double voltage_sq_from_pu(double pu) const { return pu * v_base_kv * v_base_kv; }

  double impedance_to_pu(double ohm) const { return ohm / impedance_base(); }
  double impedance_from_pu(double pu) const { return pu * impedance_base(); }

  double current_sq_to_pu(double ka2) const {
    const double ib = current_base();
    return ka2 / (ib * ib);
  }
  double current_sq_from_pu(double pu) const {
    const double ib = current_base();
    return pu * ib * ib;
  }

  // q_s multiplies v (kV^2) and yields MVar.
  double shunt_to_pu(double mvar_per_kv2) const {
    return mvar_per_kv2 * v_base_kv * v_base_kv / s_base_mva;
  }
  double shunt_from_pu(double pu) const {
    return pu * s_base_mva / (v_base_kv * v_base_kv);
  }
};

}  // namespace dsopf

#endif  // DSOPF_UNITS_HPP
