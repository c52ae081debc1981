#include "pfc/cavity_physics.hpp"

#include <cmath>
#include <stdexcept>

namespace pfc {

void CavityParams::validate() const {
  if (!(g0 > 0.0 && kappa > 0.0 && gamma > 0.0))
    throw std::invalid_argument("cavity: g0, kappa, gamma must be positive");
  if (!(g0 > kappa && g0 > gamma))
    throw std::invalid_argument("cavity: strong coupling requires g0 > kappa and g0 > gamma");
  if (!(mode_waist > 0.0 && probe_wavelength > 0.0 && trap_wavelength > 0.0 && cavity_length > 0.0))
    throw std::invalid_argument("cavity: all lengths must be positive");
  if (!(trap_wavelength > probe_wavelength))
    throw std::invalid_argument("cavity: trap must be red-detuned (trap_wavelength > probe_wavelength)");
  if (!(empty_detect_rate > 0.0 && max_scatter_rate > 0.0))
    throw std::invalid_argument("cavity: detection and scattering rates must be positive");
}

void TrapParams::validate() const {
  if (!(depth > 0.0)) throw std::invalid_argument("trap: depth must be positive");
  if (!(waist > 0.0)) throw std::invalid_argument("trap: waist must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("trap: wavelength must be positive");
  if (!(atom_mass > 0.0)) throw std::invalid_argument("trap: atom_mass must be positive");
  const TrapFrequencies f = derive_trap_frequencies(*this);
  if (!(f.omega_axial >= 10.0 * f.omega_radial))
    throw std::invalid_argument("trap: axial frequency must exceed radial by >= 10x");
}

void NoiseModel::validate() const {
  if (!(kick_scale >= 0.0)) throw std::invalid_argument("noise: kick_scale must be >= 0");
  if (!(recoil_momentum > 0.0)) throw std::invalid_argument("noise: recoil_momentum must be positive");
  if (!(axial_extra_damping >= 0.0)) throw std::invalid_argument("noise: axial_extra_damping must be >= 0");
}

double coupling_at(const Vec3& pos, const CavityParams& c) {
  const double r2 = pos.x * pos.x + pos.y * pos.y;
  const double w2 = c.mode_waist * c.mode_waist;
  return c.g0 * std::exp(-r2 / w2) * std::cos(two_pi * pos.z / c.probe_wavelength);
}

double transmission(double g, const CavityParams& c) {
  const double kg = c.kappa * c.gamma;
  const double u = kg / (kg + g * g);
  return u * u;
}

double scattering_rate(double g, const CavityParams& c) {
  const double kg = c.kappa * c.gamma;
  const double d = kg + g * g;
  return c.max_scatter_rate * 4.0 * g * g * kg / (d * d);
}

double detection_rate(double g, const CavityParams& c) {
  return c.empty_detect_rate * transmission(g, c);
}

double trap_potential(const Vec3& pos, const TrapParams& t, double mod) {
  const double r2 = pos.x * pos.x + pos.y * pos.y;
  const double w2 = t.waist * t.waist;
  const double cz = std::cos(two_pi * pos.z / t.wavelength);
  return -t.depth * (1.0 + mod) * std::exp(-2.0 * r2 / w2) * cz * cz;
}

Vec3 trap_force(const Vec3& pos, const TrapParams& t, double mod) {
  const double r2 = pos.x * pos.x + pos.y * pos.y;
  const double w2 = t.waist * t.waist;
  const double kz = two_pi / t.wavelength;
  const double cz = std::cos(kz * pos.z);
  const double sz = std::sin(kz * pos.z);
  const double amp = t.depth * (1.0 + mod) * std::exp(-2.0 * r2 / w2);
  const double radial = -4.0 * amp * cz * cz / w2;
  return {radial * pos.x, radial * pos.y, -2.0 * amp * kz * sz * cz};
}

TrapFrequencies derive_trap_frequencies(const TrapParams& t) {
  const double vs = std::sqrt(t.depth / t.atom_mass);
  return {2.0 / t.waist * vs, two_pi / t.wavelength * std::sqrt(2.0) * vs};
}

FieldSample eval_fields(const Vec3& pos, const TrapParams& t, const CavityParams& c) {
  const double r2 = pos.x * pos.x + pos.y * pos.y;
  const double w2 = t.waist * t.waist;
  const double kz = two_pi / t.wavelength;
  const double cz = std::cos(kz * pos.z);
  const double sz = std::sin(kz * pos.z);

  const double gauss_trap = std::exp(-2.0 * r2 / w2);
  // probe-mode Gaussian shares the exponential when the waists coincide
  const double gauss_probe = (t.waist == c.mode_waist)
                                 ? std::sqrt(gauss_trap)
                                 : std::exp(-r2 / (c.mode_waist * c.mode_waist));

  FieldSample s;
  const double amp = t.depth * gauss_trap;
  const double radial = -4.0 * amp * cz * cz / w2;
  s.force_unmod = {radial * pos.x, radial * pos.y, -2.0 * amp * kz * sz * cz};
  s.potential_unmod = -amp * cz * cz;
  s.coupling = c.g0 * gauss_probe * std::cos(two_pi * pos.z / c.probe_wavelength);
  return s;
}

}  // namespace pfc
